#pragma once

#include <initializer_list>
#include <iosfwd>
#include <string>
#include <vector>

namespace qosgame {

/// Shortest decimal text that round-trips to the same double ('.' decimal
/// point, no locale). NaN is written as an empty field.
std::string format_double(double value);

std::string format_int(long long value);

/// Comma-separated rows with LF endings. Fields are written verbatim; the
/// values produced here never contain commas or quotes.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> header);

  void row(const std::vector<std::string>& fields);

  std::size_t columns() const noexcept { return columns_; }

 private:
  std::ostream& out_;
  std::size_t columns_;
};

}  // namespace qosgame
