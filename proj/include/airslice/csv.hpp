#pragma once

#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace airslice {

/// Numeric cell with 10 significant digits, the precision used in every CSV.
std::string csv_num(double v);

/// Quotes a field when it contains a comma, quote or newline.
std::string csv_field(std::string_view s);

/// Writes the provenance comment lines, then a header row, then rows.
class CsvWriter {
 public:
  CsvWriter(std::ostream& os, std::uint64_t config_hash, std::uint64_t seed, std::vector<std::string> header);

  void row(const std::vector<std::string>& cells);

 private:
  std::ostream& os_;
  std::size_t width_;
};

}  // namespace airslice
