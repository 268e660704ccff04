#include "airslice/csv.hpp"

#include <cmath>
#include <fmt/format.h>
#include <stdexcept>

namespace airslice {

std::string csv_num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // folds -0
  return fmt::format("{:.10g}", v);
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvWriter::CsvWriter(std::ostream& os, std::uint64_t config_hash, std::uint64_t seed,
                     std::vector<std::string> header)
    : os_(os), width_(header.size()) {
  os_ << fmt::format("# config_hash: {:016x}\n# seed: {}\n", config_hash, seed);
  for (std::size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << csv_field(header[i]);
  os_ << '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) throw std::logic_error("CSV row width does not match the header");
  for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << csv_field(cells[i]);
  os_ << '\n';
}

}  // namespace airslice
