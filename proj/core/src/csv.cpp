#include "meshless/csv.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

#include "meshless/errors.hpp"

namespace meshless::csv {

std::string format(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);  // shortest round-trip form
  return std::string(buf, res.ptr);
}

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    out.emplace_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view field) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw InvalidArgument("cannot parse number '" + std::string(field) + "'");
  }
  return v;
}

long long parse_int(std::string_view field) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw InvalidArgument("cannot parse integer '" + std::string(field) + "'");
  }
  return v;
}

Writer::Writer(std::ostream& os, const std::vector<std::string>& header) : os_(os) {
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (k) os_ << ',';
    os_ << header[k];
  }
  os_ << '\n';
}

}  // namespace meshless::csv
