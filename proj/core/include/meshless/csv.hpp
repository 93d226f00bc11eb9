#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace meshless::csv {

/// Shortest form that still carries 17 significant digits, so values
/// round-trip exactly through text.
std::string format(double v);

std::vector<std::string> split(std::string_view line);
double parse_double(std::string_view field);
long long parse_int(std::string_view field);

/// Writes a fixed header once, then comma-separated rows.
class Writer {
 public:
  Writer(std::ostream& os, const std::vector<std::string>& header);

  template <typename... Fields>
  void row(const Fields&... fields) {
    bool first = true;
    ((write_field(fields, first)), ...);
    os_ << '\n';
  }

 private:
  template <typename T>
  void write_field(const T& v, bool& first) {
    if (!first) os_ << ',';
    first = false;
    if constexpr (std::is_floating_point_v<T>) {
      os_ << format(static_cast<double>(v));
    } else if constexpr (std::is_same_v<T, bool>) {
      os_ << (v ? 1 : 0);
    } else {
      os_ << v;
    }
  }

  std::ostream& os_;
};

}  // namespace meshless::csv
