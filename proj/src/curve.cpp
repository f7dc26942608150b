#include "bergman/curve.hpp"

#include <charconv>

namespace bergman {

std::string fmt_double(double v) {
  char buf[40];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, end);
}

std::string curve_csv(const std::vector<CurveSample>& samples) {
  std::string out = "abscissa,value,est_error\n";
  for (const auto& s : samples) {
    out += fmt_double(s.abscissa);
    out += ',';
    out += fmt_double(s.value);
    out += ',';
    out += fmt_double(s.est_error);
    out += '\n';
  }
  return out;
}

}  // namespace bergman
