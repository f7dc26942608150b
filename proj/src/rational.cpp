#include "bergman/rational.hpp"

#include <stdexcept>

namespace bergman {

double to_double(const Rat& r) { return r.convert_to<double>(); }

std::string to_string(const Rat& r) {
  std::string num = numerator(r).str();
  if (denominator(r) == 1) return num;
  return num + "/" + denominator(r).str();
}

Rat parse_rational(std::string_view s) {
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  size_t i = 0;
  bool neg = false;
  if (s[i] == '+' || s[i] == '-') {
    neg = (s[i] == '-');
    ++i;
  }
  auto digits = [&](BigInt& out) {
    size_t start = i;
    out = 0;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') {
      out = out * 10 + (s[i] - '0');
      ++i;
    }
    return i > start;
  };
  BigInt p;
  if (!digits(p)) throw std::invalid_argument("malformed rational literal");
  Rat value(p);
  if (i < s.size() && s[i] == '.') {
    ++i;
    size_t start = i;
    BigInt frac;
    if (!digits(frac)) throw std::invalid_argument("malformed decimal literal");
    BigInt scale = 1;
    for (size_t k = start; k < i; ++k) scale *= 10;
    value = Rat(p * scale + frac, scale);
  } else if (i < s.size() && s[i] == '/') {
    ++i;
    BigInt q;
    if (!digits(q) || q == 0) throw std::invalid_argument("malformed rational literal");
    value = Rat(p, q);
  }
  if (i != s.size()) throw std::invalid_argument("trailing characters in rational literal");
  return neg ? Rat(-value) : value;
}

}  // namespace bergman
