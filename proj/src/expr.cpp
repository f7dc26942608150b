#include "bergman/expr.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>

namespace bergman {

namespace {

struct Lexer {
  std::string_view text;
  size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  bool eof() {
    skip_ws();
    return pos >= text.size();
  }
  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }
  bool accept(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  void expect(char c, const char* what) {
    if (!accept(c)) throw ParseError(pos, std::string("expected '") + c + "' " + what);
  }
  bool accept_word(std::string_view w) {
    skip_ws();
    if (text.substr(pos, w.size()) == w) {
      pos += w.size();
      return true;
    }
    return false;
  }

  // Unsigned rational literal: digits, digits/digits, or digits.digits.
  Rat number() {
    skip_ws();
    size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == start) throw ParseError(pos, "expected a number");
    if (pos < text.size() && (text[pos] == '.' || text[pos] == '/')) {
      char sep = text[pos];
      size_t mid = ++pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      if (pos == mid) throw ParseError(pos, sep == '.' ? "expected decimal digits" : "expected a denominator");
    }
    return parse_rational(text.substr(start, pos - start));
  }

  // Variable reference "x<k>", k >= 1.  Returns the 0-based index.
  int variable() {
    skip_ws();
    size_t start = pos;
    if (pos >= text.size() || text[pos] != 'x')
      throw ParseError(pos, "expected a variable like x1");
    ++pos;
    size_t d0 = pos;
    long long k = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      k = k * 10 + (text[pos] - '0');
      if (k > 64) throw ParseError(start, "variable index out of range");
      ++pos;
    }
    if (pos == d0 || k < 1) throw ParseError(start, "expected a variable index >= 1");
    return static_cast<int>(k - 1);
  }

  bool at_variable() {
    skip_ws();
    return pos + 1 < text.size() && text[pos] == 'x' &&
           std::isdigit(static_cast<unsigned char>(text[pos + 1]));
  }
  bool at_digit() {
    skip_ws();
    return pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]));
  }
};

struct RawTerm {
  size_t pos;
  Rat coeff;
  bool flat;
  std::map<int, Rat> exponents;  // variable index -> exponent
};

// (var ['^' rational])+, '*' optional between factors.
void parse_factors(Lexer& lx, RawTerm& term) {
  bool any = false;
  for (;;) {
    if (!lx.at_variable()) break;
    size_t vpos = lx.pos;
    int idx = lx.variable();
    Rat e = 1;
    if (lx.accept('^')) e = lx.number();
    if (e < 0) throw ParseError(vpos, "negative exponent");
    term.exponents[idx] += e;
    any = true;
    size_t save = lx.pos;
    if (lx.accept('*')) {
      if (!lx.at_variable()) {
        lx.pos = save;  // '*' belongs to an outer context
        break;
      }
    }
  }
  if (!any) throw ParseError(lx.pos, "expected at least one variable factor");
}

RawTerm parse_term(Lexer& lx) {
  RawTerm term;
  term.pos = lx.pos;
  term.coeff = 1;
  term.flat = false;
  bool had_coeff = false;
  if (lx.at_digit()) {
    size_t cpos = lx.pos;
    term.coeff = lx.number();
    if (term.coeff <= 0) throw ParseError(cpos, "nonpositive coefficient");
    had_coeff = true;
    lx.accept('*');
  }
  lx.skip_ws();
  if (lx.peek() == '-') throw ParseError(lx.pos, "negative terms are not allowed");
  if (lx.accept_word("exp")) {
    term.flat = true;
    lx.expect('(', "after exp");
    lx.expect('-', "inside exp(-1/(...))");
    lx.skip_ws();
    if (lx.pos >= lx.text.size() || lx.text[lx.pos] != '1')
      throw ParseError(lx.pos, "flat terms must have the form exp(-1/(...))");
    ++lx.pos;
    lx.expect('/', "inside exp(-1/(...))");
    bool inner_paren = lx.accept('(');
    parse_factors(lx, term);
    if (inner_paren) lx.expect(')', "closing the flat monomial");
    lx.expect(')', "closing exp(...)");
  } else if (lx.at_variable()) {
    parse_factors(lx, term);
  } else if (had_coeff) {
    throw ParseError(term.pos, "constant terms are not allowed");
  } else {
    throw ParseError(lx.pos, "expected a term");
  }
  return term;
}

}  // namespace

ModelFunction parse_model(std::string_view text) {
  Lexer lx{text};
  std::vector<RawTerm> terms;
  terms.push_back(parse_term(lx));
  while (!lx.eof()) {
    if (!lx.accept('+')) throw ParseError(lx.pos, "expected '+' between terms");
    terms.push_back(parse_term(lx));
  }

  int dim = 0;
  for (const auto& t : terms)
    for (const auto& [idx, e] : t.exponents)
      if (e > 0) dim = std::max(dim, idx + 1);
  if (dim == 0) throw ParseError(0, "model uses no variables");

  ModelFunction f;
  f.dim = dim;
  std::map<std::vector<long long>, Rat> mono;
  std::map<std::vector<Rat>, Rat> flat;
  bool any_monomial = false;
  for (const auto& t : terms) {
    if (t.flat) {
      std::vector<Rat> beta(dim, Rat(0));
      bool positive = false;
      for (const auto& [idx, e] : t.exponents) {
        beta[idx] = e;
        if (e > 0) positive = true;
      }
      if (!positive) throw ParseError(t.pos, "flat term with zero exponent vector");
      flat[beta] += t.coeff;
    } else {
      std::vector<long long> alpha(dim, 0);
      bool nonzero = false;
      for (const auto& [idx, e] : t.exponents) {
        if (denominator(e) != 1)
          throw ParseError(t.pos, "monomial exponents must be integers");
        BigInt n = numerator(e);
        if (n % 2 != 0) throw ParseError(t.pos, "monomial exponents must be even");
        alpha[idx] = n.convert_to<long long>();
        if (alpha[idx] != 0) nonzero = true;
      }
      if (!nonzero) throw ParseError(t.pos, "constant terms are not allowed");
      mono[alpha] += t.coeff;
      any_monomial = true;
    }
  }
  if (!any_monomial)
    throw ParseError(0, "all-flat input: at least one monomial term is required");
  for (auto& [alpha, c] : mono) f.monomials.push_back({c, alpha});
  for (auto& [beta, c] : flat) f.flats.push_back({c, beta});
  return f;
}

namespace {

void render_coeff(std::string& out, const Rat& c) {
  if (c != 1) {
    out += to_string(c);
    out += "*";
  }
}

void render_power(std::string& out, int idx, const std::string& e, bool& first) {
  if (!first) out += "*";
  first = false;
  out += "x" + std::to_string(idx + 1);
  if (e != "1") out += "^" + e;
}

}  // namespace

std::string render(const ModelFunction& f) {
  std::string out;
  bool first_term = true;
  auto sep = [&] {
    if (!first_term) out += " + ";
    first_term = false;
  };
  for (const auto& m : f.monomials) {
    sep();
    render_coeff(out, m.coeff);
    bool first = true;
    for (int j = 0; j < f.dim; ++j)
      if (m.alpha[j] != 0) render_power(out, j, std::to_string(m.alpha[j]), first);
  }
  for (const auto& t : f.flats) {
    sep();
    render_coeff(out, t.coeff);
    out += "exp(-1/(";
    bool first = true;
    for (int j = 0; j < f.dim; ++j)
      if (t.beta[j] != 0) render_power(out, j, to_string(t.beta[j]), first);
    out += "))";
  }
  return out;
}

namespace {

inline double ipow(double x, long long e) {
  double r = 1.0, b = x;
  for (; e > 0; e >>= 1) {
    if (e & 1) r *= b;
    b *= b;
  }
  return r;
}

}  // namespace

double monomial_value(const std::vector<MonomialTerm>& terms, std::span<const double> x) {
  double sum = 0.0;
  for (const auto& m : terms) {
    double v = to_double(m.coeff);
    for (size_t j = 0; j < x.size(); ++j)
      if (m.alpha[j] != 0) v *= ipow(x[j], m.alpha[j]);
    sum += v;
  }
  return sum;
}

void monomial_scaled_gradient(const std::vector<MonomialTerm>& terms,
                              std::span<const double> x, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& m : terms) {
    double v = to_double(m.coeff);
    for (size_t j = 0; j < x.size(); ++j)
      if (m.alpha[j] != 0) v *= ipow(x[j], m.alpha[j]);
    for (size_t j = 0; j < x.size(); ++j)
      if (m.alpha[j] != 0) out[j] += static_cast<double>(m.alpha[j]) * v;
  }
}

double evaluate(const ModelFunction& f, std::span<const double> x) {
  assert(static_cast<int>(x.size()) == f.dim);
  double sum = monomial_value(f.monomials, x);
  for (const auto& t : f.flats) {
    // x^beta == 0 (exactly or by underflow) makes the term exactly 0;
    // flat terms sit below every power, so this loses nothing.
    double xb = 1.0;
    for (int j = 0; j < f.dim; ++j)
      if (t.beta[j] != 0) xb *= std::pow(x[j], to_double(t.beta[j]));
    if (xb <= 0.0) continue;
    sum += to_double(t.coeff) * std::exp(-1.0 / xb);
  }
  return sum;
}

double log_evaluate_logcoord(const ModelFunction& f, std::span<const double> t) {
  assert(static_cast<int>(t.size()) == f.dim);
  // log of each term; monomial: log c - <alpha, t>, flat: log c - e^{<beta, t>}.
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> logs;
  logs.reserve(f.monomials.size() + f.flats.size());
  for (const auto& m : f.monomials) {
    double g = std::log(to_double(m.coeff));
    for (int j = 0; j < f.dim; ++j) g -= static_cast<double>(m.alpha[j]) * t[j];
    logs.push_back(g);
    best = std::max(best, g);
  }
  for (const auto& fl : f.flats) {
    double bt = 0.0;
    for (int j = 0; j < f.dim; ++j) bt += to_double(fl.beta[j]) * t[j];
    double g = std::log(to_double(fl.coeff)) - std::exp(bt);
    logs.push_back(g);
    best = std::max(best, g);
  }
  double acc = 0.0;
  for (double g : logs) acc += std::exp(g - best);
  return best + std::log(acc);
}

ModelFunction scale_coefficients(const ModelFunction& f, const Rat& lambda) {
  ModelFunction g = f;
  for (auto& m : g.monomials) m.coeff *= lambda;
  for (auto& t : g.flats) t.coeff *= lambda;
  return g;
}

ModelFunction permute_coordinates(const ModelFunction& f, std::span<const int> perm) {
  assert(static_cast<int>(perm.size()) == f.dim);
  ModelFunction g;
  g.dim = f.dim;
  for (const auto& m : f.monomials) {
    std::vector<long long> alpha(f.dim);
    for (int j = 0; j < f.dim; ++j) alpha[perm[j]] = m.alpha[j];
    g.monomials.push_back({m.coeff, alpha});
  }
  for (const auto& t : f.flats) {
    std::vector<Rat> beta(f.dim);
    for (int j = 0; j < f.dim; ++j) beta[perm[j]] = t.beta[j];
    g.flats.push_back({t.coeff, beta});
  }
  std::sort(g.monomials.begin(), g.monomials.end(),
            [](const auto& a, const auto& b) { return a.alpha < b.alpha; });
  std::sort(g.flats.begin(), g.flats.end(),
            [](const auto& a, const auto& b) { return a.beta < b.beta; });
  return g;
}

ModelFunction monomial_part(const ModelFunction& f) {
  ModelFunction g = f;
  g.flats.clear();
  return g;
}

ModelFunction add_axis_powers(const ModelFunction& f, long long two_m) {
  assert(two_m > 0 && two_m % 2 == 0);
  ModelFunction g = f;
  for (int j = 0; j < f.dim; ++j) {
    std::vector<long long> alpha(f.dim, 0);
    alpha[j] = two_m;
    auto it = std::find_if(g.monomials.begin(), g.monomials.end(),
                           [&](const MonomialTerm& m) { return m.alpha == alpha; });
    if (it != g.monomials.end())
      it->coeff += 1;
    else
      g.monomials.push_back({Rat(1), alpha});
  }
  std::sort(g.monomials.begin(), g.monomials.end(),
            [](const auto& a, const auto& b) { return a.alpha < b.alpha; });
  return g;
}

bool positive_away_from_origin(const ModelFunction& f) {
  // f vanishes somewhere on {x_j > 0 iff j in J} iff every term uses a
  // variable outside J.  Check all nonempty J.
  for (unsigned mask = 1; mask < (1u << f.dim); ++mask) {
    bool covered = false;
    for (const auto& m : f.monomials) {
      bool inside = true;
      for (int j = 0; j < f.dim && inside; ++j)
        if (m.alpha[j] != 0 && !(mask & (1u << j))) inside = false;
      if (inside) {
        covered = true;
        break;
      }
    }
    for (const auto& t : f.flats) {
      if (covered) break;
      bool inside = true;
      for (int j = 0; j < f.dim && inside; ++j)
        if (t.beta[j] != 0 && !(mask & (1u << j))) inside = false;
      if (inside) covered = true;
    }
    if (!covered) return false;
  }
  return true;
}

}  // namespace bergman
