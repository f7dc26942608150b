#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "bergman/expr.hpp"
#include "bergman/fixtures.hpp"

using namespace bergman;

namespace {

bool same_model(const ModelFunction& a, const ModelFunction& b) {
  if (a.dim != b.dim || a.monomials.size() != b.monomials.size() ||
      a.flats.size() != b.flats.size())
    return false;
  for (size_t i = 0; i < a.monomials.size(); ++i)
    if (a.monomials[i].coeff != b.monomials[i].coeff ||
        a.monomials[i].alpha != b.monomials[i].alpha)
      return false;
  for (size_t i = 0; i < a.flats.size(); ++i)
    if (a.flats[i].coeff != b.flats[i].coeff || a.flats[i].beta != b.flats[i].beta)
      return false;
  return true;
}

// Random grammar-valid model: positive coefficients, even exponents.
ModelFunction random_model(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dim_d(1, 3), nmono(1, 3), nflat(0, 2), e(0, 4),
      c(1, 9);
  int n = dim_d(rng);
  std::string text;
  int monos = nmono(rng);
  for (int i = 0; i < monos; ++i) {
    if (i) text += " + ";
    text += std::to_string(c(rng));
    bool any = false;
    for (int j = 0; j < n; ++j) {
      int ej = 2 * e(rng);
      if (ej == 0) continue;
      text += "*x" + std::to_string(j + 1) + "^" + std::to_string(ej);
      any = true;
    }
    if (!any) text += "*x1^2";
  }
  int flats = nflat(rng);
  for (int i = 0; i < flats; ++i) {
    int j = std::uniform_int_distribution<int>(1, n)(rng);
    text += " + exp(-1/(x" + std::to_string(j) + "^" + std::to_string(1 + e(rng)) + "))";
  }
  return parse_model(text);
}

}  // namespace

TEST_CASE("parsing the reference examples") {
  ModelFunction f = parse_model("x1^6 + x1^2*x2^4 + exp(-1/(x2^2))");
  CHECK(f.dim == 2);
  REQUIRE(f.monomials.size() == 2);
  CHECK(f.monomials[0].alpha == std::vector<long long>{2, 4});  // lexicographic
  CHECK(f.monomials[1].alpha == std::vector<long long>{6, 0});
  REQUIRE(f.flats.size() == 1);
  CHECK(f.flats[0].beta == std::vector<Rat>{Rat(0), Rat(2)});

  ModelFunction g = parse_model("x1^2");
  CHECK(g.dim == 1);
  CHECK(g.monomials.size() == 1);
  CHECK(g.flats.empty());
}

TEST_CASE("rejected inputs") {
  CHECK_THROWS_AS(parse_model("exp(-1/(x1^2))"), ParseError);  // all flat
  CHECK_THROWS_AS(parse_model("x1^3"), ParseError);            // odd exponent
  CHECK_THROWS_AS(parse_model("x1^2 + x2^1"), ParseError);
  CHECK_THROWS_AS(parse_model("0*x1^2"), ParseError);  // nonpositive coefficient
  CHECK_THROWS_AS(parse_model("-2*x1^2"), ParseError);
  CHECK_THROWS_AS(parse_model("3"), ParseError);  // constant term
  CHECK_THROWS_AS(parse_model(""), ParseError);
  CHECK_THROWS_AS(parse_model("x1^2 + exp(-1/(x1^0))"), ParseError);  // zero flat vector
  CHECK_THROWS_AS(parse_model("x1^2 - x2^2"), ParseError);
  CHECK_THROWS_AS(parse_model("x1^2 + exp(-2/(x1^2))"), ParseError);
  CHECK_THROWS_AS(parse_model("x0^2"), ParseError);  // indices start at 1

  try {
    parse_model("x1^2 + x2^3");
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(e.position >= 7);  // reported at the offending term
  }
}

TEST_CASE("duplicate terms merge") {
  ModelFunction f = parse_model("x1^2 + x1^2");
  REQUIRE(f.monomials.size() == 1);
  CHECK(f.monomials[0].coeff == Rat(2));
  ModelFunction g = parse_model("exp(-1/(x1^2)) + x1^2 + 3*exp(-1/(x1^2))");
  REQUIRE(g.flats.size() == 1);
  CHECK(g.flats[0].coeff == Rat(4));
}

TEST_CASE("rational and decimal coefficients") {
  ModelFunction f = parse_model("3/2*x1^2 + 0.25*x1^4");
  CHECK(f.monomials[0].coeff == Rat(3, 2));
  CHECK(f.monomials[1].coeff == Rat(1, 4));
  CHECK(parse_rational("8/6") == Rat(4, 3));
  CHECK(to_string(Rat(8, 6)) == "4/3");
}

TEST_CASE("evaluation matches direct arithmetic") {
  ModelFunction f = parse_model("x1^6 + x1^2*x2^4 + exp(-1/(x2^2))");
  double x[2] = {1.0, 1.0};
  CHECK(evaluate(f, x) == doctest::Approx(2.0 + std::exp(-1.0)).epsilon(1e-15));

  ModelFunction g = parse_model("x1^2");
  double zero[1] = {0.0};
  CHECK(evaluate(g, zero) == 0.0);

  // Flat terms vanish exactly on their axis.
  ModelFunction h = parse_model("x1^2 + exp(-1/(x2^2))");
  double onaxis[2] = {5.0, 0.0};
  CHECK(evaluate(h, onaxis) == 25.0);
}

TEST_CASE("canonical render round-trips") {
  for (const auto& fx : corpus()) {
    ModelFunction f = parse_model(fx.model);
    ModelFunction g = parse_model(render(f));
    CHECK(same_model(f, g));
    CHECK(render(f) == render(g));
  }
  CHECK(render(parse_model("2*x2^2*x1^2 + x1^6")) == "2*x1^2*x2^2 + x1^6");
}

TEST_CASE("evaluate is monotone in each coordinate") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coord(0.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    ModelFunction f = random_model(rng);
    std::vector<double> x(f.dim);
    for (auto& v : x) v = coord(rng);
    double base = evaluate(f, x);
    for (int j = 0; j < f.dim; ++j) {
      std::vector<double> y = x;
      y[j] += 0.37;
      CHECK(evaluate(f, y) >= base);
    }
  }
}

TEST_CASE("flat terms sink below every power") {
  for (int N : {1, 4, 8}) {
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 2; k <= 10; ++k) {
      double x = std::pow(2.0, -k);
      double flat = std::exp(-1.0 / (x * x));
      double ratio = flat / std::pow(x, N);
      CHECK(ratio <= prev);
      prev = ratio;
    }
    CHECK(prev < 1e-12);
  }
}

TEST_CASE("coefficient scaling is linear") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coord(0.0, 1.5);
  for (int trial = 0; trial < 20; ++trial) {
    ModelFunction f = random_model(rng);
    ModelFunction g = scale_coefficients(f, Rat(7, 2));
    std::vector<double> x(f.dim);
    for (auto& v : x) v = coord(rng);
    CHECK(evaluate(g, x) == doctest::Approx(3.5 * evaluate(f, x)).epsilon(1e-13));
  }
}

TEST_CASE("log-coordinate evaluation agrees with the direct path") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> tdist(-0.5, 20.0);
  for (int trial = 0; trial < 40; ++trial) {
    ModelFunction f = random_model(rng);
    std::vector<double> t(f.dim), x(f.dim);
    for (int j = 0; j < f.dim; ++j) {
      t[j] = tdist(rng);
      x[j] = std::exp(-t[j]);
    }
    double direct = evaluate(f, x);
    double via_log = std::exp(log_evaluate_logcoord(f, t));
    CHECK(via_log == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("log-coordinate evaluation survives deep underflow") {
  ModelFunction f = parse_model("x1^6*x2^4 + x1^2*x2^8");
  double t[2] = {200.0, 300.0};  // every term underflows in double
  double lv = log_evaluate_logcoord(f, t);
  CHECK(std::isfinite(lv));
  // dominant term has alpha=(6,4): -<alpha,t> = -2400 (the other is -2800)
  CHECK(lv == doctest::Approx(-2400.0).epsilon(1e-12));
}

TEST_CASE("positivity away from the origin") {
  CHECK(positive_away_from_origin(parse_model("x1^2")));
  CHECK(positive_away_from_origin(parse_model("x1^6 + x1^2*x2^4 + exp(-1/(x2^2))")));
  CHECK_FALSE(positive_away_from_origin(parse_model("x1^6 + x1^2*x2^4")));
  CHECK(positive_away_from_origin(parse_model("x1^2 + x2^2")));
  CHECK_FALSE(
      positive_away_from_origin(monomial_part(parse_model("x1^2 + exp(-1/(x2^2))"))));
}

TEST_CASE("coordinate permutation relabels exponents") {
  ModelFunction f = parse_model("x1^6 + x1^2*x2^4 + exp(-1/(x2^2))");
  int perm[2] = {1, 0};
  ModelFunction g = permute_coordinates(f, perm);
  CHECK(render(g) == "x2^6 + x1^4*x2^2 + exp(-1/(x1^2))");
  double x[2] = {0.7, 1.3};
  double y[2] = {1.3, 0.7};
  CHECK(evaluate(g, y) == doctest::Approx(evaluate(f, x)).epsilon(1e-14));
}

TEST_CASE("axis powers for the upper sandwich bound") {
  ModelFunction f = parse_model("x1^6 + x1^2*x2^4");
  ModelFunction g = add_axis_powers(f, 8);
  CHECK(render(g) == "x2^8 + x1^2*x2^4 + x1^6 + x1^8");
}
