#include "bergman/fixtures.hpp"

#include <stdexcept>

namespace bergman {

namespace {

std::vector<Fixture> build() {
  std::vector<Fixture> out;
  auto inf = std::optional<Rat>{};

  // Edge principal face, pure power law.
  out.push_back({"edge_infinite_type",
                 "x1^6 + x1^2*x2^4 + exp(-1/(x2^2))",
                 Rat(3), 1, true, false,
                 {Rat(6), inf}, Rat(8, 3), 0});

  // Vertex principal face, single log factor.
  out.push_back({"vertex_infinite_type",
                 "x1^6 + x1^2*x2^2 + exp(-1/(x2^2))",
                 Rat(2), 2, true, false,
                 {Rat(6), inf}, Rat(3), 1});

  // Vertex face with both axes flat.
  out.push_back({"vertex_two_flats",
                 "x1^2*x2^2 + exp(-1/(x1^2)) + exp(-1/(x2^2))",
                 Rat(2), 2, true, false,
                 {inf, inf}, Rat(3), 1});

  // Three variables, vertex face, squared log.
  out.push_back({"vertex_3d",
                 "x1^8 + x2^8 + x1^2*x2^2*x3^2 + exp(-1/(x3^2))",
                 Rat(2), 3, true, false,
                 {Rat(8), Rat(8), inf}, Rat(3), 2});

  // Noncompact principal face: no law is predicted.
  out.push_back({"noncompact_face",
                 "x1^2 + exp(-1/(x2^2))",
                 Rat(2), 1, false, false,
                 {Rat(2), inf}, std::nullopt, std::nullopt});

  // One-variable quadratic, the closed-form anchor.
  out.push_back({"siegel_1d", "x1^2", Rat(2), 1, true, true, {Rat(2)}, Rat(3), 0});

  // Flat-term swap variants: identical polyhedral data.
  out.push_back({"edge_infinite_type_p4",
                 "x1^6 + x1^2*x2^4 + exp(-1/(x2^4))",
                 Rat(3), 1, true, false,
                 {Rat(6), inf}, Rat(8, 3), 0});
  out.push_back({"vertex_two_flats_p4",
                 "x1^2*x2^2 + exp(-1/(x1^4)) + exp(-1/(x2^4))",
                 Rat(2), 2, true, false,
                 {inf, inf}, Rat(3), 1});

  // Internal consistency: a = 2/d + 2 and k = m - 1 whenever a law is
  // attached; a mismatch here is a build error.
  for (const auto& fx : out) {
    if (!fx.law_a) continue;
    if (*fx.law_a != Rat(2) / fx.d + 2 || *fx.law_k != fx.m - 1)
      throw std::logic_error("fixture law is inconsistent with its (d, m)");
  }
  return out;
}

}  // namespace

const std::vector<Fixture>& corpus() {
  static const std::vector<Fixture> fixtures = build();
  return fixtures;
}

const Fixture& fixture(const std::string& name) {
  for (const auto& fx : corpus())
    if (fx.name == name) return fx;
  throw std::invalid_argument("unknown fixture: " + name);
}

}  // namespace bergman
