#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bergman/rational.hpp"

namespace bergman {

// Canonical corpus entry: a model text plus the polyhedral data it must
// reproduce exactly and, when the principal face is compact, the
// transform exponents (a, k) it must exhibit.
struct Fixture {
  std::string name;
  std::string model;
  Rat d;
  int m = 0;
  bool principal_compact = false;
  bool convenient = false;
  std::vector<std::optional<Rat>> rho;  // nullopt = infinite intercept
  // Blow-up law of the transform at the boundary: value ~ C rho^{-a} log^k.
  std::optional<Rat> law_a;
  std::optional<int> law_k;
};

const std::vector<Fixture>& corpus();
const Fixture& fixture(const std::string& name);

}  // namespace bergman
