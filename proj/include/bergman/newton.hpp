#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bergman/expr.hpp"
#include "bergman/polytope.hpp"

namespace bergman {

// Everything the asymptotic laws need from the polyhedron of f:
//   d           Newton distance, smallest t with (t,...,t) in the hull
//   m           multiplicity, codimension of the principal face
//   rho[j]      axis intercepts min{t : t e_j in the hull}; nullopt = infinite
//   rho_max     largest intercept; equals the boundary contact order of the
//               associated model domain, so it doubles as the type invariant
struct NewtonData {
  int dim = 0;
  NewtonPolyhedron P;
  Rat d;
  RVec p_diag;
  Face principal_face;
  int m = 0;
  bool principal_compact = false;
  bool convenient = false;
  std::vector<std::optional<Rat>> rho;
  std::optional<Rat> rho_max;
  std::vector<MonomialTerm> principal_part;
};

NewtonData newton_data(const ModelFunction& f);

// Restriction of f to a compact face: the terms whose exponent vector
// lies on the face.  Quasi-homogeneous for every defining pair.
struct GammaPart {
  Face face;
  std::vector<MonomialTerm> terms;
};

GammaPart gamma_part(const ModelFunction& f, const Face& face);

// max over samples of |l g(x) - sum_j a_j x_j d_j g(x)| / (1 + |l g(x)|)
// over every defining pair of the face.  Zero up to rounding for genuine
// gamma-parts; the pair-explicit overload is the negative-control entry.
double euler_residual(const GammaPart& g, std::span<const std::vector<double>> samples);
double euler_residual(const std::vector<MonomialTerm>& terms, const ValidPair& pair,
                      std::span<const std::vector<double>> samples);

// Real polynomial in the radial variables with unconstrained signs; only
// used by the sampled nondegeneracy path and by tests.
struct RadialPoly {
  int dim = 0;
  std::vector<std::pair<double, IVec>> terms;
};

enum class NondegVerdict {
  nondegenerate_certified_by_positivity,
  nondegenerate_sampled,
  degenerate_witness,
};

struct NondegReport {
  NondegVerdict verdict;
  std::vector<double> witness;  // filled for degenerate_witness
  int faces_checked = 0;
  int faces_certified = 0;
};

// For every compact face: certify positivity analytically when the
// gamma-part is a sum of positive even monomials (always the case for
// grammar-valid models), otherwise search sign-orthant grids and seeded
// random points for a common zero of the gradient.
NondegReport check_nondegenerate(const ModelFunction& f, int sample_count,
                                 std::uint64_t seed = 0);
NondegReport check_nondegenerate(const RadialPoly& poly, int sample_count,
                                 std::uint64_t seed = 0);

}  // namespace bergman
