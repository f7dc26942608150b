#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "bergman/curve.hpp"
#include "bergman/newton.hpp"
#include "bergman/quad.hpp"

namespace bergman {

enum class LawVariable { rho_to_0, tau_to_inf, u_to_0, s_to_pole };
enum class LawTarget { bergman, c0, laplace, fiber, zeta_pole };

// C * x^{-a} (log 1/x)^k as x -> 0, or C * x^{-a} (log x)^k as x -> inf;
// for zeta_pole, a is the pole location -2/d and k the pole order m.
struct AsymptoticLaw {
  std::optional<double> C;  // unfitted until measured
  Rat a;
  int k = 0;
  LawVariable variable = LawVariable::rho_to_0;
};

// Thrown when a law is requested for a model whose principal face is
// noncompact: the blow-up rate is then not determined by the polyhedron
// alone (the flat terms can enter), so no prediction is made.
struct NoncompactPrincipalFace : std::runtime_error {
  NoncompactPrincipalFace()
      : std::runtime_error(
            "principal face is noncompact: the polyhedron does not determine "
            "the leading law; only raw curves are available") {}
};

AsymptoticLaw predicted_law(const NewtonData& nd, LawTarget target);

struct FitReport {
  AsymptoticLaw law;  // C filled with the final-decade median
  double drift = 0;   // relative spread of the compensated ratio
  double threshold = 0;
  bool passed = false;
  std::pair<size_t, size_t> samples_used{0, 0};  // index range of the final decade
};

// Compensated-ratio verification of the leading term: r_i = v_i x^a / log^k,
// C = median r over the final decade, drift = (max-min)/median there.
// Default threshold 0.05 for pure power laws, 0.15 with log corrections.
FitReport compensated_ratio_fit(std::span<const CurveSample> samples,
                                AsymptoticLaw law,
                                std::optional<double> threshold = std::nullopt);

// Blind identification: the local log-log slope satisfies s = a + k/X, so
// two window slopes at mean positions X1 < X2 recover a exactly for a
// pure power-log law; k then minimizes the compensated drift with a
// snapped to a small-denominator rational.
struct ScanResult {
  double a_est = 0;
  double a_unc = 0;
  Rat a_snapped;
  int k_est = 0;
};
ScanResult exponent_scan(std::span<const CurveSample> samples, LawVariable variable);

struct PoleProbeReport {
  Rat location;  // -2/d
  int order = 0;
  std::vector<CurveSample> g;  // abscissa = delta, value = delta^m Z(-2/d + delta)
  double spread = 0;
  double c_Z_estimate = 0;
  bool passed = false;
};

// delta^m Z(-2/d + delta) over delta in {0.2, 0.1, 0.05, 0.025, 0.0125};
// passes when positive with relative spread <= threshold over the last
// three probes.
PoleProbeReport pole_order_probe(const ModelFunction& f, const NewtonData& nd,
                                 const QuadConfig& cfg, double threshold = 0.10,
                                 int order_override = 0);

struct SandwichReport {
  int M = 0;             // axis power 2M added to the upper bound
  double R_used = 0;     // cutoff on which the pointwise ordering holds
  bool face_preserved = false;
  bool pointwise_ok = false;
  bool ordering_ok = false;
  double min_margin = 0;  // worst slack in the curve ordering, in est_error units
  std::vector<CurveSample> lower, middle, upper;
  FitReport lower_fit, upper_fit;
  bool passed = false;
};

// Squeeze check: with F0 the monomial part of f and F1 = F0 + sum x_j^{2M},
// the three transforms must be ordered at every grid point and both
// bounds must follow the law predicted by the shared principal face.
// M = 0 searches the smallest even M in {2,...,64} that preserves the
// principal face exactly.
SandwichReport sandwich_check(const ModelFunction& f, int M, const QuadConfig& cfg);

}  // namespace bergman
