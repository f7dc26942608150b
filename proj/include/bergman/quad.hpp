#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "bergman/curve.hpp"
#include "bergman/expr.hpp"

namespace bergman {

struct GridSpec {
  double lo = 1.0;
  double hi = 1e6;
  int per_decade = 8;
  std::vector<double> points() const;  // log-spaced, endpoints included
};

struct QuadConfig {
  double cutoff_R = 1.0;  // bump support radius; plateau ends at R/2
  double rel_tol = 1e-7;
  double abs_tol = 1e-300;
  int max_subdivisions = 12;  // adaptive bisection depth per axis
  GridSpec tau_grid{1.0, 1e6, 8};
  GridSpec rho_grid{1e-5, 1e-2, 8};
  double u_box = 3.0;  // outer box for the localization gap
  int threads = 0;     // 0 = hardware concurrency
  void validate() const;
};

struct QuadratureError : std::runtime_error {
  double best_estimate;
  double est_error;
  QuadratureError(const std::string& msg, double best, double err)
      : std::runtime_error(msg), best_estimate(best), est_error(err) {}
};

// C-infinity radial cutoff: 1 on [0, R/2], 0 on [R, inf), built from the
// exp(-1/t) partition step.
double bump(double r, double R);

// L(tau) = int_{R_+^n} e^{-2 tau f(x)} (prod x_j) psi(|x|) dx, evaluated
// in per-axis log coordinates with adaptive nested quadrature.
CurveSample laplace_L(const ModelFunction& f, double tau, const QuadConfig& cfg);

// (2 pi)^n L(tau): the squared norm of the constant function in the
// weighted space over the cutoff region.  Checked against the
// tau^{-2n} lower bound derived from f <= a |x| near the origin.
CurveSample c0_tilde(const ModelFunction& f, double tau, const QuadConfig& cfg);

// The lower-bound constant: c0_tilde(f, tau) >= c0_floor(f, R) * tau^{-2n}
// for tau >= 1.
double c0_floor(const ModelFunction& f, double R);

// Closed-form oracle, full domain (no cutoff).  n = 1: the single
// monomial x^a gives 2 pi Gamma(2/a) / (a (2 tau)^{2/a}).  For n >= 2 a
// single cross monomial diverges on R_+^n, so the vector is read as the
// separable model sum_j x_j^{a_j} and the value is the product of the
// one-dimensional factors (requires every a_j > 0).
double c0_full_monomial(std::span<const long long> alpha, double tau);

// Bergman-transform evaluator: builds the c0 table on cfg.tau_grid once
// (parallel map, merged by index), interpolates monotone-cubically in
// log-log, fits a power-log tail to the last decade, and integrates
//   B(rho) = (1/2pi) int_0^inf e^{-2 rho tau} tau / c0(tau)^2 dtau
// as head [0, tau_min] (direct evaluation) + body (table) + fitted tail.
class BergmanEvaluator {
 public:
  BergmanEvaluator(const ModelFunction& f, const QuadConfig& cfg);
  ~BergmanEvaluator();
  BergmanEvaluator(BergmanEvaluator&&) noexcept;
  CurveSample operator()(double rho) const;
  const std::vector<CurveSample>& table() const;
  // Fitted c0(tau)^2 ~ c tau^{-a} (log tau)^k beyond the table.
  struct TailFit {
    double c = 0, a = 0;
    int k = 0;
    double drift = 0;
  };
  const TailFit& tail() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

CurveSample bergman_B(const ModelFunction& f, double rho, const QuadConfig& cfg);

// Z(s) = int f(x)^s (prod x_j) psi(|x|) dx.  Requires s > -2/d + 0.005;
// the integrand is evaluated through log f so that deep subnormal
// regions stay finite.
CurveSample zeta_Z(const ModelFunction& f, double s, const QuadConfig& cfg);

// Distribution function G(u) = int_{f < u} (prod x_j) psi(|x|) dx and its
// derivative H = dG/du (central differences, one Richardson step).
double fiber_G(const ModelFunction& f, double u, const QuadConfig& cfg);
CurveSample fiber_H(const ModelFunction& f, double u, const QuadConfig& cfg);

// Pipeline cross-checks: reconstruct the Laplace integral and the zeta
// function from the fiber density.
CurveSample fiber_laplace(const ModelFunction& f, double tau, const QuadConfig& cfg);
CurveSample fiber_mellin(const ModelFunction& f, double s, const QuadConfig& cfg);

// e(tau) = int_{[0,U]^n} e^{-2 tau f} (prod x_j) (1 - psi(|x|)) dx >= 0,
// the mass removed by the cutoff.
double localization_gap(const ModelFunction& f, double tau, double u_box,
                        const QuadConfig& cfg);

// Grid infimum of f outside the plateau ball, the decay-rate constant
// for the localization gap.
double infimum_outside_plateau(const ModelFunction& f, double R, double u_box);

}  // namespace bergman
