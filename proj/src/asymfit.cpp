#include "bergman/asymfit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bergman {

namespace {

double default_threshold(int k) { return k >= 1 ? 0.15 : 0.05; }

// Samples ordered toward the limit: decreasing abscissa for x -> 0
// variables, increasing for tau -> inf.
std::vector<CurveSample> toward_limit(std::span<const CurveSample> samples,
                                      LawVariable variable) {
  std::vector<CurveSample> s(samples.begin(), samples.end());
  if (variable == LawVariable::tau_to_inf)
    std::sort(s.begin(), s.end(),
              [](const CurveSample& a, const CurveSample& b) { return a.abscissa < b.abscissa; });
  else
    std::sort(s.begin(), s.end(),
              [](const CurveSample& a, const CurveSample& b) { return a.abscissa > b.abscissa; });
  return s;
}

// log-position toward the limit: X = log tau or X = log(1/x).
double limit_coordinate(double abscissa, LawVariable variable) {
  return variable == LawVariable::tau_to_inf ? std::log(abscissa)
                                             : std::log(1.0 / abscissa);
}

// value ~ C x^{-a} (log tau)^k or C x^{-a} (log 1/x)^k toward the limit,
// so r = value * x^a / log^k recovers C.
double compensated_ratio(const CurveSample& s, double a, int k, LawVariable variable) {
  double lr = std::log(s.value) + a * std::log(s.abscissa);
  if (k != 0) {
    double la = limit_coordinate(s.abscissa, variable);
    if (!(la > 0))
      throw std::invalid_argument("log-compensated fits need samples beyond 1");
    lr -= k * std::log(la);
  }
  return std::exp(lr);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double decades_spanned(std::span<const CurveSample> s) {
  double lo = s.front().abscissa, hi = s.front().abscissa;
  for (const auto& p : s) {
    lo = std::min(lo, p.abscissa);
    hi = std::max(hi, p.abscissa);
  }
  return std::log10(hi / lo);
}

}  // namespace

AsymptoticLaw predicted_law(const NewtonData& nd, LawTarget target) {
  if (!nd.principal_compact) throw NoncompactPrincipalFace();
  Rat two_over_d = Rat(2) / nd.d;
  AsymptoticLaw law;
  switch (target) {
    case LawTarget::bergman:
      law.a = two_over_d + 2;
      law.k = nd.m - 1;
      law.variable = LawVariable::rho_to_0;
      break;
    case LawTarget::c0:
    case LawTarget::laplace:
      law.a = two_over_d;
      law.k = nd.m - 1;
      law.variable = LawVariable::tau_to_inf;
      break;
    case LawTarget::fiber:
      law.a = Rat(1) - two_over_d;  // value ~ u^{2/d - 1} log^k
      law.k = nd.m - 1;
      law.variable = LawVariable::u_to_0;
      break;
    case LawTarget::zeta_pole:
      law.a = -two_over_d;  // pole location
      law.k = nd.m;         // pole order
      law.variable = LawVariable::s_to_pole;
      break;
  }
  return law;
}

FitReport compensated_ratio_fit(std::span<const CurveSample> samples, AsymptoticLaw law,
                                std::optional<double> threshold) {
  if (law.variable == LawVariable::s_to_pole)
    throw std::invalid_argument("pole laws are verified by pole_order_probe");
  if (samples.size() < 4) throw std::invalid_argument("too few samples to fit");
  for (const auto& s : samples)
    if (!(s.value > 0)) throw std::invalid_argument("nonpositive samples");
  if (decades_spanned(samples) < 2.0 - 1e-9)
    throw std::invalid_argument("need at least two decades of samples");

  std::vector<CurveSample> s = toward_limit(samples, law.variable);
  const double a = to_double(law.a);

  // Final decade in the limit direction.
  double x_f = s.back().abscissa;
  auto in_final = [&](double x) {
    return law.variable == LawVariable::tau_to_inf ? x >= x_f / 10.0 * (1.0 - 1e-9)
                                                   : x <= x_f * 10.0 * (1.0 + 1e-9);
  };
  size_t first = s.size();
  for (size_t i = 0; i < s.size(); ++i)
    if (in_final(s[i].abscissa)) {
      first = i;
      break;
    }
  if (s.size() - first < 3)
    throw std::invalid_argument("final decade holds too few samples");

  std::vector<double> r;
  for (size_t i = first; i < s.size(); ++i)
    r.push_back(compensated_ratio(s[i], a, law.k, law.variable));
  double med = median(r);
  double drift = (*std::max_element(r.begin(), r.end()) -
                  *std::min_element(r.begin(), r.end())) /
                 med;

  FitReport report;
  report.law = law;
  report.law.C = med;
  report.drift = drift;
  report.threshold = threshold.value_or(default_threshold(law.k));
  report.passed = drift <= report.threshold;
  report.samples_used = {first, s.size() - 1};
  return report;
}

ScanResult exponent_scan(std::span<const CurveSample> samples, LawVariable variable) {
  if (variable == LawVariable::s_to_pole)
    throw std::invalid_argument("pole laws are probed, not scanned");
  if (samples.size() < 7) throw std::invalid_argument("too few samples to scan");
  if (decades_spanned(samples) < 3.0 - 1e-9)
    throw std::invalid_argument("need at least three decades of samples");
  std::vector<CurveSample> s = toward_limit(samples, variable);
  for (size_t i = 1; i < s.size(); ++i) {
    double d0 = s[i].value - s[i - 1].value;
    double d1 = s[1].value - s[0].value;
    if (d0 == 0 || (d0 > 0) != (d1 > 0))
      throw std::invalid_argument("non-monotone samples");
  }

  // Regression slope of log v against the limit coordinate over a
  // one-decade window ending at `end`.
  auto window_slope = [&](size_t end, double& mean_x) {
    double x_end = s[end].abscissa;
    std::vector<std::pair<double, double>> pts;
    for (size_t i = 0; i <= end; ++i) {
      double ratio = variable == LawVariable::tau_to_inf ? x_end / s[i].abscissa
                                                         : s[i].abscissa / x_end;
      if (ratio <= 10.0 * (1 + 1e-9))
        pts.push_back({limit_coordinate(s[i].abscissa, variable), std::log(s[i].value)});
    }
    if (pts.size() < 2) throw std::invalid_argument("slope window holds too few samples");
    double sx = 0, sy = 0, sxx = 0, sxy = 0, n = static_cast<double>(pts.size());
    for (auto [x, y] : pts) {
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    mean_x = sx / n;
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };

  double X2 = 0, X1 = 0;
  double s2 = window_slope(s.size() - 1, X2);
  // Previous decade: last sample with abscissa one decade before the end.
  size_t prev_end = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    double ratio = variable == LawVariable::tau_to_inf
                       ? s.back().abscissa / s[i].abscissa
                       : s[i].abscissa / s.back().abscissa;
    if (ratio >= 10.0 * (1 - 1e-9)) prev_end = i;
  }
  double s1 = window_slope(prev_end, X1);

  // In the limit coordinate X the slope of log v is +-a + k/X; the two
  // window positions eliminate the k/X term exactly for a pure law.
  double lin = (s2 * X2 - s1 * X1) / (X2 - X1);
  double sign = variable == LawVariable::tau_to_inf ? -1.0 : 1.0;
  double a_raw = sign * lin;

  ScanResult out;
  out.a_est = a_raw;
  out.a_unc = std::abs(a_raw - sign * s2) * 0.5 + 1e-3;

  Rat best;
  double best_err = std::numeric_limits<double>::infinity();
  for (int q = 1; q <= 12; ++q) {
    long long p = std::llround(a_raw * q);
    Rat cand(p, q);
    double err = std::abs(a_raw - to_double(cand));
    if (err < best_err - 1e-15) {
      best_err = err;
      best = cand;
    }
  }
  out.a_snapped = best;

  double a_fix = to_double(best);
  double best_drift = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 4; ++k) {
    std::vector<double> r;
    double x_f = s.back().abscissa;
    for (const auto& p : s) {
      double ratio = variable == LawVariable::tau_to_inf ? x_f / p.abscissa
                                                         : p.abscissa / x_f;
      if (ratio <= 10.0 * (1 + 1e-9))
        r.push_back(compensated_ratio(p, a_fix, k, variable));
    }
    double med = median(r);
    double drift = (*std::max_element(r.begin(), r.end()) -
                    *std::min_element(r.begin(), r.end())) /
                   std::abs(med);
    if (drift < best_drift) {
      best_drift = drift;
      out.k_est = k;
    }
  }
  return out;
}

PoleProbeReport pole_order_probe(const ModelFunction& f, const NewtonData& nd,
                                 const QuadConfig& cfg, double threshold,
                                 int order_override) {
  if (!nd.principal_compact) throw NoncompactPrincipalFace();
  NondegReport ndg = check_nondegenerate(f, 64);
  if (ndg.verdict == NondegVerdict::degenerate_witness)
    throw std::invalid_argument("model is Newton degenerate; the pole law does not apply");

  PoleProbeReport report;
  report.location = -Rat(2) / nd.d;
  report.order = order_override > 0 ? order_override : nd.m;
  const double base = to_double(report.location);
  const double deltas[] = {0.2, 0.1, 0.05, 0.025, 0.0125};
  for (double delta : deltas) {
    CurveSample z = zeta_Z(f, base + delta, cfg);
    double g = std::pow(delta, report.order) * z.value;
    if (!(g > 0))
      throw std::runtime_error("pole probe produced a nonpositive value");
    report.g.push_back({delta, g, std::pow(delta, report.order) * z.est_error});
  }
  std::vector<double> last;
  for (size_t i = report.g.size() - 3; i < report.g.size(); ++i)
    last.push_back(report.g[i].value);
  double med = median(last);
  report.spread = (*std::max_element(last.begin(), last.end()) -
                   *std::min_element(last.begin(), last.end())) /
                  med;
  report.c_Z_estimate = report.g.back().value;
  report.passed = report.spread <= threshold;
  return report;
}

SandwichReport sandwich_check(const ModelFunction& f, int M, const QuadConfig& cfg) {
  cfg.validate();
  ModelFunction f0 = monomial_part(f);
  NewtonData nd0 = newton_data(f0);
  if (!nd0.principal_compact) throw NoncompactPrincipalFace();

  SandwichReport report;
  ModelFunction f1;
  auto preserves = [&](int m_try) {
    ModelFunction cand = add_axis_powers(f0, 2LL * m_try);
    NewtonData nd1 = newton_data(cand);
    if (!same_face(nd0.principal_face, nd1.principal_face)) return false;
    f1 = std::move(cand);
    return true;
  };
  if (M > 0) {
    if (M % 2 != 0) throw std::invalid_argument("M must be even");
    if (!preserves(M))
      throw std::invalid_argument("this M does not preserve the principal face");
    report.M = M;
  } else {
    for (int m_try = 2; m_try <= 64; m_try += 2)
      if (preserves(m_try)) {
        report.M = m_try;
        break;
      }
    if (report.M == 0)
      throw std::invalid_argument(
          "no even M <= 64 preserves the principal face (is it compact?)");
  }
  report.face_preserved = true;

  // Shrink the cutoff until f <= f1 holds on the whole ball: the flat
  // terms must sit below sum x_j^{2M}, which only happens near 0.
  const int n = f.dim;
  auto pointwise_ok_on = [&](double R) {
    const int steps = 24;
    std::vector<int> idx(n, 0);
    std::vector<double> x(n);
    for (;;) {
      double r2 = 0;
      for (int j = 0; j < n; ++j) {
        x[j] = R * static_cast<double>(idx[j]) / steps;
        r2 += x[j] * x[j];
      }
      if (r2 <= R * R) {
        double vf = evaluate(f, x);
        double v1 = evaluate(f1, x);
        if (vf > v1 + 1e-14 * (vf + v1)) return false;
      }
      int j = n - 1;
      while (j >= 0 && idx[j] == steps) {
        idx[j] = 0;
        --j;
      }
      if (j < 0) break;
      ++idx[j];
    }
    return true;
  };
  double R_used = cfg.cutoff_R;
  bool found = false;
  for (int k = 0; k < 40; ++k) {
    if (pointwise_ok_on(R_used)) {
      found = true;
      break;
    }
    R_used *= 0.85;
  }
  if (!found)
    throw std::invalid_argument("could not find a cutoff on which the bounds order");
  report.R_used = R_used;
  report.pointwise_ok = true;

  QuadConfig local = cfg;
  local.cutoff_R = R_used;
  BergmanEvaluator lower(f0, local), middle(f, local), upper(f1, local);
  report.ordering_ok = true;
  report.min_margin = std::numeric_limits<double>::infinity();
  for (double rho : local.rho_grid.points()) {
    CurveSample lo = lower(rho), mid = middle(rho), hi = upper(rho);
    report.lower.push_back(lo);
    report.middle.push_back(mid);
    report.upper.push_back(hi);
    double tol_lm = lo.est_error + mid.est_error;
    double tol_mu = mid.est_error + hi.est_error;
    if (mid.value < lo.value - tol_lm || hi.value < mid.value - tol_mu)
      report.ordering_ok = false;
    double margin = std::min((mid.value - lo.value) / mid.value,
                             (hi.value - mid.value) / mid.value);
    report.min_margin = std::min(report.min_margin, margin);
  }

  AsymptoticLaw law = predicted_law(nd0, LawTarget::bergman);
  report.lower_fit = compensated_ratio_fit(report.lower, law);
  report.upper_fit = compensated_ratio_fit(report.upper, law);
  report.passed = report.face_preserved && report.pointwise_ok && report.ordering_ok &&
                  report.lower_fit.passed && report.upper_fit.passed;
  return report;
}

}  // namespace bergman
