#include "bergman/quad.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "bergman/newton.hpp"

namespace bergman {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using GK15 = boost::math::quadrature::gauss_kronrod<double, 15>;

template <class Fn>
void parallel_for(size_t count, int threads, Fn&& fn) {
  unsigned hw = std::thread::hardware_concurrency();
  size_t t = threads > 0 ? static_cast<size_t>(threads) : (hw ? hw : 1);
  t = std::min(t, count);
  if (t <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr first_error;
  std::mutex err_mutex;
  std::vector<std::thread> pool;
  for (size_t w = 0; w < t; ++w)
    pool.emplace_back([&] {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct AxisDomain {
  double lo = 0, hi = 1;
  std::vector<double> breaks;
};

// Plain-double form of the model for the quadrature inner loops; the
// exact rational coefficients are converted exactly once.
struct CompiledModel {
  int n = 0;
  struct Mono {
    double c;
    std::vector<std::pair<int, long long>> powers;  // (axis, exponent)
  };
  struct Flat {
    double c;
    double log_c;
    std::vector<std::pair<int, double>> powers;
  };
  std::vector<Mono> monos;
  std::vector<Flat> flats;
  std::vector<double> log_mono_c;

  explicit CompiledModel(const ModelFunction& f) : n(f.dim) {
    if (f.monomials.size() + f.flats.size() > 64)
      throw std::invalid_argument("model has too many terms");
    for (const auto& m : f.monomials) {
      Mono cm{to_double(m.coeff), {}};
      for (int j = 0; j < n; ++j)
        if (m.alpha[j] != 0) cm.powers.push_back({j, m.alpha[j]});
      log_mono_c.push_back(std::log(cm.c));
      monos.push_back(std::move(cm));
    }
    for (const auto& t : f.flats) {
      Flat cf{to_double(t.coeff), 0, {}};
      cf.log_c = std::log(cf.c);
      for (int j = 0; j < n; ++j)
        if (t.beta[j] != 0) cf.powers.push_back({j, to_double(t.beta[j])});
      flats.push_back(std::move(cf));
    }
  }

  static double ipow(double x, long long e) {
    double r = 1.0, b = x;
    for (; e > 0; e >>= 1) {
      if (e & 1) r *= b;
      b *= b;
    }
    return r;
  }

  double value(const double* x) const {
    double sum = 0;
    for (const auto& m : monos) {
      double v = m.c;
      for (auto [j, e] : m.powers) v *= ipow(x[j], e);
      sum += v;
    }
    for (const auto& t : flats) {
      double xb = 1.0;
      for (auto [j, b] : t.powers) xb *= std::pow(x[j], b);
      if (xb > 0.0) sum += t.c * std::exp(-1.0 / xb);
    }
    return sum;
  }

  // log f(e^{-t}) via log-sum-exp; finite wherever t is finite.
  double log_value_t(const double* t) const {
    double logs[64];
    size_t count = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < monos.size(); ++i) {
      double g = log_mono_c[i];
      for (auto [j, e] : monos[i].powers) g -= static_cast<double>(e) * t[j];
      logs[count++] = g;
      best = std::max(best, g);
    }
    for (const auto& fl : flats) {
      double bt = 0;
      for (auto [j, b] : fl.powers) bt += b * t[j];
      double g = fl.log_c - std::exp(bt);
      logs[count++] = g;
      best = std::max(best, g);
    }
    double acc = 0;
    for (size_t i = 0; i < count; ++i) acc += std::exp(logs[i] - best);
    return best + std::log(acc);
  }
};

struct Estimate {
  double value = 0;
  double err = 0;
};

// Adaptive Gauss-Kronrod per axis, innermost axes integrated at tighter
// tolerance so the outer levels see smooth data.  The returned error is
// the outer-level estimate plus a tolerance-propagation allowance.
template <class F>
class NestedIntegrator {
 public:
  NestedIntegrator(std::span<const AxisDomain> axes, F& f, double rel_tol, int depth)
      : axes_(axes), f_(f), depth_(depth) {
    const int n = static_cast<int>(axes.size());
    tol_.resize(n);
    double t = rel_tol;
    for (int k = 0; k < n; ++k) {
      tol_[k] = t;
      t *= 0.5;
    }
  }

  Estimate run() {
    double err = 0;
    double v = level(0, err);
    double allowance = 0;
    for (size_t k = 1; k < tol_.size(); ++k) allowance += tol_[k];
    return {v, err + std::abs(v) * allowance};
  }

 private:
  double level(int k, double& err_out) {
    const AxisDomain& d = axes_[k];
    std::vector<double> cuts;
    cuts.push_back(d.lo);
    for (double b : d.breaks)
      if (b > d.lo && b < d.hi) cuts.push_back(b);
    cuts.push_back(d.hi);
    std::sort(cuts.begin(), cuts.end());
    double total = 0, err = 0;
    const int n = static_cast<int>(axes_.size());
    for (size_t s = 0; s + 1 < cuts.size(); ++s) {
      double e = 0;
      double v = GK15::integrate(
          [&](double t) {
            x_[k] = t;
            if (k + 1 == n) return f_(std::span<const double>(x_.data(), n));
            double inner_err = 0;
            return level(k + 1, inner_err);
          },
          cuts[s], cuts[s + 1], depth_, tol_[k], &e);
      total += v;
      err += e;
    }
    err_out = err;
    return total;
  }

  std::span<const AxisDomain> axes_;
  F& f_;
  int depth_;
  std::vector<double> tol_;
  std::array<double, 8> x_{};
};

template <class F>
Estimate nested_integral(std::span<const AxisDomain> axes, F&& f, double rel_tol,
                         int depth) {
  NestedIntegrator<F> engine(axes, f, rel_tol, depth);
  return engine.run();
}

void check_converged(const char* what, const Estimate& e, const QuadConfig& cfg) {
  double budget = 25.0 * cfg.rel_tol * std::abs(e.value) + cfg.abs_tol + 1e-280;
  if (e.err > budget)
    throw QuadratureError(std::string(what) + ": tolerance not met within the "
                          "subdivision budget",
                          e.value, e.err);
}

// Per-axis log-coordinate domain for integrands concentrated along the
// axes: x = e^{-t}, t in [-log R, -log x_cut].
AxisDomain log_axis(double R) {
  double x_cut = std::min(R, 1.0) * 1e-13;
  return {-std::log(R), -std::log(x_cut), {}};
}

// Transition scales t = log(2 tau)/alpha for every exponent active on
// the axis; seeds the adaptive subdivision.
void add_scale_breaks(AxisDomain& d, const ModelFunction& f, int axis, double tau) {
  if (tau <= 0.6) return;
  double l2t = std::log(2.0 * tau);
  for (const auto& m : f.monomials)
    if (m.alpha[axis] > 0) d.breaks.push_back(l2t / static_cast<double>(m.alpha[axis]));
  for (const auto& t : f.flats)
    if (t.beta[axis] > 0) {
      double b = to_double(t.beta[axis]);
      d.breaks.push_back(std::log1p(std::max(l2t, 1.0)) / b);
    }
}

double radius(std::span<const double> x) {
  double s = 0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

}  // namespace

std::vector<double> GridSpec::points() const {
  int count = std::max(1, static_cast<int>(std::llround(
                              per_decade * std::log10(hi / lo))));
  std::vector<double> out;
  out.reserve(count + 1);
  for (int i = 0; i < count; ++i)
    out.push_back(lo * std::pow(10.0, static_cast<double>(i) / per_decade));
  out.push_back(hi);
  return out;
}

void QuadConfig::validate() const {
  if (!(cutoff_R > 0)) throw std::invalid_argument("cutoff_R must be positive");
  if (!(rel_tol > 0 && rel_tol < 1)) throw std::invalid_argument("rel_tol must be in (0,1)");
  if (!(abs_tol > 0 && abs_tol < 1)) throw std::invalid_argument("abs_tol must be in (0,1)");
  if (max_subdivisions < 1) throw std::invalid_argument("max_subdivisions must be >= 1");
  if (!(tau_grid.lo >= 1)) throw std::invalid_argument("tau grid must start at tau >= 1");
  if (!(tau_grid.lo < tau_grid.hi) || tau_grid.per_decade < 1)
    throw std::invalid_argument("tau grid must be strictly increasing");
  if (!(rho_grid.lo < rho_grid.hi) || rho_grid.lo <= 0 || rho_grid.per_decade < 1)
    throw std::invalid_argument("rho grid must be strictly increasing and positive");
  if (!(u_box > cutoff_R)) throw std::invalid_argument("u_box must exceed cutoff_R");
}

double bump(double r, double R) {
  // h(t) = g(t)/(g(t)+g(1-t)) with g(t) = e^{-1/t} on t > 0.
  double t = 2.0 - 2.0 * r / R;
  if (t >= 1.0) return 1.0;
  if (t <= 0.0) return 0.0;
  double g = std::exp(-1.0 / t);
  double h = std::exp(-1.0 / (1.0 - t));
  return g / (g + h);
}

namespace {

Estimate laplace_core(const ModelFunction& f, double tau, const QuadConfig& cfg) {
  const int n = f.dim;
  const double R = cfg.cutoff_R;
  const CompiledModel model(f);
  std::vector<AxisDomain> axes(n);
  for (int j = 0; j < n; ++j) {
    axes[j] = log_axis(R);
    axes[j].breaks.push_back(-std::log(R / 2.0));
    add_scale_breaks(axes[j], f, j, tau);
  }
  std::array<double, 8> xbuf;
  auto integrand = [&](std::span<const double> t) {
    double sum_t = 0;
    double r2 = 0;
    for (int j = 0; j < n; ++j) {
      double xj = std::exp(-t[j]);
      xbuf[j] = xj;
      sum_t += t[j];
      r2 += xj * xj;
    }
    double r = std::sqrt(r2);
    if (r >= R) return 0.0;
    double w = bump(r, R);
    if (w == 0.0) return 0.0;
    double e = 2.0 * tau * model.value(xbuf.data()) + 2.0 * sum_t;
    if (e > 700.0) return 0.0;
    return std::exp(-e) * w;
  };
  return nested_integral(std::span<const AxisDomain>(axes), integrand, cfg.rel_tol,
                         cfg.max_subdivisions);
}

}  // namespace

CurveSample laplace_L(const ModelFunction& f, double tau, const QuadConfig& cfg) {
  cfg.validate();
  if (tau < 0) throw std::invalid_argument("tau must be nonnegative");
  Estimate e = laplace_core(f, tau, cfg);
  check_converged("laplace_L", e, cfg);
  return {tau, e.value, e.err};
}

double c0_floor(const ModelFunction& f, double R) {
  const int n = f.dim;
  // f <= a |x| on the ball of radius R: monomials via x^alpha <=
  // R^{|alpha|-1} |x|, flat terms via the 1-D maximum of e^{-1/r^b}/r.
  double a = 0;
  for (const auto& m : f.monomials) {
    long long total = 0;
    for (long long v : m.alpha) total += v;
    a += to_double(m.coeff) * std::pow(R, static_cast<double>(total - 1));
  }
  for (const auto& t : f.flats) {
    double b = 0;
    for (const auto& bj : t.beta) b += to_double(bj);
    double rstar = std::pow(b, 1.0 / b);
    double k = rstar <= R ? std::exp(-1.0 / b) / rstar
                          : std::exp(-std::pow(R, -b)) / R;
    a += to_double(t.coeff) * k;
  }
  a = std::max(a, 1.0 / R);
  double sphere = 2.0 * std::pow(std::numbers::pi, n);
  for (int k = 1; k < n; ++k) sphere /= static_cast<double>(k);
  return sphere * std::pow(2.0 * a, -2.0 * n) *
         boost::math::tgamma_lower(2.0 * n, 1.0);
}

CurveSample c0_tilde(const ModelFunction& f, double tau, const QuadConfig& cfg) {
  CurveSample s = laplace_L(f, tau, cfg);
  double scale = std::pow(kTwoPi, f.dim);
  s.value *= scale;
  s.est_error *= scale;
  if (tau >= 1.0) {
    double floor = c0_floor(f, cfg.cutoff_R) * std::pow(tau, -2.0 * f.dim);
    if (s.value < 0.999 * floor)
      throw std::logic_error("c0_tilde fell below its analytic lower bound");
  }
  return s;
}

double c0_full_monomial(std::span<const long long> alpha, double tau) {
  if (tau <= 0) throw std::invalid_argument("tau must be positive");
  double product = 1.0;
  for (long long a : alpha) {
    if (a <= 0)
      throw std::invalid_argument("divergent configuration: every axis exponent "
                                  "must be positive");
    double ad = static_cast<double>(a);
    product *= kTwoPi * boost::math::tgamma(2.0 / ad) /
               (ad * std::pow(2.0 * tau, 2.0 / ad));
  }
  return product;
}

// ---------------------------------------------------------------------
// Monotone cubic interpolation (Fritsch-Carlson), used on the c0 table
// in log-log coordinates where the data is nearly linear.
namespace {

class Pchip {
 public:
  Pchip() = default;
  Pchip(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)) {
    const size_t n = x_.size();
    d_.assign(n, 0.0);
    if (n < 2) return;
    std::vector<double> h(n - 1), del(n - 1);
    for (size_t i = 0; i + 1 < n; ++i) {
      h[i] = x_[i + 1] - x_[i];
      del[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    if (n == 2) {
      d_[0] = d_[1] = del[0];
      return;
    }
    for (size_t i = 1; i + 1 < n; ++i) {
      if (del[i - 1] * del[i] <= 0) {
        d_[i] = 0;
      } else {
        double w1 = 2 * h[i] + h[i - 1];
        double w2 = h[i] + 2 * h[i - 1];
        d_[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
      }
    }
    d_[0] = edge(h[0], h[1], del[0], del[1]);
    d_[n - 1] = edge(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
  }

  double operator()(double q) const {
    size_t i = interval(q);
    double h = x_[i + 1] - x_[i];
    double t = (q - x_[i]) / h;
    double t2 = t * t, t3 = t2 * t;
    return y_[i] * (2 * t3 - 3 * t2 + 1) + h * d_[i] * (t3 - 2 * t2 + t) +
           y_[i + 1] * (-2 * t3 + 3 * t2) + h * d_[i + 1] * (t3 - t2);
  }

  const std::vector<double>& knots() const { return x_; }

 private:
  static double edge(double h0, double h1, double del0, double del1) {
    double d = ((2 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if (d * del0 <= 0) return 0;
    if (del0 * del1 < 0 && std::abs(d) > 3 * std::abs(del0)) return 3 * del0;
    return d;
  }

  size_t interval(double q) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), q);
    size_t i = static_cast<size_t>(it - x_.begin());
    if (i == 0) return 0;
    if (i >= x_.size()) return x_.size() - 2;
    return i - 1;
  }

  std::vector<double> x_, y_, d_;
};

// Least-squares fit of log v = log c - a log tau + k log log tau over a
// window, k chosen from {0,...,4} by residual.  drift is the worst
// relative deviation of the data from the fit.
BergmanEvaluator::TailFit fit_power_log(std::span<const CurveSample> pts) {
  BergmanEvaluator::TailFit best;
  double best_sse = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 4; ++k) {
    // Regress y = p - a * u with y = log v - k log log tau, u = log tau.
    double su = 0, sy = 0, suu = 0, suy = 0;
    const double n = static_cast<double>(pts.size());
    for (const auto& p : pts) {
      double u = std::log(p.abscissa);
      double y = std::log(p.value) - k * std::log(u);
      su += u;
      sy += y;
      suu += u * u;
      suy += u * y;
    }
    double denom = n * suu - su * su;
    double slope = (n * suy - su * sy) / denom;
    double inter = (sy - slope * su) / n;
    double sse = 0, drift = 0;
    for (const auto& p : pts) {
      double u = std::log(p.abscissa);
      double fit = inter + slope * u + k * std::log(u);
      double r = std::log(p.value) - fit;
      sse += r * r;
      drift = std::max(drift, std::abs(std::expm1(r)));
    }
    if (sse < best_sse) {
      best_sse = sse;
      best = {std::exp(inter), -slope, k, drift};
    }
  }
  return best;
}

}  // namespace

struct BergmanEvaluator::Impl {
  ModelFunction f;
  QuadConfig cfg;
  std::vector<CurveSample> table;  // c0_tilde^2 values on the tau grid
  Pchip interp;                    // log tau -> log c0^2
  TailFit tailfit;
  double inner_rel = 0;  // worst relative error of the table entries
  std::vector<std::pair<double, double>> head_nodes;  // (tau_i, w_i * tau_i / c0^2)
};

BergmanEvaluator::BergmanEvaluator(const ModelFunction& f, const QuadConfig& cfg)
    : impl_(std::make_unique<Impl>()) {
  cfg.validate();
  if (cfg.tau_grid.hi < 100.0 * cfg.tau_grid.lo)
    throw std::invalid_argument("tau grid must span at least two decades");
  impl_->f = f;
  impl_->cfg = cfg;
  std::vector<double> taus = cfg.tau_grid.points();
  impl_->table.resize(taus.size());
  parallel_for(taus.size(), cfg.threads, [&](size_t i) {
    impl_->table[i] = c0_tilde(f, taus[i], cfg);
  });

  std::vector<double> lt, lv;
  for (const auto& s : impl_->table) {
    if (!(s.value > 0)) throw QuadratureError("c0 table has a nonpositive entry", 0, 0);
    lt.push_back(std::log(s.abscissa));
    lv.push_back(std::log(s.value));
    impl_->inner_rel = std::max(impl_->inner_rel, s.est_error / s.value);
  }
  impl_->interp = Pchip(lt, lv);

  // Tail law from the last decade of the table.
  double edge = cfg.tau_grid.hi / 10.0;
  size_t first = 0;
  while (first < impl_->table.size() && impl_->table[first].abscissa < edge) ++first;
  if (impl_->table.size() - first < 4) first = impl_->table.size() > 6 ? impl_->table.size() - 6 : 0;
  impl_->tailfit = fit_power_log(
      std::span<const CurveSample>(impl_->table).subspan(first));
  if (impl_->tailfit.drift > 0.10)
    throw QuadratureError(
        "tail fit unstable across the last decade; increase the tau grid maximum",
        impl_->tailfit.drift, impl_->tailfit.drift);

  // Head integrand tau / c0(tau)^2 on [0, tau_min], fixed Gauss rule;
  // the e^{-2 rho tau} factor is applied per query.
  using G64 = boost::math::quadrature::gauss<double, 64>;
  const double a = 0, b = cfg.tau_grid.lo;
  const auto& xs = G64::abscissa();
  const auto& ws = G64::weights();
  auto h = [&](double tau) {
    CurveSample c = c0_tilde(f, tau, cfg);
    return tau / c.value;
  };
  for (size_t i = 0; i < xs.size(); ++i) {
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double tp = mid + half * xs[i];
    double tm = mid - half * xs[i];
    impl_->head_nodes.push_back({tp, half * ws[i] * h(tp)});
    if (xs[i] != 0.0) impl_->head_nodes.push_back({tm, half * ws[i] * h(tm)});
  }
}

BergmanEvaluator::~BergmanEvaluator() = default;
BergmanEvaluator::BergmanEvaluator(BergmanEvaluator&&) noexcept = default;

const std::vector<CurveSample>& BergmanEvaluator::table() const { return impl_->table; }
const BergmanEvaluator::TailFit& BergmanEvaluator::tail() const { return impl_->tailfit; }

CurveSample BergmanEvaluator::operator()(double rho) const {
  if (!(rho > 0)) throw std::invalid_argument("rho must be positive");
  const Impl& im = *impl_;

  double head = 0;
  for (const auto& [tau, wh] : im.head_nodes) head += wh * std::exp(-2.0 * rho * tau);

  // Body: integrate e^{-2 rho tau} tau^2 / c0^2 in log tau, one Kronrod
  // application per table segment (the interpolant is C^1 at the knots).
  const auto& knots = im.interp.knots();
  double body = 0, body_err = 0;
  for (size_t i = 0; i + 1 < knots.size(); ++i) {
    if (2.0 * rho * std::exp(knots[i]) > 500.0) break;
    double e = 0;
    double v = GK15::integrate(
        [&](double lt) {
          double tau = std::exp(lt);
          return std::exp(2.0 * lt - im.interp(lt) - 2.0 * rho * tau);
        },
        knots[i], knots[i + 1], 0, 1e-12, &e);
    body += v;
    body_err += e;
  }

  // Tail beyond the table from the fitted law.
  const TailFit& tf = im.tailfit;
  const double T = im.cfg.tau_grid.hi;
  double tail = 0;
  if (2.0 * rho * T < 500.0) {
    if (tf.k == 0) {
      tail = boost::math::tgamma(2.0 + tf.a, 2.0 * rho * T) /
             (tf.c * std::pow(2.0 * rho, 2.0 + tf.a));
    } else {
      double vmax = std::log(500.0 / (2.0 * rho * T));
      double e = 0;
      tail = GK15::integrate(
          [&](double v) {
            double tau = T * std::exp(v);
            double lt = std::log(tau);
            return std::exp(-2.0 * rho * tau) * std::pow(tau, 2.0 + tf.a) /
                   (tf.c * std::pow(lt, tf.k));
          },
          0.0, vmax, im.cfg.max_subdivisions, 1e-10, &e);
    }
  }
  double tail_err = tail * (tf.drift + 0.02);

  double value = (head + body + tail) / kTwoPi;
  double err = (body_err + im.inner_rel * (head + body) + tail_err) / kTwoPi;
  return {rho, value, err};
}

CurveSample bergman_B(const ModelFunction& f, double rho, const QuadConfig& cfg) {
  return BergmanEvaluator(f, cfg)(rho);
}

// ---------------------------------------------------------------------

CurveSample zeta_Z(const ModelFunction& f, double s, const QuadConfig& cfg) {
  cfg.validate();
  const int n = f.dim;
  const double R = cfg.cutoff_R;
  NewtonData nd = newton_data(f);
  double dmin = to_double(nd.d);
  if (s < -2.0 / dmin + 0.005 - 1e-12)
    throw std::invalid_argument(
        "s is inside the forbidden margin of the convergence abscissa -2/d");

  const CompiledModel model(f);
  std::vector<AxisDomain> axes(n);
  for (int j = 0; j < n; ++j) {
    long long kappa = std::numeric_limits<long long>::max();
    for (const auto& m : f.monomials) kappa = std::min(kappa, m.alpha[j]);
    double rate = (s >= 0 || kappa == 0) ? 2.0 : 2.0 + s * static_cast<double>(kappa);
    axes[j] = log_axis(R);
    axes[j].hi = std::max(axes[j].lo, 0.0) + 5.0 + 80.0 / rate;
    axes[j].breaks.push_back(-std::log(R / 2.0));
  }
  std::array<double, 8> xbuf;
  auto integrand = [&](std::span<const double> t) {
    double sum_t = 0;
    double r2 = 0;
    for (int j = 0; j < n; ++j) {
      double xj = std::exp(-t[j]);
      xbuf[j] = xj;
      sum_t += t[j];
      r2 += xj * xj;
    }
    double r = std::sqrt(r2);
    if (r >= R) return 0.0;
    double w = bump(r, R);
    if (w == 0.0) return 0.0;
    double e = s * model.log_value_t(t.data()) - 2.0 * sum_t;
    if (e < -700.0) return 0.0;
    return std::exp(e) * w;
  };
  Estimate e = nested_integral(std::span<const AxisDomain>(axes), integrand,
                               cfg.rel_tol, cfg.max_subdivisions);
  check_converged("zeta_Z", e, cfg);
  return {s, e.value, e.err};
}

// ---------------------------------------------------------------------

namespace {

// Innermost-axis integral of x_n psi(|x',x_n|) over {x_n : f(x',x_n) < u},
// the interval [0, cut) by coordinatewise monotonicity.
double fiber_inner(const CompiledModel& model, double u, std::span<const double> outer,
                   const QuadConfig& cfg, double tol, double& err) {
  const int n = model.n;
  const double R = cfg.cutoff_R;
  std::array<double, 8> xbuf;
  for (int j = 0; j + 1 < n; ++j) xbuf[j] = outer[j];
  auto fval = [&](double xn) {
    xbuf[n - 1] = xn;
    return model.value(xbuf.data());
  };
  if (fval(0.0) >= u) {
    err = 0;
    return 0.0;
  }
  double cut = R;
  if (fval(R) >= u) {
    double lo = 0, hi = R;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * R; ++it) {
      double mid = 0.5 * (lo + hi);
      (fval(mid) < u ? lo : hi) = mid;
    }
    cut = lo;
  }
  if (cut <= 0) {
    err = 0;
    return 0.0;
  }
  double e = 0;
  double v = GK15::integrate(
      [&](double xn) {
        xbuf[n - 1] = xn;
        double r = radius(std::span<const double>(xbuf.data(), n));
        if (r >= R) return 0.0;
        return xn * bump(r, R);
      },
      0.0, cut, cfg.max_subdivisions, tol, &e);
  err = e;
  return v;
}

}  // namespace

double fiber_G(const ModelFunction& f, double u, const QuadConfig& cfg) {
  cfg.validate();
  if (!(u > 0)) throw std::invalid_argument("u must be positive");
  const int n = f.dim;
  const double R = cfg.cutoff_R;
  const CompiledModel model(f);
  double inner_tol = cfg.rel_tol * 0.5;
  if (n == 1) {
    double err = 0;
    double v = fiber_inner(model, u, {}, cfg, inner_tol, err);
    return v;
  }
  std::vector<AxisDomain> axes(n - 1);
  for (int j = 0; j + 1 < n; ++j) {
    axes[j] = log_axis(R);
    axes[j].breaks.push_back(-std::log(R / 2.0));
  }
  std::array<double, 8> xbuf;
  auto integrand = [&](std::span<const double> t) {
    double sum_t = 0;
    for (int j = 0; j + 1 < n; ++j) {
      xbuf[j] = std::exp(-t[j]);
      sum_t += t[j];
    }
    double err = 0;
    double inner = fiber_inner(model, u, std::span<const double>(xbuf.data(), n - 1),
                               cfg, inner_tol, err);
    return inner * std::exp(-2.0 * sum_t);
  };
  Estimate e = nested_integral(std::span<const AxisDomain>(axes), integrand,
                               cfg.rel_tol, cfg.max_subdivisions);
  return e.value;
}

CurveSample fiber_H(const ModelFunction& f, double u, const QuadConfig& cfg) {
  cfg.validate();
  if (!(u > 0)) throw std::invalid_argument("u must be positive");
  double h = u / 64.0;
  auto central = [&](double step) {
    return (fiber_G(f, u + step, cfg) - fiber_G(f, u - step, cfg)) / (2.0 * step);
  };
  double d1 = central(h);
  double d2 = central(h / 2.0);
  double value = (4.0 * d2 - d1) / 3.0;  // one Richardson step
  double est = std::abs(d2 - d1) / 3.0 + 1e-14 * std::abs(value);
  if (value != 0 && est > std::abs(value) * std::max(100.0 * cfg.rel_tol, 1e-5))
    throw QuadratureError("fiber_H: finite-difference noise exceeds the tolerance",
                          value, est);
  return {u, value, est};
}

namespace {

double fiber_u_saturation(const ModelFunction& f, double R) {
  std::vector<double> corner(f.dim, R);
  return evaluate(f, corner) * 1.0000001 + 1e-300;
}

}  // namespace

CurveSample fiber_laplace(const ModelFunction& f, double tau, const QuadConfig& cfg) {
  // int e^{-2 tau u} H(u) du = 2 tau int e^{-2 tau u} G(u) du by parts;
  // G is smooth where H is only piecewise so the parts form is the
  // better-conditioned reconstruction.
  cfg.validate();
  double usat = fiber_u_saturation(f, cfg.cutoff_R);
  double ulo = usat * 1e-12;
  double err = 0;
  double v = GK15::integrate(
      [&](double lu) {
        double u = std::exp(lu);
        double w = 2.0 * tau * u * std::exp(-2.0 * tau * u);
        if (w == 0.0) return 0.0;
        return w * fiber_G(f, u, cfg);
      },
      std::log(ulo), std::log(std::max(usat, 40.0 / tau)), cfg.max_subdivisions,
      std::sqrt(cfg.rel_tol), &err);
  return {tau, v, err + 2.0 * cfg.rel_tol * std::abs(v)};
}

CurveSample fiber_mellin(const ModelFunction& f, double s, const QuadConfig& cfg) {
  // int_0^U u^s H du = U^s G(U) - s int_0^U u^{s-1} G du for U past the
  // saturation point of G.
  cfg.validate();
  if (!(s > 0)) throw std::invalid_argument("fiber_mellin requires s > 0");
  double usat = fiber_u_saturation(f, cfg.cutoff_R);
  double cap = usat * 1.25;
  double ulo = usat * 1e-12;
  double err = 0;
  double integral = GK15::integrate(
      [&](double lu) {
        double u = std::exp(lu);
        return std::pow(u, s) * fiber_G(f, u, cfg);
      },
      std::log(ulo), std::log(cap), cfg.max_subdivisions, std::sqrt(cfg.rel_tol), &err);
  double v = std::pow(cap, s) * fiber_G(f, cap, cfg) - s * integral;
  return {s, v, err + 2.0 * cfg.rel_tol * std::abs(v)};
}

// ---------------------------------------------------------------------

double localization_gap(const ModelFunction& f, double tau, double u_box,
                        const QuadConfig& cfg) {
  cfg.validate();
  if (!(u_box > cfg.cutoff_R)) throw std::invalid_argument("u_box must exceed cutoff_R");
  const int n = f.dim;
  const double R = cfg.cutoff_R;
  const CompiledModel model(f);
  std::vector<AxisDomain> axes(n);
  for (int j = 0; j < n; ++j) {
    axes[j].lo = 0;
    axes[j].hi = u_box;
    axes[j].breaks = {R / 2.0, R};
    if (tau > 0.6)
      for (const auto& m : f.monomials)
        if (m.alpha[j] > 0)
          axes[j].breaks.push_back(
              std::pow(2.0 * tau, -1.0 / static_cast<double>(m.alpha[j])));
  }
  auto integrand = [&](std::span<const double> x) {
    double r = radius(x);
    double w = 1.0 - bump(r, R);
    if (w == 0.0) return 0.0;
    double e = 2.0 * tau * model.value(x.data());
    if (e > 700.0) return 0.0;
    double m = std::exp(-e) * w;
    for (double xj : x) m *= xj;
    return m;
  };
  Estimate e = nested_integral(std::span<const AxisDomain>(axes), integrand,
                               cfg.rel_tol, cfg.max_subdivisions);
  check_converged("localization_gap", e, cfg);
  return std::max(e.value, 0.0);
}

double infimum_outside_plateau(const ModelFunction& f, double R, double u_box) {
  const int n = f.dim;
  const int steps = n <= 2 ? 160 : 48;
  std::vector<double> x(n, 0.0);
  std::vector<int> idx(n, 0);
  double best = std::numeric_limits<double>::infinity();
  for (;;) {
    for (int j = 0; j < n; ++j)
      x[j] = u_box * static_cast<double>(idx[j]) / static_cast<double>(steps);
    if (radius(x) >= R / 2.0) best = std::min(best, evaluate(f, x));
    int j = n - 1;
    while (j >= 0 && idx[j] == steps) {
      idx[j] = 0;
      --j;
    }
    if (j < 0) break;
    ++idx[j];
  }
  return best;
}

}  // namespace bergman
