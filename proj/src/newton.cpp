#include "bergman/newton.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <random>
#include <stdexcept>

namespace bergman {

namespace {

SupportSet support_of(const ModelFunction& f) {
  SupportSet s;
  s.dim = f.dim;
  for (const auto& m : f.monomials) s.points.push_back(m.alpha);
  return s;
}

long long l1(const IVec& a) {
  long long s = 0;
  for (long long v : a) s += v;
  return s;
}

}  // namespace

NewtonData newton_data(const ModelFunction& f) {
  NewtonData nd;
  nd.dim = f.dim;
  nd.P = newton_polyhedron(support_of(f));
  const int n = f.dim;

  // (t,...,t) lies in the hull iff t |a|_1 >= l for every facet.
  nd.d = 0;
  for (const auto& h : nd.P.facets) {
    Rat t(h.l, l1(h.a));
    if (t > nd.d) nd.d = t;
  }
  nd.p_diag.assign(n, nd.d);
  nd.principal_face = minimal_face_containing(nd.P, nd.p_diag);
  nd.m = n - nd.principal_face.dim;
  nd.principal_compact = nd.principal_face.compact;

  // rho_j = max over facets with l > 0 of l / a_j, infinite as soon as
  // some such facet misses the axis.
  nd.rho.assign(n, Rat(0));
  for (int j = 0; j < n; ++j) {
    for (const auto& h : nd.P.facets) {
      if (h.l <= 0) continue;
      if (h.a[j] == 0) {
        nd.rho[j] = std::nullopt;
        break;
      }
      Rat t(h.l, h.a[j]);
      if (t > *nd.rho[j]) nd.rho[j] = t;
    }
  }
  nd.convenient = true;
  Rat best = 0;
  for (const auto& r : nd.rho) {
    if (!r) {
      nd.convenient = false;
      break;
    }
    best = std::max(best, *r);
  }
  nd.rho_max = nd.convenient ? std::optional<Rat>(best) : std::nullopt;

  for (const auto& mt : f.monomials)
    if (point_on_face(nd.principal_face, mt.alpha)) nd.principal_part.push_back(mt);

  if (nd.principal_compact && nd.principal_part.empty())
    throw std::logic_error("compact principal face without terms");
  return nd;
}

GammaPart gamma_part(const ModelFunction& f, const Face& face) {
  if (!face.compact) throw std::invalid_argument("gamma-part requires a compact face");
  GammaPart g;
  g.face = face;
  for (const auto& mt : f.monomials)
    if (point_on_face(face, mt.alpha)) g.terms.push_back(mt);
  for (const auto& mt : g.terms)
    for (const auto& h : face.defining) {
      long long s = 0;
      for (size_t j = 0; j < h.a.size(); ++j) s += h.a[j] * mt.alpha[j];
      if (s != h.l) throw std::logic_error("gamma-part term is not quasi-homogeneous");
    }
  return g;
}

double euler_residual(const std::vector<MonomialTerm>& terms, const ValidPair& pair,
                      std::span<const std::vector<double>> samples) {
  double worst = 0.0;
  std::vector<double> grad(pair.a.size());
  for (const auto& x : samples) {
    double g = monomial_value(terms, x);
    monomial_scaled_gradient(terms, x, grad);
    double lhs = static_cast<double>(pair.l) * g;
    double rhs = 0.0;
    for (size_t j = 0; j < grad.size(); ++j) rhs += static_cast<double>(pair.a[j]) * grad[j];
    worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
  }
  return worst;
}

double euler_residual(const GammaPart& g, std::span<const std::vector<double>> samples) {
  double worst = 0.0;
  for (const auto& pair : g.face.defining)
    worst = std::max(worst, euler_residual(g.terms, pair, samples));
  return worst;
}

namespace {

bool positive_even_sum(const std::vector<std::pair<double, IVec>>& terms) {
  for (const auto& [c, alpha] : terms) {
    if (c <= 0) return false;
    for (long long e : alpha)
      if (e % 2 != 0) return false;
  }
  return !terms.empty();
}

struct GradientProbe {
  const std::vector<std::pair<double, IVec>>& terms;
  int n;

  // Relative zero test: |grad| below 1e-12 times the local term scale.
  bool is_zero(const std::vector<double>& x, std::vector<double>& grad) const {
    std::fill(grad.begin(), grad.end(), 0.0);
    double scale = 0.0;
    for (const auto& [c, alpha] : terms) {
      double v = c;
      for (int j = 0; j < n; ++j)
        if (alpha[j] != 0) v *= std::pow(x[j], static_cast<double>(alpha[j]));
      for (int j = 0; j < n; ++j)
        if (alpha[j] != 0) {
          double dj = static_cast<double>(alpha[j]) * v / x[j];
          grad[j] += dj;
          scale += std::abs(dj);
        }
    }
    double norm = 0.0;
    for (double gj : grad) norm += gj * gj;
    return std::sqrt(norm) <= 1e-12 * std::max(scale, 1e-300);
  }
};

}  // namespace

NondegReport check_nondegenerate(const RadialPoly& poly, int sample_count,
                                 std::uint64_t seed) {
  const int n = poly.dim;
  SupportSet s;
  s.dim = n;
  for (const auto& [c, alpha] : poly.terms)
    if (c != 0) s.points.push_back(alpha);
  NewtonPolyhedron P = newton_polyhedron(s);

  NondegReport report{NondegVerdict::nondegenerate_certified_by_positivity, {}, 0, 0};
  bool sampled_any = false;
  for (const Face& face : compact_faces(P)) {
    ++report.faces_checked;
    std::vector<std::pair<double, IVec>> part;
    for (const auto& [c, alpha] : poly.terms)
      if (c != 0 && point_on_face(face, alpha)) part.push_back({c, alpha});
    if (positive_even_sum(part)) {
      ++report.faces_certified;
      continue;
    }
    sampled_any = true;

    GradientProbe probe{part, n};
    std::vector<double> grad(n);
    const int per_axis = std::max(2, static_cast<int>(std::round(
                                         std::pow(static_cast<double>(sample_count),
                                                  1.0 / static_cast<double>(n)))));
    auto magnitude = [&](int i) {
      return std::pow(10.0, -3.0 + 6.0 * static_cast<double>(i) /
                                      static_cast<double>(per_axis - 1));
    };
    for (unsigned orthant = 0; orthant < (1u << n); ++orthant) {
      std::vector<int> idx(n, 0);
      for (;;) {
        std::vector<double> x(n);
        for (int j = 0; j < n; ++j) {
          double sign = (orthant & (1u << j)) ? -1.0 : 1.0;
          x[j] = sign * magnitude(idx[j]);
        }
        if (probe.is_zero(x, grad))
          return {NondegVerdict::degenerate_witness, x, report.faces_checked,
                  report.faces_certified};
        int j = n - 1;
        while (j >= 0 && idx[j] == per_axis - 1) {
          idx[j] = 0;
          --j;
        }
        if (j < 0) break;
        ++idx[j];
      }
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> mag(-3.0, 3.0);
    std::uniform_int_distribution<int> coin(0, 1);
    for (int i = 0; i < 10 * sample_count; ++i) {
      std::vector<double> x(n);
      for (int j = 0; j < n; ++j)
        x[j] = (coin(rng) ? 1.0 : -1.0) * std::pow(10.0, mag(rng));
      if (probe.is_zero(x, grad))
        return {NondegVerdict::degenerate_witness, x, report.faces_checked,
                report.faces_certified};
    }
  }
  if (sampled_any) report.verdict = NondegVerdict::nondegenerate_sampled;
  return report;
}

NondegReport check_nondegenerate(const ModelFunction& f, int sample_count,
                                 std::uint64_t seed) {
  RadialPoly poly;
  poly.dim = f.dim;
  for (const auto& m : f.monomials) poly.terms.push_back({to_double(m.coeff), m.alpha});
  return check_nondegenerate(poly, sample_count, seed);
}

}  // namespace bergman
