#include "bergman/polytope.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>
#include <set>
#include <stdexcept>

namespace bergman {

namespace {

BigInt idet(std::vector<std::vector<BigInt>> m) {
  const size_t n = m.size();
  if (n == 0) return 1;
  // Bareiss fraction-free elimination; all divisions are exact.
  BigInt sign = 1, prev = 1;
  for (size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      size_t p = k + 1;
      while (p < n && m[p][k] == 0) ++p;
      if (p == n) return 0;
      std::swap(m[k], m[p]);
      sign = -sign;
    }
    for (size_t i = k + 1; i < n; ++i)
      for (size_t j = k + 1; j < n; ++j)
        m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

int irank(const std::vector<IVec>& rows, int n) {
  std::vector<std::vector<Rat>> m;
  for (const auto& r : rows) {
    std::vector<Rat> row(n);
    for (int j = 0; j < n; ++j) row[j] = r[j];
    m.push_back(std::move(row));
  }
  int rank = 0;
  for (int col = 0; col < n && rank < static_cast<int>(m.size()); ++col) {
    int pivot = -1;
    for (int i = rank; i < static_cast<int>(m.size()); ++i)
      if (m[i][col] != 0) {
        pivot = i;
        break;
      }
    if (pivot < 0) continue;
    std::swap(m[rank], m[pivot]);
    for (int i = rank + 1; i < static_cast<int>(m.size()); ++i) {
      if (m[i][col] == 0) continue;
      Rat c = m[i][col] / m[rank][col];
      for (int j = col; j < n; ++j) m[i][j] -= c * m[rank][j];
    }
    ++rank;
  }
  return rank;
}

// One-dimensional kernel of (n-1) independent rows: signed maximal minors.
IVec cross_product(const std::vector<IVec>& rows, int n) {
  assert(static_cast<int>(rows.size()) == n - 1);
  IVec a(n, 0);
  for (int i = 0; i < n; ++i) {
    std::vector<std::vector<BigInt>> minor;
    for (const auto& r : rows) {
      std::vector<BigInt> row;
      for (int j = 0; j < n; ++j)
        if (j != i) row.emplace_back(r[j]);
      minor.push_back(std::move(row));
    }
    BigInt d = idet(std::move(minor));
    if (i % 2 == 1) d = -d;
    if (d > 1000000000000000LL || d < -1000000000000000LL)
      throw std::overflow_error("facet normal out of range");
    a[i] = d.convert_to<long long>();
  }
  return a;
}

bool normalize_nonnegative(IVec& a) {
  long long g = 0;
  bool any_pos = false, any_neg = false;
  for (long long v : a) {
    g = std::gcd(g, std::abs(v));
    any_pos |= v > 0;
    any_neg |= v < 0;
  }
  if (g == 0) return false;
  if (any_pos && any_neg) return false;  // cannot contain the recession cone
  long long s = any_neg ? -g : g;
  for (long long& v : a) v /= s;
  return true;
}

long long dot(const IVec& a, const IVec& p) {
  BigInt s = 0;
  for (size_t j = 0; j < a.size(); ++j) s += BigInt(a[j]) * p[j];
  return s.convert_to<long long>();
}

Rat dot(const IVec& a, std::span<const Rat> q) {
  Rat s = 0;
  for (size_t j = 0; j < a.size(); ++j) s += Rat(a[j]) * q[j];
  return s;
}

template <class Fn>
void for_each_subset(int total, int k, Fn&& fn) {
  if (k > total) return;
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  if (k == 0) {
    fn(idx);
    return;
  }
  for (;;) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == total - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

double binomial(int n, int k) {
  double r = 1;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

// conv(tight points) + cone(tight axes) has dimension rank of the
// difference/direction system.
int face_dimension(const std::vector<IVec>& pts, const std::vector<int>& axes, int n) {
  if (pts.empty()) return -1;
  std::vector<IVec> rows;
  for (size_t i = 1; i < pts.size(); ++i) {
    IVec d(n);
    for (int j = 0; j < n; ++j) d[j] = pts[i][j] - pts[0][j];
    rows.push_back(std::move(d));
  }
  for (int j : axes) {
    IVec e(n, 0);
    e[j] = 1;
    rows.push_back(std::move(e));
  }
  return irank(rows, n);
}

Face build_face(const NewtonPolyhedron& P, std::vector<ValidPair> defining) {
  const int n = P.support.dim;
  std::sort(defining.begin(), defining.end());
  defining.erase(std::unique(defining.begin(), defining.end()), defining.end());
  Face face;
  face.defining = defining;
  for (const auto& v : P.vertices) {
    bool tight = true;
    for (const auto& h : defining)
      if (dot(h.a, v) != h.l) {
        tight = false;
        break;
      }
    if (tight) face.tight_vertices.push_back(v);
  }
  for (int j = 0; j < n; ++j) {
    bool free = true;
    for (const auto& h : defining)
      if (h.a[j] != 0) {
        free = false;
        break;
      }
    if (free) face.recession.push_back(j);
  }
  face.dim = face_dimension(face.tight_vertices, face.recession, n);
  face.compact = face.recession.empty();

  // Second compactness route: the summed defining pair must have all
  // components positive exactly when there is no recession direction.
  if (!defining.empty()) {
    bool all_positive = true;
    for (int j = 0; j < n; ++j) {
      long long s = 0;
      for (const auto& h : defining) s += h.a[j];
      if (s == 0) all_positive = false;
    }
    if (all_positive != face.compact)
      throw std::logic_error("compactness criteria disagree");
  }
  return face;
}

}  // namespace

NewtonPolyhedron newton_polyhedron(const SupportSet& support) {
  const int n = support.dim;
  if (n < 1 || n > 6) throw std::invalid_argument("dimension must be between 1 and 6");
  if (support.points.empty()) throw std::invalid_argument("empty support");
  std::vector<IVec> pts = support.points;
  for (const auto& p : pts) {
    if (static_cast<int>(p.size()) != n) throw std::invalid_argument("support point of wrong dimension");
    for (long long v : p)
      if (v < 0) throw std::invalid_argument("support points must be nonnegative");
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() > 64) throw std::invalid_argument("support too large for exact enumeration");

  double work = 0;
  for (int k = 1; k <= n; ++k)
    work += binomial(static_cast<int>(pts.size()), k) * binomial(n, n - k);
  if (work > 5e6) throw std::invalid_argument("support too large for exact enumeration");

  std::set<ValidPair> candidates;
  const size_t m = pts.size();
  for (int k = 1; k <= n; ++k) {
    for_each_subset(static_cast<int>(m), k, [&](const std::vector<int>& tsel) {
      for_each_subset(n, n - k, [&](const std::vector<int>& dsel) {
        std::vector<IVec> rows;
        for (int i = 1; i < k; ++i) {
          IVec d(n);
          for (int j = 0; j < n; ++j) d[j] = pts[tsel[i]][j] - pts[tsel[0]][j];
          rows.push_back(std::move(d));
        }
        for (int j : dsel) {
          IVec e(n, 0);
          e[j] = 1;
          rows.push_back(std::move(e));
        }
        IVec a = cross_product(rows, n);
        if (!normalize_nonnegative(a)) return;
        long long l = dot(a, pts[0]);
        for (size_t i = 1; i < m; ++i) l = std::min(l, dot(a, pts[i]));
        candidates.insert({std::move(a), l});
      });
    });
  }

  NewtonPolyhedron P;
  P.support.dim = n;
  P.support.points = pts;
  for (const auto& cand : candidates) {
    std::vector<IVec> tight;
    for (const auto& p : pts)
      if (dot(cand.a, p) == cand.l) tight.push_back(p);
    std::vector<int> axes;
    for (int j = 0; j < n; ++j)
      if (cand.a[j] == 0) axes.push_back(j);
    if (face_dimension(tight, axes, n) == n - 1) P.facets.push_back(cand);
  }
  std::sort(P.facets.begin(), P.facets.end());

  for (const auto& p : pts) {
    std::vector<IVec> normals;
    for (const auto& h : P.facets)
      if (dot(h.a, p) == h.l) normals.push_back(h.a);
    if (irank(normals, n) == n) P.vertices.push_back(p);
  }

  // Representation cross-checks: every facet supports at least one
  // vertex, and the support lies inside every facet half-space.
  for (const auto& h : P.facets) {
    bool touched = false;
    for (const auto& v : P.vertices)
      if (dot(h.a, v) == h.l) {
        touched = true;
        break;
      }
    if (!touched) throw std::logic_error("facet without a tight vertex");
  }
  return P;
}

bool contains(const NewtonPolyhedron& P, std::span<const Rat> q) {
  if (static_cast<int>(q.size()) != P.support.dim)
    throw std::invalid_argument("point of wrong dimension");
  for (const Rat& c : q)
    if (c < 0) return false;
  for (const auto& h : P.facets)
    if (dot(h.a, q) < h.l) return false;
  return true;
}

Face minimal_face_containing(const NewtonPolyhedron& P, std::span<const Rat> q) {
  const int n = P.support.dim;
  if (!contains(P, q)) throw std::invalid_argument("point lies outside the polyhedron");
  std::vector<ValidPair> tight;
  for (const auto& h : P.facets)
    if (dot(h.a, q) == h.l) tight.push_back(h);
  for (int j = 0; j < n; ++j)
    if (q[j] == 0) {
      IVec e(n, 0);
      e[j] = 1;
      tight.push_back({std::move(e), 0});
    }
  if (tight.empty()) {
    Face whole;
    whole.trivial = true;
    whole.dim = n;
    whole.compact = false;
    whole.tight_vertices = P.vertices;
    for (int j = 0; j < n; ++j) whole.recession.push_back(j);
    return whole;
  }
  Face face = build_face(P, std::move(tight));
  if (face.tight_vertices.empty()) throw std::logic_error("face without vertices");
  return face;
}

std::vector<IVec> face_lattice_points(const NewtonPolyhedron& P, const Face& face) {
  const int n = P.support.dim;
  if (!face.compact) throw std::invalid_argument("face is not compact");
  IVec lo(n), hi(n);
  for (int j = 0; j < n; ++j) {
    lo[j] = face.tight_vertices[0][j];
    hi[j] = face.tight_vertices[0][j];
    for (const auto& v : face.tight_vertices) {
      lo[j] = std::min(lo[j], v[j]);
      hi[j] = std::max(hi[j], v[j]);
    }
  }
  double box = 1;
  for (int j = 0; j < n; ++j) box *= static_cast<double>(hi[j] - lo[j] + 1);
  if (box > 1e7) throw std::invalid_argument("face bounding box too large to enumerate");

  std::vector<IVec> out;
  IVec p = lo;
  for (;;) {
    bool on = true;
    for (const auto& h : face.defining)
      if (dot(h.a, p) != h.l) {
        on = false;
        break;
      }
    if (on) {
      RVec q(n);
      for (int j = 0; j < n; ++j) q[j] = p[j];
      if (contains(P, q)) out.push_back(p);
    }
    int j = n - 1;
    while (j >= 0 && p[j] == hi[j]) {
      p[j] = lo[j];
      --j;
    }
    if (j < 0) break;
    ++p[j];
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Face> compact_faces(const NewtonPolyhedron& P) {
  const size_t nf = P.facets.size();
  if (nf > 64) throw std::invalid_argument("too many facets for face enumeration");
  // Tight-facet masks of vertices, closed under intersection, enumerate
  // every face spanned by vertices; the compact ones have no free axis.
  std::vector<uint64_t> masks;
  for (const auto& v : P.vertices) {
    uint64_t m = 0;
    for (size_t i = 0; i < nf; ++i)
      if (dot(P.facets[i].a, v) == P.facets[i].l) m |= uint64_t(1) << i;
    masks.push_back(m);
  }
  std::set<uint64_t> closure(masks.begin(), masks.end());
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<uint64_t> cur(closure.begin(), closure.end());
    for (size_t i = 0; i < cur.size(); ++i)
      for (size_t j = i + 1; j < cur.size(); ++j)
        if (closure.insert(cur[i] & cur[j]).second) grew = true;
  }

  std::vector<Face> out;
  std::set<std::vector<IVec>> seen;
  for (uint64_t m : closure) {
    if (m == 0) continue;
    std::vector<ValidPair> defining;
    for (size_t i = 0; i < nf; ++i)
      if (m & (uint64_t(1) << i)) defining.push_back(P.facets[i]);
    Face face = build_face(P, std::move(defining));
    if (!face.compact || face.tight_vertices.empty()) continue;
    if (seen.insert(face.tight_vertices).second) out.push_back(std::move(face));
  }
  std::sort(out.begin(), out.end(), [](const Face& a, const Face& b) {
    if (a.dim != b.dim) return a.dim < b.dim;
    return a.tight_vertices < b.tight_vertices;
  });
  return out;
}

bool same_face(const Face& a, const Face& b) {
  return a.trivial == b.trivial && a.tight_vertices == b.tight_vertices &&
         a.recession == b.recession;
}

bool point_on_face(const Face& face, std::span<const long long> p) {
  if (face.trivial) return true;
  IVec q(p.begin(), p.end());
  for (const auto& h : face.defining)
    if (dot(h.a, q) != h.l) return false;
  return true;
}

}  // namespace bergman
