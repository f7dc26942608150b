#pragma once

#include <span>
#include <vector>

#include "bergman/rational.hpp"

namespace bergman {

using IVec = std::vector<long long>;
using RVec = std::vector<Rat>;

// Finite set of lattice points generating conv(S) + R_+^n.
struct SupportSet {
  int dim = 0;
  std::vector<IVec> points;
};

// Half-space <a,x> >= l containing the polyhedron.  Facet normals are
// primitive vectors in Z_+^n because the recession cone is R_+^n.
struct ValidPair {
  IVec a;
  long long l = 0;
  friend auto operator<=>(const ValidPair&, const ValidPair&) = default;
};

// A face of the polyhedron, stored as conv(tight vertices) + cone of the
// recession axes.  The trivial face is the polyhedron itself; dim == -1
// encodes the empty face (never produced by the queries below).
struct Face {
  std::vector<ValidPair> defining;  // hyperplanes tight on the face
  std::vector<IVec> tight_vertices;
  std::vector<int> recession;  // axis indices j with e_j in the recession cone
  int dim = -1;
  bool compact = false;
  bool trivial = false;
};

// Unbounded polyhedron conv(support) + R_+^n with cross-validated vertex
// and irredundant facet representations, both canonical (sorted), so
// permuting the input support yields identical output.
struct NewtonPolyhedron {
  SupportSet support;
  std::vector<IVec> vertices;
  std::vector<ValidPair> facets;
};

// Exact construction by enumerating candidate facet normals over
// affinely independent subsets of support points and recession axes.
// Works for dim <= 6 and small supports; larger inputs are rejected.
NewtonPolyhedron newton_polyhedron(const SupportSet& support);

// Membership in exact rational arithmetic: all facet inequalities plus
// the axis constraints q_j >= 0.
bool contains(const NewtonPolyhedron& P, std::span<const Rat> q);

// The face cut out by every facet/axis hyperplane tight at q; the
// trivial face when nothing is tight.  Throws if q lies outside P.
Face minimal_face_containing(const NewtonPolyhedron& P, std::span<const Rat> q);

// All lattice points on a compact face (bounding-box enumeration).
std::vector<IVec> face_lattice_points(const NewtonPolyhedron& P, const Face& face);

// Every compact face, canonically ordered (vertices first).
std::vector<Face> compact_faces(const NewtonPolyhedron& P);

// Geometric equality of faces, possibly of different polyhedra.
bool same_face(const Face& a, const Face& b);

bool point_on_face(const Face& face, std::span<const long long> p);

}  // namespace bergman
