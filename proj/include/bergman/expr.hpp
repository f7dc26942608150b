#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bergman/rational.hpp"

namespace bergman {

// A single monomial c * x1^a1 ... xn^an in the radial variables
// x_j = |z_j|.  Coefficients are positive and every exponent is a
// nonnegative even integer (rotation invariance); the exponent vector is
// never identically zero.
struct MonomialTerm {
  Rat coeff;
  std::vector<long long> alpha;
};

// A flat term c * exp(-1/(x1^b1 ... xn^bn)).  All derivatives vanish at
// the origin, so flat terms contribute nothing to the support.
struct FlatTerm {
  Rat coeff;
  std::vector<Rat> beta;  // nonnegative rationals, at least one positive
};

// Radial profile f(x) = F(z), x_j = |z_j|, of a rotation-invariant model
// function: a nonempty sum of positive monomials plus optional flat
// terms.  Immutable after construction; evaluation is pure.
struct ModelFunction {
  int dim = 0;
  std::vector<MonomialTerm> monomials;
  std::vector<FlatTerm> flats;
};

struct ParseError : std::runtime_error {
  size_t position;
  ParseError(size_t pos, const std::string& msg)
      : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"),
        position(pos) {}
};

// Grammar: term ("+" term)*
//   term   := [coeff "*"?] (monomial | flat)
//   monomial := ("x"k ["^" rational])+       exponents even integers
//   flat   := "exp" "(" "-" "1" "/" "(" ("x"k ["^" rational])+ ")" ")"
// Whitespace is insignificant and "*" between factors is optional.  The
// dimension is the highest variable index used anywhere.  Duplicate
// exponent vectors are merged by summing coefficients.
ModelFunction parse_model(std::string_view text);

// Canonical form: monomials sorted lexicographically by exponent vector,
// then flat terms sorted by exponent vector.  parse_model(render(f))
// reproduces f exactly.
std::string render(const ModelFunction& f);

// Pointwise value at x in R_+^n.  Total on that domain: flat terms
// evaluate to exactly 0 where their monomial vanishes or underflows.
double evaluate(const ModelFunction& f, std::span<const double> x);

// log f(e^{-t1},...,e^{-tn}), computed stably (log-sum-exp) so that
// integrands of the form f^s stay finite even where every term
// underflows to zero in double precision.
double log_evaluate_logcoord(const ModelFunction& f, std::span<const double> t);

// Gradient contribution x_j * d/dx_j of the monomial part; used by the
// Euler-identity and nondegeneracy checks.
double monomial_value(const std::vector<MonomialTerm>& terms, std::span<const double> x);
void monomial_scaled_gradient(const std::vector<MonomialTerm>& terms,
                              std::span<const double> x, std::span<double> out);

// Term-wise coefficient scaling by a positive rational.
ModelFunction scale_coefficients(const ModelFunction& f, const Rat& lambda);

// Applies x_j -> x_{perm[j]} to every exponent vector.
ModelFunction permute_coordinates(const ModelFunction& f, std::span<const int> perm);

// Copy without the flat terms (dimension preserved).
ModelFunction monomial_part(const ModelFunction& f);

// f + sum_j x_j^{two_m}; used to build the convenient upper bound in the
// sandwich comparison.
ModelFunction add_axis_powers(const ModelFunction& f, long long two_m);

// True when f(x) > 0 for every x != 0 in R_+^n, i.e. no coordinate
// subspace annihilates every term.  Monomial parts of models with flat
// terms typically fail this; it is a diagnostic, not a validity check.
bool positive_away_from_origin(const ModelFunction& f);

}  // namespace bergman
