#pragma once

// Shear maps of C^2: triples (lambda, mu, A) encoding
//   (z1, z2) |-> (lambda*z1 + A*z2^2, mu*z2).
// These form a group under composition; the shear of a map h is the unique
// shear with the same linear part and the same (0,2)-coefficient in the
// first component.

#include <numbers>
#include <stdexcept>

#include "loewner/series.hpp"

namespace loewner {

// Supremum of |a| over shears (z1 + a z2^2, z2) whose associated vector
// field -z1 + a z2^2, -z2 stays dissipative on the unit ball: 3*sqrt(3)/2.
inline const double kExtremalShearCoefficient = 1.5 * std::numbers::sqrt3;

struct ShearMap {
    Complex lambda{1.0};
    Complex mu{1.0};
    Complex A{0.0};

    bool operator==(const ShearMap&) const = default;
};

// Raised when a series is handed to shear_of but is not of shear-compatible
// shape (wrong linear part, constant term, ...).
class not_shearable_error : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// Extract the shear of a power-series map: lambda and mu are the diagonal
// linear coefficients, A is the (0,2)-coefficient of the first component.
// Requires h(0) = 0, off-diagonal linear coefficients within `tol` of zero,
// and |lambda|, |mu| > tol (invertible linear part). With tol = 0 the checks
// are exact.
ShearMap shear_of(const PowerSeriesMap2& h, double tol = 0.0);

// The shear as a power-series map of truncation degree `trunc` (>= 2).
PowerSeriesMap2 shear_to_series(const ShearMap& s, int trunc);

// Group law: shear of the composition s after r, i.e. s(r(z)).
ShearMap shear_compose(const ShearMap& s, const ShearMap& r);

// Group inverse: shear_compose(s, shear_inverse(s)) is the identity shear.
ShearMap shear_inverse(const ShearMap& s);

// Convenience: the normalized shear (z1 + a z2^2, z2) as a series map.
PowerSeriesMap2 shear_series(Complex a, int trunc = 8);

// The associated vector field (-z1 + q z2^2, -z2) as a series map.
PowerSeriesMap2 shear_field_series(Complex q, int trunc = 8);

}  // namespace loewner
