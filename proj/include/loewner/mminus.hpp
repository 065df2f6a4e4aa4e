#pragma once

// Membership testing for the dissipative Herglotz class: holomorphic fields
// H with H(0) = 0, dH_0 = -id and Re<H(z), z> <= 0 on the unit ball. Also
// hosts the rotation-averaging reduction of the defect and the sharp bound
// on the z2^2 shear coefficient derived from it.

#include <cstdint>

#include "loewner/sampling.hpp"
#include "loewner/series.hpp"

namespace loewner {

struct MembershipReport {
    bool accepted = false;
    double max_defect = 0.0;   // largest Re<H(z), z> found (refined)
    Point2 witness;            // point attaining max_defect
    long long samples_used = 0;
    std::uint64_t seed = 0;

    const char* verdict() const { return accepted ? "accept" : "reject"; }
};

// Re(H1(z)*conj(z1) + H2(z)*conj(z2)); the field is admissible at z when
// this is <= 0. Rejects points on or outside the unit sphere.
double herglotz_defect(const PowerSeriesMap2& H, const Point2& z);

// Throws std::invalid_argument unless H(0) = 0 and dH_0 = -id within tol.
void require_field_normalized(const PowerSeriesMap2& H, double tol = 1e-12);

// Falsification sampler for the class: scans the deterministic grid plus
// seeded random points, sharpens the worst sample by coordinate ascent, and
// accepts iff the refined maximum defect stays <= cfg.defect_tolerance.
// "accept" means no violation found at this resolution, not a certificate.
MembershipReport check_mminus(const PowerSeriesMap2& H, const SamplingConfig& cfg);

// (1/4pi) * integral over theta in [0, 4pi] of the defect along the path
// z1 = x e^{i(theta+eta)}, z2 = y e^{i theta/2}, where eta is the argument
// of the z2^2 coefficient q of the first component (eta = 0 when q = 0).
// For polynomial H this equals -x^2 - y^2 + |q| x y^2 exactly: the composite
// trapezoid rule with 512 nodes is exact for the integrand's frequencies.
double fourier_average(const PowerSeriesMap2& H, double x, double y);

struct BoundResult {
    double bound = 0.0;        // inf of (x^2+y^2)/(x y^2) over the ball
    double direction_x = 0.0;  // attaining direction on the unit sphere
    double direction_y = 0.0;
};

// Sharp admissibility bound for the z2^2 coefficient of a shear field:
// inf over {x, y > 0, x^2 + y^2 < 1} of (x^2+y^2)/(x y^2), computed by the
// reduction y^2 = r^2 - x^2 on shells r -> 1 with golden-section search in
// x. The infimum is 3*sqrt(3)/2, attained in direction (1/sqrt3, sqrt(2/3)).
BoundResult sharp_shear_bound();

// Independent cross-check: brute-force minimum of the same objective over
// an equispaced (x, r) grid, r up to 1 inclusive (closed-ball extension by
// continuity). Parallel and serial variants produce identical results.
BoundResult sharp_shear_bound_bruteforce(double spacing = 1e-4);
BoundResult sharp_shear_bound_bruteforce_serial(double spacing = 1e-4);

// accept iff |a| <= sharp_shear_bound() + 1e-9; equivalently, whether the
// shear field (-z1 + a z2^2, -z2) lies in the class. The bound is computed
// once and cached.
bool shear_membership_threshold(Complex a);

}  // namespace loewner
