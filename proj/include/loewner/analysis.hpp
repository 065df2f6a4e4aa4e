#pragma once

// Starlikeness verification, the z2^2 coefficient functional, growth-
// estimate screening, and the end-to-end reproduction pipeline tying the
// sharp bound, the extremal shear map and its chain together.

#include <string>

#include "loewner/flow.hpp"
#include "loewner/mminus.hpp"
#include "loewner/sampling.hpp"
#include "loewner/series.hpp"

namespace loewner {

struct StarlikeReport {
    bool accepted = false;
    double min_margin = 0.0;  // smallest Re<(df_z)^-1 f(z), z> found (refined)
    Point2 witness;
    long long samples_used = 0;
    std::uint64_t seed = 0;

    const char* verdict() const { return accepted ? "accept" : "reject"; }
};

// df_z not invertible where the starlikeness functional needs it.
class singular_jacobian_error : public std::runtime_error {
  public:
    singular_jacobian_error(const std::string& msg, const Point2& at)
        : std::runtime_error(msg), at_(at) {}
    const Point2& at() const { return at_; }

  private:
    Point2 at_;
};

// The coefficient functional f |-> (1/2) d^2 f_1 / dz2^2 at 0, i.e. the
// (0,2) Taylor coefficient of the first component. Requires f(0) = 0.
Complex functional_L102(const PowerSeriesMap2& f);

// Re<(df_z)^-1 f(z), z>; positivity at every z != 0 in the ball is the
// starlikeness criterion. Throws singular_jacobian_error when df_z is
// numerically singular.
double starlike_defect(const PowerSeriesMap2& f, const Point2& z);

// Samples starlike_defect on the membership grid (excluding the origin),
// sharpens the worst sample by coordinate descent, and accepts iff the
// refined minimum margin stays >= -cfg.defect_tolerance.
StarlikeReport check_starlike(const PowerSeriesMap2& f, const SamplingConfig& cfg);

// Screens f against the growth envelope ||z|| / (1 - ||z||)^2. The report's
// max_defect is the largest ||f(z)|| - envelope(||z||) over samples;
// rejection certifies the growth estimate fails, acceptance is inconclusive
// (never upgraded to a class-membership claim). Requires df_0 = id.
MembershipReport growth_check(const PowerSeriesMap2& f, const SamplingConfig& cfg);

// End-to-end reproduction of the sharp coefficient bound story for a
// candidate extremal map (default: Phi = (z1 + (3*sqrt3/2) z2^2, z2)):
//   1. computed_bound  = sharp_shear_bound()
//   2. functional      = L102(candidate); sharpness: |functional| ~ bound
//   3. field membership of (-z1 + functional*z2^2, -z2), starlikeness of
//      the candidate
//   4. chain recovery: lim e^t phi_{0,t} under that field ~ candidate
//   5. envelope limit: e^t * envelope_bound(0,t) at t = 20 ~ bound
// Sub-check failures are reported in the flags, never raised.
struct ReproductionReport {
    BoundResult bound;
    Complex functional_at_candidate{0.0};
    MembershipReport field_membership;
    StarlikeReport starlikeness;
    double chain_recovery_error = 0.0;   // max coefficient distance to candidate
    double envelope_limit_error = 0.0;   // |e^t * envelope(0,t) - bound| at t = 20

    bool sharpness_ok = false;  // | |functional| - bound | <= 1e-8
    bool mminus_ok = false;     // field accepted
    bool starlike_ok = false;   // candidate accepted
    bool chain_ok = false;      // chain_recovery_error <= 1e-7
    bool envelope_ok = false;   // envelope_limit_error <= 1e-7
    bool low_confidence = false;  // fewer than 1000 samples backed the verdicts

    bool all_ok() const { return sharpness_ok && mminus_ok && starlike_ok && chain_ok && envelope_ok; }
};

ReproductionReport reproduce_extremal_bound(const SamplingConfig& cfg);
ReproductionReport reproduce_extremal_bound(const SamplingConfig& cfg,
                                            const PowerSeriesMap2& candidate);

// Human-readable table: one line per sub-check with computed value,
// expected value and PASS/FAIL.
std::string render_text(const ReproductionReport& r);

}  // namespace loewner
