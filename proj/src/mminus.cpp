#include "loewner/mminus.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace loewner {

double herglotz_defect(const PowerSeriesMap2& H, const Point2& z) {
    if (!z.inside_ball())
        throw std::invalid_argument("herglotz_defect: point is not inside the unit ball");
    const Point2 w = eval(H, z);
    return std::real(w.z1 * std::conj(z.z1) + w.z2 * std::conj(z.z2));
}

void require_field_normalized(const PowerSeriesMap2& H, double tol) {
    auto near = [tol](Complex have, Complex want) { return std::abs(have - want) <= tol; };
    if (!near(coefficient(H, 1, {0, 0}), 0.0) || !near(coefficient(H, 2, {0, 0}), 0.0))
        throw std::invalid_argument("field normalization: H(0) != 0");
    if (!near(coefficient(H, 1, {1, 0}), -1.0) || !near(coefficient(H, 2, {0, 1}), -1.0) ||
        !near(coefficient(H, 1, {0, 1}), 0.0) || !near(coefficient(H, 2, {1, 0}), 0.0))
        throw std::invalid_argument("field normalization: dH_0 != -id");
}

namespace {

// Strict total order making the scan's argmax unique: larger defect first,
// then lexicographic point order, then index.
struct DefectOrder {
    const std::vector<Point2>& pts;
    bool operator()(const ScanHit& a, const ScanHit& b) const {
        if (a.value != b.value) return a.value > b.value;
        const Point2 &pa = pts[a.index], &pb = pts[b.index];
        if (!(pa == pb)) return point_lex_less(pa, pb);
        return a.index < b.index;
    }
};

}  // namespace

MembershipReport check_mminus(const PowerSeriesMap2& H, const SamplingConfig& cfg) {
    cfg.validate();
    require_field_normalized(H);

    const std::vector<Point2> pts = sample_points(cfg);
    const ScanHit best = scan_best(
        pts.size(), [&](std::size_t i) { return herglotz_defect(H, pts[i]); }, DefectOrder{pts});

    // The raw defect of any normalized field tends to 0 from below as z -> 0,
    // so a refinement seeded and driven by raw values drifts to the origin and
    // can miss violations that only open up near the sphere. Refine the
    // scale-invariant ratio defect/|z|^2 instead (its supremum lives at the
    // boundary) and report the raw defect at the refined point.
    auto scaled_defect = [&](const Point2& z) {
        const double n2 = z.norm_sq();
        if (!(n2 > 0.0)) return -std::numeric_limits<double>::infinity();
        return herglotz_defect(H, z) / n2;
    };
    const ScanHit seed =
        scan_best(pts.size(), [&](std::size_t i) { return scaled_defect(pts[i]); }, DefectOrder{pts});
    const RefineResult refined = refine_ascent(scaled_defect, pts[seed.index]);
    const double at_refined = herglotz_defect(H, refined.point);

    MembershipReport report;
    report.max_defect = at_refined > best.value ? at_refined : best.value;
    report.witness = at_refined > best.value ? refined.point : pts[best.index];
    report.accepted = report.max_defect <= cfg.defect_tolerance;
    report.samples_used = static_cast<long long>(pts.size());
    report.seed = cfg.rng_seed;
    return report;
}

double fourier_average(const PowerSeriesMap2& H, double x, double y) {
    if (x < 0.0 || y < 0.0)
        throw std::invalid_argument("fourier_average: moduli must be nonnegative");
    if (x * x + y * y >= 1.0)
        throw std::invalid_argument("fourier_average: point is not inside the unit ball");
    require_field_normalized(H);

    const Complex q = coefficient(H, 1, {0, 2});
    const double eta = q == 0.0 ? 0.0 : std::arg(q);

    constexpr int N = 512;
    double sum = 0.0;
    for (int k = 0; k < N; ++k) {
        const double theta = 4.0 * std::numbers::pi * k / N;
        const Point2 z{x * std::polar(1.0, theta + eta), y * std::polar(1.0, theta / 2.0)};
        sum += herglotz_defect(H, z);
    }
    return sum / N;
}

namespace {

// Objective of the sharp-bound reduction on the shell of radius r:
// (x^2 + y^2)/(x y^2) with y^2 = r^2 - x^2.
double shell_objective(double x, double r) { return r * r / (x * (r * r - x * x)); }

// Golden-section minimization of f on [lo, hi] (unimodal).
template <class F>
double golden_min(F f, double lo, double hi) {
    constexpr double invphi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 120 && (b - a) > 1e-14; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

BoundResult sharp_shear_bound() {
    BoundResult best;
    best.bound = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 12; ++k) {
        const double r = 1.0 - std::pow(10.0, -k);
        const double x =
            golden_min([r](double u) { return shell_objective(u, r); }, 0.01 * r, 0.99 * r);
        const double v = shell_objective(x, r);
        if (v < best.bound) {
            best.bound = v;
            best.direction_x = x / r;
            best.direction_y = std::sqrt(r * r - x * x) / r;
        }
    }
    return best;
}

namespace {

BoundResult bound_bruteforce_impl(double spacing, bool parallel) {
    if (!(spacing > 0.0) || spacing >= 0.5)
        throw std::invalid_argument("bruteforce bound: spacing must be in (0, 0.5)");
    const long long I = std::llround(1.0 / spacing);
    const double Id = static_cast<double>(I);

    // Row minimum over x for one shell index; rows are the parallel axis.
    auto row_min = [Id](std::size_t row) {
        const long long i = static_cast<long long>(row) + 1;
        const double r = static_cast<double>(i) / Id;
        double m = std::numeric_limits<double>::infinity();
        for (long long j = 1; j < i; ++j)
            m = std::min(m, shell_objective(static_cast<double>(j) / Id, r));
        return m;
    };
    auto better = [](const ScanHit& a, const ScanHit& b) {
        if (a.value != b.value) return a.value < b.value;
        return a.index < b.index;
    };

    const std::size_t rows = static_cast<std::size_t>(I);
    const ScanHit best = parallel ? scan_best_parallel(rows, row_min, better, worker_count())
                                  : scan_best_serial(rows, row_min, better);

    // Reconstruct the attaining (x, r) from the winning row.
    const long long i = static_cast<long long>(best.index) + 1;
    const double r = static_cast<double>(i) / Id;
    double m = std::numeric_limits<double>::infinity();
    double bx = 0.0;
    for (long long j = 1; j < i; ++j) {
        const double x = static_cast<double>(j) / Id;
        const double v = shell_objective(x, r);
        if (v < m) {
            m = v;
            bx = x;
        }
    }
    return {best.value, bx / r, std::sqrt(r * r - bx * bx) / r};
}

}  // namespace

BoundResult sharp_shear_bound_bruteforce(double spacing) {
    return bound_bruteforce_impl(spacing, true);
}

BoundResult sharp_shear_bound_bruteforce_serial(double spacing) {
    return bound_bruteforce_impl(spacing, false);
}

bool shear_membership_threshold(Complex a) {
    static const double bound = sharp_shear_bound().bound;
    return std::abs(a) <= bound + 1e-9;
}

}  // namespace loewner
