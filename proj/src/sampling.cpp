#include "loewner/sampling.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>

namespace loewner {

void SamplingConfig::validate() const {
    if (grid_radii < 1) throw std::invalid_argument("sampling config: grid_radii must be >= 1");
    if (grid_angles < 1) throw std::invalid_argument("sampling config: grid_angles must be >= 1");
    if (random_samples < 0)
        throw std::invalid_argument("sampling config: random_samples must be >= 0");
    if (!(defect_tolerance >= 0.0))
        throw std::invalid_argument("sampling config: defect_tolerance must be >= 0");
}

namespace {

// Uniform double in [0, 1) from the top 53 bits of the generator output.
// std::uniform_real_distribution is implementation-defined; this keeps the
// stream identical across standard libraries.
double unit_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

std::vector<Point2> sample_points(const SamplingConfig& cfg) {
    cfg.validate();

    std::vector<Point2> pts;
    const std::size_t grid_count = static_cast<std::size_t>(cfg.grid_radii) *
                                   static_cast<std::size_t>(cfg.grid_angles) *
                                   static_cast<std::size_t>(cfg.grid_angles) *
                                   static_cast<std::size_t>(cfg.grid_angles);
    pts.reserve(grid_count + static_cast<std::size_t>(cfg.random_samples));

    // Structured part: shells r_k, polar angle psi splitting |z1| vs |z2|,
    // and independent phases. psi covers [0, pi/2] inclusive so pure-z1 and
    // pure-z2 directions are always present.
    const int R = cfg.grid_radii;
    const int A = cfg.grid_angles;
    for (int k = 1; k <= R; ++k) {
        const double r = (static_cast<double>(k) / (R + 1)) * kBallRadiusCap;
        for (int i = 0; i < A; ++i) {
            const double psi =
                A == 1 ? 0.0 : (std::numbers::pi / 2) * (static_cast<double>(i) / (A - 1));
            const double m1 = r * std::cos(psi);
            const double m2 = r * std::sin(psi);
            for (int j1 = 0; j1 < A; ++j1) {
                const double t1 = 2.0 * std::numbers::pi * j1 / A;
                const Complex z1 = m1 * Complex{std::cos(t1), std::sin(t1)};
                for (int j2 = 0; j2 < A; ++j2) {
                    const double t2 = 2.0 * std::numbers::pi * j2 / A;
                    const Complex z2 = m2 * Complex{std::cos(t2), std::sin(t2)};
                    pts.push_back({z1, z2});
                }
            }
        }
    }

    // Random part: rejection sampling, uniform in the unit ball of R^4,
    // shrunk by the radius cap.
    std::mt19937_64 rng(cfg.rng_seed);
    int produced = 0;
    while (produced < cfg.random_samples) {
        const double x1 = 2.0 * unit_double(rng) - 1.0;
        const double y1 = 2.0 * unit_double(rng) - 1.0;
        const double x2 = 2.0 * unit_double(rng) - 1.0;
        const double y2 = 2.0 * unit_double(rng) - 1.0;
        if (x1 * x1 + y1 * y1 + x2 * x2 + y2 * y2 >= 1.0) continue;
        pts.push_back({Complex{x1, y1} * kBallRadiusCap, Complex{x2, y2} * kBallRadiusCap});
        ++produced;
    }

    return pts;
}

int worker_count() {
    const char* env = std::getenv("LOEWNER_THREADS");
    if (env != nullptr && *env != '\0') {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != nullptr && *end == '\0' && v > 0 && v <= 4096) return static_cast<int>(v);
    }
    return omp_get_max_threads();
}

RefineResult refine_ascent(const std::function<double(const Point2&)>& objective, Point2 start,
                           int steps, double initial_step, double radius_cap) {
    auto clamp = [radius_cap](Point2 p) {
        const double n = p.norm();
        if (n > radius_cap) {
            const double f = radius_cap / n;
            p.z1 *= f;
            p.z2 *= f;
        }
        return p;
    };

    Point2 cur = clamp(start);
    double val = objective(cur);
    double step = initial_step;

    for (int it = 0; it < steps; ++it) {
        Point2 best_pt = cur;
        double best_val = val;
        for (int axis = 0; axis < 4; ++axis) {
            for (const double sgn : {+1.0, -1.0}) {
                Point2 cand = cur;
                switch (axis) {
                    case 0: cand.z1 += Complex{sgn * step, 0.0}; break;
                    case 1: cand.z1 += Complex{0.0, sgn * step}; break;
                    case 2: cand.z2 += Complex{sgn * step, 0.0}; break;
                    default: cand.z2 += Complex{0.0, sgn * step}; break;
                }
                cand = clamp(cand);
                const double v = objective(cand);
                if (v > best_val) {
                    best_val = v;
                    best_pt = cand;
                }
            }
        }
        if (best_val > val) {
            cur = best_pt;
            val = best_val;
        } else {
            step *= 0.5;
        }
    }
    return {cur, val};
}

}  // namespace loewner
