#pragma once

// Deterministic sampling of the unit ball of C^2 and parallel scan kernels.
//
// Every scan has a serial reference and an OpenMP variant. Both produce
// bit-identical results as long as the comparator is a strict total order
// on (value, index) hits: the winning element is then unique, so the result
// does not depend on how the index range is partitioned across threads.

#include <omp.h>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "loewner/series.hpp"

namespace loewner {

// Scan points are kept strictly inside the open ball by this radius cap;
// boundary behaviour is reached by continuity.
inline constexpr double kBallRadiusCap = 1.0 - 1e-6;

struct SamplingConfig {
    int grid_radii = 40;        // radial shells r_k = (k/(R+1)) * cap, k = 1..R
    int grid_angles = 24;       // values per angular coordinate (psi, theta1, theta2)
    int random_samples = 100000;
    std::uint64_t rng_seed = 0;
    double defect_tolerance = 1e-12;  // acceptance threshold on the scanned maximum

    void validate() const;
};

// Structured grid (polar in each coordinate plane) plus seeded random points,
// all strictly inside the ball. Identical output for identical config.
std::vector<Point2> sample_points(const SamplingConfig& cfg);

// Worker count for parallel kernels. Reads LOEWNER_THREADS on every call:
// a positive integer forces that many threads, 0 / unset / malformed means
// use the OpenMP default.
int worker_count();

struct ScanHit {
    double value = 0.0;
    std::size_t index = 0;

    bool operator==(const ScanHit&) const = default;
};

// better(a, b): true when hit a strictly precedes hit b. Must be a strict
// total order (use the index as the final tie-break) or the parallel scan
// loses its determinism guarantee.

template <class Eval, class Better>
ScanHit scan_best_serial(std::size_t n, Eval&& eval, Better&& better) {
    if (n == 0) throw std::invalid_argument("scan over empty index range");
    ScanHit best{eval(std::size_t{0}), 0};
    for (std::size_t i = 1; i < n; ++i) {
        const ScanHit h{eval(i), i};
        if (better(h, best)) best = h;
    }
    return best;
}

template <class Eval, class Better>
ScanHit scan_best_parallel(std::size_t n, Eval eval, Better better, int workers) {
    if (n == 0) throw std::invalid_argument("scan over empty index range");
    const int requested = workers > 0 ? workers : omp_get_max_threads();
    std::vector<ScanHit> partial(static_cast<std::size_t>(requested));
    std::vector<char> used(static_cast<std::size_t>(requested), 0);
#pragma omp parallel num_threads(requested)
    {
        const int tid = omp_get_thread_num();
        ScanHit local{};
        bool seen = false;
#pragma omp for schedule(static)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            const ScanHit h{eval(static_cast<std::size_t>(i)), static_cast<std::size_t>(i)};
            if (!seen || better(h, local)) {
                local = h;
                seen = true;
            }
        }
        if (seen) {
            partial[static_cast<std::size_t>(tid)] = local;
            used[static_cast<std::size_t>(tid)] = 1;
        }
    }
    ScanHit best{};
    bool seen = false;
    for (std::size_t t = 0; t < partial.size(); ++t) {
        if (!used[t]) continue;
        if (!seen || better(partial[t], best)) {
            best = partial[t];
            seen = true;
        }
    }
    if (!seen) throw std::logic_error("parallel scan produced no result");
    return best;
}

// Dispatch on worker_count(): one worker runs the serial reference.
template <class Eval, class Better>
ScanHit scan_best(std::size_t n, Eval eval, Better better) {
    const int w = worker_count();
    if (w == 1) return scan_best_serial(n, eval, better);
    return scan_best_parallel(n, eval, better, w);
}

template <class Fn>
void for_each_index_serial(std::size_t n, Fn&& fn) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
}

template <class Fn>
void for_each_index_parallel(std::size_t n, Fn fn, int workers) {
    const int requested = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(requested)
    for (long long i = 0; i < static_cast<long long>(n); ++i) fn(static_cast<std::size_t>(i));
}

template <class Fn>
void for_each_index(std::size_t n, Fn fn) {
    const int w = worker_count();
    if (w == 1)
        for_each_index_serial(n, fn);
    else
        for_each_index_parallel(n, fn, w);
}

struct RefineResult {
    Point2 point;
    double value = 0.0;
};

// Deterministic coordinate ascent on the four real coordinates of a point,
// capped to `radius_cap`. Step halves whenever no axis move improves the
// objective. Used to polish scan maxima before a verdict is issued.
RefineResult refine_ascent(const std::function<double(const Point2&)>& objective, Point2 start,
                           int steps = 50, double initial_step = 0.01,
                           double radius_cap = kBallRadiusCap);

}  // namespace loewner
