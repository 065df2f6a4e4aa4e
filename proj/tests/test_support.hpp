#pragma once

#include <complex>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "loewner/series.hpp"
#include "loewner/shear.hpp"

namespace loewner::testing {

struct TermSpec {
    int a1;
    int a2;
    Complex value;
};

inline PowerSeriesMap2 make_map(int trunc, const std::vector<TermSpec>& comp1,
                                const std::vector<TermSpec>& comp2) {
    std::vector<SeriesTerm> t1, t2;
    for (const auto& t : comp1) t1.push_back({{t.a1, t.a2}, t.value});
    for (const auto& t : comp2) t2.push_back({{t.a1, t.a2}, t.value});
    return PowerSeriesMap2(trunc, t1, t2);
}

inline Complex random_complex(std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    const double re = u(rng);
    const double im = u(rng);
    return {re, im};
}

// Random map fixing the origin with dense coefficients up to max_degree.
inline PowerSeriesMap2 random_origin_fixed(std::mt19937_64& rng, int trunc, int max_degree,
                                           double scale = 1.0) {
    std::vector<SeriesTerm> t1, t2;
    for (int d = 1; d <= max_degree; ++d)
        for (int e1 = d; e1 >= 0; --e1) {
            t1.push_back({{e1, d - e1}, random_complex(rng, scale)});
            t2.push_back({{e1, d - e1}, random_complex(rng, scale)});
        }
    return PowerSeriesMap2(trunc, t1, t2);
}

// Random vector field with the normalization H(0) = 0, dH_0 = -id.
inline PowerSeriesMap2 random_normalized_field(std::mt19937_64& rng, int trunc, int max_degree,
                                               double scale = 1.0) {
    std::vector<SeriesTerm> t1{{{1, 0}, {-1.0, 0.0}}};
    std::vector<SeriesTerm> t2{{{0, 1}, {-1.0, 0.0}}};
    for (int d = 2; d <= max_degree; ++d)
        for (int e1 = d; e1 >= 0; --e1) {
            t1.push_back({{e1, d - e1}, random_complex(rng, scale)});
            t2.push_back({{e1, d - e1}, random_complex(rng, scale)});
        }
    return PowerSeriesMap2(trunc, t1, t2);
}

inline ShearMap random_shear(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> mag(0.5, 2.0);
    std::uniform_real_distribution<double> ph(0.0, 6.283185307179586);
    ShearMap s;
    s.lambda = std::polar(mag(rng), ph(rng));
    s.mu = std::polar(mag(rng), ph(rng));
    s.A = random_complex(rng, 2.0);
    return s;
}

inline Point2 random_ball_point(std::mt19937_64& rng, double radius_cap = 0.95) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (;;) {
        Point2 z{{u(rng), u(rng)}, {u(rng), u(rng)}};
        if (z.norm_sq() < 1.0) return {z.z1 * radius_cap, z.z2 * radius_cap};
    }
}

inline std::string cli_binary() {
    const char* p = std::getenv("LOEWNER_CLI_BIN");
    return p ? p : "";
}

}  // namespace loewner::testing
