#include "loewner/shear.hpp"

#include <cmath>

namespace loewner {

ShearMap shear_of(const PowerSeriesMap2& h, double tol) {
    auto small = [tol](Complex c) { return std::abs(c) <= tol; };

    if (!small(coefficient(h, 1, {0, 0})) || !small(coefficient(h, 2, {0, 0})))
        throw not_shearable_error("shear_of: map does not fix the origin");
    if (!small(coefficient(h, 1, {0, 1})) || !small(coefficient(h, 2, {1, 0})))
        throw not_shearable_error("shear_of: linear part is not diagonal");

    ShearMap s;
    s.lambda = coefficient(h, 1, {1, 0});
    s.mu = coefficient(h, 2, {0, 1});
    s.A = coefficient(h, 1, {0, 2});
    if (std::abs(s.lambda) <= tol || std::abs(s.mu) <= tol)
        throw not_shearable_error("shear_of: linear part is singular");
    return s;
}

PowerSeriesMap2 shear_to_series(const ShearMap& s, int trunc) {
    if (trunc < 2) throw std::invalid_argument("shear_to_series: truncation degree must be >= 2");
    return PowerSeriesMap2(trunc, {{{1, 0}, s.lambda}, {{0, 2}, s.A}}, {{{0, 1}, s.mu}});
}

ShearMap shear_compose(const ShearMap& s, const ShearMap& r) {
    // s(r(z)) = (lam_s*(lam_r z1 + A_r z2^2) + A_s*(mu_r z2)^2, mu_s mu_r z2).
    ShearMap out;
    out.lambda = s.lambda * r.lambda;
    out.mu = s.mu * r.mu;
    out.A = s.lambda * r.A + s.A * r.mu * r.mu;
    return out;
}

ShearMap shear_inverse(const ShearMap& s) {
    if (s.lambda == 0.0 || s.mu == 0.0)
        throw std::invalid_argument("shear_inverse: singular shear");
    ShearMap out;
    out.lambda = 1.0 / s.lambda;
    out.mu = 1.0 / s.mu;
    out.A = -s.A / (s.lambda * s.mu * s.mu);
    return out;
}

PowerSeriesMap2 shear_series(Complex a, int trunc) {
    return shear_to_series(ShearMap{1.0, 1.0, a}, trunc);
}

PowerSeriesMap2 shear_field_series(Complex q, int trunc) {
    if (trunc < 2)
        throw std::invalid_argument("shear_field_series: truncation degree must be >= 2");
    return PowerSeriesMap2(trunc, {{{1, 0}, -1.0}, {{0, 2}, q}}, {{{0, 1}, -1.0}});
}

}  // namespace loewner
