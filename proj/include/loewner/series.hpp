#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace loewner {

using Complex = std::complex<double>;

/// Exponent pair of the bivariate monomial z1^e1 z2^e2.
struct MultiIndex {
    int e1 = 0;
    int e2 = 0;

    int total() const { return e1 + e2; }

    friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

    // Graded-lex order with z1 > z2: lower total degree first, then higher e1.
    friend bool operator<(const MultiIndex& a, const MultiIndex& b) {
        if (a.total() != b.total()) return a.total() < b.total();
        return a.e1 > b.e1;
    }
};

/// A point of C^2.
struct Point2 {
    Complex z1{};
    Complex z2{};

    double norm_sq() const { return std::norm(z1) + std::norm(z2); }
    double norm() const { return std::sqrt(norm_sq()); }
    bool inside_ball() const { return norm_sq() < 1.0; }

    friend bool operator==(const Point2&, const Point2&) = default;
};

/// Strict total order on points: (Re z1, Im z1, Re z2, Im z2) lexicographic.
bool point_lex_less(const Point2& a, const Point2& b);

struct SeriesTerm {
    MultiIndex index;
    Complex value;

    friend bool operator==(const SeriesTerm&, const SeriesTerm&) = default;
};

/// 2x2 complex matrix (row major), as produced by jacobian_at.
struct Mat2c {
    Complex m00{}, m01{}, m10{}, m11{};

    Complex det() const { return m00 * m11 - m01 * m10; }

    friend bool operator==(const Mat2c&, const Mat2c&) = default;
};

/// Holomorphic map of B^2 stored as two truncated bivariate power series.
///
/// Terms are sorted in graded-lex order with exact zeros dropped, so equal
/// maps compare equal term-by-term and serialization is canonical. Values are
/// immutable after construction.
class PowerSeriesMap2 {
  public:
    PowerSeriesMap2(int trunc_degree, std::vector<SeriesTerm> comp1,
                    std::vector<SeriesTerm> comp2);

    static PowerSeriesMap2 zero(int trunc_degree);
    static PowerSeriesMap2 identity(int trunc_degree);

    int trunc_degree() const { return trunc_degree_; }

    /// Sorted nonzero terms of component 1 or 2.
    const std::vector<SeriesTerm>& component(int comp) const;

    friend bool operator==(const PowerSeriesMap2&, const PowerSeriesMap2&) = default;

  private:
    int trunc_degree_;
    std::array<std::vector<SeriesTerm>, 2> comps_;
};

/// Stored coefficient of z^idx in the given component; zero if absent.
Complex coefficient(const PowerSeriesMap2& f, int comp, MultiIndex idx);

/// Evaluate both components at z. Exact for the stored polynomial.
Point2 eval(const PowerSeriesMap2& f, const Point2& z);

/// Matrix of partial derivatives d f_i / d z_j at z, by term-wise
/// differentiation of the stored polynomial.
Mat2c jacobian_at(const PowerSeriesMap2& f, const Point2& z);

/// Taylor coefficients of h(g(z)), truncated to the smaller of the two
/// truncation degrees. Both inputs must fix the origin.
PowerSeriesMap2 compose(const PowerSeriesMap2& h, const PowerSeriesMap2& g);

/// Coefficient-wise sum; truncation degree is the smaller of the two.
PowerSeriesMap2 add(const PowerSeriesMap2& f, const PowerSeriesMap2& g);

/// Coefficient-wise scalar multiple.
PowerSeriesMap2 scale(Complex c, const PowerSeriesMap2& f);

/// True when the alpha = (0,0) coefficient vanishes in both components.
bool fixes_origin(const PowerSeriesMap2& f);

/// Largest |coefficient difference| over all indices of either map.
double max_coeff_distance(const PowerSeriesMap2& f, const PowerSeriesMap2& g);

}  // namespace loewner
