#include "loewner/series.hpp"

#include <algorithm>
#include <map>
#include <utility>

namespace loewner {

namespace {

std::vector<SeriesTerm> canonicalize(int trunc_degree, std::vector<SeriesTerm> terms) {
    std::map<MultiIndex, Complex> acc;
    for (const auto& t : terms) {
        if (t.index.e1 < 0 || t.index.e2 < 0)
            throw std::invalid_argument("series term with negative exponent");
        if (t.index.total() > trunc_degree)
            throw std::invalid_argument("series term above truncation degree");
        acc[t.index] += t.value;
    }
    std::vector<SeriesTerm> out;
    out.reserve(acc.size());
    for (const auto& [idx, val] : acc)
        if (val != 0.0) out.push_back({idx, val});
    return out;
}

// One truncated bivariate series, used internally by compose.
struct TruncSeries {
    int trunc;
    std::vector<SeriesTerm> terms;  // sorted, unique, nonzero

    static TruncSeries constant(Complex c, int trunc) {
        TruncSeries s{trunc, {}};
        if (c != 0.0) s.terms.push_back({{0, 0}, c});
        return s;
    }
};

TruncSeries add_terms(const TruncSeries& a, const TruncSeries& b) {
    std::map<MultiIndex, Complex> acc;
    for (const auto& t : a.terms) acc[t.index] += t.value;
    for (const auto& t : b.terms) acc[t.index] += t.value;
    TruncSeries out{a.trunc, {}};
    for (const auto& [idx, val] : acc)
        if (val != 0.0) out.terms.push_back({idx, val});
    return out;
}

// Product truncated to `trunc` total degree, discarding high terms as they
// would be formed.
TruncSeries mul_trunc(const TruncSeries& a, const TruncSeries& b) {
    std::map<MultiIndex, Complex> acc;
    for (const auto& ta : a.terms) {
        for (const auto& tb : b.terms) {
            const MultiIndex idx{ta.index.e1 + tb.index.e1, ta.index.e2 + tb.index.e2};
            if (idx.total() > a.trunc) continue;
            acc[idx] += ta.value * tb.value;
        }
    }
    TruncSeries out{a.trunc, {}};
    for (const auto& [idx, val] : acc)
        if (val != 0.0) out.terms.push_back({idx, val});
    return out;
}

}  // namespace

bool point_lex_less(const Point2& a, const Point2& b) {
    const std::array<double, 4> ka{a.z1.real(), a.z1.imag(), a.z2.real(), a.z2.imag()};
    const std::array<double, 4> kb{b.z1.real(), b.z1.imag(), b.z2.real(), b.z2.imag()};
    return ka < kb;
}

PowerSeriesMap2::PowerSeriesMap2(int trunc_degree, std::vector<SeriesTerm> comp1,
                                 std::vector<SeriesTerm> comp2)
    : trunc_degree_(trunc_degree) {
    if (trunc_degree < 1) throw std::invalid_argument("truncation degree must be >= 1");
    comps_[0] = canonicalize(trunc_degree, std::move(comp1));
    comps_[1] = canonicalize(trunc_degree, std::move(comp2));
}

PowerSeriesMap2 PowerSeriesMap2::zero(int trunc_degree) {
    return PowerSeriesMap2(trunc_degree, {}, {});
}

PowerSeriesMap2 PowerSeriesMap2::identity(int trunc_degree) {
    return PowerSeriesMap2(trunc_degree, {{{1, 0}, 1.0}}, {{{0, 1}, 1.0}});
}

const std::vector<SeriesTerm>& PowerSeriesMap2::component(int comp) const {
    if (comp != 1 && comp != 2) throw std::invalid_argument("component must be 1 or 2");
    return comps_[static_cast<std::size_t>(comp - 1)];
}

Complex coefficient(const PowerSeriesMap2& f, int comp, MultiIndex idx) {
    const auto& terms = f.component(comp);
    auto it = std::lower_bound(terms.begin(), terms.end(), idx,
                               [](const SeriesTerm& t, const MultiIndex& i) { return t.index < i; });
    if (it != terms.end() && it->index == idx) return it->value;
    return 0.0;
}

Point2 eval(const PowerSeriesMap2& f, const Point2& z) {
    const int d = f.trunc_degree();
    std::vector<Complex> p1(static_cast<std::size_t>(d) + 1), p2(static_cast<std::size_t>(d) + 1);
    p1[0] = p2[0] = 1.0;
    for (int k = 1; k <= d; ++k) {
        p1[static_cast<std::size_t>(k)] = p1[static_cast<std::size_t>(k - 1)] * z.z1;
        p2[static_cast<std::size_t>(k)] = p2[static_cast<std::size_t>(k - 1)] * z.z2;
    }
    Point2 out{};
    Complex* comp_out[2] = {&out.z1, &out.z2};
    for (int c = 0; c < 2; ++c) {
        Complex sum = 0.0;
        for (const auto& t : f.component(c + 1))
            sum += t.value * p1[static_cast<std::size_t>(t.index.e1)] *
                   p2[static_cast<std::size_t>(t.index.e2)];
        *comp_out[c] = sum;
    }
    return out;
}

Mat2c jacobian_at(const PowerSeriesMap2& f, const Point2& z) {
    const int d = f.trunc_degree();
    std::vector<Complex> p1(static_cast<std::size_t>(d) + 1), p2(static_cast<std::size_t>(d) + 1);
    p1[0] = p2[0] = 1.0;
    for (int k = 1; k <= d; ++k) {
        p1[static_cast<std::size_t>(k)] = p1[static_cast<std::size_t>(k - 1)] * z.z1;
        p2[static_cast<std::size_t>(k)] = p2[static_cast<std::size_t>(k - 1)] * z.z2;
    }
    Mat2c J{};
    Complex* rows[2][2] = {{&J.m00, &J.m01}, {&J.m10, &J.m11}};
    for (int c = 0; c < 2; ++c) {
        Complex d1 = 0.0, d2 = 0.0;
        for (const auto& t : f.component(c + 1)) {
            const int a = t.index.e1, b = t.index.e2;
            if (a > 0)
                d1 += t.value * static_cast<double>(a) * p1[static_cast<std::size_t>(a - 1)] *
                      p2[static_cast<std::size_t>(b)];
            if (b > 0)
                d2 += t.value * static_cast<double>(b) * p1[static_cast<std::size_t>(a)] *
                      p2[static_cast<std::size_t>(b - 1)];
        }
        *rows[c][0] = d1;
        *rows[c][1] = d2;
    }
    return J;
}

bool fixes_origin(const PowerSeriesMap2& f) {
    return coefficient(f, 1, {0, 0}) == 0.0 && coefficient(f, 2, {0, 0}) == 0.0;
}

PowerSeriesMap2 compose(const PowerSeriesMap2& h, const PowerSeriesMap2& g) {
    if (!fixes_origin(h) || !fixes_origin(g))
        throw std::invalid_argument("compose requires both maps to fix the origin");

    const int d = std::min(h.trunc_degree(), g.trunc_degree());
    const TruncSeries g1{d, [&] {
                             std::vector<SeriesTerm> ts;
                             for (const auto& t : g.component(1))
                                 if (t.index.total() <= d) ts.push_back(t);
                             return ts;
                         }()};
    const TruncSeries g2{d, [&] {
                             std::vector<SeriesTerm> ts;
                             for (const auto& t : g.component(2))
                                 if (t.index.total() <= d) ts.push_back(t);
                             return ts;
                         }()};

    std::array<std::vector<SeriesTerm>, 2> result;
    for (int c = 0; c < 2; ++c) {
        // Group the coefficients of this component of h by e1, as scalar
        // polynomials in z2, then substitute by nested Horner passes: first
        // each row at g2, then the rows at g1.
        int max_e1 = 0, max_e2 = 0;
        for (const auto& t : h.component(c + 1)) {
            max_e1 = std::max(max_e1, t.index.e1);
            max_e2 = std::max(max_e2, t.index.e2);
        }
        std::vector<std::vector<Complex>> rows(
            static_cast<std::size_t>(max_e1) + 1,
            std::vector<Complex>(static_cast<std::size_t>(max_e2) + 1, 0.0));
        for (const auto& t : h.component(c + 1)) {
            if (t.index.total() > d) continue;
            rows[static_cast<std::size_t>(t.index.e1)][static_cast<std::size_t>(t.index.e2)] =
                t.value;
        }

        TruncSeries acc = TruncSeries::constant(0.0, d);
        for (int e1 = max_e1; e1 >= 0; --e1) {
            TruncSeries row_val = TruncSeries::constant(0.0, d);
            const auto& row = rows[static_cast<std::size_t>(e1)];
            for (int e2 = static_cast<int>(row.size()) - 1; e2 >= 0; --e2) {
                row_val = mul_trunc(row_val, g2);
                row_val = add_terms(row_val, TruncSeries::constant(row[static_cast<std::size_t>(e2)], d));
            }
            acc = mul_trunc(acc, g1);
            acc = add_terms(acc, row_val);
        }
        result[static_cast<std::size_t>(c)] = std::move(acc.terms);
    }
    return PowerSeriesMap2(d, std::move(result[0]), std::move(result[1]));
}

PowerSeriesMap2 add(const PowerSeriesMap2& f, const PowerSeriesMap2& g) {
    const int d = std::min(f.trunc_degree(), g.trunc_degree());
    std::array<std::vector<SeriesTerm>, 2> out;
    for (int c = 0; c < 2; ++c) {
        for (const auto& t : f.component(c + 1))
            if (t.index.total() <= d) out[static_cast<std::size_t>(c)].push_back(t);
        for (const auto& t : g.component(c + 1))
            if (t.index.total() <= d) out[static_cast<std::size_t>(c)].push_back(t);
    }
    return PowerSeriesMap2(d, std::move(out[0]), std::move(out[1]));
}

PowerSeriesMap2 scale(Complex c, const PowerSeriesMap2& f) {
    std::array<std::vector<SeriesTerm>, 2> out;
    for (int comp = 0; comp < 2; ++comp)
        for (const auto& t : f.component(comp + 1))
            out[static_cast<std::size_t>(comp)].push_back({t.index, c * t.value});
    return PowerSeriesMap2(f.trunc_degree(), std::move(out[0]), std::move(out[1]));
}

double max_coeff_distance(const PowerSeriesMap2& f, const PowerSeriesMap2& g) {
    double worst = 0.0;
    for (int comp = 1; comp <= 2; ++comp) {
        for (const auto& t : f.component(comp))
            worst = std::max(worst, std::abs(t.value - coefficient(g, comp, t.index)));
        for (const auto& t : g.component(comp))
            worst = std::max(worst, std::abs(t.value - coefficient(f, comp, t.index)));
    }
    return worst;
}

}  // namespace loewner
