#include "loewner/flow.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <numbers>

#include "loewner/mminus.hpp"
#include "loewner/sampling.hpp"

namespace loewner {

namespace {

std::string fmt_complex(Complex c) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "(%.17g,%.17g)", c.real(), c.imag());
    return buf;
}

// ---------------------------------------------------------------------------
// Embedded Dormand-Prince 5(4) pair with standard PI-free step control.
// State is a small fixed-size vector of complex numbers; the scalar
// coefficient ODE uses N = 1 and the transition flow N = 2.
// ---------------------------------------------------------------------------

template <std::size_t N, class RHS>
std::array<Complex, N> rk45_segment(RHS&& rhs, double t0, double t1, std::array<Complex, N> y,
                                    double tol) {
    using State = std::array<Complex, N>;
    if (!(t1 > t0)) return y;

    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                     b6 = 11.0 / 84;
    // b - b*: difference against the embedded 4th-order weights.
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    double t = t0;
    double h = (t1 - t0) / 100.0;
    const double hmin = 1e-14 * std::max(1.0, t1 - t0);
    long long attempts = 0;

    State k1, k2, k3, k4, k5, k6, k7, ytmp, y5, err;
    while (true) {
        if (++attempts > 20'000'000)
            throw integration_error("adaptive RK exceeded the step-attempt limit");
        bool last = false;
        if (h >= t1 - t) {
            h = t1 - t;
            last = true;
        }

        k1 = rhs(t, y);
        for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * (a21 * k1[i]);
        k2 = rhs(t + c2 * h, ytmp);
        for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        k3 = rhs(t + c3 * h, ytmp);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        k4 = rhs(t + c4 * h, ytmp);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        k5 = rhs(t + c5 * h, ytmp);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                  a65 * k5[i]);
        k6 = rhs(t + h, ytmp);
        for (std::size_t i = 0; i < N; ++i)
            y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        k7 = rhs(t + h, y5);

        double acc = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                          e7 * k7[i]);
            const double sc = tol + tol * std::max(std::abs(y[i]), std::abs(y5[i]));
            acc += std::norm(err[i] / sc);
        }
        const double errnorm = std::sqrt(acc / N);

        if (errnorm <= 1.0) {
            t += h;
            y = y5;
            if (last) break;
            const double fac =
                errnorm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(errnorm, -0.2), 0.2, 5.0);
            h *= fac;
        } else {
            h *= std::clamp(0.9 * std::pow(errnorm, -0.2), 0.1, 0.9);
        }
        if (h < hmin) throw integration_error("adaptive RK step-size underflow");
    }
    return y;
}

std::vector<double> segment_edges(const std::vector<double>& breakpoints, double s, double t) {
    std::vector<double> edges;
    edges.reserve(breakpoints.size() + 2);
    edges.push_back(s);
    for (double b : breakpoints) edges.push_back(b);
    edges.push_back(t);
    return edges;
}

}  // namespace

// --------------------------------------------------------------------------
// HerglotzField
// --------------------------------------------------------------------------

HerglotzField HerglotzField::constant(PowerSeriesMap2 G) {
    require_field_normalized(G);
    HerglotzField f;
    f.kind_ = Kind::constant;
    f.trunc_degree_ = G.trunc_degree();
    f.segments_.emplace_back(0.0, std::move(G));
    return f;
}

HerglotzField HerglotzField::piecewise(std::vector<std::pair<double, PowerSeriesMap2>> segments) {
    if (segments.empty())
        throw std::invalid_argument("piecewise field: at least one segment required");
    int trunc = segments.front().second.trunc_degree();
    for (std::size_t i = 0; i < segments.size(); ++i) {
        if (!std::isfinite(segments[i].first))
            throw std::invalid_argument("piecewise field: non-finite breakpoint");
        if (i > 0 && !(segments[i].first > segments[i - 1].first))
            throw std::invalid_argument("piecewise field: breakpoints must strictly increase");
        require_field_normalized(segments[i].second);
        trunc = std::min(trunc, segments[i].second.trunc_degree());
    }
    HerglotzField f;
    f.kind_ = segments.size() == 1 ? Kind::constant : Kind::piecewise;
    f.trunc_degree_ = trunc;
    f.segments_ = std::move(segments);
    return f;
}

HerglotzField HerglotzField::callable(std::function<PowerSeriesMap2(double)> fn, int trunc_degree,
                                      std::vector<double> breakpoints) {
    if (!fn) throw std::invalid_argument("callable field: empty function");
    if (!std::is_sorted(breakpoints.begin(), breakpoints.end()))
        throw std::invalid_argument("callable field: breakpoints must be ascending");
    HerglotzField f;
    f.kind_ = Kind::callable;
    f.trunc_degree_ = trunc_degree;
    f.fn_ = std::move(fn);
    f.breakpoints_ = std::move(breakpoints);
    return f;
}

PowerSeriesMap2 HerglotzField::value(double t) const {
    if (kind_ == Kind::callable) {
        PowerSeriesMap2 G = fn_(t);
        require_field_normalized(G);
        return G;
    }
    // Right-continuous piecewise lookup; the first segment also covers
    // times before its start.
    std::size_t idx = 0;
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        if (segments_[i].first <= t) idx = i;
        else break;
    }
    return segments_[idx].second;
}

std::vector<double> HerglotzField::breakpoints_in(double s, double t) const {
    std::vector<double> out;
    if (kind_ == Kind::callable) {
        for (double b : breakpoints_)
            if (b > s && b < t) out.push_back(b);
        return out;
    }
    for (const auto& [start, val] : segments_)
        if (start > s && start < t) out.push_back(start);
    return out;
}

// --------------------------------------------------------------------------
// Transition maps
// --------------------------------------------------------------------------

namespace {

void validate_times(double s, double t) {
    if (!(s >= 0.0) || !(t >= s) || !std::isfinite(t))
        throw std::invalid_argument("transition times must satisfy 0 <= s <= t");
}

// Integrates the plain Loewner ODE dw/dt = G(w, t) across one smooth
// segment, hoisting the field value out of the right-hand side whenever the
// field is constant on the segment.
std::array<Complex, 2> flow_segment(const HerglotzField& G, double a, double b,
                                    std::array<Complex, 2> y, double tol) {
    if (G.kind() != HerglotzField::Kind::callable) {
        const PowerSeriesMap2 Gs = G.value(0.5 * (a + b));
        auto rhs = [&Gs](double, const std::array<Complex, 2>& w) {
            const Point2 v = eval(Gs, {w[0], w[1]});
            return std::array<Complex, 2>{v.z1, v.z2};
        };
        return rk45_segment<2>(rhs, a, b, y, tol);
    }
    auto rhs = [&G](double tau, const std::array<Complex, 2>& w) {
        const Point2 v = eval(G.value(tau), {w[0], w[1]});
        return std::array<Complex, 2>{v.z1, v.z2};
    };
    return rk45_segment<2>(rhs, a, b, y, tol);
}

}  // namespace

Point2 integrate_transition(const HerglotzField& G, double s, double t, const Point2& z,
                            double tol) {
    validate_times(s, t);
    if (!z.inside_ball())
        throw std::invalid_argument("integrate_transition: initial point not inside the ball");
    if (!(tol > 0.0)) throw std::invalid_argument("integrate_transition: tolerance must be > 0");
    if (s == t) return z;

    std::array<Complex, 2> y{z.z1, z.z2};
    const std::vector<double> edges = segment_edges(G.breakpoints_in(s, t), s, t);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        y = flow_segment(G, edges[i], edges[i + 1], y, tol);

    const Point2 out{y[0], y[1]};
    assert(out.norm() <= 1.0 + 1e-6);  // trajectories of the class stay in the ball
    return out;
}

std::vector<Point2> batch_transition_serial(const HerglotzField& G, double s, double t,
                                            const std::vector<Point2>& zs, double tol) {
    std::vector<Point2> out(zs.size());
    for (std::size_t i = 0; i < zs.size(); ++i) out[i] = integrate_transition(G, s, t, zs[i], tol);
    return out;
}

std::vector<Point2> batch_transition(const HerglotzField& G, double s, double t,
                                     const std::vector<Point2>& zs, double tol) {
    std::vector<Point2> out(zs.size());
    std::exception_ptr failure = nullptr;
    long long failure_index = -1;
    std::mutex guard;
    for_each_index(zs.size(), [&](std::size_t i) {
        try {
            out[i] = integrate_transition(G, s, t, zs[i], tol);
        } catch (...) {
            const std::lock_guard<std::mutex> lk(guard);
            if (failure_index < 0 || static_cast<long long>(i) < failure_index) {
                failure_index = static_cast<long long>(i);
                failure = std::current_exception();
            }
        }
    });
    if (failure) std::rethrow_exception(failure);
    return out;
}

PowerSeriesMap2 fit_polydisc(const std::function<Point2(const Point2&)>& F, int degree,
                             double radius) {
    if (degree < 1) throw std::invalid_argument("fit_polydisc: degree must be >= 1");
    if (!(radius > 0.0) || radius * std::numbers::sqrt2 >= 1.0)
        throw std::invalid_argument("fit_polydisc: stencil must lie inside the unit ball");

    const int N = 2 * degree + 1;
    std::vector<Complex> root(static_cast<std::size_t>(N));
    for (int m = 0; m < N; ++m)
        root[static_cast<std::size_t>(m)] = std::polar(1.0, 2.0 * std::numbers::pi * m / N);

    // Evaluate F on the tensor stencil; per-node work may be expensive
    // (e.g. an ODE solve), so nodes are distributed across workers.
    std::vector<Point2> vals(static_cast<std::size_t>(N) * N);
    std::exception_ptr failure = nullptr;
    long long failure_index = -1;
    std::mutex guard;
    for_each_index(vals.size(), [&](std::size_t idx) {
        const std::size_t j = idx / static_cast<std::size_t>(N);
        const std::size_t k = idx % static_cast<std::size_t>(N);
        try {
            vals[idx] = F({radius * root[j], radius * root[k]});
        } catch (...) {
            const std::lock_guard<std::mutex> lk(guard);
            if (failure_index < 0 || static_cast<long long>(idx) < failure_index) {
                failure_index = static_cast<long long>(idx);
                failure = std::current_exception();
            }
        }
    });
    if (failure) std::rethrow_exception(failure);

    std::vector<double> radius_pow(static_cast<std::size_t>(degree) + 1, 1.0);
    for (int p = 1; p <= degree; ++p)
        radius_pow[static_cast<std::size_t>(p)] = radius_pow[static_cast<std::size_t>(p - 1)] * radius;

    // Inverse DFT in fixed serial order: coefficient (a,b) of component c is
    // (1/N^2) sum_{j,k} F_c(node_{jk}) w^{-(aj+bk)} / radius^{a+b}.
    std::array<std::vector<SeriesTerm>, 2> comps;
    for (int a = 0; a <= degree; ++a) {
        for (int b = 0; a + b <= degree; ++b) {
            Complex acc1 = 0.0, acc2 = 0.0;
            for (int j = 0; j < N; ++j) {
                for (int k = 0; k < N; ++k) {
                    const int m = ((a * j + b * k) % N);
                    const Complex w = std::conj(root[static_cast<std::size_t>(m)]);
                    const Point2& v = vals[static_cast<std::size_t>(j) * N + k];
                    acc1 += v.z1 * w;
                    acc2 += v.z2 * w;
                }
            }
            const double scale = 1.0 / (static_cast<double>(N) * N *
                                        radius_pow[static_cast<std::size_t>(a + b)]);
            const MultiIndex idx{a, b};
            if (acc1 != 0.0) comps[0].push_back({idx, acc1 * scale});
            if (acc2 != 0.0) comps[1].push_back({idx, acc2 * scale});
        }
    }
    return PowerSeriesMap2(degree, std::move(comps[0]), std::move(comps[1]));
}

TransitionMap::TransitionMap(HerglotzField field, double s, double t, double tol)
    : field_(std::make_shared<const HerglotzField>(std::move(field))), s_(s), t_(t), tol_(tol) {
    validate_times(s, t);
    if (!(tol > 0.0)) throw std::invalid_argument("transition map: tolerance must be > 0");
}

Point2 TransitionMap::operator()(const Point2& z) const {
    return integrate_transition(*field_, s_, t_, z, tol_);
}

std::vector<Point2> TransitionMap::operator()(const std::vector<Point2>& zs) const {
    return batch_transition(*field_, s_, t_, zs, tol_);
}

const PowerSeriesMap2& TransitionMap::recover(int stencil_degree) {
    if (stencil_degree > field_->trunc_degree())
        throw std::invalid_argument("transition map: stencil degree exceeds field truncation");
    recovered_ = fit_polydisc([this](const Point2& z) { return (*this)(z); }, stencil_degree);
    return *recovered_;
}

PowerSeriesMap2 recover_chain_map(const HerglotzField& G, double s, double T, int stencil_degree) {
    validate_times(s, T);
    if (T - s > 500.0)
        throw std::invalid_argument("recover_chain_map: horizon too large (e^{T-s} overflows)");
    if (stencil_degree < 1 || stencil_degree > G.trunc_degree())
        throw std::invalid_argument(
            "recover_chain_map: stencil degree must be in [1, field truncation]");

    // Integrate w(t) = e^{t-s} phi_{s,t}(z). With G = -id + R (R the
    // nonlinear part), w' = e^{t-s} R(e^{-(t-s)} w, t): the right-hand side
    // decays like e^{-(t-s)}, so the e^T amplification of the naive route
    // never touches the integration error. An internal tolerance tighter
    // than the 1e-10 flow default absorbs the stencil inversion's
    // radius^{-degree} error amplification.
    constexpr double kChainTol = 1e-12;
    const double es = std::exp(s);

    const std::vector<double> edges = segment_edges(G.breakpoints_in(s, T), s, T);
    const PowerSeriesMap2 id = PowerSeriesMap2::identity(G.trunc_degree());

    auto scaled_flow = [&](const Point2& z) {
        std::array<Complex, 2> w{z.z1, z.z2};
        for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
            const double a = edges[i], b = edges[i + 1];
            if (G.kind() != HerglotzField::Kind::callable) {
                const PowerSeriesMap2 R = add(G.value(0.5 * (a + b)), id);
                auto rhs = [&](double tau, const std::array<Complex, 2>& wv) {
                    const double grow = std::exp(tau - s), shrink = std::exp(s - tau);
                    const Point2 v = eval(R, {shrink * wv[0], shrink * wv[1]});
                    return std::array<Complex, 2>{grow * v.z1, grow * v.z2};
                };
                w = rk45_segment<2>(rhs, a, b, w, kChainTol);
            } else {
                auto rhs = [&](double tau, const std::array<Complex, 2>& wv) {
                    const double grow = std::exp(tau - s), shrink = std::exp(s - tau);
                    const PowerSeriesMap2 R = add(G.value(tau), id);
                    const Point2 v = eval(R, {shrink * wv[0], shrink * wv[1]});
                    return std::array<Complex, 2>{grow * v.z1, grow * v.z2};
                };
                w = rk45_segment<2>(rhs, a, b, w, kChainTol);
            }
        }
        return Point2{es * w[0], es * w[1]};
    };

    return fit_polydisc(scaled_flow, stencil_degree);
}

// --------------------------------------------------------------------------
// QProfile and the scalar coefficient flow
// --------------------------------------------------------------------------

QProfile QProfile::constant(Complex q) {
    QProfile p;
    p.segments_ = {{0.0, q}};
    p.label_ = std::string("constant q=") + fmt_complex(q);
    return p;
}

QProfile QProfile::piecewise(std::vector<Segment> segments) {
    if (segments.empty())
        throw std::invalid_argument("piecewise profile: at least one segment required");
    std::string label = "piecewise q:";
    for (std::size_t i = 0; i < segments.size(); ++i) {
        if (!std::isfinite(segments[i].t_start))
            throw std::invalid_argument("piecewise profile: non-finite breakpoint");
        if (i > 0 && !(segments[i].t_start > segments[i - 1].t_start))
            throw std::invalid_argument("piecewise profile: breakpoints must strictly increase");
        char buf[48];
        std::snprintf(buf, sizeof buf, " t>=%.17g ->", segments[i].t_start);
        label += buf;
        label += fmt_complex(segments[i].value);
        if (i + 1 < segments.size()) label += ";";
    }
    QProfile p;
    p.segments_ = std::move(segments);
    p.label_ = std::move(label);
    return p;
}

QProfile QProfile::callable(std::function<Complex(double)> fn, std::string label,
                            std::vector<double> breakpoints) {
    if (!fn) throw std::invalid_argument("callable profile: empty function");
    if (!std::is_sorted(breakpoints.begin(), breakpoints.end()))
        throw std::invalid_argument("callable profile: breakpoints must be ascending");
    QProfile p;
    p.fn_ = std::move(fn);
    p.label_ = std::move(label);
    p.breakpoints_ = std::move(breakpoints);
    return p;
}

Complex QProfile::operator()(double t) const {
    if (segments_.empty()) return fn_(t);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        if (segments_[i].t_start <= t) idx = i;
        else break;
    }
    return segments_[idx].value;
}

std::vector<double> QProfile::breakpoints_in(double s, double t) const {
    std::vector<double> out;
    if (segments_.empty()) {
        for (double b : breakpoints_)
            if (b > s && b < t) out.push_back(b);
        return out;
    }
    for (const auto& seg : segments_)
        if (seg.t_start > s && seg.t_start < t) out.push_back(seg.t_start);
    return out;
}

namespace {

// Adaptive Simpson quadrature with Richardson correction, complex-valued.
template <class F>
Complex simpson_adapt(F& f, double a, double b, Complex fa, Complex fm, Complex fb, Complex whole,
                      double tol, int depth) {
    if (depth > 60) throw std::runtime_error("adaptive quadrature failed to converge");
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const Complex flm = f(lm), frm = f(rm);
    const Complex left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const Complex right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const Complex delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           simpson_adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

template <class F>
Complex integrate_adaptive(F f, double a, double b, double tol) {
    if (!(b > a)) return 0.0;
    const Complex fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const Complex whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_adapt(f, a, b, fa, fm, fb, whole, tol, 0);
}

}  // namespace

CoefficientFlow shear_coefficient_flow(const QProfile& q, double s, double t) {
    validate_times(s, t);
    constexpr double kInternalTol = 1e-12;

    const std::vector<double> edges = segment_edges(q.breakpoints_in(s, t), s, t);

    // Closed-form route: a(s,t) = e^{s-t} * integral_s^t q(tau) e^{s-tau} dtau.
    Complex integral = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        integral += integrate_adaptive(
            [&q, s](double tau) { return q(tau) * std::exp(s - tau); }, edges[i], edges[i + 1],
            kInternalTol);
    const Complex a_quad = std::exp(s - t) * integral;

    // ODE route: da/dt = -a + q(t) e^{2(s-t)}, a(s) = 0.
    std::array<Complex, 1> a{Complex{0.0}};
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        auto rhs = [&q, s](double tau, const std::array<Complex, 1>& av) {
            return std::array<Complex, 1>{-av[0] + q(tau) * std::exp(2.0 * (s - tau))};
        };
        a = rk45_segment<1>(rhs, edges[i], edges[i + 1], a, kInternalTol);
    }

    if (std::abs(a_quad - a[0]) > 1e-8)
        throw std::runtime_error("coefficient flow: quadrature and ODE routes disagree");

    return {s, t, a_quad, q.describe()};
}

double envelope_bound(double s, double t) {
    validate_times(s, t);
    const double u = std::exp(s - t);
    return kExtremalShearCoefficient * u * (1.0 - u);
}

HerglotzField shear_field_from_profile(const QProfile& q, int trunc_degree) {
    if (q.is_piecewise_constant()) {
        std::vector<std::pair<double, PowerSeriesMap2>> segments;
        segments.reserve(q.segments().size());
        for (const auto& seg : q.segments())
            segments.emplace_back(seg.t_start, shear_field_series(seg.value, trunc_degree));
        return HerglotzField::piecewise(std::move(segments));
    }
    const double inf = std::numeric_limits<double>::infinity();
    return HerglotzField::callable(
        [q, trunc_degree](double t) { return shear_field_series(q(t), trunc_degree); },
        trunc_degree, q.breakpoints_in(-inf, inf));
}

}  // namespace loewner
