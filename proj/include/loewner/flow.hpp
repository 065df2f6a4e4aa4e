#pragma once

// Loewner ODE machinery: time-dependent dissipative vector fields, adaptive
// integration of transition maps phi_{s,t}, recovery of the chain element
// f_s = lim_{t->inf} e^t phi_{s,t} by a polydisc stencil fit, and the scalar
// flow a(s,t) of the z2^2 shear coefficient.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "loewner/series.hpp"
#include "loewner/shear.hpp"

namespace loewner {

// Step-size underflow or other unrecoverable failure inside the adaptive
// integrator.
class integration_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Time-dependent field t >= 0 |-> G(., t), each value a normalized series
// map (G(0,t) = 0, dG_0 = -id within 1e-12). Piecewise-constant fields are
// right-continuous; breakpoints let the integrator avoid stepping across
// discontinuities. Values are immutable, so concurrent evaluation is safe.
class HerglotzField {
  public:
    enum class Kind { constant, piecewise, callable };

    static HerglotzField constant(PowerSeriesMap2 G);
    // segments: (t_start, value), strictly increasing t_start; the first
    // segment also covers t < t_start[0], the last extends to infinity.
    static HerglotzField piecewise(std::vector<std::pair<double, PowerSeriesMap2>> segments);
    static HerglotzField callable(std::function<PowerSeriesMap2(double)> fn, int trunc_degree,
                                  std::vector<double> breakpoints = {});

    Kind kind() const { return kind_; }
    int trunc_degree() const { return trunc_degree_; }

    // Value at time t (validated normalized for callable kind on access).
    PowerSeriesMap2 value(double t) const;

    // Breakpoints strictly inside (s, t), ascending.
    std::vector<double> breakpoints_in(double s, double t) const;

    bool mminus_checked() const { return mminus_checked_; }
    void set_mminus_checked(bool v) { mminus_checked_ = v; }

  private:
    HerglotzField() = default;

    Kind kind_ = Kind::constant;
    int trunc_degree_ = 0;
    std::vector<std::pair<double, PowerSeriesMap2>> segments_;  // constant: single entry
    std::function<PowerSeriesMap2(double)> fn_;
    std::vector<double> breakpoints_;
    bool mminus_checked_ = false;
};

// Solves dw/dt = G(w, t) on [s, t] from w(s) = z with an embedded 5(4)
// adaptive Runge-Kutta pair, absolute and relative tolerance `tol`, stepping
// segment by segment between field breakpoints.
Point2 integrate_transition(const HerglotzField& G, double s, double t, const Point2& z,
                            double tol = 1e-10);

// One solve per initial point; the parallel variant distributes points over
// OpenMP workers (results are positionally identical to the serial one).
std::vector<Point2> batch_transition(const HerglotzField& G, double s, double t,
                                     const std::vector<Point2>& zs, double tol = 1e-10);
std::vector<Point2> batch_transition_serial(const HerglotzField& G, double s, double t,
                                            const std::vector<Point2>& zs, double tol = 1e-10);

// Fits a polynomial map of total degree <= degree to the evaluator F on the
// tensor stencil (radius * w1^j, radius * w2^k), w = primitive (2*degree+1)-th
// root of unity, by discrete Fourier inversion. Exact for polynomials of
// per-variable degree <= 2*degree. Node evaluations run in parallel; the
// inversion itself is a fixed-order serial sum, so results are deterministic.
PowerSeriesMap2 fit_polydisc(const std::function<Point2(const Point2&)>& F, int degree,
                             double radius = 0.3);

// The Loewner ODE flow from s to t as a value: evaluate pointwise, or fit a
// truncated series representation on a stencil (cached once computed).
class TransitionMap {
  public:
    TransitionMap(HerglotzField field, double s, double t, double tol = 1e-10);

    double s() const { return s_; }
    double t() const { return t_; }
    double tolerance() const { return tol_; }
    const HerglotzField& field() const { return *field_; }

    Point2 operator()(const Point2& z) const;
    std::vector<Point2> operator()(const std::vector<Point2>& zs) const;

    // Stencil fit of the flow; degree defaults to the field's truncation.
    const PowerSeriesMap2& recover(int stencil_degree);
    const std::optional<PowerSeriesMap2>& recovered_series() const { return recovered_; }

  private:
    std::shared_ptr<const HerglotzField> field_;
    double s_, t_, tol_;
    std::optional<PowerSeriesMap2> recovered_;
};

// Chain element f_s ~= e^T phi_{s,T} for T >> s, fit on a polydisc stencil
// of the given degree. Integrates the rescaled variable w(t) = e^{t-s}
// phi_{s,t}(z), whose ODE has only the (decaying) nonlinear part of G on
// the right-hand side, so no e^T amplification of integration error occurs;
// the returned map is e^s * (stencil fit of w(T)). Truncation error of the
// limit is O(e^{-(T-s)}).
PowerSeriesMap2 recover_chain_map(const HerglotzField& G, double s, double T, int stencil_degree);

// Scalar coefficient profile t |-> q(t) for shear fields, mirroring the
// HerglotzField kinds.
class QProfile {
  public:
    struct Segment {
        double t_start;
        Complex value;
    };

    static QProfile constant(Complex q);
    static QProfile piecewise(std::vector<Segment> segments);
    static QProfile callable(std::function<Complex(double)> fn, std::string label,
                             std::vector<double> breakpoints = {});

    Complex operator()(double t) const;
    std::vector<double> breakpoints_in(double s, double t) const;
    const std::string& describe() const { return label_; }
    const std::vector<Segment>& segments() const { return segments_; }
    bool is_piecewise_constant() const { return !segments_.empty(); }

  private:
    QProfile() = default;

    std::vector<Segment> segments_;  // empty for callable kind
    std::function<Complex(double)> fn_;
    std::vector<double> breakpoints_;
    std::string label_;
};

struct CoefficientFlow {
    double s = 0.0;
    double t = 0.0;
    Complex a_st{0.0};
    std::string q_profile;
};

// a(s,t) = e^{s-t} * integral_s^t q(tau) e^{s-tau} dtau, evaluated by
// adaptive quadrature per smooth segment and cross-checked against the ODE
// route da/dt = -a + q(t) e^{2(s-t)}, a(s,s) = 0; the two must agree to
// 1e-8 or a runtime error is raised. Returns the quadrature value.
CoefficientFlow shear_coefficient_flow(const QProfile& q, double s, double t);

// (3*sqrt(3)/2) * e^{s-t} (1 - e^{s-t}): the largest |a(s,t)| reachable
// under the class constraint |q| <= 3*sqrt(3)/2.
double envelope_bound(double s, double t);

// The shear field (-z1 + q(t) z2^2, -z2) as a time-dependent field.
HerglotzField shear_field_from_profile(const QProfile& q, int trunc_degree = 8);

}  // namespace loewner
