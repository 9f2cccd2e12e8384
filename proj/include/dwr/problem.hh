#pragma once

#include <dwr/types.hh>

#include <functional>
#include <numbers>

namespace dwr {

using SpaceTimeFunction = std::function<double(Point, double)>;

struct Coefficients
{
    double rho = 0.8;     ///< mass density
    double epsilon = 1.2; ///< permeability

    void validate() const;
};

/// Rotating cone with time-dependent height, u = u1(x, t) * u2(t):
///   u1 = 1 / (1 + a |x - m(t)|^2),  m(t) = (1/2 + cos(2 pi t)/4, 1/2 + sin(2 pi t)/4)
///   u2 = nu1 * s * atan(nu2),  with the 1-periodic branches
///        t^ in [0, 1/2):  nu1 = -1, nu2 = 5 pi (4 t^ - 1)
///        t^ in [1/2, 1):  nu1 = +1, nu2 = 5 pi (4 (t^ - 1/2) - 1)
/// u2 is continuous but has kinks at t^ in {0, 1/2}; derivatives there are
/// the right limits.
struct ConeSolution
{
    double a = 50.0;
    double s = -0.3333;

    void validate() const;

    double u1(Point x, double t) const;
    double u2(double t) const;
    double du2_dt(double t) const;

    double value(Point x, double t) const;
    Point gradient(Point x, double t) const;
    double time_derivative(Point x, double t) const;
    double laplacian(Point x, double t) const;

    /// True if t^ = t - floor(t) is one of the kinks of u2.
    static bool is_temporal_kink(double t);
};

/// Q_c = Omega_c(t) x I_c with Omega_c(t) = center + m(t; r1) + box, where
/// m(t; r1) = r1 (cos(omega t), sin(omega t)).
struct ControlVolume
{
    double box_x_min = -0.1;
    double box_x_max = 0.1;
    double box_y_min = -0.1;
    double box_y_max = 0.1;
    double r1 = 0.25;
    double omega = 2.0 * std::numbers::pi;
    double t_begin = 0.25;
    double t_end = 1.0;
    Point center{0.5, 0.5};

    /// Throws unless the box is non-degenerate and I_c lies in [t0, T].
    void validate(double t0, double T) const;

    /// Half-open tests: lower bounds inclusive, upper bounds exclusive.
    bool contains(Point x, double t) const;
};

/// Coefficients and data of rho u_t - div(eps grad u) = f with u = g on the
/// Dirichlet part, eps grad u . n = h on the Neumann part and u(t0) = u0.
struct DiffusionData
{
    Coefficients coefficients;
    SpaceTimeFunction f;
    SpaceTimeFunction g;
    SpaceTimeFunction h;
    std::function<double(Point)> u0;
    /// Reference solution used for goal and error evaluation; may be empty.
    SpaceTimeFunction exact;
};

/// The rotating-cone benchmark on the L-shape with Neumann data on x1 = 0.
class ConeProblem
{
public:
    ConeProblem() = default;
    ConeProblem(Coefficients coefficients, ConeSolution cone, ControlVolume cv)
        : coefficients_(coefficients), cone_(cone), cv_(cv)
    {}

    const Coefficients& coefficients() const { return coefficients_; }
    const ConeSolution& cone() const { return cone_; }
    const ControlVolume& control_volume() const { return cv_; }

    double exact_u(Point x, double t) const { return cone_.value(x, t); }
    Point exact_grad_u(Point x, double t) const { return cone_.gradient(x, t); }
    double exact_dt_u(Point x, double t) const { return cone_.time_derivative(x, t); }

    /// f = rho u_t - eps lap u (constant eps).
    double rhs_f(Point x, double t) const;
    double dirichlet_g(Point x, double t) const { return cone_.value(x, t); }
    /// h = eps grad u . n on x1 = 0, where n = (-1, 0).
    double neumann_h(Point x, double t) const;
    double initial_u0(Point x, double t0) const { return cone_.value(x, t0); }

    bool in_control_volume(Point x, double t) const { return cv_.contains(x, t); }

    DiffusionData data(double t0) const;

private:
    Coefficients coefficients_;
    ConeSolution cone_;
    ControlVolume cv_;
};

} // namespace dwr
