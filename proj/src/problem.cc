#include <dwr/problem.hh>

#include <cmath>

namespace dwr {

namespace {
constexpr double pi = std::numbers::pi;

double fractional(double t) { return t - std::floor(t); }
} // namespace

void Coefficients::validate() const
{
    if (!(rho > 0.0) || !(epsilon > 0.0))
        throw Error("Coefficients: rho and epsilon must be positive");
}

void ConeSolution::validate() const
{
    if (!(a > 0.0))
        throw Error("ConeSolution: a must be positive");
}

double ConeSolution::u1(Point x, double t) const
{
    const double m1 = 0.5 + 0.25 * std::cos(2.0 * pi * t);
    const double m2 = 0.5 + 0.25 * std::sin(2.0 * pi * t);
    const double r2 = (x.x - m1) * (x.x - m1) + (x.y - m2) * (x.y - m2);
    return 1.0 / (1.0 + a * r2);
}

double ConeSolution::u2(double t) const
{
    const double th = fractional(t);
    if (th < 0.5)
        return -s * std::atan(5.0 * pi * (4.0 * th - 1.0));
    return s * std::atan(5.0 * pi * (4.0 * (th - 0.5) - 1.0));
}

double ConeSolution::du2_dt(double t) const
{
    const double th = fractional(t);
    const double nu1 = th < 0.5 ? -1.0 : 1.0;
    const double nu2 = th < 0.5 ? 5.0 * pi * (4.0 * th - 1.0) : 5.0 * pi * (4.0 * (th - 0.5) - 1.0);
    return nu1 * s * 20.0 * pi / (1.0 + nu2 * nu2);
}

double ConeSolution::value(Point x, double t) const { return u1(x, t) * u2(t); }

Point ConeSolution::gradient(Point x, double t) const
{
    const double m1 = 0.5 + 0.25 * std::cos(2.0 * pi * t);
    const double m2 = 0.5 + 0.25 * std::sin(2.0 * pi * t);
    const double v = u1(x, t);
    const double c = -2.0 * a * v * v * u2(t);
    return {c * (x.x - m1), c * (x.y - m2)};
}

double ConeSolution::time_derivative(Point x, double t) const
{
    const double m1 = 0.5 + 0.25 * std::cos(2.0 * pi * t);
    const double m2 = 0.5 + 0.25 * std::sin(2.0 * pi * t);
    const double dm1 = -0.5 * pi * std::sin(2.0 * pi * t);
    const double dm2 = 0.5 * pi * std::cos(2.0 * pi * t);
    const double v = u1(x, t);
    // d/dt (1 + a r^2)^{-1} = -v^2 * a * d(r^2)/dt
    const double dr2 = -2.0 * (x.x - m1) * dm1 - 2.0 * (x.y - m2) * dm2;
    const double du1 = -v * v * a * dr2;
    return du1 * u2(t) + v * du2_dt(t);
}

double ConeSolution::laplacian(Point x, double t) const
{
    const double m1 = 0.5 + 0.25 * std::cos(2.0 * pi * t);
    const double m2 = 0.5 + 0.25 * std::sin(2.0 * pi * t);
    const double r2 = (x.x - m1) * (x.x - m1) + (x.y - m2) * (x.y - m2);
    const double D = 1.0 + a * r2;
    // lap(1/D) = -lap(D)/D^2 + 2 |grad D|^2 / D^3, lap D = 4a, |grad D|^2 = 4 a^2 r^2
    const double lap_u1 = -4.0 * a / (D * D) + 8.0 * a * a * r2 / (D * D * D);
    return lap_u1 * u2(t);
}

bool ConeSolution::is_temporal_kink(double t)
{
    const double th = fractional(t);
    return th == 0.0 || th == 0.5;
}

void ControlVolume::validate(double t0, double T) const
{
    if (!(box_x_min < box_x_max) || !(box_y_min < box_y_max))
        throw Error("ControlVolume: box bounds must satisfy min < max");
    if (!(t_begin < t_end) || t_begin < t0 || t_end > T)
        throw Error("ControlVolume: I_c must be a non-empty subinterval of (t0, T)");
    if (r1 < 0.0)
        throw Error("ControlVolume: r1 must be non-negative");
}

bool ControlVolume::contains(Point x, double t) const
{
    if (t < t_begin || t >= t_end)
        return false;
    const double hx = x.x - center.x - r1 * std::cos(omega * t);
    const double hy = x.y - center.y - r1 * std::sin(omega * t);
    return hx >= box_x_min && hx < box_x_max && hy >= box_y_min && hy < box_y_max;
}

double ConeProblem::rhs_f(Point x, double t) const
{
    return coefficients_.rho * cone_.time_derivative(x, t) - coefficients_.epsilon * cone_.laplacian(x, t);
}

double ConeProblem::neumann_h(Point x, double t) const
{
    return -coefficients_.epsilon * cone_.gradient(x, t).x;
}

DiffusionData ConeProblem::data(double t0) const
{
    DiffusionData d;
    d.coefficients = coefficients_;
    d.f = [p = *this](Point x, double t) { return p.rhs_f(x, t); };
    d.g = [p = *this](Point x, double t) { return p.dirichlet_g(x, t); };
    d.h = [p = *this](Point x, double t) { return p.neumann_h(x, t); };
    d.u0 = [p = *this, t0](Point x) { return p.initial_u0(x, t0); };
    d.exact = [p = *this](Point x, double t) { return p.exact_u(x, t); };
    return d;
}

} // namespace dwr
