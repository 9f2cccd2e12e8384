#include "oracles.hh"

#include <dwr/problem.hh>

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace dwr;

namespace {

struct Sample
{
    Point x;
    double t;
};

/// Random points of the L-shape away from the temporal kinks of u2.
std::vector<Sample> samples(std::size_t n, std::uint64_t seed)
{
    auto gen = oracle::rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_real_distribution<double> time(0.0, 1.25);
    std::vector<Sample> s;
    while (s.size() < n) {
        const Point x{u(gen), u(gen)};
        const double t = time(gen);
        const double th = t - std::floor(t);
        if ((x.x >= 0.5 && x.y >= 0.5) || std::abs(th) < 1e-3 || std::abs(th - 0.5) < 1e-3 ||
            std::abs(th - 1.0) < 1e-3)
            continue;
        s.push_back({x, t});
    }
    return s;
}

} // namespace

TEST_CASE("exact solution values")
{
    const ConeSolution cone;
    // multiprecision evaluation of -s * atan(-5 pi) with s = -0.3333
    CHECK(cone.value({0.75, 0.5}, 0.0) == doctest::Approx(-0.50235647436736728).epsilon(1e-14));
    CHECK(cone.u1({0.75, 0.5}, 0.0) == 1.0);

    const double left = -cone.s * std::atan(5.0 * std::numbers::pi);
    CHECK(cone.u2(0.5) == doctest::Approx(left).epsilon(1e-15));
    CHECK(cone.u2(std::nextafter(0.5, 0.0)) == doctest::Approx(left).epsilon(1e-12));

    CHECK(cone.u1({0.0, 0.0}, 0.0) == doctest::Approx(1.0 / (1.0 + 50.0 * (0.5625 + 0.25))).epsilon(1e-15));
    CHECK(cone.u1({0.0, 0.0}, 0.0) == doctest::Approx(0.02402).epsilon(1e-4));

    const Point g = cone.gradient({0.75, 0.5}, 0.0);
    CHECK(g.x == 0.0);
    CHECK(g.y == 0.0);
    CHECK(ConeSolution::is_temporal_kink(0.0));
    CHECK(ConeSolution::is_temporal_kink(1.5));
    CHECK_FALSE(ConeSolution::is_temporal_kink(0.3));
}

TEST_CASE("invariants of the cone")
{
    const ConeSolution cone;
    auto gen = oracle::rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const auto& [x, t] : samples(200, 1)) {
        CHECK(std::abs(cone.value(x, t + 1.0) - cone.value(x, t)) <= 1e-14);
        CHECK(std::abs(cone.u1(x, t)) <= 1.0);
        CHECK(std::abs(cone.u2(t)) <= std::abs(cone.s) * std::numbers::pi / 2.0);
    }
    for (int k = 0; k < 50; ++k) {
        const Point x{u(gen), u(gen) * 0.5};
        for (const double tk : {0.5, 1.0}) {
            const double below = cone.value(x, std::nextafter(tk, 0.0));
            CHECK(std::abs(below - cone.value(x, tk)) <= 1e-12);
        }
    }
}

TEST_CASE("derivatives against finite differences")
{
    const ConeSolution cone;
    const double h = 1e-6;
    for (const auto& [x, t] : samples(100, 2)) {
        const Point g = cone.gradient(x, t);
        const double gx = (cone.value({x.x + h, x.y}, t) - cone.value({x.x - h, x.y}, t)) / (2 * h);
        const double gy = (cone.value({x.x, x.y + h}, t) - cone.value({x.x, x.y - h}, t)) / (2 * h);
        const double dt = (cone.value(x, t + h) - cone.value(x, t - h)) / (2 * h);
        const double scale = 1.0 + std::abs(cone.value(x, t));
        CHECK(std::abs(g.x - gx) <= 1e-5 * std::max(scale, std::abs(gx)));
        CHECK(std::abs(g.y - gy) <= 1e-5 * std::max(scale, std::abs(gy)));
        CHECK(std::abs(cone.time_derivative(x, t) - dt) <= 1e-5 * std::max(scale, std::abs(dt)));
    }
}

TEST_CASE("problem data")
{
    const ConeProblem p;
    const double rho = p.coefficients().rho;
    const double eps = p.coefficients().epsilon;
    CHECK(rho == 0.8);
    CHECK(eps == 1.2);

    SUBCASE("rhs consistency with a finite-difference operator")
    {
        const double h = 1e-4;
        const double k = 1e-6;
        for (const auto& [x, t] : samples(100, 3)) {
            auto u = [&](double dx, double dy, double dt) { return p.exact_u({x.x + dx, x.y + dy}, t + dt); };
            const double lap = (u(h, 0, 0) + u(-h, 0, 0) + u(0, h, 0) + u(0, -h, 0) - 4 * u(0, 0, 0)) / (h * h);
            const double ut = (u(0, 0, k) - u(0, 0, -k)) / (2 * k);
            const double residual = rho * ut - eps * lap - p.rhs_f(x, t);
            CHECK(std::abs(residual) <= 1e-4 * std::max(1.0, std::abs(p.rhs_f(x, t))));
        }
    }
    SUBCASE("Neumann flux sign")
    {
        const double h = 1e-6;
        const Point x{0.0, 0.5};
        // eps * grad u . n with n = (-1, 0): derivative of u along -x1
        const double fd = eps * (p.exact_u({x.x - h, x.y}, 0.0) - p.exact_u({x.x + h, x.y}, 0.0)) / (2 * h);
        CHECK(p.neumann_h(x, 0.0) == doctest::Approx(fd).epsilon(1e-6));
        CHECK(p.neumann_h(x, 0.0) != 0.0);
    }
    SUBCASE("boundary and initial data")
    {
        const auto d = p.data(0.0);
        for (const auto& [x, t] : samples(20, 4)) {
            CHECK(d.g(x, t) == p.exact_u(x, t));
            CHECK(d.exact(x, t) == p.exact_u(x, t));
            CHECK(d.f(x, t) == p.rhs_f(x, t));
            CHECK(d.u0(x) == p.exact_u(x, 0.0));
        }
        CHECK(d.coefficients.rho == rho);
    }
}

TEST_CASE("control volume")
{
    const ControlVolume cv;
    CHECK_FALSE(cv.contains({0.5, 0.5}, 0.2));
    CHECK_FALSE(cv.contains({0.5, 0.5}, 1.1));
    const double t = 0.5;
    const Point m{0.5 + 0.25 * std::cos(2 * std::numbers::pi * t), 0.5 + 0.25 * std::sin(2 * std::numbers::pi * t)};
    CHECK(cv.contains(m, t));
    CHECK(cv.contains({m.x - 0.1, m.y - 0.1}, t));
    CHECK_FALSE(cv.contains({m.x + 0.1000001, m.y}, t));
    CHECK_FALSE(cv.contains({m.x, m.y - 0.1000001}, t));
    CHECK(cv.contains({0.5, 0.75}, cv.t_begin));
    CHECK_FALSE(cv.contains(m, 1.0));

    CHECK_NOTHROW(cv.validate(0.0, 1.25));
    CHECK_THROWS_AS(cv.validate(0.5, 1.25), Error);
    CHECK_THROWS_AS(cv.validate(0.0, 0.9), Error);
    ControlVolume bad = cv;
    bad.box_x_max = bad.box_x_min;
    CHECK_THROWS_AS(bad.validate(0.0, 1.25), Error);
    bad = cv;
    bad.r1 = -1.0;
    CHECK_THROWS_AS(bad.validate(0.0, 1.25), Error);
}

TEST_CASE("parameter validation")
{
    CHECK_THROWS_AS((Coefficients{0.0, 1.0}.validate()), Error);
    CHECK_THROWS_AS((Coefficients{1.0, -1.0}.validate()), Error);
    CHECK_NOTHROW(Coefficients{}.validate());
    CHECK_THROWS_AS((ConeSolution{0.0, 1.0}.validate()), Error);
}
