#include "oracles.hh"

#include <dwr/fe.hh>

#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

using namespace dwr;

namespace {

std::shared_ptr<const QuadMesh> share(QuadMesh m) { return std::make_shared<const QuadMesh>(std::move(m)); }

/// Two unit cells side by side; the left one refined once.
QuadMesh two_cells_one_refined()
{
    const QuadMesh m({{0, 0}, {1, 0}, {2, 0}, {0, 1}, {1, 1}, {2, 1}}, {{0, 1, 3, 4}, {1, 2, 4, 5}},
                     [](Point) { return BoundaryType::dirichlet; });
    return m.refine({0});
}

std::size_t dof_at(const FeSpace& s, Point p)
{
    const auto& pts = s.support_points();
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (norm(pts[i] - p) < 1e-14)
            return i;
    throw Error("no dof at point");
}

QuadMesh random_mesh(std::uint64_t seed, unsigned steps = 4)
{
    QuadMesh m = make_lshape();
    auto gen = oracle::rng(seed);
    for (unsigned s = 0; s < steps; ++s) {
        const auto& active = m.active_cells();
        std::uniform_int_distribution<std::size_t> pick(0, active.size() - 1);
        m = m.refine({active[pick(gen)], active[pick(gen)]});
    }
    return m;
}

Vector random_constrained(const FeSpace& s, std::uint64_t seed)
{
    auto gen = oracle::rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vector c(s.n_dofs());
    for (auto& v : c)
        v = u(gen);
    s.constraints().distribute(c);
    return c;
}

const std::array<double, 16> q1_mass{4, 2, 2, 1, 2, 4, 1, 2, 2, 1, 4, 2, 1, 2, 2, 4};
const std::array<double, 16> q1_stiffness{4, -1, -1, -2, -1, 4, -2, -1, -1, -2, 4, -1, -2, -1, -1, 4};

} // namespace

TEST_CASE("gauss quadrature")
{
    const auto q1 = gauss_quadrature(1);
    REQUIRE(q1.size() == 1);
    CHECK(q1.points[0] == Point{0.5, 0.5});
    CHECK(q1.weights[0] == 1.0);

    const auto q2 = gauss_quadrature(2);
    REQUIRE(q2.size() == 4);
    const double a = 0.5 - 0.5 / std::sqrt(3.0);
    const double b = 0.5 + 0.5 / std::sqrt(3.0);
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(q2.weights[k] == doctest::Approx(0.25).epsilon(1e-15));
        CHECK((std::abs(q2.points[k].x - a) < 1e-15 || std::abs(q2.points[k].x - b) < 1e-15));
        CHECK((std::abs(q2.points[k].y - a) < 1e-15 || std::abs(q2.points[k].y - b) < 1e-15));
    }
    double s = 0.0;
    for (std::size_t k = 0; k < 4; ++k)
        s += q2.weights[k] * q2.points[k].x * q2.points[k].x * q2.points[k].y * q2.points[k].y;
    CHECK(s == doctest::Approx(1.0 / 9.0).epsilon(1e-15));

    for (unsigned n = 1; n <= 6; ++n) {
        const auto g = gauss_1d(n);
        double w = 0.0;
        for (const double v : g.weights) {
            CHECK(v > 0.0);
            w += v;
        }
        CHECK(w == doctest::Approx(1.0).epsilon(1e-14));
        // exact for x^(2n-1): int_0^1 = 1 / (2n)
        double m = 0.0;
        for (unsigned i = 0; i < n; ++i)
            m += g.weights[i] * std::pow(g.points[i], 2 * n - 1);
        CHECK(m == doctest::Approx(1.0 / (2.0 * n)).epsilon(1e-13));
    }
    CHECK_THROWS_AS(gauss_1d(0), Error);
    CHECK_THROWS_AS(gauss_1d(7), Error);
}

TEST_CASE("distribute_dofs")
{
    CHECK(distribute_dofs(share(make_lshape()), 1)->n_dofs() == 8);
    CHECK(distribute_dofs(share(make_unit_square()), 2)->n_dofs() == 9);
    const auto q2 = distribute_dofs(share(make_lshape()), 2);
    CHECK(q2->n_dofs() == 21);

    SUBCASE("brute-force support point dedup")
    {
        for (unsigned p = 1; p <= 2; ++p) {
            const auto mesh = share(random_mesh(3));
            const auto s = distribute_dofs(mesh, p);
            std::vector<Point> unique;
            for (const auto c : mesh->active_cells())
                for (unsigned k = 0; k < s->dofs_per_cell(); ++k) {
                    const Point x = mesh->map(c, s->basis().node(k));
                    bool seen = false;
                    for (const auto& u : unique)
                        seen = seen || norm(u - x) < 1e-13;
                    if (!seen)
                        unique.push_back(x);
                }
            // a hanging vertex of a Q2 space duplicates the coarse edge midpoint dof
            std::size_t copies = 0;
            for (const auto& [slave, e] : s->constraints().entries())
                if (e.masters.size() == 1 && e.masters[0].second == 1.0 &&
                    norm(s->support_points()[slave] - s->support_points()[e.masters[0].first]) < 1e-14)
                    ++copies;
            if (p == 1)
                CHECK(copies == 0);
            CHECK(unique.size() == s->n_dofs() - copies);
            for (const auto c : mesh->active_cells()) {
                const auto dofs = s->cell_dofs(c);
                for (unsigned k = 0; k < s->dofs_per_cell(); ++k)
                    CHECK(norm(s->support_points()[dofs[k]] - mesh->map(c, s->basis().node(k))) < 1e-14);
            }
        }
    }
    SUBCASE("deterministic numbering")
    {
        const auto a = distribute_dofs(share(random_mesh(5)), 2);
        const auto b = distribute_dofs(share(random_mesh(5)), 2);
        CHECK(a->support_points() == b->support_points());
        CHECK(a->same_as(*b));
    }
    CHECK_THROWS_AS(distribute_dofs(share(make_lshape()), 3), Error);
    CHECK_THROWS_AS(distribute_dofs(share(make_lshape()), 0), Error);
}

TEST_CASE("hanging constraints")
{
    CHECK(hanging_constraints(*distribute_dofs(share(make_lshape()), 2)).empty());
    CHECK(hanging_constraints(*distribute_dofs(share(make_lshape().refine_global(2)), 1)).empty());

    const auto mesh = share(two_cells_one_refined());
    SUBCASE("p = 1")
    {
        const auto s = distribute_dofs(mesh, 1);
        const auto& c = hanging_constraints(*s);
        REQUIRE(c.size() == 1);
        const auto* e = c.find(dof_at(*s, {1.0, 0.5}));
        REQUIRE(e != nullptr);
        REQUIRE(e->masters.size() == 2);
        std::map<std::size_t, double> w(e->masters.begin(), e->masters.end());
        CHECK(w.at(dof_at(*s, {1.0, 0.0})) == 0.5);
        CHECK(w.at(dof_at(*s, {1.0, 1.0})) == 0.5);
    }
    SUBCASE("p = 2")
    {
        const auto s = distribute_dofs(mesh, 2);
        const auto& c = hanging_constraints(*s);
        const std::size_t lo = dof_at(*s, {1.0, 0.0});
        const std::size_t hi = dof_at(*s, {1.0, 1.0});
        const std::size_t mid = dof_at(*s, {1.0, 0.5});
        CHECK_FALSE(c.is_constrained(mid));
        const auto* q = c.find(dof_at(*s, {1.0, 0.25}));
        const auto* r = c.find(dof_at(*s, {1.0, 0.75}));
        REQUIRE(q != nullptr);
        REQUIRE(r != nullptr);
        // 1D quadratic Lagrange basis on [0, 1] with nodes 0, 1, 1/2
        auto l0 = [](double x) { return 2.0 * (x - 0.5) * (x - 1.0); };
        auto l1 = [](double x) { return 2.0 * x * (x - 0.5); };
        auto lm = [](double x) { return -4.0 * x * (x - 1.0); };
        std::map<std::size_t, double> wq(q->masters.begin(), q->masters.end());
        std::map<std::size_t, double> wr(r->masters.begin(), r->masters.end());
        CHECK(wq.at(lo) == l0(0.25));
        CHECK(wq.at(hi) == l1(0.25));
        CHECK(wq.at(mid) == lm(0.25));
        CHECK(wq.at(lo) == 0.375);
        CHECK(wq.at(hi) == -0.125);
        CHECK(wq.at(mid) == 0.75);
        CHECK(wr.at(lo) == -0.125);
        CHECK(wr.at(hi) == 0.375);
        CHECK(wr.at(mid) == 0.75);
    }
    SUBCASE("closed with weights summing to one")
    {
        for (unsigned p = 1; p <= 2; ++p) {
            const auto s = distribute_dofs(share(random_mesh(11, 6)), p);
            const auto& c = s->constraints();
            CHECK(c.closed());
            for (const auto& [slave, e] : c.entries()) {
                double sum = 0.0;
                for (const auto& [m, w] : e.masters) {
                    CHECK_FALSE(c.is_constrained(m));
                    sum += w;
                }
                CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
            }
        }
    }
}

TEST_CASE("element matrices")
{
    const auto s = distribute_dofs(share(make_unit_square()), 1);
    const auto M = assemble_mass(*s, [](Point) { return 1.0; });
    const auto A = assemble_stiffness(*s, [](Point) { return 1.0; });
    const auto M8 = assemble_mass(*s, [](Point) { return 0.8; });
    const auto A12 = assemble_stiffness(*s, [](Point) { return 1.2; });

    // bilinear hats in LL, LR, UL, UR order, integrated by a composite rule
    const std::array<std::function<double(double, double)>, 4> phi{
        [](double x, double y) { return (1 - x) * (1 - y); }, [](double x, double y) { return x * (1 - y); },
        [](double x, double y) { return (1 - x) * y; }, [](double x, double y) { return x * y; }};
    const std::array<std::function<Point(double, double)>, 4> grad{
        [](double x, double y) { return Point{-(1 - y), -(1 - x)}; },
        [](double x, double y) { return Point{1 - y, -x}; }, [](double x, double y) { return Point{-y, 1 - x}; },
        [](double x, double y) { return Point{y, x}; }};

    for (unsigned i = 0; i < 4; ++i)
        for (unsigned j = 0; j < 4; ++j) {
            const double mb = oracle::integrate_square([&](double x, double y) { return phi[i](x, y) * phi[j](x, y); },
                                                       0, 1, 0, 1, 2);
            const double ab = oracle::integrate_square(
                [&](double x, double y) { return dot(grad[i](x, y), grad[j](x, y)); }, 0, 1, 0, 1, 2);
            CHECK(std::abs(M(i, j) - q1_mass[4 * i + j] / 36.0) <= 1e-14);
            CHECK(std::abs(A(i, j) - q1_stiffness[4 * i + j] / 6.0) <= 1e-14);
            CHECK(std::abs(mb - q1_mass[4 * i + j] / 36.0) <= 1e-14);
            CHECK(std::abs(ab - q1_stiffness[4 * i + j] / 6.0) <= 1e-14);
            CHECK(M8(i, j) == doctest::Approx(0.8 * M(i, j)).epsilon(1e-15));
            CHECK(A12(i, j) == doctest::Approx(1.2 * A(i, j)).epsilon(1e-15));
        }
}

TEST_CASE("global assembly properties")
{
    for (unsigned p = 1; p <= 2; ++p) {
        const auto s = distribute_dofs(share(random_mesh(21, 5)), p);
        const auto M = assemble_mass(*s, [](Point) { return 0.8; });
        const auto A = assemble_stiffness(*s, [](Point) { return 1.2; });
        double total = 0.0;
        for (const double v : M.values())
            total += v;
        CHECK(total == doctest::Approx(0.8 * 0.75).epsilon(1e-13));
        const auto rows = spmv(A, Vector(s->n_dofs(), 1.0));
        for (const double r : rows)
            CHECK(std::abs(r) < 1e-12);
        CHECK(M.relative_asymmetry() < 1e-12);
        CHECK(A.relative_asymmetry() < 1e-12);

        SUBCASE("parallel assembly matches the serial path")
        {
            const auto Ms = assemble_mass(*s, [](Point x) { return 1.0 + x.x; }, Execution::serial);
            const auto Mp = assemble_mass(*s, [](Point x) { return 1.0 + x.x; }, Execution::parallel);
            for (std::size_t k = 0; k < Ms.values().size(); ++k)
                CHECK(Ms.values()[k] == doctest::Approx(Mp.values()[k]).epsilon(1e-13));
        }
    }
}

TEST_CASE("functionals")
{
    const auto s = distribute_dofs(share(random_mesh(2, 3)), 1);
    const auto M = assemble_mass(*s, [](Point) { return 1.0; });
    const auto b = assemble_volume_functional(*s, [](Point) { return 1.0; });
    const auto m1 = spmv(M, Vector(s->n_dofs(), 1.0));
    for (std::size_t i = 0; i < b.size(); ++i)
        CHECK(b[i] == doctest::Approx(m1[i]).epsilon(1e-13));
    for (const double v : assemble_volume_functional(*s, [](Point) { return 0.0; }))
        CHECK(v == 0.0);

    const auto c = distribute_dofs(share(make_lshape()), 1);
    const auto h = assemble_boundary_functional(*c, [](Point) { return 1.0; });
    for (std::size_t i = 0; i < c->n_dofs(); ++i) {
        const Point x = c->support_points()[i];
        double expected = 0.0;
        if (x.x == 0.0)
            expected = x.y == 0.5 ? 0.5 : 0.25;
        CHECK(h[i] == doctest::Approx(expected).epsilon(1e-15));
    }
}

TEST_CASE("interpolate and evaluate")
{
    const auto mesh = share(random_mesh(7, 4));
    for (unsigned p = 1; p <= 2; ++p) {
        const auto s = distribute_dofs(mesh, p);
        const auto c = interpolate(s, [](Point) { return 2.5; });
        for (const double v : c.coefficients())
            CHECK(v == doctest::Approx(2.5).epsilon(1e-15));
        CHECK(c.evaluate({0.3, 0.9}) == doctest::Approx(2.5).epsilon(1e-14));

        const auto x1 = interpolate(s, [](Point x) { return x.x; });
        for (std::size_t i = 0; i < s->n_dofs(); ++i)
            CHECK(x1.coefficients()[i] == doctest::Approx(s->support_points()[i].x).epsilon(1e-15));
        auto gen = oracle::rng(p);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int k = 0; k < 50; ++k) {
            Point x{u(gen), u(gen)};
            if (x.x > 0.5 && x.y > 0.5)
                x.x -= 0.5;
            CHECK(evaluate(x1, x) == doctest::Approx(x.x).epsilon(1e-12));
        }

        SUBCASE("projection property")
        {
            auto g = [](Point x) { return std::sin(3.0 * x.x) * std::exp(x.y); };
            const auto once = interpolate(s, g);
            const auto twice = interpolate(s, [&once](Point x) { return once.evaluate(x); });
            for (std::size_t i = 0; i < s->n_dofs(); ++i)
                CHECK(twice.coefficients()[i] == doctest::Approx(once.coefficients()[i]).epsilon(1e-12));
        }
    }
    const auto sq = distribute_dofs(share(make_unit_square()), 1);
    const auto xy = interpolate(sq, [](Point x) { return x.x * x.y; });
    CHECK(xy.evaluate({0.3, 0.7}) == doctest::Approx(0.21).epsilon(1e-14));
    CHECK_THROWS_AS(xy.evaluate({1.2, 0.5}), Error);

    SUBCASE("Lagrange property")
    {
        const auto s = distribute_dofs(share(make_lshape()), 2);
        for (std::size_t j = 0; j < s->n_dofs(); ++j) {
            Vector e(s->n_dofs(), 0.0);
            e[j] = 1.0;
            const FeFunction f(s, e);
            for (std::size_t i = 0; i < s->n_dofs(); ++i)
                CHECK(f.evaluate(s->support_points()[i]) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-14));
        }
    }
}

TEST_CASE("partition of unity")
{
    auto gen = oracle::rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (unsigned p = 1; p <= 2; ++p) {
        const auto mesh = share(random_mesh(30 + p, 5));
        const auto s = distribute_dofs(mesh, p);
        const auto& active = mesh->active_cells();
        std::uniform_int_distribution<std::size_t> pick(0, active.size() - 1);
        for (int k = 0; k < 100; ++k) {
            const Point unit{u(gen), u(gen)};
            double sum = 0.0;
            for (unsigned i = 0; i < s->dofs_per_cell(); ++i)
                sum += s->basis().value(i, unit);
            CHECK(std::abs(sum - 1.0) < 1e-12);
            // globally: all-ones coefficients evaluate to one
            const FeFunction one(s, Vector(s->n_dofs(), 1.0));
            CHECK(std::abs(one.value(active[pick(gen)], unit) - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("continuity across hanging faces")
{
    auto gen = oracle::rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (unsigned p = 1; p <= 2; ++p)
        for (std::uint64_t seed = 40; seed < 43; ++seed) {
            const auto mesh = share(random_mesh(seed, 6));
            const auto s = distribute_dofs(mesh, p);
            const FeFunction f(s, random_constrained(*s, seed));
            std::size_t faces = 0;
            for (const auto c : mesh->active_cells())
                for (unsigned face = 0; face < 4; ++face) {
                    const auto& info = mesh->face_info(c, face);
                    if (info.neighbors.size() != 2)
                        continue;
                    ++faces;
                    for (int k = 0; k < 20; ++k) {
                        const Point unit = face_point(face, u(gen));
                        const Point x = mesh->map(c, unit);
                        for (const auto& nb : info.neighbors) {
                            const auto other = mesh->inverse_map(nb.cell, x);
                            if (!other)
                                continue;
                            CHECK(std::abs(f.value(c, unit) - f.value(nb.cell, *other)) <= 1e-12);
                        }
                    }
                }
            CHECK(faces > 0);
        }
}

TEST_CASE("transfer")
{
    const auto mesh = share(random_mesh(8, 3));
    const auto s1 = distribute_dofs(mesh, 1);
    const FeFunction f(s1, random_constrained(*s1, 1));

    SUBCASE("identity on identical spaces")
    {
        CHECK(transfer(f, s1).coefficients() == f.coefficients());
        const auto copy = distribute_dofs(share(random_mesh(8, 3)), 1);
        CHECK(transfer(f, copy).coefficients() == f.coefficients());
    }
    SUBCASE("linear function onto a refined mesh")
    {
        const auto x1 = interpolate(s1, [](Point x) { return x.x; });
        const auto fine = distribute_dofs(share(mesh->refine_global(1)), 1);
        const auto t = transfer(x1, fine);
        for (std::size_t i = 0; i < fine->n_dofs(); ++i)
            CHECK(t.coefficients()[i] == doctest::Approx(fine->support_points()[i].x).epsilon(1e-13));
    }
    SUBCASE("Q1 into Q2 on the same mesh")
    {
        const auto s2 = distribute_dofs(mesh, 2);
        const auto t = transfer(f, s2);
        auto gen = oracle::rng(12);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (const auto c : mesh->active_cells())
            for (int k = 0; k < 5; ++k) {
                const Point unit{u(gen), u(gen)};
                CHECK(std::abs(t.value(c, unit) - f.value(c, unit)) < 1e-13);
            }
    }
    SUBCASE("target outside the source domain")
    {
        const auto big = distribute_dofs(
            share(QuadMesh({{0, 0}, {2, 0}, {0, 2}, {2, 2}}, {{0, 1, 2, 3}}, [](Point) { return BoundaryType::dirichlet; })),
            1);
        CHECK_THROWS_AS(transfer(f, big), Error);
    }
}
