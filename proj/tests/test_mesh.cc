#include "oracles.hh"

#include <dwr/mesh.hh>

#include <doctest.h>

#include <random>

using namespace dwr;

namespace {

std::size_t cell_with_lower_left(const QuadMesh& m, Point p)
{
    for (const auto c : m.active_cells())
        if (m.vertex(m.cell(c).vertices[0]) == p)
            return c;
    return invalid_id;
}

BoundaryType boundary_at(const QuadMesh& m, Point midpoint)
{
    for (const auto c : m.active_cells())
        for (unsigned f = 0; f < 4; ++f) {
            const auto& fv = face_vertices[f];
            const Point a = m.vertex(m.cell(c).vertices[fv[0]]);
            const Point b = m.vertex(m.cell(c).vertices[fv[1]]);
            if (0.5 * (a + b) == midpoint)
                return m.face_info(c, f).boundary;
        }
    throw Error("no such face");
}

QuadMesh random_refinement(QuadMesh m, unsigned steps, std::uint64_t seed)
{
    auto gen = oracle::rng(seed);
    for (unsigned s = 0; s < steps; ++s) {
        const auto& active = m.active_cells();
        std::uniform_int_distribution<std::size_t> pick(0, active.size() - 1);
        RefinementMarks marks;
        for (std::size_t k = 0; k < 1 + active.size() / 5; ++k)
            marks.insert(active[pick(gen)]);
        m = m.refine(marks);
    }
    return m;
}

} // namespace

TEST_CASE("make_lshape")
{
    const auto m = make_lshape();
    CHECK(m.n_active_cells() == 3);
    CHECK(m.n_vertices() == 8);
    CHECK(boundary_at(m, {0.0, 0.25}) == BoundaryType::neumann);
    CHECK(boundary_at(m, {0.0, 0.75}) == BoundaryType::neumann);
    CHECK(boundary_at(m, {0.25, 0.0}) == BoundaryType::dirichlet);
    CHECK(boundary_at(m, {0.75, 0.5}) == BoundaryType::dirichlet);
    CHECK(boundary_at(m, {0.5, 0.75}) == BoundaryType::dirichlet);
    CHECK(boundary_at(m, {0.25, 0.5}) == BoundaryType::interior);
    CHECK(m.total_active_area() == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(m.is_one_irregular());
    CHECK_FALSE(m.has_hanging_nodes());
}

TEST_CASE("refine")
{
    SUBCASE("single cell")
    {
        const auto m = make_unit_square().refine({0});
        CHECK(m.n_active_cells() == 4);
        CHECK(m.n_vertices() == 9);
    }
    SUBCASE("one cell of the L-shape")
    {
        const auto m = make_lshape().refine({0});
        CHECK(m.n_active_cells() == 6);
        CHECK(m.is_one_irregular());
        CHECK(m.has_hanging_nodes());
    }
    SUBCASE("closure refines the coarse neighbour")
    {
        const auto m1 = make_lshape().refine({0});
        // child of cell 0 touching cell 1 (lower-right child)
        const std::size_t child = m1.cell(0).first_child + 1;
        const auto m2 = m1.refine({child});
        CHECK(m2.is_one_irregular());
        CHECK_FALSE(m2.cell(1).active());
        CHECK(m2.cell(2).active());
    }
    SUBCASE("children partition the parent")
    {
        const auto m = make_lshape().refine({1});
        const auto& parent = m.cell(1);
        double area = 0.0;
        for (std::size_t k = 0; k < 4; ++k) {
            CHECK(m.cell(parent.first_child + k).parent == 1);
            CHECK(m.cell(parent.first_child + k).level == 1);
            area += m.area(parent.first_child + k);
        }
        CHECK(area == doctest::Approx(0.25).epsilon(1e-15));
    }
    SUBCASE("boundary colours are inherited")
    {
        const auto m = make_lshape().refine_global(2);
        CHECK(boundary_at(m, {0.0, 0.0625}) == BoundaryType::neumann);
        CHECK(boundary_at(m, {0.0, 0.9375}) == BoundaryType::neumann);
        CHECK(boundary_at(m, {0.0625, 0.0}) == BoundaryType::dirichlet);
        CHECK(boundary_at(m, {0.5625, 0.5}) == BoundaryType::dirichlet);
        CHECK(boundary_at(m, {0.5625, 0.25}) == BoundaryType::interior);
    }
    SUBCASE("inactive mark")
    {
        const auto m = make_lshape().refine({0});
        CHECK_THROWS_AS(m.refine({0}), Error);
        CHECK_THROWS_AS(m.refine({99}), Error);
    }
    SUBCASE("random sequences keep the invariants")
    {
        for (std::uint64_t seed = 1; seed <= 6; ++seed) {
            QuadMesh m = make_lshape();
            auto gen = oracle::rng(seed);
            for (int step = 0; step < 6; ++step) {
                const auto& active = m.active_cells();
                std::uniform_int_distribution<std::size_t> pick(0, active.size() - 1);
                RefinementMarks marks{active[pick(gen)], active[pick(gen)]};
                const auto next = m.refine(marks);
                CHECK(next.is_one_irregular());
                CHECK(next.total_active_area() == doctest::Approx(0.75).epsilon(1e-12));
                CHECK(next.n_vertices() >= m.n_vertices());
                for (std::size_t v = 0; v < m.n_vertices(); ++v)
                    CHECK(next.vertex(v) == m.vertex(v));
                for (const auto c : marks)
                    CHECK_FALSE(next.cell(c).active());
                m = next;
            }
        }
    }
}

TEST_CASE("active cell order")
{
    const auto m = make_lshape();
    CHECK(m.active_cells() == std::vector<std::size_t>{0, 1, 2});
    CHECK(m.refine({0}).active_cells() == std::vector<std::size_t>{1, 2, 3, 4, 5, 6});
    CHECK(m.refine({}).active_cells() == m.active_cells());
    CHECK(m.refine({}) == m);
    const auto a = random_refinement(m, 4, 9);
    const auto b = random_refinement(m, 4, 9);
    CHECK(a == b);
    CHECK(a.active_cells() == b.active_cells());
}

TEST_CASE("locate_point")
{
    const auto m = make_lshape();
    const auto loc = m.locate_point({0.25, 0.25});
    CHECK(loc.cell == cell_with_lower_left(m, {0.0, 0.0}));
    CHECK(loc.unit.x == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(loc.unit.y == doctest::Approx(0.5).epsilon(1e-14));

    CHECK(m.locate_point({0.5, 0.25}).cell == 0);
    CHECK(m.locate_point({0.5, 0.5}).cell == 0);
    CHECK(m.locate_point({0.25, 0.5}).cell == 0);
    CHECK_THROWS_AS(m.locate_point({0.75, 0.75}), Error);
    CHECK_THROWS_AS(m.locate_point({1.5, 0.25}), Error);
    CHECK_FALSE(m.find_point({-0.1, 0.5}).has_value());
    CHECK(m.find_point({1.0, 0.5}).has_value());

    SUBCASE("inverse of the bilinear map")
    {
        const auto r = random_refinement(m, 5, 4);
        auto gen = oracle::rng(8);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const auto& active = r.active_cells();
        std::uniform_int_distribution<std::size_t> pick(0, active.size() - 1);
        for (int k = 0; k < 200; ++k) {
            const auto c = active[pick(gen)];
            const Point unit{u(gen), u(gen)};
            const Point x = r.map(c, unit);
            const auto back = r.inverse_map(c, x);
            REQUIRE(back.has_value());
            CHECK(std::abs(back->x - unit.x) < 1e-10);
            CHECK(std::abs(back->y - unit.y) < 1e-10);
            const auto loc2 = r.locate_point(x);
            CHECK(r.map(loc2.cell, loc2.unit).x == doctest::Approx(x.x).epsilon(1e-12));
            CHECK(loc2.cell <= c);
        }
    }
    SUBCASE("general quadrilateral")
    {
        const QuadMesh q({{0.0, 0.0}, {2.0, 0.2}, {0.3, 1.0}, {1.7, 1.5}}, {{0, 1, 2, 3}},
                         [](Point) { return BoundaryType::dirichlet; });
        const Point unit{0.3, 0.8};
        const auto back = q.inverse_map(0, q.map(0, unit));
        REQUIRE(back.has_value());
        CHECK(back->x == doctest::Approx(unit.x).epsilon(1e-12));
        CHECK(back->y == doctest::Approx(unit.y).epsilon(1e-12));
        CHECK_FALSE(q.inverse_map(0, {3.0, 3.0}).has_value());
    }
}

TEST_CASE("invalid coarse meshes")
{
    auto colour = [](Point) { return BoundaryType::dirichlet; };
    // clockwise ordering flips the Jacobian
    CHECK_THROWS_AS(QuadMesh({{0, 0}, {1, 0}, {0, 1}, {1, 1}}, {{1, 0, 3, 2}}, colour), Error);
    CHECK_THROWS_AS(QuadMesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2, 3}}, colour), Error);
}

TEST_CASE("face neighbours")
{
    const auto m = make_lshape().refine({0});
    // coarse cell 1 sees two children across its left face
    const auto& left = m.face_info(1, 0);
    REQUIRE(left.neighbors.size() == 2);
    CHECK(left.neighbors[0].s_begin == 0.0);
    CHECK(left.neighbors[0].s_end == 0.5);
    CHECK(left.neighbors[1].s_begin == 0.5);
    CHECK(left.neighbors[1].s_end == 1.0);
    // the lower-right child sees half of cell 1
    const std::size_t child = m.cell(0).first_child + 1;
    const auto& right = m.face_info(child, 1);
    REQUIRE(right.neighbors.size() == 1);
    CHECK(right.neighbors[0].cell == 1);
    CHECK(right.neighbors[0].s_end - right.neighbors[0].s_begin == 1.0);
}
