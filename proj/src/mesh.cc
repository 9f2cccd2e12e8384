#include <dwr/mesh.hh>

#include <algorithm>
#include <cmath>

namespace dwr {

namespace {

constexpr double locate_tolerance = 1e-12;

std::pair<std::size_t, std::size_t> edge_key(std::size_t a, std::size_t b)
{
    return a < b ? std::pair{a, b} : std::pair{b, a};
}

double shape(unsigned i, Point u)
{
    const double fx = (i & 1U) ? u.x : 1.0 - u.x;
    const double fy = (i & 2U) ? u.y : 1.0 - u.y;
    return fx * fy;
}

} // namespace

Point face_point(unsigned face, double s)
{
    switch (face) {
    case 0: return {0.0, s};
    case 1: return {1.0, s};
    case 2: return {s, 0.0};
    default: return {s, 1.0};
    }
}

Point reference_normal(unsigned face)
{
    switch (face) {
    case 0: return {-1.0, 0.0};
    case 1: return {1.0, 0.0};
    case 2: return {0.0, -1.0};
    default: return {0.0, 1.0};
    }
}

QuadMesh::QuadMesh(std::vector<Point> vertices, const std::vector<std::array<std::size_t, 4>>& cells,
                   const Colorizer& colorize)
    : vertices_(std::move(vertices))
{
    std::map<std::pair<std::size_t, std::size_t>, int> face_count;
    for (const auto& vs : cells) {
        for (auto v : vs)
            if (v >= vertices_.size())
                throw Error("QuadMesh: vertex index out of range");
        for (const auto& fv : face_vertices)
            ++face_count[edge_key(vs[fv[0]], vs[fv[1]])];
    }
    for (const auto& vs : cells) {
        Cell c;
        c.vertices = vs;
        for (unsigned f = 0; f < 4; ++f) {
            const auto a = vs[face_vertices[f][0]];
            const auto b = vs[face_vertices[f][1]];
            const int count = face_count[edge_key(a, b)];
            if (count > 2)
                throw Error("QuadMesh: face shared by more than two cells");
            if (count == 1) {
                c.boundary[f] = colorize(0.5 * (vertices_[a] + vertices_[b]));
                if (c.boundary[f] == BoundaryType::interior)
                    throw Error("QuadMesh: boundary face coloured as interior");
            }
        }
        roots_.push_back(cells_.size());
        cells_.push_back(c);
    }
    parent_edge_.assign(vertices_.size(), {invalid_id, invalid_id});
    for (std::size_t c = 0; c < cells_.size(); ++c)
        for (auto q : {Point{0.5, 0.5}, Point{0.0, 0.0}, Point{1.0, 1.0}, Point{1.0, 0.0}, Point{0.0, 1.0}}) {
            const auto J = jacobian(c, q);
            if (J[0].x * J[1].y - J[0].y * J[1].x <= 0.0)
                throw Error("QuadMesh: cell " + std::to_string(c) + " has non-positive Jacobian");
        }
    build_topology();
}

std::optional<std::size_t> QuadMesh::edge_midpoint(std::size_t a, std::size_t b) const
{
    const auto it = midpoints_.find(edge_key(a, b));
    if (it == midpoints_.end())
        return std::nullopt;
    return it->second;
}

Point QuadMesh::map(std::size_t cell, Point unit) const
{
    const auto& vs = cells_[cell].vertices;
    Point x{};
    for (unsigned i = 0; i < 4; ++i)
        x = x + shape(i, unit) * vertices_[vs[i]];
    return x;
}

std::array<Point, 2> QuadMesh::jacobian(std::size_t cell, Point u) const
{
    const auto& vs = cells_[cell].vertices;
    const Point& v0 = vertices_[vs[0]];
    const Point& v1 = vertices_[vs[1]];
    const Point& v2 = vertices_[vs[2]];
    const Point& v3 = vertices_[vs[3]];
    return {(1.0 - u.y) * (v1 - v0) + u.y * (v3 - v2), (1.0 - u.x) * (v2 - v0) + u.x * (v3 - v1)};
}

double QuadMesh::area(std::size_t cell) const
{
    // 2x2 Gauss integrates the bilinear Jacobian determinant exactly
    const double g = 0.5 / std::sqrt(3.0);
    double a = 0.0;
    for (double qx : {0.5 - g, 0.5 + g})
        for (double qy : {0.5 - g, 0.5 + g}) {
            const auto J = jacobian(cell, {qx, qy});
            a += 0.25 * (J[0].x * J[1].y - J[0].y * J[1].x);
        }
    return a;
}

double QuadMesh::total_active_area() const
{
    double a = 0.0;
    for (auto c : active_)
        a += area(c);
    return a;
}

std::optional<Point> QuadMesh::inverse_map(std::size_t cell, Point p) const
{
    const auto& vs = cells_[cell].vertices;
    double xmin = vertices_[vs[0]].x, xmax = xmin, ymin = vertices_[vs[0]].y, ymax = ymin;
    for (auto v : vs) {
        xmin = std::min(xmin, vertices_[v].x);
        xmax = std::max(xmax, vertices_[v].x);
        ymin = std::min(ymin, vertices_[v].y);
        ymax = std::max(ymax, vertices_[v].y);
    }
    const double diam = std::max(xmax - xmin, ymax - ymin);
    const double pad = locate_tolerance * diam;
    if (p.x < xmin - pad || p.x > xmax + pad || p.y < ymin - pad || p.y > ymax + pad)
        return std::nullopt;

    Point u{0.5, 0.5};
    bool converged = false;
    for (int it = 0; it < 20; ++it) {
        const Point r = map(cell, u) - p;
        if (norm(r) <= 1e-12 * diam) {
            converged = true;
            break;
        }
        const auto J = jacobian(cell, u);
        const double det = J[0].x * J[1].y - J[0].y * J[1].x;
        u.x -= (J[1].y * r.x - J[1].x * r.y) / det;
        u.y -= (-J[0].y * r.x + J[0].x * r.y) / det;
    }
    if (!converged && norm(map(cell, u) - p) > 1e-12 * diam)
        return std::nullopt;
    if (u.x < -locate_tolerance || u.x > 1.0 + locate_tolerance || u.y < -locate_tolerance ||
        u.y > 1.0 + locate_tolerance)
        return std::nullopt;
    u.x = std::clamp(u.x, 0.0, 1.0);
    u.y = std::clamp(u.y, 0.0, 1.0);
    return u;
}

std::optional<PointLocation> QuadMesh::find_point(Point p) const
{
    std::optional<PointLocation> best;
    std::vector<std::size_t> stack(roots_.rbegin(), roots_.rend());
    while (!stack.empty()) {
        const auto c = stack.back();
        stack.pop_back();
        if (best && c > best->cell)
            continue;
        const auto u = inverse_map(c, p);
        if (!u)
            continue;
        if (cells_[c].active()) {
            if (!best || c < best->cell)
                best = PointLocation{c, *u};
        } else {
            for (std::size_t k = 4; k-- > 0;)
                stack.push_back(cells_[c].first_child + k);
        }
    }
    return best;
}

PointLocation QuadMesh::locate_point(Point p) const
{
    if (auto loc = find_point(p))
        return *loc;
    throw Error("locate_point: point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                ") is outside the domain");
}

std::size_t QuadMesh::midpoint_vertex(std::size_t a, std::size_t b)
{
    const auto key = edge_key(a, b);
    if (const auto it = midpoints_.find(key); it != midpoints_.end())
        return it->second;
    const auto m = vertices_.size();
    vertices_.push_back(0.5 * (vertices_[a] + vertices_[b]));
    parent_edge_.push_back(key);
    midpoints_.emplace(key, m);
    return m;
}

void QuadMesh::split(std::size_t c)
{
    if (!cells_[c].active())
        return;
    const Cell parent = cells_[c];
    const auto& v = parent.vertices;
    const auto mb = midpoint_vertex(v[0], v[1]);
    const auto mt = midpoint_vertex(v[2], v[3]);
    const auto ml = midpoint_vertex(v[0], v[2]);
    const auto mr = midpoint_vertex(v[1], v[3]);
    const auto center = vertices_.size();
    vertices_.push_back(map(c, {0.5, 0.5}));
    parent_edge_.push_back({invalid_id, invalid_id});

    const std::array<std::array<std::size_t, 4>, 4> child_vertices{{
        {v[0], mb, ml, center},
        {mb, v[1], center, mr},
        {ml, center, v[2], mt},
        {center, mr, mt, v[3]},
    }};
    const auto I = BoundaryType::interior;
    const auto& b = parent.boundary;
    const std::array<std::array<BoundaryType, 4>, 4> child_boundary{{
        {b[0], I, b[2], I},
        {I, b[1], b[2], I},
        {b[0], I, I, b[3]},
        {I, b[1], I, b[3]},
    }};
    const auto first = cells_.size();
    for (unsigned k = 0; k < 4; ++k) {
        Cell child;
        child.vertices = child_vertices[k];
        child.level = parent.level + 1;
        child.parent = c;
        child.boundary = child_boundary[k];
        cells_.push_back(child);
    }
    cells_[c].first_child = first;
}

bool QuadMesh::violates_irregularity(std::size_t c) const
{
    const auto& cell = cells_[c];
    for (unsigned f = 0; f < 4; ++f) {
        if (cell.boundary[f] != BoundaryType::interior)
            continue;
        const auto a = cell.vertices[face_vertices[f][0]];
        const auto b = cell.vertices[face_vertices[f][1]];
        const auto m = edge_midpoint(a, b);
        if (m && (edge_midpoint(a, *m) || edge_midpoint(*m, b)))
            return true;
    }
    return false;
}

QuadMesh QuadMesh::refine(const RefinementMarks& marks) const
{
    for (auto c : marks)
        if (c >= cells_.size() || !cells_[c].active())
            throw Error("refine: mark refers to a non-active cell " + std::to_string(c));
    QuadMesh result = *this;
    if (marks.empty())
        return result;

    std::set<std::size_t> pending(marks.begin(), marks.end());
    while (!pending.empty()) {
        for (auto c : pending)
            result.split(c);
        pending.clear();
        for (std::size_t c = 0; c < result.cells_.size(); ++c)
            if (result.cells_[c].active() && result.violates_irregularity(c))
                pending.insert(c);
    }
    result.build_topology();
    return result;
}

QuadMesh QuadMesh::refine_global(unsigned times) const
{
    QuadMesh result = *this;
    for (unsigned k = 0; k < times; ++k) {
        const auto& act = result.active_cells();
        result = result.refine(RefinementMarks(act.begin(), act.end()));
    }
    return result;
}

bool QuadMesh::is_one_irregular() const
{
    return std::none_of(active_.begin(), active_.end(),
                        [this](std::size_t c) { return violates_irregularity(c); });
}

bool QuadMesh::has_hanging_nodes() const
{
    for (auto c : active_)
        for (unsigned f = 0; f < 4; ++f)
            if (faces_[c][f].neighbors.size() == 2)
                return true;
    return false;
}

void QuadMesh::build_topology()
{
    active_.clear();
    active_index_.assign(cells_.size(), invalid_id);
    for (std::size_t c = 0; c < cells_.size(); ++c)
        if (cells_[c].active()) {
            active_index_[c] = active_.size();
            active_.push_back(c);
        }

    std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> owners;
    for (auto c : active_)
        for (unsigned f = 0; f < 4; ++f) {
            const auto& v = cells_[c].vertices;
            owners[edge_key(v[face_vertices[f][0]], v[face_vertices[f][1]])].push_back(c);
        }

    auto other_owner = [&](std::size_t a, std::size_t b, std::size_t self) -> std::size_t {
        const auto it = owners.find(edge_key(a, b));
        if (it == owners.end())
            return invalid_id;
        for (auto c : it->second)
            if (c != self)
                return c;
        return invalid_id;
    };

    faces_.assign(cells_.size(), {});
    for (auto c : active_) {
        const auto& cell = cells_[c];
        for (unsigned f = 0; f < 4; ++f) {
            FaceInfo& info = faces_[c][f];
            info.boundary = cell.boundary[f];
            if (info.boundary != BoundaryType::interior)
                continue;
            const auto a = cell.vertices[face_vertices[f][0]];
            const auto b = cell.vertices[face_vertices[f][1]];
            if (const auto same = other_owner(a, b, c); same != invalid_id) {
                info.neighbors.push_back({same, 0.0, 1.0});
                continue;
            }
            if (const auto m = edge_midpoint(a, b)) {
                const auto n0 = other_owner(a, *m, c);
                const auto n1 = other_owner(*m, b, c);
                if (n0 == invalid_id || n1 == invalid_id)
                    throw Error("QuadMesh: mesh is not 1-irregular");
                info.neighbors.push_back({n0, 0.0, 0.5});
                info.neighbors.push_back({n1, 0.5, 1.0});
                continue;
            }
            // fine side of a hanging face: one endpoint is the coarse edge midpoint
            std::size_t coarse = invalid_id;
            for (auto [mid, end] : {std::pair{b, a}, std::pair{a, b}}) {
                const auto& pe = parent_edge_[mid];
                if (pe.first == invalid_id || (pe.first != end && pe.second != end))
                    continue;
                coarse = other_owner(pe.first, pe.second, c);
                if (coarse != invalid_id)
                    break;
            }
            if (coarse == invalid_id)
                throw Error("QuadMesh: interior face of cell " + std::to_string(c) + " has no neighbour");
            info.neighbors.push_back({coarse, 0.0, 1.0});
        }
    }
}

QuadMesh make_lshape()
{
    std::vector<Point> v{{0.0, 0.0}, {0.5, 0.0}, {1.0, 0.0}, {0.0, 0.5},
                         {0.5, 0.5}, {1.0, 0.5}, {0.0, 1.0}, {0.5, 1.0}};
    const std::vector<std::array<std::size_t, 4>> cells{{0, 1, 3, 4}, {1, 2, 4, 5}, {3, 4, 6, 7}};
    return QuadMesh(std::move(v), cells, [](Point m) {
        return m.x == 0.0 ? BoundaryType::neumann : BoundaryType::dirichlet;
    });
}

QuadMesh make_unit_square(BoundaryType type)
{
    std::vector<Point> v{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}};
    return QuadMesh(std::move(v), {{0, 1, 2, 3}}, [type](Point) { return type; });
}

} // namespace dwr
