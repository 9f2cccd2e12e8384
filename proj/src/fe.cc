#include <dwr/fe.hh>

#include <algorithm>

namespace dwr {

namespace {

std::pair<std::size_t, std::size_t> edge_key(std::size_t a, std::size_t b)
{
    return a < b ? std::pair{a, b} : std::pair{b, a};
}

} // namespace

LagrangeBasis::LagrangeBasis(unsigned degree) : degree_(degree)
{
    if (degree != 1 && degree != 2)
        throw Error("LagrangeBasis: unsupported degree " + std::to_string(degree));
}

Point LagrangeBasis::node(unsigned k) const
{
    const unsigned n = degree_ + 1;
    return {static_cast<double>(k % n) / degree_, static_cast<double>(k / n) / degree_};
}

double LagrangeBasis::value_1d(unsigned i, double x) const
{
    if (degree_ == 1)
        return i == 0 ? 1.0 - x : x;
    switch (i) {
    case 0: return 2.0 * (x - 0.5) * (x - 1.0);
    case 1: return 4.0 * x * (1.0 - x);
    default: return 2.0 * x * (x - 0.5);
    }
}

double LagrangeBasis::derivative_1d(unsigned i, double x) const
{
    if (degree_ == 1)
        return i == 0 ? -1.0 : 1.0;
    switch (i) {
    case 0: return 4.0 * x - 3.0;
    case 1: return 4.0 - 8.0 * x;
    default: return 4.0 * x - 1.0;
    }
}

double LagrangeBasis::second_derivative_1d(unsigned i, double) const
{
    if (degree_ == 1)
        return 0.0;
    return i == 1 ? -8.0 : 4.0;
}

double LagrangeBasis::value(unsigned k, Point u) const
{
    const unsigned n = degree_ + 1;
    return value_1d(k % n, u.x) * value_1d(k / n, u.y);
}

Point LagrangeBasis::gradient(unsigned k, Point u) const
{
    const unsigned n = degree_ + 1;
    const unsigned i = k % n, j = k / n;
    return {derivative_1d(i, u.x) * value_1d(j, u.y), value_1d(i, u.x) * derivative_1d(j, u.y)};
}

std::array<double, 3> LagrangeBasis::hessian(unsigned k, Point u) const
{
    const unsigned n = degree_ + 1;
    const unsigned i = k % n, j = k / n;
    return {second_derivative_1d(i, u.x) * value_1d(j, u.y), derivative_1d(i, u.x) * derivative_1d(j, u.y),
            value_1d(i, u.x) * second_derivative_1d(j, u.y)};
}

std::vector<unsigned> LagrangeBasis::face_nodes(unsigned face) const
{
    const unsigned n = degree_ + 1;
    std::vector<unsigned> nodes;
    for (unsigned t = 0; t < n; ++t) {
        switch (face) {
        case 0: nodes.push_back(t * n); break;
        case 1: nodes.push_back(t * n + degree_); break;
        case 2: nodes.push_back(t); break;
        default: nodes.push_back(degree_ * n + t); break;
        }
    }
    return nodes;
}

Point CellPoint::physical_gradient(Point g) const
{
    const double a = jacobian[0].x, b = jacobian[1].x, c = jacobian[0].y, d = jacobian[1].y;
    return {(d * g.x - c * g.y) / det, (-b * g.x + a * g.y) / det};
}

double CellPoint::physical_laplacian(const std::array<double, 3>& h) const
{
    // Inverse Jacobian rows give d xi / d x and d eta / d x.
    const double a = jacobian[0].x, b = jacobian[1].x, c = jacobian[0].y, d = jacobian[1].y;
    const double xi_x = d / det, xi_y = -b / det, eta_x = -c / det, eta_y = a / det;
    const double lap_x = h[0] * xi_x * xi_x + 2.0 * h[1] * xi_x * eta_x + h[2] * eta_x * eta_x;
    const double lap_y = h[0] * xi_y * xi_y + 2.0 * h[1] * xi_y * eta_y + h[2] * eta_y * eta_y;
    return lap_x + lap_y;
}

CellPoint cell_point(const QuadMesh& mesh, std::size_t cell, Point unit)
{
    CellPoint cp;
    cp.x = mesh.map(cell, unit);
    cp.jacobian = mesh.jacobian(cell, unit);
    cp.det = cp.jacobian[0].x * cp.jacobian[1].y - cp.jacobian[0].y * cp.jacobian[1].x;
    return cp;
}

FeSpace::FeSpace(std::shared_ptr<const QuadMesh> mesh, unsigned degree)
    : mesh_(std::move(mesh)), basis_(degree)
{
    const QuadMesh& m = *mesh_;
    const unsigned p = degree;
    const unsigned n = p + 1;
    const auto& active = m.active_cells();
    cell_dofs_.assign(active.size() * basis_.size(), invalid_id);
    vertex_dof_.assign(m.n_vertices(), invalid_id);

    std::map<std::size_t, std::size_t> center_dof;
    auto new_dof = [&](std::size_t cell, unsigned k) {
        support_points_.push_back(m.map(cell, basis_.node(k)));
        return support_points_.size() - 1;
    };

    for (std::size_t a = 0; a < active.size(); ++a) {
        const auto c = active[a];
        const auto& v = m.cell(c).vertices;
        for (unsigned k = 0; k < basis_.size(); ++k) {
            const unsigned i = k % n, j = k / n;
            const bool ix = (i == 0 || i == p), jx = (j == 0 || j == p);
            std::size_t dof;
            if (ix && jx) {
                const auto vid = v[(i == p ? 1U : 0U) + (j == p ? 2U : 0U)];
                if (vertex_dof_[vid] == invalid_id)
                    vertex_dof_[vid] = new_dof(c, k);
                dof = vertex_dof_[vid];
            } else if (ix || jx) {
                unsigned face;
                if (!ix)
                    face = j == 0 ? 2 : 3;
                else
                    face = i == 0 ? 0 : 1;
                const auto key = edge_key(v[face_vertices[face][0]], v[face_vertices[face][1]]);
                auto [it, inserted] = edge_dof_.try_emplace(key, invalid_id);
                if (inserted)
                    it->second = new_dof(c, k);
                dof = it->second;
            } else {
                dof = new_dof(c, k);
                center_dof[c] = dof;
            }
            cell_dofs_[a * basis_.size() + k] = dof;
        }
    }

    // hanging faces, seen from the coarse side
    for (const auto c : active) {
        const auto& v = m.cell(c).vertices;
        for (unsigned f = 0; f < 4; ++f) {
            if (m.face_info(c, f).neighbors.size() != 2)
                continue;
            const auto va = v[face_vertices[f][0]];
            const auto vb = v[face_vertices[f][1]];
            const auto vm = *m.edge_midpoint(va, vb);
            const auto da = vertex_dof_[va], db = vertex_dof_[vb], dm = vertex_dof_[vm];
            if (p == 1) {
                constraints_.add(dm, {{da, 0.5}, {db, 0.5}});
            } else {
                const auto dmid = edge_dof_.at(edge_key(va, vb));
                constraints_.add(dm, {{dmid, 1.0}});
                constraints_.add(edge_dof_.at(edge_key(va, vm)), {{da, 0.375}, {db, -0.125}, {dmid, 0.75}});
                constraints_.add(edge_dof_.at(edge_key(vm, vb)), {{da, -0.125}, {db, 0.375}, {dmid, 0.75}});
            }
        }
    }
    constraints_.close();

    std::vector<std::pair<std::size_t, std::size_t>> entries;
    entries.reserve(active.size() * basis_.size() * basis_.size());
    for (std::size_t a = 0; a < active.size(); ++a)
        for (unsigned r = 0; r < basis_.size(); ++r)
            for (unsigned s = 0; s < basis_.size(); ++s)
                entries.emplace_back(cell_dofs_[a * basis_.size() + r], cell_dofs_[a * basis_.size() + s]);
    pattern_ = SparsityPattern::from_entries(n_dofs(), n_dofs(), std::move(entries));

    for (std::size_t a = 0; a < active.size(); ++a)
        for (unsigned f = 0; f < 4; ++f) {
            const auto type = m.cell(active[a]).boundary[f];
            if (type != BoundaryType::interior)
                for (auto k : basis_.face_nodes(f))
                    boundary_dofs_[static_cast<std::size_t>(type)].push_back(cell_dofs_[a * basis_.size() + k]);
        }
    for (auto& dofs : boundary_dofs_) {
        std::sort(dofs.begin(), dofs.end());
        dofs.erase(std::unique(dofs.begin(), dofs.end()), dofs.end());
    }
}

std::span<const std::size_t> FeSpace::cell_dofs(std::size_t cell) const
{
    const auto a = mesh_->active_index(cell);
    if (a == invalid_id)
        throw Error("FeSpace::cell_dofs: cell " + std::to_string(cell) + " is not active");
    return std::span(cell_dofs_).subspan(a * basis_.size(), basis_.size());
}

const std::vector<std::size_t>& FeSpace::boundary_dofs(BoundaryType type) const
{
    return boundary_dofs_.at(static_cast<std::size_t>(type));
}

std::map<std::size_t, double> FeSpace::boundary_values(BoundaryType type, const SpatialFunction& g) const
{
    std::map<std::size_t, double> values;
    for (auto d : boundary_dofs(type))
        values.emplace(d, g(support_points_[d]));
    return values;
}

bool FeSpace::same_as(const FeSpace& other) const
{
    if (degree() != other.degree())
        return false;
    return mesh_ == other.mesh_ || *mesh_ == *other.mesh_;
}

std::shared_ptr<const FeSpace> distribute_dofs(std::shared_ptr<const QuadMesh> mesh, unsigned degree)
{
    return std::make_shared<const FeSpace>(std::move(mesh), degree);
}

const ConstraintSet& hanging_constraints(const FeSpace& space) { return space.constraints(); }

FeFunction::FeFunction(std::shared_ptr<const FeSpace> space, Vector coefficients)
    : space_(std::move(space)), coefficients_(std::move(coefficients))
{
    if (coefficients_.size() != space_->n_dofs())
        throw Error("FeFunction: coefficient count does not match the space");
}

double FeFunction::value(std::size_t cell, Point unit) const
{
    const auto dofs = space_->cell_dofs(cell);
    const auto& basis = space_->basis();
    double v = 0.0;
    for (unsigned k = 0; k < dofs.size(); ++k)
        v += coefficients_[dofs[k]] * basis.value(k, unit);
    return v;
}

Point FeFunction::gradient(std::size_t cell, const CellPoint& geometry, Point unit) const
{
    const auto dofs = space_->cell_dofs(cell);
    const auto& basis = space_->basis();
    Point g{};
    for (unsigned k = 0; k < dofs.size(); ++k)
        g = g + coefficients_[dofs[k]] * basis.gradient(k, unit);
    return geometry.physical_gradient(g);
}

double FeFunction::laplacian(std::size_t cell, const CellPoint& geometry, Point unit) const
{
    const auto dofs = space_->cell_dofs(cell);
    const auto& basis = space_->basis();
    std::array<double, 3> h{};
    for (unsigned k = 0; k < dofs.size(); ++k) {
        const auto hk = basis.hessian(k, unit);
        for (int r = 0; r < 3; ++r)
            h[r] += coefficients_[dofs[k]] * hk[r];
    }
    return geometry.physical_laplacian(h);
}

double FeFunction::evaluate(Point p) const
{
    const auto loc = space_->mesh().locate_point(p);
    return value(loc.cell, loc.unit);
}

double evaluate(const FeFunction& f, Point p) { return f.evaluate(p); }

FeFunction interpolate(std::shared_ptr<const FeSpace> space, const SpatialFunction& g)
{
    Vector c(space->n_dofs());
    const auto& pts = space->support_points();
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i] = g(pts[i]);
    space->constraints().distribute(c);
    return FeFunction(std::move(space), std::move(c));
}

FeFunction transfer(const FeFunction& from, std::shared_ptr<const FeSpace> to)
{
    if (from.space().same_as(*to))
        return FeFunction(std::move(to), from.coefficients());
    Vector c(to->n_dofs());
    const auto& pts = to->support_points();
    const auto n = static_cast<std::ptrdiff_t>(c.size());
    std::exception_ptr failure;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            c[i] = from.evaluate(pts[i]);
        } catch (...) {
#pragma omp critical
            failure = std::current_exception();
        }
    }
    if (failure)
        std::rethrow_exception(failure);
    to->constraints().distribute(c);
    return FeFunction(std::move(to), std::move(c));
}

SparseMatrix assemble_matrix(const FeSpace& space, const LocalMatrixKernel& kernel, Execution exec)
{
    SparseMatrix A(space.pattern());
    const auto& active = space.mesh().active_cells();
    const std::size_t nl = space.dofs_per_cell();

    auto scatter = [&](std::size_t c, std::span<const double> local) {
        const auto dofs = space.cell_dofs(c);
        for (std::size_t r = 0; r < nl; ++r)
            for (std::size_t s = 0; s < nl; ++s)
                A.add(dofs[r], dofs[s], local[r * nl + s]);
    };

    if (exec == Execution::serial) {
        std::vector<double> local(nl * nl);
        for (const auto c : active) {
            std::fill(local.begin(), local.end(), 0.0);
            kernel(c, local);
            scatter(c, local);
        }
        return A;
    }

    std::vector<double> buffer(active.size() * nl * nl, 0.0);
    const auto n = static_cast<std::ptrdiff_t>(active.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t a = 0; a < n; ++a)
        kernel(active[a], std::span(buffer).subspan(a * nl * nl, nl * nl));
    for (std::size_t a = 0; a < active.size(); ++a)
        scatter(active[a], std::span<const double>(buffer).subspan(a * nl * nl, nl * nl));
    return A;
}

SparseMatrix assemble_mass(const FeSpace& space, const SpatialFunction& rho, Execution exec)
{
    const auto q = gauss_quadrature(space.degree() + 1);
    const auto& basis = space.basis();
    const auto& mesh = space.mesh();
    const unsigned nl = basis.size();
    return assemble_matrix(
        space,
        [&](std::size_t c, std::span<double> local) {
            for (std::size_t iq = 0; iq < q.size(); ++iq) {
                const auto cp = cell_point(mesh, c, q.points[iq]);
                const double jxw = q.weights[iq] * cp.det * rho(cp.x);
                for (unsigned r = 0; r < nl; ++r) {
                    const double pr = basis.value(r, q.points[iq]);
                    for (unsigned s = 0; s < nl; ++s)
                        local[r * nl + s] += jxw * pr * basis.value(s, q.points[iq]);
                }
            }
        },
        exec);
}

SparseMatrix assemble_stiffness(const FeSpace& space, const SpatialFunction& eps, Execution exec)
{
    const auto q = gauss_quadrature(space.degree() + 1);
    const auto& basis = space.basis();
    const auto& mesh = space.mesh();
    const unsigned nl = basis.size();
    return assemble_matrix(
        space,
        [&](std::size_t c, std::span<double> local) {
            std::vector<Point> grads(nl);
            for (std::size_t iq = 0; iq < q.size(); ++iq) {
                const auto cp = cell_point(mesh, c, q.points[iq]);
                const double jxw = q.weights[iq] * cp.det * eps(cp.x);
                for (unsigned r = 0; r < nl; ++r)
                    grads[r] = cp.physical_gradient(basis.gradient(r, q.points[iq]));
                for (unsigned r = 0; r < nl; ++r)
                    for (unsigned s = 0; s < nl; ++s)
                        local[r * nl + s] += jxw * dot(grads[r], grads[s]);
            }
        },
        exec);
}

Vector assemble_volume_functional(const FeSpace& space, const SpatialFunction& f, Execution exec)
{
    const auto q = gauss_quadrature(space.degree() + 2);
    const auto& basis = space.basis();
    const auto& mesh = space.mesh();
    const auto& active = mesh.active_cells();
    const unsigned nl = basis.size();

    std::vector<double> buffer(active.size() * nl, 0.0);
    auto local = [&](std::size_t a) {
        const auto c = active[a];
        for (std::size_t iq = 0; iq < q.size(); ++iq) {
            const auto cp = cell_point(mesh, c, q.points[iq]);
            const double fx = f(cp.x) * q.weights[iq] * cp.det;
            for (unsigned r = 0; r < nl; ++r)
                buffer[a * nl + r] += fx * basis.value(r, q.points[iq]);
        }
    };
    const auto n = static_cast<std::ptrdiff_t>(active.size());
    if (exec == Execution::serial) {
        for (std::ptrdiff_t a = 0; a < n; ++a)
            local(a);
    } else {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t a = 0; a < n; ++a)
            local(a);
    }

    Vector b(space.n_dofs(), 0.0);
    for (std::size_t a = 0; a < active.size(); ++a) {
        const auto dofs = space.cell_dofs(active[a]);
        for (unsigned r = 0; r < nl; ++r)
            b[dofs[r]] += buffer[a * nl + r];
    }
    return b;
}

Vector assemble_boundary_functional(const FeSpace& space, const SpatialFunction& h, BoundaryType type)
{
    const auto q = gauss_1d(space.degree() + 2);
    const auto& basis = space.basis();
    const auto& mesh = space.mesh();
    Vector b(space.n_dofs(), 0.0);
    for (const auto c : mesh.active_cells()) {
        const auto dofs = space.cell_dofs(c);
        for (unsigned f = 0; f < 4; ++f) {
            if (mesh.cell(c).boundary[f] != type)
                continue;
            const auto& v = mesh.cell(c).vertices;
            const double length = norm(mesh.vertex(v[face_vertices[f][1]]) - mesh.vertex(v[face_vertices[f][0]]));
            for (std::size_t iq = 0; iq < q.points.size(); ++iq) {
                const Point u = face_point(f, q.points[iq]);
                const double w = q.weights[iq] * length * h(mesh.map(c, u));
                for (auto k : basis.face_nodes(f))
                    b[dofs[k]] += w * basis.value(k, u);
            }
        }
    }
    return b;
}

} // namespace dwr
