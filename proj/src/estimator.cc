#include <dwr/estimator.hh>

#include <cmath>
#include <exception>

namespace dwr {

namespace {

Point outward_normal(const std::array<Point, 2>& J, unsigned face)
{
    const Point r = reference_normal(face);
    // J^{-T} r up to the positive factor 1/det
    const Point n{J[1].y * r.x - J[1].x * r.y, -J[0].y * r.x + J[0].x * r.y};
    return (1.0 / norm(n)) * n;
}

double face_length_element(const std::array<Point, 2>& J, unsigned face)
{
    return face < 2 ? norm(J[1]) : norm(J[0]);
}

} // namespace

WeightFunction make_dwr_weight(const Slab& slab, const FeFunction& z_tm, const FeFunction& z_tn,
                               TemporalRestriction restriction)
{
    const auto& dual = slab.dual_space();
    if (!z_tm.space().same_as(*dual) || !z_tn.space().same_as(*dual))
        throw Error("make_dwr_weight: dual values must live on the slab's dual space");
    Vector target(dual->n_dofs());
    for (std::size_t i = 0; i < target.size(); ++i)
        target[i] = restriction == TemporalRestriction::mean
                        ? 0.5 * (z_tm.coefficients()[i] + z_tn.coefficients()[i])
                        : z_tn.coefficients()[i];
    auto restricted = std::make_shared<const FeFunction>(
        transfer(FeFunction(dual, std::move(target)), slab.primal_space()));
    auto zm = std::make_shared<const FeFunction>(z_tm);
    auto zn = std::make_shared<const FeFunction>(z_tn);
    return [zm, zn, restricted](std::size_t cell, Point unit, double t_hat) {
        return (1.0 - t_hat) * zm->value(cell, unit) + t_hat * zn->value(cell, unit) -
               restricted->value(cell, unit);
    };
}

Vector compute_cell_indicators(const Slab& slab, const DiffusionData& data, const FeFunction& u_h,
                               const FeFunction& u_prev, const WeightFunction& weight, Execution exec)
{
    const auto& primal = *slab.primal_space();
    if (!u_h.space().same_as(primal) || !u_prev.space().same_as(primal))
        throw Error("compute_cell_indicators: primal inputs must live on the slab's primal space");

    const QuadMesh& mesh = slab.mesh();
    const auto& active = mesh.active_cells();
    const unsigned q = slab.dual_space()->degree();
    const auto vq = gauss_quadrature(q + 1);
    const auto fq = gauss_1d(q + 1);
    const auto tq = gauss_1d(2);
    const auto& I = slab.interval();
    const double tau = I.tau();
    const double rho = data.coefficients.rho;
    const double eps = data.coefficients.epsilon;

    Vector eta(active.size(), 0.0);
    auto local = [&](std::size_t a) {
        const std::size_t c = active[a];
        double sum = 0.0;

        for (std::size_t iq = 0; iq < vq.size(); ++iq) {
            const Point xi = vq.points[iq];
            const auto cp = cell_point(mesh, c, xi);
            const double dx = vq.weights[iq] * cp.det;
            const double residual = eps * u_h.laplacian(c, cp, xi);
            for (std::size_t g = 0; g < tq.points.size(); ++g) {
                const double f = data.f ? data.f(cp.x, I.map(tq.points[g])) : 0.0;
                sum += tau * tq.weights[g] * (f + residual) * weight(c, xi, tq.points[g]) * dx;
            }
            sum -= rho * (u_h.value(c, xi) - u_prev.value(c, xi)) * weight(c, xi, 0.0) * dx;
        }

        for (unsigned face = 0; face < 4; ++face) {
            const FaceInfo& info = mesh.face_info(c, face);
            if (info.boundary == BoundaryType::dirichlet)
                continue;
            if (info.boundary == BoundaryType::neumann) {
                for (std::size_t i = 0; i < fq.points.size(); ++i) {
                    const Point xi = face_point(face, fq.points[i]);
                    const auto cp = cell_point(mesh, c, xi);
                    const Point n = outward_normal(cp.jacobian, face);
                    const double flux = eps * dot(u_h.gradient(c, cp, xi), n);
                    const double ds = fq.weights[i] * face_length_element(cp.jacobian, face);
                    for (std::size_t g = 0; g < tq.points.size(); ++g) {
                        const double h = data.h ? data.h(cp.x, I.map(tq.points[g])) : 0.0;
                        sum += tau * tq.weights[g] * (h - flux) * weight(c, xi, tq.points[g]) * ds;
                    }
                }
                continue;
            }
            for (const FaceNeighbor& nb : info.neighbors) {
                const double len = nb.s_end - nb.s_begin;
                for (std::size_t i = 0; i < fq.points.size(); ++i) {
                    const Point xi = face_point(face, nb.s_begin + len * fq.points[i]);
                    const auto cp = cell_point(mesh, c, xi);
                    const Point n = outward_normal(cp.jacobian, face);
                    const auto other = mesh.inverse_map(nb.cell, cp.x);
                    if (!other)
                        throw Error("compute_cell_indicators: face point outside neighbour cell");
                    const auto cpn = cell_point(mesh, nb.cell, *other);
                    const double jump =
                        eps * dot(u_h.gradient(c, cp, xi) - u_h.gradient(nb.cell, cpn, *other), n);
                    const double ds = len * fq.weights[i] * face_length_element(cp.jacobian, face);
                    for (std::size_t g = 0; g < tq.points.size(); ++g)
                        sum -= 0.5 * tau * tq.weights[g] * jump * weight(c, xi, tq.points[g]) * ds;
                }
            }
        }
        eta[a] = sum;
    };

    const auto n = static_cast<std::ptrdiff_t>(active.size());
    if (exec == Execution::serial) {
        for (std::ptrdiff_t a = 0; a < n; ++a)
            local(a);
        return eta;
    }
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t a = 0; a < n; ++a) {
        try {
            local(a);
        } catch (...) {
#pragma omp critical
            if (!failure)
                failure = std::current_exception();
        }
    }
    if (failure)
        std::rethrow_exception(failure);
    return eta;
}

ErrorEstimate accumulate(std::vector<Vector> cell_indicators)
{
    ErrorEstimate e;
    e.cells = std::move(cell_indicators);
    e.slabs.assign(e.cells.size(), 0.0);
    for (std::size_t n = 0; n < e.cells.size(); ++n) {
        for (const double v : e.cells[n])
            e.slabs[n] += std::abs(v);
        e.total += e.slabs[n];
    }
    return e;
}

std::optional<double> effectivity(double eta, double goal_error)
{
    if (goal_error == 0.0)
        return std::nullopt;
    return std::abs(eta / goal_error);
}

std::optional<double> effectivity(const ErrorEstimate& estimate, double goal_error)
{
    return effectivity(estimate.total, goal_error);
}

ErrorEstimate estimate_error(const SlabList& slabs, const DiffusionData& data, Execution exec,
                             TemporalRestriction restriction)
{
    std::vector<Vector> cells;
    cells.reserve(slabs.size());
    std::size_t k = 0;
    for (const Slab& slab : slabs.forward()) {
        const FeFunction u_h = stored_primal(slabs, slab);
        const FeFunction u_prev = primal_initial_value(slabs, k, data);
        const auto [z_tm, z_tn] = dual_endpoint_values(slabs, k);
        cells.push_back(compute_cell_indicators(slab, data, u_h, u_prev,
                                                make_dwr_weight(slab, z_tm, z_tn, restriction), exec));
        ++k;
    }
    return accumulate(std::move(cells));
}

} // namespace dwr
