#include <dwr/primal.hh>

#include <cmath>
#include <iterator>

namespace dwr {

namespace {

SpatialFunction constant(double c)
{
    return [c](Point) { return c; };
}

/// Unconstrained mass and stiffness matrices of one primal space.
struct SpaceMatrices
{
    std::shared_ptr<const FeSpace> space;
    SparseMatrix mass;
    SparseMatrix stiffness;
};

const SpaceMatrices& space_matrices(SpaceMatrices& cache, const Slab& slab, const DiffusionData& data,
                                    Execution exec)
{
    if (cache.space != slab.primal_space()) {
        cache.space = slab.primal_space();
        cache.mass = assemble_mass(*cache.space, constant(data.coefficients.rho), exec);
        cache.stiffness = assemble_stiffness(*cache.space, constant(data.coefficients.epsilon), exec);
    }
    return cache;
}

SlabSystem assemble_system(const Slab& slab, const DiffusionData& data, const FeFunction& u_prev,
                           const SpaceMatrices& matrices, Execution exec)
{
    const FeSpace& space = *slab.primal_space();
    if (!u_prev.space().same_as(space))
        throw Error("assemble_primal_system: initial value lives on another space");
    const auto& I = slab.interval();
    const double tau = I.tau();

    SparseMatrix M = matrices.mass;
    const SparseMatrix& A = matrices.stiffness;

    SlabSystem sys;
    sys.rhs = spmv(M, u_prev.coefficients());

    // temporal mean of the loads over I_n
    const auto gt = gauss_1d(2);
    auto time_mean = [&](const SpaceTimeFunction& fn) -> SpatialFunction {
        return [&, fn](Point x) {
            double v = 0.0;
            for (std::size_t g = 0; g < gt.points.size(); ++g)
                v += gt.weights[g] * fn(x, I.map(gt.points[g]));
            return v;
        };
    };
    if (data.f) {
        const Vector F = assemble_volume_functional(space, time_mean(data.f), exec);
        for (std::size_t i = 0; i < F.size(); ++i)
            sys.rhs[i] += tau * F[i];
    }
    if (data.h) {
        const Vector H = assemble_boundary_functional(space, time_mean(data.h), BoundaryType::neumann);
        for (std::size_t i = 0; i < H.size(); ++i)
            sys.rhs[i] += tau * H[i];
    }

    M.add(tau, A);
    sys.matrix = std::move(M);
    ConstraintSet constraints = space.constraints();
    condense_hanging(sys.matrix, sys.rhs, constraints);
    if (data.g)
        sys.dirichlet = space.boundary_values(BoundaryType::dirichlet,
                                              [&](Point x) { return data.g(x, I.t_n); });
    else
        sys.dirichlet = space.boundary_values(BoundaryType::dirichlet, constant(0.0));
    apply_dirichlet(sys.matrix, sys.rhs, sys.dirichlet);
    return sys;
}

} // namespace

SlabSystem assemble_primal_system(const Slab& slab, const DiffusionData& data, const FeFunction& u_prev,
                                  Execution exec)
{
    SpaceMatrices matrices;
    return assemble_system(slab, data, u_prev, space_matrices(matrices, slab, data, exec), exec);
}

SolveResult solve_slab_system(const SlabSystem& system, const FeSpace& space, const SolverControl& ctrl,
                              std::span<const double> guess)
{
    Vector x0;
    if (!guess.empty()) {
        x0.assign(guess.begin(), guess.end());
        for (const auto& [slave, e] : space.constraints().entries())
            x0[slave] = 0.0;
        for (const auto& [dof, value] : system.dirichlet)
            x0[dof] = value;
    }
    SolveResult result = cg_solve(system.matrix, system.rhs, ctrl, x0);
    space.constraints().distribute(result.x);
    return result;
}

FeFunction primal_initial_value(const SlabList& slabs, std::size_t k, const DiffusionData& data)
{
    const Slab& slab = slabs.at(k);
    if (k == 0) {
        if (!data.u0)
            return FeFunction(slab.primal_space(), Vector(slab.primal_space()->n_dofs(), 0.0));
        return interpolate(slab.primal_space(), data.u0);
    }
    return transfer(stored_primal(slabs, k - 1), slab.primal_space());
}

FeFunction stored_primal(const SlabList& slabs, const Slab& slab)
{
    const auto u = slabs.fetch_storage(slab, StorageTag::primal_u);
    if (!u)
        throw Error("primal solution missing on slab [" + std::to_string(slab.interval().t_m) + ", " +
                    std::to_string(slab.interval().t_n) + "]");
    return FeFunction(slab.primal_space(), *u);
}

FeFunction stored_primal(const SlabList& slabs, std::size_t k) { return stored_primal(slabs, slabs.at(k)); }

std::vector<PrimalStepReport> march_forward(SlabList& slabs, const DiffusionData& data,
                                            const Indicator& control_volume, const MarchOptions& options)
{
    std::vector<PrimalStepReport> reports;
    reports.reserve(slabs.size());
    const Slab* previous = nullptr;
    SpaceMatrices matrices;
    std::size_t n = 0;
    for (Slab& slab : slabs.forward()) {
        FeFunction u_prev = previous == nullptr
                                ? (data.u0 ? interpolate(slab.primal_space(), data.u0)
                                           : FeFunction(slab.primal_space(), Vector(slab.primal_space()->n_dofs(), 0.0)))
                                : transfer(stored_primal(slabs, *previous), slab.primal_space());

        const SlabSystem sys =
            assemble_system(slab, data, u_prev, space_matrices(matrices, slab, data, options.exec), options.exec);
        SolveResult res;
        try {
            res = solve_slab_system(sys, *slab.primal_space(), options.solver, u_prev.coefficients());
        } catch (const SolverError& e) {
            throw SolverError("primal solve failed on slab " + std::to_string(n) + ": " + e.what(), e.iterations(),
                              e.residual());
        }

        PrimalStepReport report;
        report.slab = n;
        report.iterations = res.iterations;
        report.residual = res.residual;
        FeFunction u_h(slab.primal_space(), res.x);
        if (data.exact && control_volume)
            report.goal_norm_sq_contrib =
                goal_norm_sq_contribution(slab, u_h, data.exact, control_volume, options.exec);
        slabs.attach_storage(slab, StorageTag::primal_u, std::make_shared<const Vector>(std::move(res.x)));
        reports.push_back(report);
        previous = &slab;
        ++n;
    }
    return reports;
}

double goal_norm_sq_contribution(const Slab& slab, const FeFunction& u_h, const SpaceTimeFunction& exact,
                                 const Indicator& control_volume, Execution exec)
{
    const QuadMesh& mesh = slab.mesh();
    const auto q = gauss_quadrature(u_h.space().degree() + 2);
    const auto gt = gauss_1d(3);
    const auto& I = slab.interval();
    const auto& active = mesh.active_cells();

    std::vector<double> per_cell(active.size(), 0.0);
    auto cell_sum = [&](std::size_t a) {
        const auto c = active[a];
        double sum = 0.0;
        for (std::size_t iq = 0; iq < q.size(); ++iq) {
            const auto cp = cell_point(mesh, c, q.points[iq]);
            const double uh = u_h.value(c, q.points[iq]);
            for (std::size_t g = 0; g < gt.points.size(); ++g) {
                const double t = I.map(gt.points[g]);
                if (control_volume && !control_volume(cp.x, t))
                    continue;
                const double e = exact(cp.x, t) - uh;
                sum += gt.weights[g] * I.tau() * q.weights[iq] * cp.det * e * e;
            }
        }
        per_cell[a] = sum;
    };
    const auto n = static_cast<std::ptrdiff_t>(active.size());
    if (exec == Execution::serial) {
        for (std::ptrdiff_t a = 0; a < n; ++a)
            cell_sum(a);
    } else {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t a = 0; a < n; ++a)
            cell_sum(a);
    }
    double total = 0.0;
    for (double v : per_cell)
        total += v;
    return total;
}

} // namespace dwr
