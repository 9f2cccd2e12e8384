#include <dwr/dual.hh>

#include <iterator>

namespace dwr {

Vector assemble_goal_rhs(const Slab& slab, const FeFunction& u_h, const GoalContext& goal, Execution exec)
{
    const FeSpace& space = *slab.dual_space();
    Vector J(space.n_dofs(), 0.0);
    if (!(goal.norm > 0.0))
        throw Error("assemble_goal_rhs: goal norm must be positive");

    const QuadMesh& mesh = slab.mesh();
    const auto& basis = space.basis();
    const unsigned nl = basis.size();
    const auto q = gauss_quadrature(space.degree() + 1);
    const auto gt = gauss_1d(3);
    const auto& I = slab.interval();
    const auto& active = mesh.active_cells();

    std::vector<double> buffer(active.size() * nl, 0.0);
    auto local = [&](std::size_t a) {
        const auto c = active[a];
        for (std::size_t iq = 0; iq < q.size(); ++iq) {
            const auto cp = cell_point(mesh, c, q.points[iq]);
            const double uh = u_h.value(c, q.points[iq]);
            double density = 0.0;
            // 1/(tau norm) * tau * sum_g w_g ... = (1/norm) sum_g w_g ...
            for (std::size_t g = 0; g < gt.points.size(); ++g) {
                const double t = I.map(gt.points[g]);
                if (!goal.control_volume(cp.x, t))
                    continue;
                density += gt.weights[g] * (goal.exact(cp.x, t) - uh);
            }
            if (density == 0.0)
                continue;
            density *= q.weights[iq] * cp.det / goal.norm;
            for (unsigned r = 0; r < nl; ++r)
                buffer[a * nl + r] += density * basis.value(r, q.points[iq]);
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
    for (std::size_t a = 0; a < active.size(); ++a) {
        const auto dofs = space.cell_dofs(active[a]);
        for (unsigned r = 0; r < nl; ++r)
            J[dofs[r]] += buffer[a * nl + r];
    }
    return J;
}

SlabSystem assemble_dual_system(const Slab& slab, const DiffusionData& data, const Vector& goal_rhs,
                                const FeFunction& z_tn, Execution exec)
{
    const FeSpace& space = *slab.dual_space();
    if (!z_tn.space().same_as(space) || goal_rhs.size() != space.n_dofs())
        throw Error("assemble_dual_system: inputs do not live on the dual space");
    const double tau = slab.interval().tau();
    const double rho = data.coefficients.rho;
    const double eps = data.coefficients.epsilon;

    SparseMatrix M = assemble_mass(space, [rho](Point) { return rho; }, exec);
    const SparseMatrix A = assemble_stiffness(space, [eps](Point) { return eps; }, exec);

    SlabSystem sys;
    sys.rhs = spmv(M, z_tn.coefficients());
    for (std::size_t i = 0; i < sys.rhs.size(); ++i)
        sys.rhs[i] = 2.0 * sys.rhs[i] + tau * goal_rhs[i];
    M.scale(2.0);
    M.add(tau, A);
    sys.matrix = std::move(M);
    ConstraintSet constraints = space.constraints();
    condense_hanging(sys.matrix, sys.rhs, constraints);
    sys.dirichlet = space.boundary_values(BoundaryType::dirichlet, [](Point) { return 0.0; });
    apply_dirichlet(sys.matrix, sys.rhs, sys.dirichlet);
    return sys;
}

std::vector<DualStepReport> march_backward(SlabList& slabs, const DiffusionData& data, const GoalContext& goal,
                                           const MarchOptions& options, const std::vector<Vector>* goal_rhs)
{
    if (goal_rhs && goal_rhs->size() != slabs.size())
        throw Error("march_backward: one goal vector per slab required");
    std::vector<DualStepReport> reports(slabs.size());
    const Slab* successor = nullptr;
    std::size_t n = slabs.size();
    for (Slab& slab : slabs.backward()) {
        --n;
        const auto& space = slab.dual_space();
        FeFunction z_tn = successor == nullptr
                              ? FeFunction(space, Vector(space->n_dofs(), 0.0))
                              : transfer(FeFunction(successor->dual_space(),
                                                    *slabs.fetch_storage(*successor, StorageTag::dual_z_tm)),
                                         space);
        Vector J = goal_rhs ? (*goal_rhs)[n] : assemble_goal_rhs(slab, stored_primal(slabs, slab), goal, options.exec);

        const SlabSystem sys = assemble_dual_system(slab, data, J, z_tn, options.exec);
        SolveResult res;
        try {
            res = solve_slab_system(sys, *space, options.solver, z_tn.coefficients());
        } catch (const SolverError& e) {
            throw SolverError("dual solve failed on slab " + std::to_string(n) + ": " + e.what(), e.iterations(),
                              e.residual());
        }
        reports[n] = {n, res.iterations, res.residual};
        slabs.attach_storage(slab, StorageTag::dual_z_tm, std::make_shared<const Vector>(std::move(res.x)));
        successor = &slab;
    }
    return reports;
}

std::pair<FeFunction, FeFunction> dual_endpoint_values(const SlabList& slabs, std::size_t k)
{
    const Slab& slab = slabs.at(k);
    const auto z = slabs.fetch_storage(slab, StorageTag::dual_z_tm);
    if (!z)
        throw Error("dual solution missing on slab " + std::to_string(k));
    FeFunction z_tm(slab.dual_space(), *z);
    if (k + 1 == slabs.size())
        return {std::move(z_tm), FeFunction(slab.dual_space(), Vector(slab.dual_space()->n_dofs(), 0.0))};
    const Slab& next = slabs.at(k + 1);
    const auto zn = slabs.fetch_storage(next, StorageTag::dual_z_tm);
    if (!zn)
        throw Error("dual solution missing on slab " + std::to_string(k + 1));
    return {std::move(z_tm), transfer(FeFunction(next.dual_space(), *zn), slab.dual_space())};
}

double goal_functional(const SlabList& slabs, const GoalContext& goal,
                       const std::function<double(const Slab&, std::size_t, Point, double)>& psi)
{
    if (!(goal.norm > 0.0))
        throw Error("goal_functional: goal norm must be positive");
    double total = 0.0;
    const auto gt = gauss_1d(3);
    for (const Slab& slab : slabs.forward()) {
        const FeFunction u_h = stored_primal(slabs, slab);
        const QuadMesh& mesh = slab.mesh();
        const auto q = gauss_quadrature(slab.primal_space()->degree() + 2);
        const auto& I = slab.interval();
        for (const auto c : mesh.active_cells())
            for (std::size_t iq = 0; iq < q.size(); ++iq) {
                const auto cp = cell_point(mesh, c, q.points[iq]);
                const double uh = u_h.value(c, q.points[iq]);
                for (std::size_t g = 0; g < gt.points.size(); ++g) {
                    const double t = I.map(gt.points[g]);
                    if (!goal.control_volume(cp.x, t))
                        continue;
                    total += gt.weights[g] * I.tau() * q.weights[iq] * cp.det * psi(slab, c, q.points[iq], t) *
                             (goal.exact(cp.x, t) - uh);
                }
            }
    }
    return total / goal.norm;
}

} // namespace dwr
