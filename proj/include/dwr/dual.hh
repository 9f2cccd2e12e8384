#pragma once

#include <dwr/primal.hh>

#include <vector>

namespace dwr {

/// Normalized L2 goal J(psi) = (1/||u - u_h||_Qc) int_Ic int_Omega_c psi (u - u_h).
struct GoalContext
{
    double norm = 0.0; ///< ||u - u_h||_Qc from the primal post-processing
    Indicator control_volume;
    SpaceTimeFunction exact;
};

/// (J^n_0)_i = 1/(tau_n norm) int_{I_n} int_{Omega_c(t)} phi_i (u - u_h) on
/// the dual space, (q+1)^2 spatial and 3 temporal Gauss points.
Vector assemble_goal_rhs(const Slab& slab, const FeFunction& u_h, const GoalContext& goal,
                         Execution exec = Execution::parallel);

/// (2 M^d + tau A^d) z = tau J + 2 M^d z(t_n) with homogeneous Dirichlet
/// values on the dual space.
SlabSystem assemble_dual_system(const Slab& slab, const DiffusionData& data, const Vector& goal_rhs,
                                const FeFunction& z_tn, Execution exec = Execution::parallel);

struct DualStepReport
{
    std::size_t slab = 0;
    std::size_t iterations = 0;
    double residual = 0.0;
};

/// Backward march from z(T) = 0; z at each slab's t_m is stored on the slab.
/// `goal_rhs` overrides the goal assembly (one vector per slab) when given.
std::vector<DualStepReport> march_backward(SlabList& slabs, const DiffusionData& data, const GoalContext& goal,
                                           const MarchOptions& options = {},
                                           const std::vector<Vector>* goal_rhs = nullptr);

/// Dual values at t_m and t_n of slab k, both on the slab's dual space.
std::pair<FeFunction, FeFunction> dual_endpoint_values(const SlabList& slabs, std::size_t k);

/// J(psi) - J(u_h) style evaluation: (1/norm) sum_n int 1_cv psi (u - u_h)
/// for psi given pointwise (same quadrature as the goal norm).
double goal_functional(const SlabList& slabs, const GoalContext& goal,
                       const std::function<double(const Slab&, std::size_t cell, Point unit, double t)>& psi);

} // namespace dwr
