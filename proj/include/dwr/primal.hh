#pragma once

#include <dwr/fe.hh>
#include <dwr/problem.hh>
#include <dwr/slab.hh>
#include <dwr/sparse.hh>

#include <functional>
#include <vector>

namespace dwr {

/// Membership test of the space-time control volume.
using Indicator = std::function<bool(Point, double)>;

struct MarchOptions
{
    SolverControl solver;
    Execution exec = Execution::parallel;
};

/// Assembled, condensed and Dirichlet-modified system of one slab.
struct SlabSystem
{
    SparseMatrix matrix;
    Vector rhs;
    std::map<std::size_t, double> dirichlet;
};

struct PrimalStepReport
{
    std::size_t slab = 0;
    std::size_t iterations = 0;
    double residual = 0.0;
    /// int_{I_n} int_{Omega_c(t)} (u - u_h)^2
    double goal_norm_sq_contrib = 0.0;
};

/// (M + tau A) u = tau (f + h) + M u_prev on the slab's primal space.
/// Loads are averaged over I_n by 2-point Gauss; Dirichlet values are
/// g(., t_n).
SlabSystem assemble_primal_system(const Slab& slab, const DiffusionData& data, const FeFunction& u_prev,
                                  Execution exec = Execution::parallel);

/// Initial value of a slab: u0 interpolated for the first slab, otherwise the
/// previous slab's solution transferred to this slab's primal space.
FeFunction primal_initial_value(const SlabList& slabs, std::size_t k, const DiffusionData& data);

/// Solves a slab system and distributes the hanging constraints of `space`.
SolveResult solve_slab_system(const SlabSystem& system, const FeSpace& space, const SolverControl& ctrl,
                              std::span<const double> guess = {});

/// Forward march through all slabs; each u^n is stored on its slab.
/// Aborts with Error naming the slab if a solve fails.
std::vector<PrimalStepReport> march_forward(SlabList& slabs, const DiffusionData& data,
                                            const Indicator& control_volume,
                                            const MarchOptions& options = {});

/// int_{I_n} int_Omega 1_cv (u - u_h)^2 with (p+2)^2 spatial and 3 temporal
/// Gauss points; an empty indicator means the whole slab.
double goal_norm_sq_contribution(const Slab& slab, const FeFunction& u_h, const SpaceTimeFunction& exact,
                                 const Indicator& control_volume, Execution exec = Execution::parallel);

/// Primal solution of slab k as stored by march_forward.
FeFunction stored_primal(const SlabList& slabs, std::size_t k);
FeFunction stored_primal(const SlabList& slabs, const Slab& slab);

} // namespace dwr
