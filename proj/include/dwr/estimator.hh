#pragma once

#include <dwr/dual.hh>

#include <functional>
#include <optional>
#include <vector>

namespace dwr {

/// Weight w(x, t) on one slab, evaluated on an active cell at a unit point
/// and a reference time t_hat in [0, 1].
using WeightFunction = std::function<double(std::size_t cell, Point unit, double t_hat)>;

enum class TemporalRestriction { mean, right_endpoint };

/// w = z - i_h z: z linear in time between z(t_m) and z(t_n), i_h the nodal
/// restriction to the primal space of the temporal mean (or of z(t_n)).
WeightFunction make_dwr_weight(const Slab& slab, const FeFunction& z_tm, const FeFunction& z_tn,
                               TemporalRestriction restriction = TemporalRestriction::mean);

/// Signed cell indicators of one slab, indexed like mesh.active_cells().
/// u_h and u_prev live on the slab's primal space.
Vector compute_cell_indicators(const Slab& slab, const DiffusionData& data, const FeFunction& u_h,
                               const FeFunction& u_prev, const WeightFunction& weight,
                               Execution exec = Execution::parallel);

struct ErrorEstimate
{
    std::vector<Vector> cells; ///< signed eta_K per slab
    Vector slabs;              ///< sum_K |eta_K| per slab
    double total = 0.0;
};

/// Absolute sums in ascending slab and cell order.
ErrorEstimate accumulate(std::vector<Vector> cell_indicators);

/// |eta / goal_error|; empty when the goal error vanishes.
std::optional<double> effectivity(const ErrorEstimate& estimate, double goal_error);
std::optional<double> effectivity(double eta, double goal_error);

/// Indicators of every slab from the stored primal and dual solutions.
ErrorEstimate estimate_error(const SlabList& slabs, const DiffusionData& data, Execution exec = Execution::parallel,
                             TemporalRestriction restriction = TemporalRestriction::mean);

} // namespace dwr
