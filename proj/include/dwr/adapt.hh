#pragma once

#include <dwr/config.hh>
#include <dwr/dual.hh>
#include <dwr/estimator.hh>

#include <functional>
#include <optional>
#include <set>
#include <vector>

namespace dwr {

/// First ceil(theta * n) entries after sorting by value descending, index
/// ascending. With skip_zero, zero entries are dropped from that selection.
std::set<std::size_t> mark_top_fraction(std::span<const double> values, double theta, bool skip_zero);

std::set<std::size_t> mark_time_slabs(const ErrorEstimate& estimate, double theta_tau, bool skip_zero = true);

/// Marks by |eta_K| with theta_h1 on slabs that are not time-marked and
/// theta_h2 on those that are. Returns cell ids of the slab's mesh.
RefinementMarks mark_space_cells(const Slab& slab, const Vector& eta_cells, bool time_marked, double theta_h1,
                                 double theta_h2, bool skip_zero = true);

/// Refines each slab's mesh by its marks, then splits the time-marked slabs.
/// Storage of every slab is cleared and the loop counter advanced.
void execute_adaptation(SlabList& slabs, const std::set<std::size_t>& time_marks,
                        const std::vector<RefinementMarks>& space_marks);

struct LoopRecord
{
    unsigned loop = 0;
    std::size_t n_slabs = 0;
    std::size_t max_cells = 0;
    double goal_error = 0.0;
    std::optional<double> eta;
    std::optional<double> i_eff;
    bool goal_met = false;
};

/// State handed to the loop observer once per loop, before adaptation.
struct LoopState
{
    const LoopRecord& record;
    const SlabList& slabs;
    const ErrorEstimate* estimate; ///< null when the goal was met
    const std::set<std::size_t>* time_marks;
    const std::vector<RefinementMarks>* space_marks;
    bool last;
};

struct LoopResult
{
    std::vector<LoopRecord> records;
    bool converged = false;
};

using LoopObserver = std::function<void(const LoopState&)>;

/// Coarse mesh of the benchmark after the configured global refinements.
QuadMesh initial_mesh(const Config& config);

/// Forward solve, goal check, backward solve, estimate, mark and adapt until
/// the goal is reached or max_loops loops have run.
LoopResult dwr_loop(const Config& config, const LoopObserver& observer = {},
                    Execution exec = Execution::parallel);

} // namespace dwr
