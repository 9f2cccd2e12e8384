#include <dwr/adapt.hh>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace dwr {

std::set<std::size_t> mark_top_fraction(std::span<const double> values, double theta, bool skip_zero)
{
    if (theta < 0.0 || theta > 1.0)
        throw Error("mark_top_fraction: theta must lie in [0, 1]");
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&values](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    const auto count = static_cast<std::size_t>(std::ceil(theta * static_cast<double>(values.size())));
    std::set<std::size_t> marks;
    for (std::size_t k = 0; k < std::min(count, order.size()); ++k)
        if (!skip_zero || values[order[k]] != 0.0)
            marks.insert(order[k]);
    return marks;
}

std::set<std::size_t> mark_time_slabs(const ErrorEstimate& estimate, double theta_tau, bool skip_zero)
{
    return mark_top_fraction(estimate.slabs, theta_tau, skip_zero);
}

RefinementMarks mark_space_cells(const Slab& slab, const Vector& eta_cells, bool time_marked, double theta_h1,
                                 double theta_h2, bool skip_zero)
{
    const auto& active = slab.mesh().active_cells();
    if (eta_cells.size() != active.size())
        throw Error("mark_space_cells: one indicator per active cell required");
    Vector magnitude(eta_cells.size());
    std::transform(eta_cells.begin(), eta_cells.end(), magnitude.begin(), [](double v) { return std::abs(v); });
    RefinementMarks marks;
    for (const auto a : mark_top_fraction(magnitude, time_marked ? theta_h2 : theta_h1, skip_zero))
        marks.insert(active[a]);
    return marks;
}

void execute_adaptation(SlabList& slabs, const std::set<std::size_t>& time_marks,
                        const std::vector<RefinementMarks>& space_marks)
{
    if (space_marks.size() != slabs.size())
        throw Error("execute_adaptation: one mark set per slab required");
    if (!time_marks.empty() && *time_marks.rbegin() >= slabs.size())
        throw Error("execute_adaptation: time mark out of range");

    // identical mark sets on a shared mesh produce one shared refined mesh
    std::map<std::pair<const QuadMesh*, RefinementMarks>, std::shared_ptr<const QuadMesh>> refined;
    std::size_t k = 0;
    for (Slab& slab : slabs.forward()) {
        const auto& marks = space_marks[k++];
        if (marks.empty())
            continue;
        auto key = std::make_pair(slab.mesh_ptr().get(), marks);
        auto it = refined.find(key);
        if (it == refined.end())
            it = refined.emplace(std::move(key), std::make_shared<const QuadMesh>(slab.mesh().refine(marks))).first;
        slabs.set_mesh(slab, it->second);
    }
    for (auto it = time_marks.rbegin(); it != time_marks.rend(); ++it)
        slabs.split_slab_in_time(*it);
    slabs.clear_storage();
    slabs.next_loop();
}

QuadMesh initial_mesh(const Config& config) { return make_lshape().refine_global(config.global_refinements); }

LoopResult dwr_loop(const Config& config, const LoopObserver& observer, Execution exec)
{
    config.validate();
    const ConeProblem problem(config.coefficients, config.cone, config.control_volume);
    const DiffusionData data = problem.data(config.t0);
    const Indicator cv = [cvol = config.control_volume](Point x, double t) { return cvol.contains(x, t); };
    const MarchOptions options{config.solver, exec};

    SlabList slabs =
        init_slabs(initial_mesh(config), config.t0, config.T, config.initial_slabs, config.primal_degree,
                   config.dual_degree);

    LoopResult result;
    double baseline = 0.0;
    for (unsigned loop = 1; loop <= config.adapt.max_loops; ++loop) {
        auto fail = [loop](const std::exception& e) -> Error {
            return Error("loop " + std::to_string(loop) + ": " + e.what());
        };
        LoopRecord record;
        record.loop = loop;
        record.n_slabs = slabs.size();
        for (const Slab& s : slabs.forward())
            record.max_cells = std::max(record.max_cells, s.mesh().n_active_cells());

        std::vector<PrimalStepReport> primal;
        try {
            primal = march_forward(slabs, data, cv, options);
        } catch (const std::exception& e) {
            throw fail(e);
        }
        double sq = 0.0;
        for (const auto& r : primal)
            sq += r.goal_norm_sq_contrib;
        record.goal_error = std::sqrt(sq);
        if (loop == 1)
            baseline = record.goal_error;
        const double threshold =
            config.adapt.tol_mode == ToleranceMode::relative ? config.adapt.tol * baseline : config.adapt.tol;
        record.goal_met = record.goal_error <= threshold;
        const bool last = record.goal_met || loop == config.adapt.max_loops;

        if (record.goal_met) {
            result.records.push_back(record);
            result.converged = true;
            if (observer)
                observer({result.records.back(), slabs, nullptr, nullptr, nullptr, true});
            break;
        }

        ErrorEstimate estimate;
        try {
            const GoalContext goal{record.goal_error, cv, data.exact};
            march_backward(slabs, data, goal, options);
            estimate = estimate_error(slabs, data, exec, config.temporal_restriction);
        } catch (const std::exception& e) {
            throw fail(e);
        }
        record.eta = estimate.total;
        record.i_eff = effectivity(estimate, record.goal_error);

        const auto time_marks = mark_time_slabs(estimate, config.adapt.theta_tau, config.adapt.skip_zero_indicators);
        std::vector<RefinementMarks> space_marks;
        space_marks.reserve(slabs.size());
        std::size_t k = 0;
        for (const Slab& s : slabs.forward()) {
            space_marks.push_back(mark_space_cells(s, estimate.cells[k], time_marks.contains(k), config.adapt.theta_h1,
                                                   config.adapt.theta_h2, config.adapt.skip_zero_indicators));
            ++k;
        }

        result.records.push_back(record);
        if (observer)
            observer({result.records.back(), slabs, &estimate, &time_marks, &space_marks, last});
        if (last)
            break;
        execute_adaptation(slabs, time_marks, space_marks);
    }
    return result;
}

} // namespace dwr
