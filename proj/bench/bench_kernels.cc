// Serial against OpenMP kernels: sparse products, assembly and the error
// estimator. Set OMP_NUM_THREADS to vary the thread count.

#include <dwr/adapt.hh>

#include <benchmark/benchmark.h>

using namespace dwr;

namespace {

std::shared_ptr<const FeSpace> space(unsigned refinements, unsigned degree = 1)
{
    return distribute_dofs(std::make_shared<const QuadMesh>(make_lshape().refine_global(refinements)), degree);
}

Execution execution(const benchmark::State& state) { return state.range(1) ? Execution::parallel : Execution::serial; }

void spmv_args(benchmark::internal::Benchmark* b)
{
    for (const int r : {5, 6, 7})
        b->Arg(r);
}

void kernel_args(benchmark::internal::Benchmark* b)
{
    for (const int r : {4, 5, 6})
        for (const int parallel : {0, 1})
            b->Args({r, parallel});
}

void BM_spmv_reference(benchmark::State& state)
{
    const auto s = space(static_cast<unsigned>(state.range(0)));
    const auto A = assemble_stiffness(*s, [](Point) { return 1.0; });
    const Vector x(s->n_dofs(), 1.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(spmv_reference(A, x));
    state.counters["dofs"] = static_cast<double>(s->n_dofs());
}
BENCHMARK(BM_spmv_reference)->Apply(spmv_args);

void BM_spmv(benchmark::State& state)
{
    const auto s = space(static_cast<unsigned>(state.range(0)));
    const auto A = assemble_stiffness(*s, [](Point) { return 1.0; });
    const Vector x(s->n_dofs(), 1.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(spmv(A, x));
    state.counters["dofs"] = static_cast<double>(s->n_dofs());
}
BENCHMARK(BM_spmv)->Apply(spmv_args);

void BM_assemble_stiffness(benchmark::State& state)
{
    const auto s = space(static_cast<unsigned>(state.range(0)), 2);
    for (auto _ : state)
        benchmark::DoNotOptimize(assemble_stiffness(*s, [](Point) { return 1.2; }, execution(state)));
    state.counters["dofs"] = static_cast<double>(s->n_dofs());
}
BENCHMARK(BM_assemble_stiffness)->Apply(kernel_args)->Unit(benchmark::kMillisecond);

/// Benchmark slabs with primal and dual solutions attached.
struct SolvedSlabs
{
    explicit SolvedSlabs(unsigned refinements)
        : problem(), data(problem.data(0.0)),
          slabs(init_slabs(make_lshape().refine_global(refinements), 0.0, 1.25, 5))
    {
        const Indicator cv = [this](Point x, double t) { return problem.in_control_volume(x, t); };
        double sq = 0.0;
        for (const auto& r : march_forward(slabs, data, cv))
            sq += r.goal_norm_sq_contrib;
        march_backward(slabs, data, GoalContext{std::sqrt(sq), cv, data.exact});
    }

    ConeProblem problem;
    DiffusionData data;
    SlabList slabs;
};

void BM_estimate_error(benchmark::State& state)
{
    const SolvedSlabs solved(static_cast<unsigned>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(estimate_error(solved.slabs, solved.data, execution(state)));
    state.counters["cells"] = static_cast<double>(solved.slabs.at(0).mesh().n_active_cells());
}
BENCHMARK(BM_estimate_error)->Apply(kernel_args)->Unit(benchmark::kMillisecond);

void BM_goal_rhs(benchmark::State& state)
{
    const SolvedSlabs solved(static_cast<unsigned>(state.range(0)));
    const Slab& slab = solved.slabs.at(1);
    const auto u = stored_primal(solved.slabs, slab);
    const GoalContext goal{1.0, [&](Point x, double t) { return solved.problem.in_control_volume(x, t); },
                           solved.data.exact};
    for (auto _ : state)
        benchmark::DoNotOptimize(assemble_goal_rhs(slab, u, goal, execution(state)));
}
BENCHMARK(BM_goal_rhs)->Apply(kernel_args)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
