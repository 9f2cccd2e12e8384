#include <dwr/adapt.hh>
#include <dwr/config.hh>
#include <dwr/output.hh>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <exception>
#include <optional>

int main(int argc, char** argv)
{
    CLI::App app{"Goal-oriented space-time adaptive solver for the diffusion equation"};
    std::string parameter_file;
    std::optional<std::string> out_dir;
    std::optional<unsigned> max_loops;
    std::optional<unsigned> vtk_every;
    bool quiet = false;
    app.add_option("parameter-file", parameter_file, "Parameter file")->required()->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "Output directory (overrides the parameter file)");
    app.add_option("--max-loops", max_loops, "Maximal number of adaptive loops")->check(CLI::PositiveNumber);
    app.add_option("--vtk-every", vtk_every, "Write VTK files every k-th loop, 0 disables");
    app.add_flag("-q,--quiet", quiet, "Only report errors");
    CLI11_PARSE(app, argc, argv);

    try {
        dwr::Config config = dwr::parse_parameter_file(parameter_file);
        if (out_dir)
            config.output.directory = *out_dir;
        if (max_loops)
            config.adapt.max_loops = *max_loops;
        if (vtk_every)
            config.output.vtk_every = *vtk_every;
        config.validate();

        const auto write = dwr::make_output_writer(config.output);
        const auto result = dwr::dwr_loop(config, [&](const dwr::LoopState& state) {
            write(state);
            if (quiet)
                return;
            const auto& r = state.record;
            fmt::print("loop {:3d}  slabs {:5d}  max cells {:7d}  error {:.4e}", r.loop, r.n_slabs, r.max_cells,
                       r.goal_error);
            if (r.eta)
                fmt::print("  eta {:.4e}  I_eff {}", *r.eta, r.i_eff ? fmt::format("{:.3f}", *r.i_eff) : "nan");
            fmt::print("\n");
            std::fflush(stdout);
        });
        if (!result.converged) {
            fmt::print(stderr, "goal not reached after {} loops\n", config.adapt.max_loops);
            return 2;
        }
        return 0;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
}
