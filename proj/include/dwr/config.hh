#pragma once

#include <dwr/estimator.hh>
#include <dwr/problem.hh>
#include <dwr/sparse.hh>

#include <filesystem>
#include <iosfwd>
#include <string>

namespace dwr {

enum class ToleranceMode { absolute, relative };

struct AdaptParams
{
    double theta_tau = 0.5;
    double theta_h1 = 0.3;
    double theta_h2 = 0.15;
    ToleranceMode tol_mode = ToleranceMode::relative;
    double tol = 1e-2;
    unsigned max_loops = 25;
    /// Cells and slabs with a zero indicator are never marked.
    bool skip_zero_indicators = true;

    /// 0 <= theta_h2 <= theta_h1 <= 1, 0 <= theta_tau <= 1, tol > 0.
    void validate() const;
};

struct OutputParams
{
    std::string directory = "output";
    /// VTK output every k-th loop (and the last); 0 disables it.
    unsigned vtk_every = 0;
};

/// Everything a run needs. Defaults reproduce the rotating-cone benchmark.
struct Config
{
    Coefficients coefficients;
    ConeSolution cone;
    double t0 = 0.0;
    double T = 1.25;
    std::size_t initial_slabs = 5;
    unsigned primal_degree = 1;
    unsigned dual_degree = 2;
    unsigned global_refinements = 0;
    TemporalRestriction temporal_restriction = TemporalRestriction::mean;
    ControlVolume control_volume;
    AdaptParams adapt;
    SolverControl solver;
    OutputParams output;

    void validate() const;
};

/// Reads `subsection <name>` ... `end` blocks of `set <key> = <value>` lines.
/// `#` starts a comment. Errors name the offending line.
Config parse_parameters(std::istream& in, const std::string& source = "<stream>");
Config parse_parameter_file(const std::filesystem::path& path);

/// A parameter file that parses back to `config`.
std::string format_parameters(const Config& config);

} // namespace dwr
