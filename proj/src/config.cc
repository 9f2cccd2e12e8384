#include <dwr/config.hh>

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace dwr {

void AdaptParams::validate() const
{
    auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!unit(theta_tau))
        throw Error("theta_tau must lie in [0, 1]");
    if (!unit(theta_h1) || !unit(theta_h2))
        throw Error("theta_h1 and theta_h2 must lie in [0, 1]");
    if (theta_h2 > theta_h1)
        throw Error("theta_h2 must not exceed theta_h1");
    if (!(tol > 0.0))
        throw Error("tol must be positive");
    if (max_loops < 1)
        throw Error("max_loops must be at least 1");
}

void Config::validate() const
{
    coefficients.validate();
    cone.validate();
    if (!(T > t0))
        throw Error("T must exceed t0");
    if (initial_slabs < 1)
        throw Error("initial_slabs must be at least 1");
    if (primal_degree < 1 || primal_degree > 2 || dual_degree < 1 || dual_degree > 2)
        throw Error("degrees must be 1 or 2");
    if (dual_degree < primal_degree)
        throw Error("dual_degree must not be below primal_degree");
    control_volume.validate(t0, T);
    adapt.validate();
    solver.validate();
}

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& v)
{
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw Error("expected a real number, got '" + v + "'");
    return x;
}

unsigned long long to_count(const std::string& v)
{
    unsigned long long x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw Error("expected a non-negative integer, got '" + v + "'");
    return x;
}

bool to_bool(const std::string& v)
{
    if (v == "true")
        return true;
    if (v == "false")
        return false;
    throw Error("expected true or false, got '" + v + "'");
}

using Setter = std::function<void(Config&, const std::string&)>;
using Table = std::map<std::string, std::map<std::string, Setter>>;

const Table& table()
{
    static const Table t = [] {
        Table t;
        auto& p = t["problem"];
        p["rho"] = [](Config& c, const std::string& v) { c.coefficients.rho = to_double(v); };
        p["epsilon"] = [](Config& c, const std::string& v) { c.coefficients.epsilon = to_double(v); };
        p["a"] = [](Config& c, const std::string& v) { c.cone.a = to_double(v); };
        p["s"] = [](Config& c, const std::string& v) { c.cone.s = to_double(v); };

        auto& tm = t["time"];
        tm["t0"] = [](Config& c, const std::string& v) { c.t0 = to_double(v); };
        tm["T"] = [](Config& c, const std::string& v) { c.T = to_double(v); };
        tm["initial_slabs"] = [](Config& c, const std::string& v) { c.initial_slabs = to_count(v); };

        auto& d = t["discretization"];
        d["primal_degree"] = [](Config& c, const std::string& v) {
            c.primal_degree = static_cast<unsigned>(to_count(v));
        };
        d["dual_degree"] = [](Config& c, const std::string& v) { c.dual_degree = static_cast<unsigned>(to_count(v)); };
        d["global_refinements"] = [](Config& c, const std::string& v) {
            c.global_refinements = static_cast<unsigned>(to_count(v));
        };
        d["temporal_restriction"] = [](Config& c, const std::string& v) {
            if (v == "mean")
                c.temporal_restriction = TemporalRestriction::mean;
            else if (v == "right_endpoint")
                c.temporal_restriction = TemporalRestriction::right_endpoint;
            else
                throw Error("expected mean or right_endpoint, got '" + v + "'");
        };

        auto& cv = t["control_volume"];
        cv["x_min"] = [](Config& c, const std::string& v) { c.control_volume.box_x_min = to_double(v); };
        cv["x_max"] = [](Config& c, const std::string& v) { c.control_volume.box_x_max = to_double(v); };
        cv["y_min"] = [](Config& c, const std::string& v) { c.control_volume.box_y_min = to_double(v); };
        cv["y_max"] = [](Config& c, const std::string& v) { c.control_volume.box_y_max = to_double(v); };
        cv["r1"] = [](Config& c, const std::string& v) { c.control_volume.r1 = to_double(v); };
        cv["omega"] = [](Config& c, const std::string& v) { c.control_volume.omega = to_double(v); };
        cv["t_start"] = [](Config& c, const std::string& v) { c.control_volume.t_begin = to_double(v); };
        cv["t_end"] = [](Config& c, const std::string& v) { c.control_volume.t_end = to_double(v); };

        auto& a = t["adaptation"];
        a["theta_tau"] = [](Config& c, const std::string& v) { c.adapt.theta_tau = to_double(v); };
        a["theta_h1"] = [](Config& c, const std::string& v) { c.adapt.theta_h1 = to_double(v); };
        a["theta_h2"] = [](Config& c, const std::string& v) { c.adapt.theta_h2 = to_double(v); };
        a["tol_mode"] = [](Config& c, const std::string& v) {
            if (v == "absolute")
                c.adapt.tol_mode = ToleranceMode::absolute;
            else if (v == "relative")
                c.adapt.tol_mode = ToleranceMode::relative;
            else
                throw Error("expected absolute or relative, got '" + v + "'");
        };
        a["tol"] = [](Config& c, const std::string& v) { c.adapt.tol = to_double(v); };
        a["max_loops"] = [](Config& c, const std::string& v) { c.adapt.max_loops = static_cast<unsigned>(to_count(v)); };
        a["skip_zero_indicators"] = [](Config& c, const std::string& v) { c.adapt.skip_zero_indicators = to_bool(v); };

        auto& s = t["solver"];
        s["max_iterations"] = [](Config& c, const std::string& v) { c.solver.max_iterations = to_count(v); };
        s["relative_tolerance"] = [](Config& c, const std::string& v) { c.solver.relative_tolerance = to_double(v); };
        s["absolute_tolerance"] = [](Config& c, const std::string& v) { c.solver.absolute_tolerance = to_double(v); };

        auto& o = t["output"];
        o["directory"] = [](Config& c, const std::string& v) {
            if (v.empty())
                throw Error("directory must not be empty");
            c.output.directory = v;
        };
        o["vtk_every"] = [](Config& c, const std::string& v) { c.output.vtk_every = static_cast<unsigned>(to_count(v)); };
        return t;
    }();
    return t;
}

} // namespace

Config parse_parameters(std::istream& in, const std::string& source)
{
    Config config;
    const Table& keys = table();
    std::string section;
    std::string raw;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& msg) {
        throw Error(fmt::format("{}:{}: {}", source, line_no, msg));
    };

    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty())
            continue;
        std::istringstream words(line);
        std::string head;
        words >> head;
        if (head == "subsection") {
            if (!section.empty())
                fail("nested subsection");
            std::string name = trim(line.substr(head.size()));
            if (!keys.contains(name))
                fail("unknown subsection '" + name + "'");
            section = std::move(name);
        } else if (head == "end") {
            if (section.empty())
                fail("'end' without subsection");
            if (trim(line.substr(3)) != "")
                fail("unexpected text after 'end'");
            section.clear();
        } else if (head == "set") {
            if (section.empty())
                fail("'set' outside a subsection");
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                fail("expected 'set <key> = <value>'");
            const std::string key = trim(line.substr(3, eq - 3));
            const std::string value = trim(line.substr(eq + 1));
            const auto& entries = keys.at(section);
            const auto it = entries.find(key);
            if (it == entries.end())
                fail("unknown key '" + key + "' in subsection '" + section + "'");
            if (value.empty())
                fail("missing value for '" + key + "'");
            try {
                it->second(config, value);
            } catch (const Error& e) {
                fail(key + ": " + e.what());
            }
        } else {
            fail("unexpected '" + head + "'");
        }
    }
    if (!section.empty())
        fail("subsection '" + section + "' not closed");

    try {
        config.validate();
    } catch (const Error& e) {
        throw Error(source + ": " + e.what());
    }
    return config;
}

Config parse_parameter_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open parameter file " + path.string());
    return parse_parameters(in, path.string());
}

std::string format_parameters(const Config& c)
{
    std::string s;
    auto line = [&s](std::string_view key, auto value) { s += fmt::format("  set {} = {}\n", key, value); };
    auto real = [&line](std::string_view key, double v) { line(key, fmt::format("{}", v)); };

    s += "subsection problem\n";
    real("rho", c.coefficients.rho);
    real("epsilon", c.coefficients.epsilon);
    real("a", c.cone.a);
    real("s", c.cone.s);
    s += "end\n\nsubsection time\n";
    real("t0", c.t0);
    real("T", c.T);
    line("initial_slabs", c.initial_slabs);
    s += "end\n\nsubsection discretization\n";
    line("primal_degree", c.primal_degree);
    line("dual_degree", c.dual_degree);
    line("global_refinements", c.global_refinements);
    line("temporal_restriction", c.temporal_restriction == TemporalRestriction::mean ? "mean" : "right_endpoint");
    s += "end\n\nsubsection control_volume\n";
    real("x_min", c.control_volume.box_x_min);
    real("x_max", c.control_volume.box_x_max);
    real("y_min", c.control_volume.box_y_min);
    real("y_max", c.control_volume.box_y_max);
    real("r1", c.control_volume.r1);
    real("omega", c.control_volume.omega);
    real("t_start", c.control_volume.t_begin);
    real("t_end", c.control_volume.t_end);
    s += "end\n\nsubsection adaptation\n";
    real("theta_tau", c.adapt.theta_tau);
    real("theta_h1", c.adapt.theta_h1);
    real("theta_h2", c.adapt.theta_h2);
    line("tol_mode", c.adapt.tol_mode == ToleranceMode::relative ? "relative" : "absolute");
    real("tol", c.adapt.tol);
    line("max_loops", c.adapt.max_loops);
    line("skip_zero_indicators", c.adapt.skip_zero_indicators ? "true" : "false");
    s += "end\n\nsubsection solver\n";
    line("max_iterations", c.solver.max_iterations);
    real("relative_tolerance", c.solver.relative_tolerance);
    real("absolute_tolerance", c.solver.absolute_tolerance);
    s += "end\n\nsubsection output\n";
    line("directory", c.output.directory);
    line("vtk_every", c.output.vtk_every);
    s += "end\n";
    return s;
}

} // namespace dwr
