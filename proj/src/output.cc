#include <dwr/output.hh>

#include <fmt/format.h>

#include <fstream>
#include <memory>

namespace dwr {

namespace fs = std::filesystem;

void write_file_atomic(const fs::path& path, const std::string& content)
{
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out)
            throw Error("write to " + tmp.string() + " failed");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw Error("cannot rename " + tmp.string() + ": " + ec.message());
    }
}

namespace {

std::string real(double v) { return fmt::format("{:.6e}", v); }

std::string optional_real(const std::optional<double>& v) { return v ? real(*v) : "nan"; }

} // namespace

std::string format_convergence_csv(const std::vector<LoopRecord>& records)
{
    std::string s = "loop,n_slabs,max_cells,goal_error,eta,i_eff\n";
    for (const auto& r : records)
        s += fmt::format("{},{},{},{},{},{}\n", r.loop, r.n_slabs, r.max_cells, real(r.goal_error), optional_real(r.eta),
                         optional_real(r.i_eff));
    return s;
}

std::string format_tau_distribution(const SlabList& slabs)
{
    std::string s = "t_m\tt_n\ttau\n";
    for (const Slab& slab : slabs.forward()) {
        const auto& I = slab.interval();
        s += fmt::format("{:.12g}\t{:.12g}\t{:.12g}\n", I.t_m, I.t_n, I.tau());
    }
    return s;
}

std::string format_eta(const SlabList& slabs, const ErrorEstimate& estimate)
{
    if (estimate.slabs.size() != slabs.size())
        throw Error("format_eta: estimate does not match the slab list");
    std::string s = "slab\tt_m\tt_n\teta\n";
    std::size_t k = 0;
    for (const Slab& slab : slabs.forward()) {
        const auto& I = slab.interval();
        s += fmt::format("{}\t{:.12g}\t{:.12g}\t{}\n", k, I.t_m, I.t_n, real(estimate.slabs[k]));
        ++k;
    }
    return s;
}

std::string format_vtk(const SlabList& slabs, std::size_t k)
{
    const Slab& slab = slabs.at(k);
    const auto q1 = distribute_dofs(slab.mesh_ptr(), 1);
    const auto u_store = slabs.fetch_storage(slab, StorageTag::primal_u);
    if (!u_store)
        throw Error("format_vtk: primal solution missing on slab " + std::to_string(k));
    const FeFunction u = transfer(FeFunction(slab.primal_space(), *u_store), q1);
    const auto z_store = slabs.fetch_storage(slab, StorageTag::dual_z_tm);
    const FeFunction z = z_store ? transfer(FeFunction(slab.dual_space(), *z_store), q1)
                                 : FeFunction(q1, Vector(q1->n_dofs(), 0.0));

    const auto& points = q1->support_points();
    const auto& active = slab.mesh().active_cells();
    std::string s = "# vtk DataFile Version 3.0\n";
    s += fmt::format("slab {} t_m={:.12g} t_n={:.12g}\nASCII\nDATASET UNSTRUCTURED_GRID\n", k, slab.interval().t_m,
                     slab.interval().t_n);
    s += fmt::format("POINTS {} double\n", points.size());
    for (const Point& p : points)
        s += fmt::format("{:.17g} {:.17g} 0\n", p.x, p.y);
    s += fmt::format("CELLS {} {}\n", active.size(), 5 * active.size());
    for (const auto c : active) {
        const auto d = q1->cell_dofs(c);
        s += fmt::format("4 {} {} {} {}\n", d[0], d[1], d[3], d[2]);
    }
    s += fmt::format("CELL_TYPES {}\n", active.size());
    for (std::size_t i = 0; i < active.size(); ++i)
        s += "9\n";
    s += fmt::format("POINT_DATA {}\n", points.size());
    for (const auto& [name, f] : {std::pair<const char*, const FeFunction*>{"u", &u}, {"z", &z}}) {
        s += fmt::format("SCALARS {} double 1\nLOOKUP_TABLE default\n", name);
        for (const double v : f->coefficients())
            s += fmt::format("{:.17g}\n", v);
    }
    return s;
}

LoopObserver make_output_writer(const OutputParams& params)
{
    const fs::path dir = params.directory;
    fs::create_directories(dir);
    auto records = std::make_shared<std::vector<LoopRecord>>();
    return [dir, records, every = params.vtk_every](const LoopState& state) {
        const unsigned l = state.record.loop;
        records->push_back(state.record);
        write_file_atomic(dir / "convergence.csv", format_convergence_csv(*records));
        write_file_atomic(dir / fmt::format("tau_distribution_l{}.tsv", l), format_tau_distribution(state.slabs));
        if (state.estimate)
            write_file_atomic(dir / fmt::format("eta_l{}.tsv", l), format_eta(state.slabs, *state.estimate));
        if (every > 0 && (l % every == 0 || state.last))
            for (std::size_t k = 0; k < state.slabs.size(); ++k)
                write_file_atomic(dir / fmt::format("solution_l{}_s{:04}.vtk", l, k), format_vtk(state.slabs, k));
    };
}

} // namespace dwr
