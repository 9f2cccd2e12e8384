#pragma once

#include <dwr/adapt.hh>

#include <filesystem>
#include <string>
#include <vector>

namespace dwr {

/// Writes `content` to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// loop,n_slabs,max_cells,goal_error,eta,i_eff; missing values print as nan.
std::string format_convergence_csv(const std::vector<LoopRecord>& records);

/// t_m, t_n, tau per slab, tab separated.
std::string format_tau_distribution(const SlabList& slabs);

/// slab, t_m, t_n, eta per slab, tab separated.
std::string format_eta(const SlabList& slabs, const ErrorEstimate& estimate);

/// Legacy ASCII VTK unstructured grid of one slab. Points are the Q1 dofs of
/// the slab mesh; u is the primal value on the slab, z the dual value at t_m
/// (zero when no dual solution is stored).
std::string format_vtk(const SlabList& slabs, std::size_t k);

/// Observer writing convergence.csv after every loop, the tau and eta
/// tables per loop and VTK files every `vtk_every` loops and at the end.
LoopObserver make_output_writer(const OutputParams& params);

} // namespace dwr
