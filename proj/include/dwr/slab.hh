#pragma once

#include <dwr/fe.hh>
#include <dwr/mesh.hh>

#include <cstdint>
#include <functional>
#include <list>
#include <map>
#include <memory>
#include <ranges>
#include <vector>

namespace dwr {

struct TimeInterval
{
    double t_m = 0.0;
    double t_n = 0.0;

    double tau() const { return t_n - t_m; }
    double map(double t_hat) const { return tau() * t_hat + t_m; }
};

/// Temporal reference bases on (0, 1): one constant for the dG(0) primal,
/// two hats for the cG(1) dual (hat 0 is one at t_m, hat 1 at t_n).
struct TimeBasis
{
    static double primal(double) { return 1.0; }
    static double dual(unsigned i, double t_hat) { return i == 0 ? 1.0 - t_hat : t_hat; }
};

enum class StorageTag { primal_u, dual_z_tm, eta };

/// One space-time slab: interval, mesh, primal/dual spaces and per-slab
/// storage. The mesh is immutable and may be shared between slabs until one
/// of them is refined, which replaces its pointer.
class Slab
{
public:
    Slab(TimeInterval interval, std::shared_ptr<const QuadMesh> mesh,
         std::shared_ptr<const FeSpace> primal, std::shared_ptr<const FeSpace> dual);

    const TimeInterval& interval() const { return interval_; }
    const QuadMesh& mesh() const { return *mesh_; }
    const std::shared_ptr<const QuadMesh>& mesh_ptr() const { return mesh_; }
    const std::shared_ptr<const FeSpace>& primal_space() const { return primal_; }
    const std::shared_ptr<const FeSpace>& dual_space() const { return dual_; }
    std::uint64_t id() const { return id_; }

private:
    friend class SlabList;

    TimeInterval interval_;
    std::shared_ptr<const QuadMesh> mesh_;
    std::shared_ptr<const FeSpace> primal_;
    std::shared_ptr<const FeSpace> dual_;
    std::map<StorageTag, std::shared_ptr<const Vector>> storage_;
    std::uint64_t id_ = 0;
};

/// Ordered slabs partitioning (t0, T); only the current loop is kept.
class SlabList
{
public:
    using Container = std::list<Slab>;
    using iterator = Container::iterator;
    using const_iterator = Container::const_iterator;
    using FetchObserver = std::function<void(const Slab&, StorageTag)>;

    SlabList() = default;

    std::size_t size() const { return slabs_.size(); }
    bool empty() const { return slabs_.empty(); }
    unsigned primal_degree() const { return primal_degree_; }
    unsigned dual_degree() const { return dual_degree_; }
    unsigned loop() const { return loop_; }
    void next_loop() { ++loop_; }

    iterator begin() { return slabs_.begin(); }
    iterator end() { return slabs_.end(); }
    const_iterator begin() const { return slabs_.begin(); }
    const_iterator end() const { return slabs_.end(); }

    /// Slabs by ascending t_m.
    auto forward() { return std::views::all(slabs_); }
    auto forward() const { return std::views::all(slabs_); }
    /// Slabs by descending t_n.
    auto backward() { return slabs_ | std::views::reverse; }
    auto backward() const { return slabs_ | std::views::reverse; }

    Slab& at(std::size_t k);
    const Slab& at(std::size_t k) const;

    /// Replaces slab k by its two halves; both keep the slab's mesh.
    void split_slab_in_time(std::size_t k);

    /// Replaces the mesh of a slab, rebuilds its spaces and clears its storage.
    void set_mesh(Slab& slab, std::shared_ptr<const QuadMesh> mesh);

    /// Registers a shared vector; its length must match the tagged space.
    void attach_storage(Slab& slab, StorageTag tag, std::shared_ptr<const Vector> data);
    /// The stored vector or nullptr.
    std::shared_ptr<const Vector> fetch_storage(const Slab& slab, StorageTag tag) const;
    void clear_storage();

    void set_fetch_observer(FetchObserver observer) { observer_ = std::move(observer); }

    /// Throws unless the intervals partition (t0, T) without gaps.
    void check_partition() const;

private:
    friend SlabList init_slabs(const QuadMesh&, double, double, std::size_t, unsigned, unsigned);

    Slab make_slab(TimeInterval interval, std::shared_ptr<const QuadMesh> mesh,
                   std::shared_ptr<const FeSpace> primal, std::shared_ptr<const FeSpace> dual);

    Container slabs_;
    unsigned primal_degree_ = 1;
    unsigned dual_degree_ = 2;
    unsigned loop_ = 1;
    std::uint64_t next_id_ = 0;
    FetchObserver observer_;
};

/// N slabs of equal length; slab k spans t0 + k (T - t0) / N to the next
/// endpoint, the last one ending exactly at T.
SlabList init_slabs(const QuadMesh& coarse_mesh, double t0, double T, std::size_t N,
                    unsigned primal_degree = 1, unsigned dual_degree = 2);

} // namespace dwr
