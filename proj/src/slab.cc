#include <dwr/slab.hh>

#include <cmath>
#include <iterator>

namespace dwr {

Slab::Slab(TimeInterval interval, std::shared_ptr<const QuadMesh> mesh, std::shared_ptr<const FeSpace> primal,
           std::shared_ptr<const FeSpace> dual)
    : interval_(interval), mesh_(std::move(mesh)), primal_(std::move(primal)), dual_(std::move(dual))
{
    if (!(interval_.t_m < interval_.t_n))
        throw Error("Slab: empty time interval");
}

Slab SlabList::make_slab(TimeInterval interval, std::shared_ptr<const QuadMesh> mesh,
                         std::shared_ptr<const FeSpace> primal, std::shared_ptr<const FeSpace> dual)
{
    Slab s(interval, std::move(mesh), std::move(primal), std::move(dual));
    s.id_ = next_id_++;
    return s;
}

Slab& SlabList::at(std::size_t k)
{
    if (k >= slabs_.size())
        throw Error("SlabList: slab index out of range");
    return *std::next(slabs_.begin(), static_cast<std::ptrdiff_t>(k));
}

const Slab& SlabList::at(std::size_t k) const
{
    if (k >= slabs_.size())
        throw Error("SlabList: slab index out of range");
    return *std::next(slabs_.begin(), static_cast<std::ptrdiff_t>(k));
}

void SlabList::split_slab_in_time(std::size_t k)
{
    if (k >= slabs_.size())
        throw Error("SlabList: slab index out of range");
    auto it = std::next(slabs_.begin(), static_cast<std::ptrdiff_t>(k));
    const auto [t_m, t_n] = it->interval_;
    const double t_mid = 0.5 * (t_m + t_n);
    if (!(t_m < t_mid && t_mid < t_n))
        throw Error("SlabList: slab too short to split");
    auto left = make_slab({t_m, t_mid}, it->mesh_, it->primal_, it->dual_);
    auto right = make_slab({t_mid, t_n}, it->mesh_, it->primal_, it->dual_);
    slabs_.insert(it, std::move(left));
    slabs_.insert(it, std::move(right));
    slabs_.erase(it);
}

void SlabList::set_mesh(Slab& slab, std::shared_ptr<const QuadMesh> mesh)
{
    slab.primal_ = distribute_dofs(mesh, primal_degree_);
    slab.dual_ = distribute_dofs(mesh, dual_degree_);
    slab.mesh_ = std::move(mesh);
    slab.storage_.clear();
}

void SlabList::attach_storage(Slab& slab, StorageTag tag, std::shared_ptr<const Vector> data)
{
    if (!data)
        throw Error("attach_storage: null vector");
    std::size_t expected = 0;
    switch (tag) {
    case StorageTag::primal_u: expected = slab.primal_->n_dofs(); break;
    case StorageTag::dual_z_tm: expected = slab.dual_->n_dofs(); break;
    case StorageTag::eta: expected = slab.mesh_->n_active_cells(); break;
    }
    if (data->size() != expected)
        throw Error("attach_storage: vector length " + std::to_string(data->size()) + " does not match " +
                    std::to_string(expected));
    slab.storage_[tag] = std::move(data);
}

std::shared_ptr<const Vector> SlabList::fetch_storage(const Slab& slab, StorageTag tag) const
{
    if (observer_)
        observer_(slab, tag);
    const auto it = slab.storage_.find(tag);
    return it == slab.storage_.end() ? nullptr : it->second;
}

void SlabList::clear_storage()
{
    for (auto& s : slabs_)
        s.storage_.clear();
}

void SlabList::check_partition() const
{
    if (slabs_.empty())
        throw Error("SlabList: no slabs");
    for (auto it = slabs_.begin(); std::next(it) != slabs_.end(); ++it)
        if (it->interval().t_n != std::next(it)->interval().t_m)
            throw Error("SlabList: intervals do not partition the time domain");
}

SlabList init_slabs(const QuadMesh& coarse_mesh, double t0, double T, std::size_t N, unsigned primal_degree,
                    unsigned dual_degree)
{
    if (N < 1 || !(t0 < T))
        throw Error("init_slabs: need N >= 1 and t0 < T");
    SlabList list;
    list.primal_degree_ = primal_degree;
    list.dual_degree_ = dual_degree;
    auto mesh = std::make_shared<const QuadMesh>(coarse_mesh);
    auto primal = distribute_dofs(mesh, primal_degree);
    auto dual = distribute_dofs(mesh, dual_degree);
    const double length = T - t0;
    for (std::size_t k = 0; k < N; ++k) {
        const double a = t0 + static_cast<double>(k) * length / static_cast<double>(N);
        const double b = k + 1 == N ? T : t0 + static_cast<double>(k + 1) * length / static_cast<double>(N);
        list.slabs_.push_back(list.make_slab({a, b}, mesh, primal, dual));
    }
    return list;
}

} // namespace dwr
