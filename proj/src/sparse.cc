#include <dwr/sparse.hh>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace dwr {

SparsityPattern::SparsityPattern(std::size_t n_rows, std::size_t n_cols,
                                 std::vector<std::size_t> row_offsets,
                                 std::vector<std::size_t> col_indices)
    : n_rows_(n_rows), n_cols_(n_cols), row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices))
{
    if (row_offsets_.size() != n_rows_ + 1 || row_offsets_.front() != 0 ||
        row_offsets_.back() != col_indices_.size())
        throw Error("SparsityPattern: inconsistent row offsets");
    for (std::size_t i = 0; i < n_rows_; ++i) {
        if (row_offsets_[i] > row_offsets_[i + 1])
            throw Error("SparsityPattern: row offsets must be non-decreasing");
        for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
            if (col_indices_[k] >= n_cols_)
                throw Error("SparsityPattern: column index out of range");
            if (k > row_offsets_[i] && col_indices_[k] <= col_indices_[k - 1])
                throw Error("SparsityPattern: column indices must increase within a row");
        }
    }
}

SparsityPattern
SparsityPattern::from_entries(std::size_t n_rows, std::size_t n_cols,
                              std::vector<std::pair<std::size_t, std::size_t>> entries)
{
    for (const auto& [i, j] : entries)
        if (i >= n_rows || j >= n_cols)
            throw Error("SparsityPattern: entry index out of range");
    std::sort(entries.begin(), entries.end());
    entries.erase(std::unique(entries.begin(), entries.end()), entries.end());

    std::vector<std::size_t> offsets(n_rows + 1, 0);
    std::vector<std::size_t> cols;
    cols.reserve(entries.size());
    for (const auto& [i, j] : entries) {
        ++offsets[i + 1];
        cols.push_back(j);
    }
    std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
    return SparsityPattern(n_rows, n_cols, std::move(offsets), std::move(cols));
}

std::size_t SparsityPattern::find(std::size_t i, std::size_t j) const
{
    const auto begin = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i]);
    const auto end = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i + 1]);
    const auto it = std::lower_bound(begin, end, j);
    if (it == end || *it != j)
        return npos;
    return static_cast<std::size_t>(it - col_indices_.begin());
}

SparseMatrix::SparseMatrix(SparsityPattern pattern)
    : pattern_(std::move(pattern)), values_(pattern_.n_nonzero(), 0.0)
{}

SparseMatrix::SparseMatrix(SparsityPattern pattern, std::vector<double> values)
    : pattern_(std::move(pattern)), values_(std::move(values))
{
    if (values_.size() != pattern_.n_nonzero())
        throw Error("SparseMatrix: value count does not match pattern");
}

double SparseMatrix::operator()(std::size_t i, std::size_t j) const
{
    const auto k = pattern_.find(i, j);
    return k == SparsityPattern::npos ? 0.0 : values_[k];
}

void SparseMatrix::add(std::size_t i, std::size_t j, double v)
{
    const auto k = pattern_.find(i, j);
    if (k == SparsityPattern::npos)
        throw Error("SparseMatrix::add: entry not in pattern");
    values_[k] += v;
}

void SparseMatrix::add(double s, const SparseMatrix& other)
{
    if (!(pattern_ == other.pattern_))
        throw Error("SparseMatrix::add: patterns differ");
    for (std::size_t k = 0; k < values_.size(); ++k)
        values_[k] += s * other.values_[k];
}

void SparseMatrix::scale(double s)
{
    for (auto& v : values_)
        v *= s;
}

double SparseMatrix::relative_asymmetry() const
{
    double max_entry = 0.0;
    double max_diff = 0.0;
    for (std::size_t i = 0; i < n_rows(); ++i) {
        for (std::size_t k = pattern_.row_offsets()[i]; k < pattern_.row_offsets()[i + 1]; ++k) {
            const auto j = pattern_.col_indices()[k];
            max_entry = std::max(max_entry, std::abs(values_[k]));
            max_diff = std::max(max_diff, std::abs(values_[k] - (*this)(j, i)));
        }
    }
    return max_entry == 0.0 ? 0.0 : max_diff / max_entry;
}

SparseMatrix csr_from_triplets(std::size_t n_rows, std::size_t n_cols, std::span<const Triplet> triplets)
{
    std::vector<std::pair<std::size_t, std::size_t>> entries;
    entries.reserve(triplets.size());
    for (const auto& t : triplets) {
        if (t.row >= n_rows || t.col >= n_cols)
            throw Error("csr_from_triplets: index out of range");
        entries.emplace_back(t.row, t.col);
    }
    SparseMatrix A(SparsityPattern::from_entries(n_rows, n_cols, std::move(entries)));
    for (const auto& t : triplets)
        A.add(t.row, t.col, t.value);
    return A;
}

namespace {
void check_spmv(const SparseMatrix& A, std::span<const double> x)
{
    if (x.size() != A.n_cols())
        throw Error("spmv: dimension mismatch");
}
} // namespace

Vector spmv_reference(const SparseMatrix& A, std::span<const double> x)
{
    check_spmv(A, x);
    const auto offsets = A.pattern().row_offsets();
    const auto cols = A.pattern().col_indices();
    const auto vals = A.values();
    Vector y(A.n_rows(), 0.0);
    for (std::size_t i = 0; i < A.n_rows(); ++i) {
        double sum = 0.0;
        for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k)
            sum += vals[k] * x[cols[k]];
        y[i] = sum;
    }
    return y;
}

Vector spmv(const SparseMatrix& A, std::span<const double> x)
{
    check_spmv(A, x);
    const auto offsets = A.pattern().row_offsets();
    const auto cols = A.pattern().col_indices();
    const auto vals = A.values();
    Vector y(A.n_rows(), 0.0);
    const auto n = static_cast<std::ptrdiff_t>(A.n_rows());
#pragma omp parallel for schedule(static) if (n > 2048)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k)
            sum += vals[k] * x[cols[k]];
        y[i] = sum;
    }
    return y;
}

double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

double l2_norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void SolverControl::validate() const
{
    if (max_iterations < 1 || !(relative_tolerance > 0.0) || !(absolute_tolerance > 0.0))
        throw Error("SolverControl: tolerances must be positive and max_iterations >= 1");
}

SolveResult cg_solve(const SparseMatrix& A, std::span<const double> b, const SolverControl& ctrl,
                     std::span<const double> initial_guess)
{
    ctrl.validate();
    const std::size_t n = A.n_rows();
    if (A.n_cols() != n || b.size() != n)
        throw Error("cg_solve: dimension mismatch");

    Vector inv_diag(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = A(i, i);
        inv_diag[i] = d != 0.0 ? 1.0 / d : 1.0;
    }

    SolveResult result;
    if (!initial_guess.empty()) {
        if (initial_guess.size() != n)
            throw Error("cg_solve: initial guess has wrong length");
        result.x.assign(initial_guess.begin(), initial_guess.end());
    } else {
        result.x.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            result.x[i] = A(i, i) != 0.0 ? b[i] * inv_diag[i] : 0.0;
    }
    auto& x = result.x;

    const double target = std::max(ctrl.relative_tolerance * l2_norm(b), ctrl.absolute_tolerance);

    Vector r = spmv(A, x);
    for (std::size_t i = 0; i < n; ++i)
        r[i] = b[i] - r[i];
    double res = l2_norm(r);
    if (res <= target) {
        result.residual = res;
        return result;
    }

    Vector z(n), p(n);
    for (std::size_t i = 0; i < n; ++i)
        z[i] = inv_diag[i] * r[i];
    p = z;
    double rz = dot(r, z);

    for (std::size_t it = 1; it <= ctrl.max_iterations; ++it) {
        const Vector q = spmv(A, p);
        const double pq = dot(p, q);
        if (!(pq > 0.0))
            throw SolverError("cg_solve: matrix is not positive definite", it, res);
        const double alpha = rz / pq;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        res = l2_norm(r);
        if (res <= target) {
            // guard against drift of the recursive residual
            Vector true_r = spmv(A, x);
            for (std::size_t i = 0; i < n; ++i)
                true_r[i] = b[i] - true_r[i];
            const double true_res = l2_norm(true_r);
            if (true_res <= target) {
                result.iterations = it;
                result.residual = true_res;
                return result;
            }
            r = std::move(true_r);
            res = true_res;
        }
        for (std::size_t i = 0; i < n; ++i)
            z[i] = inv_diag[i] * r[i];
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i)
            p[i] = z[i] + beta * p[i];
    }
    throw SolverError("cg_solve: no convergence within " + std::to_string(ctrl.max_iterations) +
                          " iterations (residual " + std::to_string(res) + ")",
                      ctrl.max_iterations, res);
}

void apply_dirichlet(SparseMatrix& A, Vector& b, const std::map<std::size_t, double>& values)
{
    if (values.empty())
        return;
    const std::size_t n = A.n_rows();
    if (b.size() != n)
        throw Error("apply_dirichlet: dimension mismatch");

    std::vector<char> fixed(n, 0);
    Vector g(n, 0.0);
    for (const auto& [dof, value] : values) {
        if (dof >= n)
            throw Error("apply_dirichlet: dof out of range");
        fixed[dof] = 1;
        g[dof] = value;
    }

    const auto offsets = A.pattern().row_offsets();
    const auto cols = A.pattern().col_indices();
    auto vals = A.values();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) {
            const auto j = cols[k];
            if (fixed[i]) {
                vals[k] = (i == j) ? 1.0 : 0.0;
            } else if (fixed[j]) {
                b[i] -= vals[k] * g[j];
                vals[k] = 0.0;
            }
        }
    }
    for (const auto& [dof, value] : values) {
        if (A.pattern().find(dof, dof) == SparsityPattern::npos)
            throw Error("apply_dirichlet: constrained dof has no diagonal entry");
        b[dof] = value;
    }
}

void ConstraintSet::add(std::size_t slave, std::vector<std::pair<std::size_t, double>> masters,
                        double inhomogeneity)
{
    entries_[slave] = Entry{std::move(masters), inhomogeneity};
    closed_ = false;
}

const ConstraintSet::Entry* ConstraintSet::find(std::size_t dof) const
{
    const auto it = entries_.find(dof);
    return it == entries_.end() ? nullptr : &it->second;
}

void ConstraintSet::close()
{
    enum class State : char { open, active, done };
    std::map<std::size_t, State> state;
    for (const auto& [slave, e] : entries_)
        state[slave] = State::open;

    // depth-first expansion; resolved entries only reference free dofs
    auto resolve = [&](auto&& self, std::size_t slave) -> void {
        auto& st = state[slave];
        if (st == State::done)
            return;
        if (st == State::active)
            throw Error("ConstraintSet: cyclic constraint involving dof " + std::to_string(slave));
        st = State::active;
        Entry& e = entries_[slave];
        std::map<std::size_t, double> expanded;
        double inhom = e.inhomogeneity;
        for (const auto& [master, w] : e.masters) {
            if (master == slave)
                throw Error("ConstraintSet: dof " + std::to_string(slave) + " constrained to itself");
            if (entries_.contains(master)) {
                self(self, master);
                const Entry& m = entries_[master];
                for (const auto& [mm, ww] : m.masters)
                    expanded[mm] += w * ww;
                inhom += w * m.inhomogeneity;
            } else {
                expanded[master] += w;
            }
        }
        e.masters.assign(expanded.begin(), expanded.end());
        e.inhomogeneity = inhom;
        st = State::done;
    };
    for (const auto& [slave, e] : entries_)
        resolve(resolve, slave);
    closed_ = true;
}

void ConstraintSet::distribute(std::span<double> x) const
{
    if (!closed_)
        throw Error("ConstraintSet::distribute: set is not closed");
    for (const auto& [slave, e] : entries_) {
        double v = e.inhomogeneity;
        for (const auto& [m, w] : e.masters)
            v += w * x[m];
        x[slave] = v;
    }
}

void condense_hanging(SparseMatrix& A, Vector& b, ConstraintSet& constraints)
{
    if (constraints.empty())
        return;
    if (!constraints.closed())
        constraints.close();
    const std::size_t n = A.n_rows();
    if (b.size() != n || A.n_cols() != n)
        throw Error("condense_hanging: dimension mismatch");

    std::vector<Triplet> triplets;
    triplets.reserve(A.pattern().n_nonzero() * 2);
    Vector bc(n, 0.0);

    auto expand = [&](std::size_t i, std::pair<std::size_t, double>& self)
        -> std::span<const std::pair<std::size_t, double>> {
        if (const auto* e = constraints.find(i))
            return e->masters;
        self = {i, 1.0};
        return std::span(&self, 1);
    };

    const auto offsets = A.pattern().row_offsets();
    const auto cols = A.pattern().col_indices();
    const auto vals = A.values();
    for (std::size_t i = 0; i < n; ++i) {
        std::pair<std::size_t, double> self_i;
        const auto rows = expand(i, self_i);
        for (const auto& [ii, wi] : rows)
            bc[ii] += wi * b[i];
        for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) {
            const auto j = cols[k];
            const double v = vals[k];
            std::pair<std::size_t, double> self_j;
            const auto cs = expand(j, self_j);
            const auto* ej = constraints.find(j);
            for (const auto& [ii, wi] : rows) {
                for (const auto& [jj, wj] : cs)
                    triplets.push_back({ii, jj, v * wi * wj});
                if (ej != nullptr && ej->inhomogeneity != 0.0)
                    bc[ii] -= wi * v * ej->inhomogeneity;
            }
        }
    }
    for (const auto& [slave, e] : constraints.entries()) {
        triplets.push_back({slave, slave, 1.0});
        bc[slave] = 0.0;
    }
    A = csr_from_triplets(n, n, triplets);
    b = std::move(bc);
}

} // namespace dwr
