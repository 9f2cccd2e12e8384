#pragma once

#include <dwr/types.hh>

#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace dwr {

struct Triplet
{
    std::size_t row;
    std::size_t col;
    double value;
};

/// CSR structure. Column indices are strictly increasing within each row.
class SparsityPattern
{
public:
    SparsityPattern() = default;
    SparsityPattern(std::size_t n_rows, std::size_t n_cols,
                    std::vector<std::size_t> row_offsets,
                    std::vector<std::size_t> col_indices);

    /// Builds the pattern from unsorted (row, col) pairs; duplicates collapse.
    static SparsityPattern from_entries(std::size_t n_rows, std::size_t n_cols,
                                        std::vector<std::pair<std::size_t, std::size_t>> entries);

    std::size_t n_rows() const { return n_rows_; }
    std::size_t n_cols() const { return n_cols_; }
    std::size_t n_nonzero() const { return col_indices_.size(); }

    std::span<const std::size_t> row_offsets() const { return row_offsets_; }
    std::span<const std::size_t> col_indices() const { return col_indices_; }
    std::span<const std::size_t> row(std::size_t i) const
    {
        return std::span(col_indices_).subspan(row_offsets_[i], row_offsets_[i + 1] - row_offsets_[i]);
    }

    /// Position of (i, j) in the value array, or npos.
    std::size_t find(std::size_t i, std::size_t j) const;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    friend bool operator==(const SparsityPattern&, const SparsityPattern&) = default;

private:
    std::size_t n_rows_ = 0;
    std::size_t n_cols_ = 0;
    std::vector<std::size_t> row_offsets_{0};
    std::vector<std::size_t> col_indices_;
};

class SparseMatrix
{
public:
    SparseMatrix() = default;
    explicit SparseMatrix(SparsityPattern pattern);
    SparseMatrix(SparsityPattern pattern, std::vector<double> values);

    const SparsityPattern& pattern() const { return pattern_; }
    std::size_t n_rows() const { return pattern_.n_rows(); }
    std::size_t n_cols() const { return pattern_.n_cols(); }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    /// Entry (i, j); zero when (i, j) is outside the pattern.
    double operator()(std::size_t i, std::size_t j) const;

    /// Adds to an entry that must exist in the pattern.
    void add(std::size_t i, std::size_t j, double v);

    /// this += s * other; both must share the same pattern.
    void add(double s, const SparseMatrix& other);
    void scale(double s);

    /// max|A_ij - A_ji| / max|A_ij|; zero for the zero matrix.
    double relative_asymmetry() const;

private:
    SparsityPattern pattern_;
    std::vector<double> values_;
};

/// Duplicate (row, col) entries are summed in input order.
SparseMatrix csr_from_triplets(std::size_t n_rows, std::size_t n_cols, std::span<const Triplet> triplets);

/// y = A x, parallel over rows.
Vector spmv(const SparseMatrix& A, std::span<const double> x);
/// Serial reference for spmv.
Vector spmv_reference(const SparseMatrix& A, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> a);

struct SolverControl
{
    std::size_t max_iterations = 10000;
    double relative_tolerance = 1e-10;
    double absolute_tolerance = 1e-14;

    void validate() const;
};

struct SolveResult
{
    Vector x;
    std::size_t iterations = 0;
    double residual = 0.0;
};

class SolverError : public Error
{
public:
    SolverError(const std::string& what, std::size_t iterations, double residual)
        : Error(what), iterations_(iterations), residual_(residual)
    {}
    std::size_t iterations() const { return iterations_; }
    double residual() const { return residual_; }

private:
    std::size_t iterations_;
    double residual_;
};

/// Jacobi-preconditioned conjugate gradients.
///
/// Stops once ||b - A x|| <= max(rel * ||b||, abs). Without an initial guess
/// the iteration starts from x_i = b_i / A_ii, so decoupled unit rows (e.g.
/// eliminated Dirichlet rows) are reproduced exactly. Throws SolverError
/// carrying the last residual when max_iterations is exhausted.
SolveResult cg_solve(const SparseMatrix& A, std::span<const double> b, const SolverControl& ctrl,
                     std::span<const double> initial_guess = {});

/// Symmetric elimination of prescribed values: rows and columns of the
/// constrained dofs are zeroed, the diagonal set to one, and b corrected so
/// that the remaining equations see the boundary values.
void apply_dirichlet(SparseMatrix& A, Vector& b, const std::map<std::size_t, double>& values);

/// Linear constraints x_s = sum_m w_m x_m + inhomogeneity on slave dofs.
class ConstraintSet
{
public:
    struct Entry
    {
        std::vector<std::pair<std::size_t, double>> masters;
        double inhomogeneity = 0.0;
    };

    /// Adds or replaces the constraint of one slave.
    void add(std::size_t slave, std::vector<std::pair<std::size_t, double>> masters,
             double inhomogeneity = 0.0);

    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }
    bool is_constrained(std::size_t dof) const { return entries_.contains(dof); }
    const Entry* find(std::size_t dof) const;
    const std::map<std::size_t, Entry>& entries() const { return entries_; }

    /// Resolves chains so that no master is itself a slave.
    /// Throws Error on cyclic dependencies.
    void close();
    bool closed() const { return closed_; }

    /// Overwrites the slave entries of x from their masters.
    void distribute(std::span<double> x) const;

private:
    std::map<std::size_t, Entry> entries_;
    bool closed_ = true;
};

/// Condenses the constraints into (A, b): the result acts on the masters as
/// C^T A C and C^T (b - A k); slave rows and columns become unit rows with a
/// zero right-hand side. Call distribute() on the solution afterwards. The
/// set is closed first if needed (cyclic constraints throw).
void condense_hanging(SparseMatrix& A, Vector& b, ConstraintSet& constraints);

} // namespace dwr
