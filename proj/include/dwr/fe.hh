#pragma once

#include <dwr/mesh.hh>
#include <dwr/quadrature.hh>
#include <dwr/sparse.hh>

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <vector>

namespace dwr {

using SpatialFunction = std::function<double(Point)>;

/// Tensor-product Lagrange basis of degree 1 or 2 on the unit square with
/// equidistant nodes. Local index k = j * (p + 1) + i for node (i, j).
class LagrangeBasis
{
public:
    explicit LagrangeBasis(unsigned degree);

    unsigned degree() const { return degree_; }
    unsigned size() const { return (degree_ + 1) * (degree_ + 1); }
    Point node(unsigned k) const;

    double value(unsigned k, Point u) const;
    Point gradient(unsigned k, Point u) const;
    /// (d2/dxi2, d2/dxi deta, d2/deta2)
    std::array<double, 3> hessian(unsigned k, Point u) const;

    /// Local indices of the nodes on face f, ordered by increasing face parameter.
    std::vector<unsigned> face_nodes(unsigned face) const;

private:
    double value_1d(unsigned i, double x) const;
    double derivative_1d(unsigned i, double x) const;
    double second_derivative_1d(unsigned i, double x) const;

    unsigned degree_;
};

/// Geometry of an active cell evaluated at one unit point.
struct CellPoint
{
    Point x;
    double det = 0.0;
    std::array<Point, 2> jacobian;

    /// Physical gradient from a reference gradient.
    Point physical_gradient(Point ref) const;
    /// Physical Laplacian from a reference Hessian; exact for parallelograms.
    double physical_laplacian(const std::array<double, 3>& ref) const;
};

CellPoint cell_point(const QuadMesh& mesh, std::size_t cell, Point unit);

/// Continuous Q_p space on a quadrilateral mesh with its hanging-node
/// constraints (already closed).
class FeSpace
{
public:
    FeSpace(std::shared_ptr<const QuadMesh> mesh, unsigned degree);

    const QuadMesh& mesh() const { return *mesh_; }
    const std::shared_ptr<const QuadMesh>& mesh_ptr() const { return mesh_; }
    unsigned degree() const { return basis_.degree(); }
    const LagrangeBasis& basis() const { return basis_; }
    std::size_t n_dofs() const { return support_points_.size(); }
    std::size_t dofs_per_cell() const { return basis_.size(); }

    /// Global dofs of an active cell in local basis order.
    std::span<const std::size_t> cell_dofs(std::size_t cell) const;
    const std::vector<Point>& support_points() const { return support_points_; }
    const ConstraintSet& constraints() const { return constraints_; }

    /// Dofs on faces of the given boundary type, ascending.
    const std::vector<std::size_t>& boundary_dofs(BoundaryType type) const;
    /// g evaluated at the support points of boundary_dofs(type).
    std::map<std::size_t, double> boundary_values(BoundaryType type, const SpatialFunction& g) const;

    /// Nonzero pattern coupling dofs that share a cell.
    const SparsityPattern& pattern() const { return pattern_; }

    /// True if both spaces describe the same discretization.
    bool same_as(const FeSpace& other) const;

private:
    std::shared_ptr<const QuadMesh> mesh_;
    LagrangeBasis basis_;
    std::vector<std::size_t> cell_dofs_; ///< active index * dofs_per_cell
    std::vector<Point> support_points_;
    std::vector<std::size_t> vertex_dof_;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_dof_;
    ConstraintSet constraints_;
    SparsityPattern pattern_;
    std::array<std::vector<std::size_t>, 3> boundary_dofs_;
};

std::shared_ptr<const FeSpace> distribute_dofs(std::shared_ptr<const QuadMesh> mesh, unsigned degree);

/// Constraints of hanging vertices and fine edge nodes against the coarse
/// face trace. Same object as space.constraints().
const ConstraintSet& hanging_constraints(const FeSpace& space);

class FeFunction
{
public:
    FeFunction() = default;
    FeFunction(std::shared_ptr<const FeSpace> space, Vector coefficients);

    const FeSpace& space() const { return *space_; }
    const std::shared_ptr<const FeSpace>& space_ptr() const { return space_; }
    const Vector& coefficients() const& { return coefficients_; }
    Vector& coefficients() & { return coefficients_; }
    Vector coefficients() && { return std::move(coefficients_); }

    double value(std::size_t cell, Point unit) const;
    Point gradient(std::size_t cell, const CellPoint& geometry, Point unit) const;
    double laplacian(std::size_t cell, const CellPoint& geometry, Point unit) const;

    /// Point evaluation; the lowest-id cell wins on shared faces.
    double evaluate(Point p) const;

private:
    std::shared_ptr<const FeSpace> space_;
    Vector coefficients_;
};

double evaluate(const FeFunction& f, Point p);

/// Nodal interpolation; slave coefficients are recomputed from their masters.
FeFunction interpolate(std::shared_ptr<const FeSpace> space, const SpatialFunction& g);

/// Nodal evaluation of a function from another space; identity when both
/// spaces are the same discretization.
FeFunction transfer(const FeFunction& from, std::shared_ptr<const FeSpace> to);

// Assembly. Matrices and vectors are returned unconstrained; callers condense
// hanging nodes and apply Dirichlet values on the system.

/// Element kernel: local matrix (row-major, dofs_per_cell^2) of one cell.
using LocalMatrixKernel = std::function<void(std::size_t cell, std::span<double> local)>;

SparseMatrix assemble_matrix(const FeSpace& space, const LocalMatrixKernel& kernel,
                             Execution exec = Execution::parallel);

/// M_ij = sum_K int_K rho phi_i phi_j, (p+1)^2 Gauss points.
SparseMatrix assemble_mass(const FeSpace& space, const SpatialFunction& rho,
                           Execution exec = Execution::parallel);
/// A_ij = sum_K int_K eps grad phi_i . grad phi_j, (p+1)^2 Gauss points.
SparseMatrix assemble_stiffness(const FeSpace& space, const SpatialFunction& eps,
                                Execution exec = Execution::parallel);

/// b_i = int_Omega f phi_i with (p+2)^2 Gauss points.
Vector assemble_volume_functional(const FeSpace& space, const SpatialFunction& f,
                                  Execution exec = Execution::parallel);
/// b_i = int_{faces of type} h phi_i with p+2 Gauss points per face.
Vector assemble_boundary_functional(const FeSpace& space, const SpatialFunction& h,
                                    BoundaryType type = BoundaryType::neumann);

} // namespace dwr
