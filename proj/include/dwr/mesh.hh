#pragma once

#include <dwr/types.hh>

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace dwr {

enum class BoundaryType : std::uint8_t { interior, dirichlet, neumann };

inline constexpr std::size_t invalid_id = static_cast<std::size_t>(-1);

/// Local vertex order is lower-left, lower-right, upper-left, upper-right.
/// Faces: 0 = left (v0, v2), 1 = right (v1, v3), 2 = bottom (v0, v1),
/// 3 = top (v2, v3). A face is parametrized by s in [0, 1] running from its
/// first to its second vertex.
inline constexpr std::array<std::array<unsigned, 2>, 4> face_vertices{{{0, 2}, {1, 3}, {0, 1}, {2, 3}}};

/// Unit-cell coordinates of the point at parameter s on face f.
Point face_point(unsigned face, double s);

/// Outward normal of face f on the unit square.
Point reference_normal(unsigned face);

struct Cell
{
    std::array<std::size_t, 4> vertices{};
    unsigned level = 0;
    std::size_t parent = invalid_id;
    std::size_t first_child = invalid_id; ///< children are first_child .. first_child + 3
    std::array<BoundaryType, 4> boundary{BoundaryType::interior, BoundaryType::interior,
                                         BoundaryType::interior, BoundaryType::interior};

    bool active() const { return first_child == invalid_id; }
    friend bool operator==(const Cell&, const Cell&) = default;
};

/// One neighbouring active cell across a face, covering the parameter range
/// [s_begin, s_end] of that face.
struct FaceNeighbor
{
    std::size_t cell = invalid_id;
    double s_begin = 0.0;
    double s_end = 1.0;
};

struct FaceInfo
{
    BoundaryType boundary = BoundaryType::interior;
    /// One entry for a same-level or coarser neighbour, two for a face with a
    /// hanging vertex, none on the boundary.
    std::vector<FaceNeighbor> neighbors;
};

struct PointLocation
{
    std::size_t cell = invalid_id;
    Point unit;
};

using RefinementMarks = std::set<std::size_t>;

/// Quadrilateral forest with isotropic refinement, kept 1-irregular.
class QuadMesh
{
public:
    using Colorizer = std::function<BoundaryType(Point face_midpoint)>;

    QuadMesh() = default;
    /// Coarse mesh from cell vertex quadruples; boundary faces are coloured by
    /// the callback evaluated at each face midpoint.
    QuadMesh(std::vector<Point> vertices, const std::vector<std::array<std::size_t, 4>>& cells,
             const Colorizer& colorize);

    std::size_t n_vertices() const { return vertices_.size(); }
    std::size_t n_cells() const { return cells_.size(); }
    std::size_t n_active_cells() const { return active_.size(); }

    const Point& vertex(std::size_t v) const { return vertices_[v]; }
    const std::vector<Point>& vertices() const { return vertices_; }
    const Cell& cell(std::size_t c) const { return cells_[c]; }

    /// Active cell ids in creation order.
    const std::vector<std::size_t>& active_cells() const { return active_; }
    /// Position of an active cell in active_cells().
    std::size_t active_index(std::size_t cell) const { return active_index_[cell]; }

    const FaceInfo& face_info(std::size_t cell, unsigned face) const { return faces_[cell][face]; }

    /// Midpoint vertex of the edge (a, b), if one was created.
    std::optional<std::size_t> edge_midpoint(std::size_t a, std::size_t b) const;

    Point map(std::size_t cell, Point unit) const;
    /// Columns are d x / d xi and d x / d eta.
    std::array<Point, 2> jacobian(std::size_t cell, Point unit) const;
    double area(std::size_t cell) const;
    double total_active_area() const;

    /// Preimage of p under the bilinear map of one cell (Newton, 1e-12
    /// residual, at most 20 iterations). Empty if p is not inside the cell.
    std::optional<Point> inverse_map(std::size_t cell, Point p) const;

    /// Lowest-id active cell containing p (closed cells, tolerance 1e-12).
    std::optional<PointLocation> find_point(Point p) const;
    /// As find_point, but throws for points outside the domain.
    PointLocation locate_point(Point p) const;

    /// Refines the marked active cells isotropically, then refines further
    /// cells until the mesh is 1-irregular again.
    QuadMesh refine(const RefinementMarks& marks) const;
    QuadMesh refine_global(unsigned times = 1) const;

    /// True if every face carries at most one hanging vertex.
    bool is_one_irregular() const;
    bool has_hanging_nodes() const;

    friend bool operator==(const QuadMesh& a, const QuadMesh& b)
    {
        return a.vertices_ == b.vertices_ && a.cells_ == b.cells_;
    }

private:
    std::size_t midpoint_vertex(std::size_t a, std::size_t b);
    void split(std::size_t cell);
    bool violates_irregularity(std::size_t cell) const;
    void build_topology();

    std::vector<Point> vertices_;
    std::vector<Cell> cells_;
    std::vector<std::size_t> active_;
    std::vector<std::size_t> active_index_;
    std::vector<std::array<FaceInfo, 4>> faces_;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> midpoints_;
    std::vector<std::pair<std::size_t, std::size_t>> parent_edge_; ///< per vertex, invalid if none
    std::vector<std::size_t> roots_;
};

/// (0,1)^2 minus [0.5,1)^2 as three half-unit cells; faces on x = 0 are
/// Neumann, all other boundary faces Dirichlet.
QuadMesh make_lshape();

/// Unit square (0,1)^2 as one cell; every boundary face gets `type`.
QuadMesh make_unit_square(BoundaryType type = BoundaryType::dirichlet);

} // namespace dwr
