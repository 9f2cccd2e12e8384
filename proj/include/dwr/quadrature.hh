#pragma once

#include <dwr/types.hh>

#include <vector>

namespace dwr {

/// Gauss-Legendre rule on the unit interval.
struct Quadrature1D
{
    std::vector<double> points;
    std::vector<double> weights;
};

/// Tensor rule on the unit square; weights sum to one.
struct Quadrature
{
    std::vector<Point> points;
    std::vector<double> weights;

    std::size_t size() const { return points.size(); }
};

/// n-point rule, exact for polynomials of degree 2n - 1. 1 <= n <= 6.
Quadrature1D gauss_1d(unsigned n);

/// n x n tensor Gauss rule.
Quadrature gauss_quadrature(unsigned n);

} // namespace dwr
