#include <dwr/quadrature.hh>

#include <numbers>

namespace dwr {

Quadrature1D gauss_1d(unsigned n)
{
    if (n < 1 || n > 6)
        throw Error("gauss_1d: 1 <= n <= 6 required, got " + std::to_string(n));
    Quadrature1D q;
    q.points.resize(n);
    q.weights.resize(n);
    // Newton on the Legendre polynomial P_n over [-1, 1], then map to [0, 1]
    for (unsigned i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (unsigned k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            const double pn = n == 1 ? x : p1;
            const double pnm1 = n == 1 ? 1.0 : p0;
            dp = n * (x * pn - pnm1) / (x * x - 1.0);
            const double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        double p0 = 1.0, p1 = x;
        for (unsigned k = 2; k <= n; ++k) {
            const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        const double pnm1 = n == 1 ? 1.0 : p0;
        const double pn = n == 1 ? x : p1;
        dp = n * (x * pn - pnm1) / (x * x - 1.0);
        // ascending order on [0, 1]
        q.points[n - 1 - i] = 0.5 * (1.0 + x);
        q.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    if (n % 2 == 1)
        q.points[n / 2] = 0.5;
    return q;
}

Quadrature gauss_quadrature(unsigned n)
{
    const auto g = gauss_1d(n);
    Quadrature q;
    for (unsigned j = 0; j < n; ++j)
        for (unsigned i = 0; i < n; ++i) {
            q.points.push_back({g.points[i], g.points[j]});
            q.weights.push_back(g.weights[i] * g.weights[j]);
        }
    return q;
}

} // namespace dwr
