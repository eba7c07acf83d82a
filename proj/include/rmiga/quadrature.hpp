#pragma once

#include <vector>

namespace rmiga {

/// Gauss-Legendre rule mapped to [0,1]; exact for polynomials of degree 2q-1.
struct QuadratureRule {
    std::vector<double> points;
    std::vector<double> weights;

    int size() const { return static_cast<int>(points.size()); }
};

/// q-point Gauss-Legendre rule on [0,1], 1 <= q <= 30.
QuadratureRule gauss_rule(int q);

} // namespace rmiga
