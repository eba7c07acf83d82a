#include "rmiga/quadrature.hpp"

#include <cmath>
#include <string>

#include "rmiga/errors.hpp"

namespace rmiga {

QuadratureRule gauss_rule(int q) {
    if (q < 1 || q > 30)
        throw InvalidArgument("gauss_rule: point count " + std::to_string(q) + " outside [1, 30]");

    QuadratureRule rule;
    rule.points.resize(q);
    rule.weights.resize(q);

    // Roots of the Legendre polynomial P_q on [-1,1] by Newton iteration from
    // the Chebyshev initial guess, then mapped to [0,1].
    for (int i = 0; i < (q + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (q + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= q; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = q * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.points[i] = 0.5 * (1.0 - x);
        rule.points[q - 1 - i] = 0.5 * (1.0 + x);
        rule.weights[i] = 0.5 * w;
        rule.weights[q - 1 - i] = 0.5 * w;
    }
    if (q % 2 == 1) {
        rule.points[q / 2] = 0.5;
        // weight already written by the loop above for the middle root (x = 0)
    }
    return rule;
}

} // namespace rmiga
