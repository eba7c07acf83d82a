#include "rmiga/norms.hpp"

#include <algorithm>
#include <cmath>

#include "rmiga/errors.hpp"
#include "rmiga/quadrature.hpp"

namespace rmiga {

namespace {

double element_diameter(const GeometryMap& geometry, const ParametricElement& e) {
    const double us[3] = {e.u0, 0.5 * (e.u0 + e.u1), e.u1};
    const double vs[3] = {e.v0, 0.5 * (e.v0 + e.v1), e.v1};
    Eigen::Vector2d pts[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            pts[i][j] = evaluate_map(geometry, us[i], vs[j]).point;
    double d = (pts[2][2] - pts[0][0]).norm();
    d = std::max(d, (pts[2][0] - pts[0][2]).norm());
    // midedge spans guard against strongly curved elements
    d = std::max(d, (pts[2][1] - pts[0][1]).norm());
    d = std::max(d, (pts[1][2] - pts[1][0]).norm());
    return d;
}

} // namespace

double physical_mesh_size(const GeometryMap& geometry, const ParametricMesh& mesh) {
    double h = 0.0;
    for (const ParametricElement& e : mesh.elements)
        h = std::max(h, element_diameter(geometry, e));
    return h;
}

ErrorReport error_norms(const DiscreteSolution& sol, const ReferenceField& reference, int q,
                        const ParametricMesh& integration_mesh) {
    if (!reference)
        throw InvalidArgument("error_norms: reference field not set");
    const QuadratureRule rule = gauss_rule(q);

    double theta_l2 = 0.0, theta_semi = 0.0, w_l2 = 0.0, w_semi = 0.0, shear_l2 = 0.0;
    for (const ParametricElement& elem : integration_mesh.elements) {
        for (int gv = 0; gv < q; ++gv)
            for (int gu = 0; gu < q; ++gu) {
                const double u = elem.u0 + (elem.u1 - elem.u0) * rule.points[gu];
                const double v = elem.v0 + (elem.v1 - elem.v0) * rule.points[gv];
                const double wq = (elem.u1 - elem.u0) * (elem.v1 - elem.v0) * rule.weights[gu] *
                                  rule.weights[gv];
                const MapSample ms = evaluate_map(sol.geometry, u, v);
                const double measure = wq * std::abs(ms.det);

                const PlateFieldSample a = eval_solution(sol, u, v);
                const PlateFieldSample b = reference(u, v);

                const Eigen::Vector2d dtheta = a.theta - b.theta;
                const Eigen::Matrix2d dgrad = a.grad_theta - b.grad_theta;
                const double dw = a.w - b.w;
                const Eigen::Vector2d dgw = a.grad_w - b.grad_w;
                const Eigen::Vector2d dshear = a.shear - b.shear;

                theta_l2 += measure * dtheta.squaredNorm();
                theta_semi += measure * dgrad.squaredNorm();
                w_l2 += measure * dw * dw;
                w_semi += measure * dgw.squaredNorm();
                shear_l2 += measure * dshear.squaredNorm();
            }
    }

    ErrorReport report;
    report.h = physical_mesh_size(sol.geometry, sol.spaces.mesh);
    report.ndof = sol.total_free_dof;
    report.err_theta_l2 = std::sqrt(theta_l2);
    report.err_theta_h1 = std::sqrt(theta_l2 + theta_semi);
    report.err_w_l2 = std::sqrt(w_l2);
    report.err_w_h1 = std::sqrt(w_l2 + w_semi);
    report.err_shear_scaled = sol.thickness * std::sqrt(shear_l2);
    return report;
}

ErrorReport error_norms(const DiscreteSolution& sol, const ReferenceField& reference, int q) {
    return error_norms(sol, reference, q, sol.spaces.mesh);
}

double triple_norm_rot(const RotationField& eta, const ScalarGradField& v, const GeometryMap& geometry,
                       const ParametricMesh& mesh, double t, int q) {
    const QuadratureRule rule = gauss_rule(q);
    double total = 0.0;
    for (const ParametricElement& elem : mesh.elements) {
        const double hk = element_diameter(geometry, elem);
        const double kirchhoff_weight = 1.0 / (t * t + hk * hk);
        double h1 = 0.0, deviation = 0.0;
        for (int gv = 0; gv < q; ++gv)
            for (int gu = 0; gu < q; ++gu) {
                const double u = elem.u0 + (elem.u1 - elem.u0) * rule.points[gu];
                const double vv = elem.v0 + (elem.v1 - elem.v0) * rule.points[gv];
                const double wq = (elem.u1 - elem.u0) * (elem.v1 - elem.v0) * rule.weights[gu] *
                                  rule.weights[gv];
                const MapSample ms = evaluate_map(geometry, u, vv);
                const double measure = wq * std::abs(ms.det);
                const auto [eval, egrad] = eta(u, vv);
                const auto [wval, wgrad] = v(u, vv);
                (void)wval;
                h1 += measure * (eval.squaredNorm() + egrad.squaredNorm());
                deviation += measure * (wgrad - eval).squaredNorm();
            }
        total += h1 + kirchhoff_weight * deviation;
    }
    return total;
}

double triple_norm_shear(const VectorField& s, const GeometryMap& geometry, const ParametricMesh& mesh,
                         double t, int q) {
    const QuadratureRule rule = gauss_rule(q);
    double total = 0.0;
    for (const ParametricElement& elem : mesh.elements) {
        const double hk = element_diameter(geometry, elem);
        double l2 = 0.0;
        for (int gv = 0; gv < q; ++gv)
            for (int gu = 0; gu < q; ++gu) {
                const double u = elem.u0 + (elem.u1 - elem.u0) * rule.points[gu];
                const double vv = elem.v0 + (elem.v1 - elem.v0) * rule.points[gv];
                const double wq = (elem.u1 - elem.u0) * (elem.v1 - elem.v0) * rule.weights[gu] *
                                  rule.weights[gv];
                const MapSample ms = evaluate_map(geometry, u, vv);
                l2 += wq * std::abs(ms.det) * s(u, vv).squaredNorm();
            }
        total += (t * t + hk * hk) * l2;
    }
    return total;
}

std::vector<std::optional<double>> convergence_slope(const std::vector<double>& errors,
                                                     const std::vector<double>& hs) {
    if (errors.size() != hs.size())
        throw InvalidArgument("convergence_slope: errors and hs must have equal length");
    for (std::size_t i = 1; i < hs.size(); ++i)
        if (!(hs[i] < hs[i - 1]))
            throw InvalidArgument("convergence_slope: hs must be strictly decreasing");
    std::vector<std::optional<double>> slopes;
    for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
        if (errors[i] > 0.0 && errors[i + 1] > 0.0)
            slopes.push_back(std::log(errors[i] / errors[i + 1]) / std::log(hs[i] / hs[i + 1]));
        else
            slopes.push_back(std::nullopt);
    }
    return slopes;
}

double least_squares_slope(const std::vector<double>& errors, const std::vector<double>& hs) {
    if (errors.size() != hs.size() || errors.size() < 2)
        throw InvalidArgument("least_squares_slope: need two or more paired samples");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (!(errors[i] > 0.0))
            continue;
        const double x = std::log(hs[i]);
        const double y = std::log(errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2)
        throw InvalidArgument("least_squares_slope: fewer than two positive errors");
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<double> merge_breakpoints(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> merged = a;
    merged.insert(merged.end(), b.begin(), b.end());
    std::sort(merged.begin(), merged.end());
    std::vector<double> out;
    for (double z : merged)
        if (out.empty() || z - out.back() > 1e-12)
            out.push_back(z);
    if (!out.empty()) {
        out.front() = 0.0;
        out.back() = 1.0;
    }
    return out;
}

} // namespace rmiga
