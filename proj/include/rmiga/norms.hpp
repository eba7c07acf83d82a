#pragma once

#include <optional>
#include <vector>

#include "rmiga/problem.hpp"
#include "rmiga/solver.hpp"

namespace rmiga {

/// Error measures of one solve against an exact or reference solution.
struct ErrorReport {
    double h = 0.0; // max physical element diameter
    int ndof = 0;   // free dof of the solve
    double err_theta_h1 = 0.0;
    double err_theta_l2 = 0.0;
    double err_w_h1 = 0.0;
    double err_w_l2 = 0.0;
    double err_shear_scaled = 0.0; // t-weighted shear L2 error
};

/// Max physical element diameter (corner diagonals and midedge samples).
double physical_mesh_size(const GeometryMap& geometry, const ParametricMesh& mesh);

/// Element-wise quadrature of the errors between a discrete solution and a
/// reference field, both evaluated at shared parametric points. H1 errors are
/// full norms (value plus gradient). Integration runs over the given
/// integration mesh, which must refine the solution's mesh; pass the union
/// with the reference's breakpoints when the reference is itself discrete.
ErrorReport error_norms(const DiscreteSolution& sol, const ReferenceField& reference, int q,
                        const ParametricMesh& integration_mesh);

/// Convenience overload integrating over the solution's own mesh.
ErrorReport error_norms(const DiscreteSolution& sol, const ReferenceField& reference, int q);

/// Rotation field sample for the discrete triple norms: physical value and
/// gradient at a parametric point.
using RotationField = std::function<std::pair<Eigen::Vector2d, Eigen::Matrix2d>(double, double)>;
using ScalarGradField = std::function<std::pair<double, Eigen::Vector2d>(double, double)>;
using VectorField = std::function<Eigen::Vector2d(double, double)>;

/// Squared mesh-dependent rotation/deflection norm:
///   ||eta||_{H1}^2 + sum_K (t^2 + h_K^2)^{-1} ||grad v - eta||_{L2(K)}^2.
double triple_norm_rot(const RotationField& eta, const ScalarGradField& v, const GeometryMap& geometry,
                       const ParametricMesh& mesh, double t, int q);

/// Squared shear norm: t^2 ||s||^2 + sum_K h_K^2 ||s||_{L2(K)}^2.
double triple_norm_shear(const VectorField& s, const GeometryMap& geometry, const ParametricMesh& mesh,
                         double t, int q);

/// Pairwise slopes log(e_i/e_{i+1}) / log(h_i/h_{i+1}); absent where an error
/// is not positive.
std::vector<std::optional<double>> convergence_slope(const std::vector<double>& errors,
                                                     const std::vector<double>& hs);

/// Least-squares slope of log e against log h over all positive entries.
double least_squares_slope(const std::vector<double>& errors, const std::vector<double>& hs);

/// Union of two breakpoint lists (with tolerance deduplication).
std::vector<double> merge_breakpoints(const std::vector<double>& a, const std::vector<double>& b);

} // namespace rmiga
