#pragma once

#include <iosfwd>
#include <string>

#include <Eigen/Dense>

#include "rmiga/knot_vector.hpp"

namespace rmiga {

/// Map data at one parametric point, including the second derivatives needed
/// to differentiate covariantly mapped vector fields.
struct MapSample {
    Eigen::Vector2d point = Eigen::Vector2d::Zero();
    Eigen::Matrix2d jacobian = Eigen::Matrix2d::Zero(); // columns dF/du, dF/dv
    double det = 0.0;
    Eigen::Matrix2d inv_transpose = Eigen::Matrix2d::Zero();
    Eigen::Vector2d hess_uu = Eigen::Vector2d::Zero();
    Eigen::Vector2d hess_uv = Eigen::Vector2d::Zero();
    Eigen::Vector2d hess_vv = Eigen::Vector2d::Zero();
};

/// Single-patch geometry parametrization F: (0,1)^2 -> Omega as a NURBS
/// surface (all weights 1 for plain B-spline maps). Control net numbered
/// lexicographically: point (i, j) at row i + n_u * j.
struct GeometryMap {
    KnotVector kv_u;
    KnotVector kv_v;
    Eigen::MatrixX2d control_points; // n_u * n_v rows
    Eigen::VectorXd weights;

    int size_u() const { return kv_u.size(); }
    int size_v() const { return kv_v.size(); }
    int index(int i, int j) const { return i + kv_u.size() * j; }
    bool is_rational() const;
};

/// Identity parametrization of the unit square (bilinear, weights 1).
GeometryMap unit_square_map();

/// Exact quarter annulus between the given radii in the first quadrant:
/// u angular (rational quadratic 90-degree arc, weights {1, sqrt(2)/2, 1}),
/// v radial (linear). Requires 0 < r_in < r_out.
GeometryMap quarter_annulus_map(double r_in, double r_out);

/// Map value and derivatives at (uhat, vhat) in [0,1]^2; rational maps use
/// quotient differentiation. Throws NumericalError when |det DF| <= 1e-14.
MapSample evaluate_map(const GeometryMap& map, double uhat, double vhat);

/// Physical gradient of a scalar with the given parametric gradient.
Eigen::Vector2d push_forward_scalar(const MapSample& sample, const Eigen::Vector2d& parametric_gradient);

/// Covariant vector push-forward DF^{-T} v; preserves tangential nullity and
/// maps parametric gradients to physical gradients.
Eigen::Vector2d covariant_push_forward(const MapSample& sample, const Eigen::Vector2d& v);

/// Physical gradient (dtheta_i/dx_j) of the covariantly pushed vector field
/// whose parametric value is theta_hat and parametric jacobian dtheta_hat
/// (columns d/du, d/dv). Uses the map's second derivatives.
Eigen::Matrix2d covariant_gradient(const MapSample& sample, const Eigen::Vector2d& theta_hat,
                                   const Eigen::Matrix2d& dtheta_hat);

/// Same map on knot vectors with the extra breakpoints inserted (projective
/// knot insertion, exact).
GeometryMap refine_geometry(const GeometryMap& map, const std::vector<double>& new_breakpoints_u,
                            const std::vector<double>& new_breakpoints_v);

/// Plain-text control net: degrees, knot counts, the two knot sequences, then
/// n_u * n_v rows "x y w" in net order.
GeometryMap load_geometry(std::istream& in);
GeometryMap load_geometry_file(const std::string& path);
void save_geometry(const GeometryMap& map, std::ostream& out);

} // namespace rmiga
