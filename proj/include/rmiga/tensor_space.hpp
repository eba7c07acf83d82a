#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "rmiga/knot_vector.hpp"

namespace rmiga {

/// Rectangle of the parametric mesh, addressed by per-direction interval ids.
struct ParametricElement {
    int iu = 0;
    int iv = 0;
    double u0 = 0.0, u1 = 0.0, v0 = 0.0, v1 = 0.0;

    double diameter() const;
};

/// Tensor partition of (0,1)^2 induced by per-direction breakpoints.
struct ParametricMesh {
    std::vector<double> breakpoints_u;
    std::vector<double> breakpoints_v;
    std::vector<ParametricElement> elements; // iu fastest
    double global_h = 0.0;                   // max parametric diameter
    double quasi_uniformity = 1.0;           // min h_Q / max h_Q, diagnostic

    int num_elements_u() const { return static_cast<int>(breakpoints_u.size()) - 1; }
    int num_elements_v() const { return static_cast<int>(breakpoints_v.size()) - 1; }
};

ParametricMesh make_mesh(std::vector<double> breakpoints_u, std::vector<double> breakpoints_v);

/// Tensor-product B-spline space with lexicographic numbering i + n_u * j.
class TensorSpace {
public:
    TensorSpace(KnotVector kv_u, KnotVector kv_v);

    const KnotVector& u() const { return u_; }
    const KnotVector& v() const { return v_; }
    const KnotVector& direction(int d) const { return d == 0 ? u_ : v_; }
    int size_u() const { return u_.size(); }
    int size_v() const { return v_.size(); }
    int size() const { return u_.size() * v_.size(); }
    int index(int i, int j) const { return i + u_.size() * j; }

    /// Value and first derivatives of the spline with the given coefficients.
    /// Row 0: value; rows 1,2: d/du, d/dv (parametric).
    Eigen::Vector3d eval(const Eigen::VectorXd& coeffs, double uhat, double vhat) const;

private:
    KnotVector u_;
    KnotVector v_;
};

/// Parametric sides of the unit square in the fixed order used everywhere.
enum class Side { u_min = 0, u_max = 1, v_min = 2, v_max = 3 };

enum class EdgeKind { clamped, simply_supported_hard, simply_supported_soft, free_edge };

/// Per-side boundary conditions, indexed by Side order (u=0, u=1, v=0, v=1).
struct BoundarySpec {
    std::array<EdgeKind, 4> sides = {EdgeKind::clamped, EdgeKind::clamped, EdgeKind::clamped,
                                     EdgeKind::clamped};

    EdgeKind at(Side s) const { return sides[static_cast<int>(s)]; }
    /// At least one side must be clamped or simply supported.
    void validate() const;

    static BoundarySpec all(EdgeKind kind);
};

/// Compatible deflection/rotation spaces on a shared parametric mesh:
/// W spans degree (p,p) regularity (a,a); Theta1 degree (p-1,p) regularity
/// (a-1,a); Theta2 degree (p,p-1) regularity (a,a-1). The gradient of every
/// W function then lies componentwise in (Theta1, Theta2).
struct PlateSpaces {
    TensorSpace w;
    TensorSpace theta1;
    TensorSpace theta2;
    ParametricMesh mesh;
    int degree = 0;
    int regularity = 0;
};

/// Requires p >= 2 and 1 <= alpha <= p-1 so the rotation factors keep
/// regularity >= 0.
PlateSpaces make_plate_spaces(int p, int alpha, const ParametricMesh& mesh);

/// Homogeneous essential constraints per field. Field order throughout the
/// library: 0 = theta1, 1 = theta2, 2 = w.
struct ConstraintSet {
    std::array<std::vector<bool>, 3> fixed;

    int num_fixed(int field) const;
    int num_free(int field) const;
};

ConstraintSet apply_boundary_conditions(const PlateSpaces& spaces, const BoundarySpec& bc);

/// Max pointwise error of representing each gradient component of W in the
/// given target spaces by least squares over a dense sample grid. Small only
/// when the inclusion grad(W) in T1 x T2 actually holds.
double gradient_representation_residual(const TensorSpace& w, const TensorSpace& t1,
                                        const TensorSpace& t2);

/// gradient_representation_residual for the compatible triple itself.
double verify_gradient_inclusion(const PlateSpaces& spaces);

/// Coefficients of grad(w) in (Theta1, Theta2) for w given in W; exact by the
/// spline derivative formula.
std::array<Eigen::VectorXd, 2> gradient_coefficients(const PlateSpaces& spaces,
                                                     const Eigen::VectorXd& w_coeffs);

/// Whether the rotation-space field (s1, s2) satisfies the discrete shear
/// boundary characterization: tangential component zero on hard simply
/// supported and clamped sides, and full vector zero at corners where a soft
/// simply supported closure meets a clamped closure. Sampled along edges.
bool check_shear_characterization(const PlateSpaces& spaces, const BoundarySpec& bc,
                                  const Eigen::VectorXd& s1, const Eigen::VectorXd& s2);

} // namespace rmiga
