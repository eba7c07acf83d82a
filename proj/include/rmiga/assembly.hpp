#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "rmiga/problem.hpp"

namespace rmiga {

/// Free-dof numbering over the three fields, block order theta1, theta2, w.
struct DofMap {
    std::array<std::vector<int>, 3> to_free; // field dof -> free index, -1 if fixed
    std::array<int, 3> block_offset = {0, 0, 0};
    int total_free = 0;

    static DofMap build(const PlateSpaces& spaces, const ConstraintSet& constraints);
};

/// Constrained symmetric system over the free dof.
struct LinearSystem {
    Eigen::SparseMatrix<double> matrix;
    Eigen::VectorXd rhs;
    DofMap dofs;
};

/// Galerkin assembly of the bending + shear form with a tensor q x q Gauss
/// rule per element; constrained rows and columns are eliminated. The matrix
/// is bitwise symmetric by construction (each pair entry is computed once).
LinearSystem assemble_system(const PlateProblem& problem, const PlateSpaces& spaces,
                             const ConstraintSet& constraints, int q);

/// Weak residual of the given smooth fields against every free test function:
///   r_i = a(theta*, eta_i) + mu k t^{-2}(theta* - grad w*, eta_i - grad v_i) - (f, v_i).
/// Zero (up to quadrature and roundoff) when the fields solve the problem.
Eigen::VectorXd weak_residual(const PlateProblem& problem, const PlateSpaces& spaces,
                              const ConstraintSet& constraints, const ReferenceField& fields, int q);

/// One discrete (rotation, deflection, shear) triple; rotations and shear as
/// full-space coefficients in (Theta1, Theta2), deflection in W.
struct FieldTriple {
    Eigen::VectorXd theta1, theta2;
    Eigen::VectorXd w;
    Eigen::VectorXd shear1, shear2;
};

/// The symmetric mixed bilinear form with physical shear scaling,
///   B(beta,u,tau; eta,v,s) = a(beta,eta) + (tau, eta - grad v)
///                            + (beta - grad u, s) - t^2/(mu k) (tau, s),
/// evaluated by element quadrature. Recovering tau = mu k t^{-2}(beta - grad u)
/// from a solution of the primal problem makes B(...; eta,v,s) = (f, v).
double mixed_form_value(const PlateProblem& problem, const PlateSpaces& spaces, const FieldTriple& a,
                        const FieldTriple& b, int q);

} // namespace rmiga
