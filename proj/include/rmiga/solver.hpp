#pragma once

#include <functional>

#include "rmiga/assembly.hpp"
#include "rmiga/problem.hpp"

namespace rmiga {

/// Residual-checked solve of the constrained SPD system: Jacobi-equilibrated
/// sparse LDLT with iterative refinement, diagonally preconditioned conjugate
/// gradients as fallback. Guarantees the normwise backward error
///   ||Ax - b|| / (||A|| ||x|| + ||b||) <= tol
/// or throws NumericalError reporting the best value achieved.
Eigen::VectorXd solve(const LinearSystem& system, double tol = 1e-10);

/// Solved plate state: full-space coefficients (fixed slots exactly zero).
struct DiscreteSolution {
    PlateSpaces spaces;
    GeometryMap geometry;
    MaterialParams material;
    double thickness = 0.0;
    Eigen::VectorXd theta1, theta2, w;

    int total_free_dof = 0;
};

/// Assemble, solve, and scatter back to full-space coefficients.
DiscreteSolution solve_plate(const PlateProblem& problem, const PlateSpaces& spaces,
                             const ConstraintSet& constraints, int q, double tol = 1e-10);

/// Physical fields at a parametric point: w and grad w by scalar push-forward,
/// theta covariantly, grad theta through the map's second derivatives, and the
/// recovered shear mu k t^{-2} (theta_h - grad w_h).
PlateFieldSample eval_solution(const DiscreteSolution& sol, double uhat, double vhat);

/// The recovered shear field as a standalone closure over parametric points.
std::function<Eigen::Vector2d(double, double)> recover_shear(const DiscreteSolution& sol);

/// View a solved state as a reference field for error measurement.
ReferenceField as_reference(const DiscreteSolution& sol);

} // namespace rmiga
