#include "rmiga/solver.hpp"

#include <limits>
#include <memory>
#include <sstream>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "rmiga/errors.hpp"

namespace rmiga {

namespace {

// Normwise backward error ||Ax - b|| / (||A|| ||x|| + ||b||). Unlike the plain
// ||b||-relative residual this stays evaluable below tol at small thickness,
// where ||A|| ||x|| >> ||b|| puts an eps * ||A|| ||x|| / ||b|| floor under the
// computed residual.
double relative_residual(const Eigen::SparseMatrix<double>& A, double a_norm,
                         const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
    const double denom = a_norm * x.norm() + b.norm();
    const double num = (A * x - b).norm();
    if (denom == 0.0)
        return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return num / denom;
}

} // namespace

Eigen::VectorXd solve(const LinearSystem& system, double tol) {
    if (!(tol > 0.0))
        throw InvalidArgument("solve: tolerance must be positive");
    const Eigen::SparseMatrix<double>& A = system.matrix;
    const Eigen::VectorXd& b = system.rhs;
    const Eigen::Index n = A.rows();
    if (n == 0)
        return Eigen::VectorXd();

    // Symmetric Jacobi equilibration: the shear penalty scales like t^{-2}, so
    // raw diagonal entries span many orders of magnitude at small thickness.
    Eigen::VectorXd scale(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d = A.coeff(i, i);
        scale[i] = d > 0.0 ? 1.0 / std::sqrt(d) : 1.0;
    }
    const Eigen::SparseMatrix<double> As = scale.asDiagonal() * A * scale.asDiagonal();
    const Eigen::VectorXd bs = scale.asDiagonal() * b;
    const double a_norm = A.norm();

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(As);
    if (ldlt.info() == Eigen::Success) {
        Eigen::VectorXd y = ldlt.solve(bs);
        if (ldlt.info() == Eigen::Success) {
            Eigen::VectorXd x = scale.asDiagonal() * y;
            double res = relative_residual(A, a_norm, x, b);
            for (int pass = 0; pass < 4 && res > tol; ++pass) {
                y += ldlt.solve(bs - As * y);
                const Eigen::VectorXd xr = scale.asDiagonal() * y;
                const double rr = relative_residual(A, a_norm, xr, b);
                if (rr >= res)
                    break;
                x = xr;
                res = rr;
            }
            if (res <= tol)
                return x;
        }
    }

    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                             Eigen::DiagonalPreconditioner<double>>
        cg(As);
    cg.setTolerance(tol * 1e-2);
    cg.setMaxIterations(20 * n);
    const Eigen::VectorXd x = scale.asDiagonal() * cg.solve(bs).eval();
    const double res = relative_residual(A, a_norm, x, b);
    if (!(res <= tol)) {
        std::ostringstream os;
        os << "solve: factorization and conjugate-gradient fallback both failed, achieved relative "
              "residual "
           << res << " > " << tol;
        throw NumericalError(os.str());
    }
    return x;
}

DiscreteSolution solve_plate(const PlateProblem& problem, const PlateSpaces& spaces,
                             const ConstraintSet& constraints, int q, double tol) {
    const LinearSystem system = assemble_system(problem, spaces, constraints, q);
    const Eigen::VectorXd x = solve(system, tol);

    DiscreteSolution sol{spaces,
                         problem.geometry,
                         problem.material,
                         problem.thickness,
                         Eigen::VectorXd::Zero(spaces.theta1.size()),
                         Eigen::VectorXd::Zero(spaces.theta2.size()),
                         Eigen::VectorXd::Zero(spaces.w.size()),
                         system.dofs.total_free};
    Eigen::VectorXd* fields[3] = {&sol.theta1, &sol.theta2, &sol.w};
    for (int f = 0; f < 3; ++f)
        for (std::size_t i = 0; i < system.dofs.to_free[f].size(); ++i) {
            const int idx = system.dofs.to_free[f][i];
            if (idx >= 0)
                (*fields[f])[i] = x[idx];
        }
    return sol;
}

PlateFieldSample eval_solution(const DiscreteSolution& sol, double uhat, double vhat) {
    const MapSample s = evaluate_map(sol.geometry, uhat, vhat);
    const Eigen::Vector3d t1 = sol.spaces.theta1.eval(sol.theta1, uhat, vhat);
    const Eigen::Vector3d t2 = sol.spaces.theta2.eval(sol.theta2, uhat, vhat);
    const Eigen::Vector3d wv = sol.spaces.w.eval(sol.w, uhat, vhat);

    PlateFieldSample out;
    out.w = wv[0];
    out.grad_w = push_forward_scalar(s, {wv[1], wv[2]});
    const Eigen::Vector2d theta_hat{t1[0], t2[0]};
    out.theta = covariant_push_forward(s, theta_hat);
    Eigen::Matrix2d dtheta_hat;
    dtheta_hat << t1[1], t1[2], t2[1], t2[2];
    out.grad_theta = covariant_gradient(s, theta_hat, dtheta_hat);
    const double c = sol.material.shear_modulus() * sol.material.k_shear /
                     (sol.thickness * sol.thickness);
    out.shear = c * (out.theta - out.grad_w);
    return out;
}

std::function<Eigen::Vector2d(double, double)> recover_shear(const DiscreteSolution& sol) {
    auto shared = std::make_shared<DiscreteSolution>(sol);
    return [shared](double uhat, double vhat) { return eval_solution(*shared, uhat, vhat).shear; };
}

ReferenceField as_reference(const DiscreteSolution& sol) {
    auto shared = std::make_shared<DiscreteSolution>(sol);
    return [shared](double uhat, double vhat) { return eval_solution(*shared, uhat, vhat); };
}

} // namespace rmiga
