#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "rmiga/errors.hpp"
#include "rmiga/geometry.hpp"
#include "rmiga/quadrature.hpp"
#include "rmiga/solver.hpp"

using namespace rmiga;

namespace {

std::vector<double> uniform_breaks(int n) {
    std::vector<double> z(n + 1);
    for (int i = 0; i <= n; ++i)
        z[i] = double(i) / n;
    return z;
}

LinearSystem wrap(Eigen::SparseMatrix<double> m, Eigen::VectorXd b) {
    LinearSystem sys;
    sys.matrix = std::move(m);
    sys.rhs = std::move(b);
    return sys;
}

// L2 norm of theta_h - grad w_h over the mapped patch.
double pointwise_gap_l2(const DiscreteSolution& sol) {
    const auto& mesh = sol.spaces.mesh;
    auto rule = gauss_rule(4);
    double acc = 0.0;
    for (const auto& el : mesh.elements) {
        for (int a = 0; a < rule.size(); ++a) {
            for (int b = 0; b < rule.size(); ++b) {
                const double uu = el.u0 + (el.u1 - el.u0) * rule.points[a];
                const double vv = el.v0 + (el.v1 - el.v0) * rule.points[b];
                const double wq = rule.weights[a] * rule.weights[b] * (el.u1 - el.u0) * (el.v1 - el.v0);
                auto map = evaluate_map(sol.geometry, uu, vv);
                auto s = eval_solution(sol, uu, vv);
                acc += wq * std::abs(map.det) * (s.theta - s.grad_w).squaredNorm();
            }
        }
    }
    return std::sqrt(acc);
}

} // namespace

TEST_CASE("one by one and identity systems solve exactly") {
    Eigen::SparseMatrix<double> m(1, 1);
    m.insert(0, 0) = 2.0;
    m.makeCompressed();
    Eigen::VectorXd b(1);
    b << 4.0;
    auto x = solve(wrap(m, b));
    CHECK(x.size() == 1);
    CHECK(x[0] == doctest::Approx(2.0).epsilon(1e-14));

    const int n = 7;
    Eigen::SparseMatrix<double> id(n, n);
    for (int i = 0; i < n; ++i)
        id.insert(i, i) = 1.0;
    id.makeCompressed();
    Eigen::VectorXd rhs = Eigen::VectorXd::LinSpaced(n, -3.0, 3.0);
    CHECK((solve(wrap(id, rhs)) - rhs).norm() <= 1e-14);
}

TEST_CASE("dense random SPD system meets the residual guarantee") {
    const int n = 50;
    std::mt19937 gen(42);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m(i, j) = dist(gen);
    Eigen::MatrixXd spd = m.transpose() * m + Eigen::MatrixXd::Identity(n, n);

    Eigen::SparseMatrix<double> a = spd.sparseView();
    a.makeCompressed();
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i)
        b[i] = dist(gen);

    auto sys = wrap(a, b);
    auto x = solve(sys, 1e-10);
    CHECK((sys.matrix * x - b).norm() <= 1e-10 * b.norm());
}

TEST_CASE("singular systems are reported, not returned") {
    Eigen::SparseMatrix<double> z(2, 2);
    z.makeCompressed();
    Eigen::VectorXd b(2);
    b << 1.0, -1.0;
    CHECK_THROWS_AS(solve(wrap(z, b)), NumericalError);
}

TEST_CASE("zero load produces the zero plate state") {
    auto mesh = make_mesh(uniform_breaks(2), uniform_breaks(2));
    auto spaces = make_plate_spaces(2, 1, mesh);
    PlateProblem pb{MaterialParams{}, 1e-3, quarter_annulus_map(1.0, 2.5),
                    BoundarySpec::all(EdgeKind::clamped), [](double, double) { return 0.0; }};
    auto cs = apply_boundary_conditions(spaces, pb.bc);
    auto sol = solve_plate(pb, spaces, cs, 3);

    CHECK(sol.theta1.norm() == 0.0);
    CHECK(sol.theta2.norm() == 0.0);
    CHECK(sol.w.norm() == 0.0);
    CHECK(sol.total_free_dof == cs.num_free(0) + cs.num_free(1) + cs.num_free(2));

    auto shear = recover_shear(sol);
    CHECK(shear(0.3, 0.7).norm() == 0.0);
}

TEST_CASE("fixed coefficients stay exactly zero after a solve") {
    auto mesh = make_mesh(uniform_breaks(2), uniform_breaks(3));
    auto spaces = make_plate_spaces(3, 2, mesh);
    BoundarySpec bc;
    bc.sides = {EdgeKind::clamped, EdgeKind::simply_supported_hard, EdgeKind::simply_supported_soft,
                EdgeKind::free_edge};
    PlateProblem pb{MaterialParams{}, 1e-2, quarter_annulus_map(1.0, 2.5), bc,
                    [](double x, double y) { return 1e4 * x * y; }};
    auto cs = apply_boundary_conditions(spaces, pb.bc);
    auto sol = solve_plate(pb, spaces, cs, 4);

    CHECK(sol.w.norm() > 0.0);
    const std::array<const Eigen::VectorXd*, 3> fields = {&sol.theta1, &sol.theta2, &sol.w};
    for (int f = 0; f < 3; ++f)
        for (Eigen::Index i = 0; i < fields[f]->size(); ++i)
            if (cs.fixed[f][i])
                REQUIRE((*fields[f])[i] == 0.0);
}

TEST_CASE("linear deflection data is reproduced pointwise") {
    auto mesh = make_mesh(uniform_breaks(3), uniform_breaks(2));
    auto spaces = make_plate_spaces(2, 1, mesh);
    const auto& wspace = spaces.w;

    Eigen::VectorXd wc(wspace.size());
    for (int j = 0; j < wspace.size_v(); ++j)
        for (int i = 0; i < wspace.size_u(); ++i)
            wc[wspace.index(i, j)] = wspace.u().greville(i);

    DiscreteSolution sol{spaces,
                         unit_square_map(),
                         MaterialParams{},
                         1e-2,
                         Eigen::VectorXd::Zero(spaces.theta1.size()),
                         Eigen::VectorXd::Zero(spaces.theta2.size()),
                         wc,
                         0};

    const double c = sol.material.shear_modulus() * sol.material.k_shear / (sol.thickness * sol.thickness);
    for (double uu : {0.0, 0.21, 0.5, 0.88, 1.0}) {
        for (double vv : {0.0, 0.34, 0.77, 1.0}) {
            auto s = eval_solution(sol, uu, vv);
            CHECK(s.w == doctest::Approx(uu).epsilon(1e-13));
            CHECK(s.grad_w[0] == doctest::Approx(1.0).epsilon(1e-13));
            CHECK(std::abs(s.grad_w[1]) <= 1e-13);
            CHECK(s.theta.norm() == 0.0);
            CHECK((s.shear + c * Eigen::Vector2d(1.0, 0.0)).norm() <= 1e-13 * c);
        }
    }
}

TEST_CASE("rotation gradient matches a parametric finite difference on the annulus") {
    auto mesh = make_mesh(uniform_breaks(3), uniform_breaks(3));
    auto spaces = make_plate_spaces(3, 2, mesh);
    PlateProblem pb{MaterialParams{}, 1e-2, quarter_annulus_map(1.0, 2.5),
                    BoundarySpec::all(EdgeKind::clamped),
                    [](double x, double y) { return 1e4 * std::sin(x) * y; }};
    auto cs = apply_boundary_conditions(spaces, pb.bc);
    auto sol = solve_plate(pb, spaces, cs, 4);

    const double delta = 1e-6;
    for (auto [uu, vv] : {std::pair{0.31, 0.42}, {0.55, 0.18}, {0.72, 0.66}}) {
        auto map = evaluate_map(pb.geometry, uu, vv);
        auto s = eval_solution(sol, uu, vv);

        Eigen::Matrix2d dtheta_dpar;
        dtheta_dpar.col(0) =
            (eval_solution(sol, uu + delta, vv).theta - eval_solution(sol, uu - delta, vv).theta) /
            (2.0 * delta);
        dtheta_dpar.col(1) =
            (eval_solution(sol, uu, vv + delta).theta - eval_solution(sol, uu, vv - delta).theta) /
            (2.0 * delta);
        Eigen::Matrix2d fd = dtheta_dpar * map.jacobian.inverse();

        const double scale = std::max(1.0, fd.norm());
        CHECK((s.grad_theta - fd).norm() <= 1e-5 * scale);
    }
}

TEST_CASE("recovered shear vanishes when rotations equal the deflection gradient") {
    auto mesh = make_mesh(uniform_breaks(3), uniform_breaks(3));
    auto spaces = make_plate_spaces(3, 2, mesh);

    Eigen::VectorXd wc(spaces.w.size());
    for (int j = 0; j < spaces.w.size_v(); ++j)
        for (int i = 0; i < spaces.w.size_u(); ++i) {
            const double gu = spaces.w.u().greville(i);
            const double gv = spaces.w.v().greville(j);
            wc[spaces.w.index(i, j)] = std::sin(2.0 * gu) * std::cos(gv) + gu * gv;
        }
    auto grad = gradient_coefficients(spaces, wc);

    const double t = 1e-2;
    DiscreteSolution sol{spaces, quarter_annulus_map(1.0, 2.5), MaterialParams{}, t,
                         grad[0], grad[1],                      wc,             0};
    const double c = sol.material.shear_modulus() * sol.material.k_shear / (t * t);

    auto shear = recover_shear(sol);
    for (double uu : {0.05, 0.33, 0.61, 0.97})
        for (double vv : {0.12, 0.48, 0.85})
            CHECK(shear(uu, vv).norm() <= 1e-9 * c);
}

TEST_CASE("pointwise rotation-gradient gap scales like thickness squared") {
    auto mesh = make_mesh(uniform_breaks(4), uniform_breaks(4));
    auto spaces = make_plate_spaces(3, 2, mesh);
    std::vector<double> ratios;
    for (double t : {1e-2, 1e-3, 1e-4}) {
        PlateProblem pb{MaterialParams{}, t, unit_square_map(), BoundarySpec::all(EdgeKind::clamped),
                        [](double, double) { return 1.0; }};
        auto cs = apply_boundary_conditions(spaces, pb.bc);
        auto sol = solve_plate(pb, spaces, cs, 4);
        ratios.push_back(pointwise_gap_l2(sol) / (t * t));
    }
    for (std::size_t i = 1; i < ratios.size(); ++i) {
        CHECK(ratios[i] > 0.0);
        CHECK(ratios[i] / ratios[i - 1] > 0.7);
        CHECK(ratios[i] / ratios[i - 1] < 1.3);
    }
}
