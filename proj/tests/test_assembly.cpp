#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <Eigen/SparseCholesky>

#include "rmiga/assembly.hpp"
#include "rmiga/errors.hpp"
#include "rmiga/geometry.hpp"
#include "rmiga/material.hpp"
#include "rmiga/solver.hpp"
#include "rmiga/tensor_space.hpp"

using namespace rmiga;

namespace {

std::vector<double> uniform_breaks(int n) {
    std::vector<double> z(n + 1);
    for (int i = 0; i <= n; ++i)
        z[i] = double(i) / n;
    return z;
}

PlateProblem square_problem(double t, LoadFunction f, BoundarySpec bc = BoundarySpec::all(EdgeKind::clamped)) {
    return PlateProblem{MaterialParams{}, t, unit_square_map(), bc, std::move(f)};
}

PlateProblem annulus_problem(double t, LoadFunction f, BoundarySpec bc = BoundarySpec::all(EdgeKind::clamped)) {
    return PlateProblem{MaterialParams{}, t, quarter_annulus_map(1.0, 2.5), bc, std::move(f)};
}

Eigen::VectorXd random_free_vector(const DofMap& dofs, unsigned seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::VectorXd x(dofs.total_free);
    for (int i = 0; i < dofs.total_free; ++i)
        x[i] = dist(gen);
    return x;
}

// Scatter a free vector into three full-space coefficient vectors.
std::array<Eigen::VectorXd, 3> scatter_fields(const PlateSpaces& spaces, const DofMap& dofs,
                                              const Eigen::VectorXd& x) {
    std::array<Eigen::VectorXd, 3> out;
    const std::array<int, 3> sizes = {spaces.theta1.size(), spaces.theta2.size(), spaces.w.size()};
    for (int f = 0; f < 3; ++f) {
        out[f] = Eigen::VectorXd::Zero(sizes[f]);
        for (int i = 0; i < sizes[f]; ++i)
            if (dofs.to_free[f][i] >= 0)
                out[f][i] = x[dofs.to_free[f][i]];
    }
    return out;
}

} // namespace

TEST_CASE("free dof numbering is contiguous per block and skips constraints") {
    auto mesh = make_mesh(uniform_breaks(2), uniform_breaks(2));
    auto spaces = make_plate_spaces(3, 2, mesh);
    auto cs = apply_boundary_conditions(spaces, BoundarySpec::all(EdgeKind::clamped));
    auto dofs = DofMap::build(spaces, cs);

    CHECK(dofs.total_free == cs.num_free(0) + cs.num_free(1) + cs.num_free(2));
    CHECK(dofs.block_offset[0] == 0);

    int next = 0;
    for (int f = 0; f < 3; ++f) {
        CHECK(dofs.block_offset[f] == next);
        const int n = int(dofs.to_free[f].size());
        for (int i = 0; i < n; ++i) {
            if (cs.fixed[f][i]) {
                CHECK(dofs.to_free[f][i] == -1);
            } else {
                CHECK(dofs.to_free[f][i] == next);
                ++next;
            }
        }
    }
    CHECK(next == dofs.total_free);
}

TEST_CASE("assembled matrix is bitwise symmetric on a rational geometry") {
    auto mesh = make_mesh(uniform_breaks(3), uniform_breaks(2));
    auto spaces = make_plate_spaces(3, 2, mesh);
    auto pb = annulus_problem(1e-3, [](double x, double y) { return x + 2.0 * y; });
    auto cs = apply_boundary_conditions(spaces, pb.bc);
    auto sys = assemble_system(pb, spaces, cs, 4);

    CHECK(sys.matrix.rows() == sys.dofs.total_free);
    CHECK(sys.rhs.size() == sys.dofs.total_free);

    Eigen::SparseMatrix<double> diff =
        sys.matrix - Eigen::SparseMatrix<double>(sys.matrix.transpose());
    CHECK(diff.norm() == 0.0);
}

TEST_CASE("assembled matrix is positive definite across the thickness range") {
    auto mesh = make_mesh(uniform_breaks(2), uniform_breaks(2));
    auto spaces = make_plate_spaces(2, 1, mesh);
    for (double t : {1e-1, 1e-4}) {
        for (bool square : {true, false}) {
            auto pb = square ? square_problem(t, [](double, double) { return 1.0; })
                             : annulus_problem(t, [](double, double) { return 1.0; });
            auto cs = apply_boundary_conditions(spaces, pb.bc);
            auto sys = assemble_system(pb, spaces, cs, 3);

            Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(sys.matrix);
            REQUIRE(ldlt.info() == Eigen::Success);
            CHECK(ldlt.vectorD().minCoeff() > 0.0);
        }
    }
}

TEST_CASE("zero load gives a zero right-hand side") {
    auto mesh = make_mesh(uniform_breaks(2), uniform_breaks(2));
    auto spaces = make_plate_spaces(3, 2, mesh);
    auto pb = annulus_problem(1e-2, [](double, double) { return 0.0; });
    auto cs = apply_boundary_conditions(spaces, pb.bc);
    auto sys = assemble_system(pb, spaces, cs, 4);
    CHECK(sys.rhs.norm() == 0.0);
}

TEST_CASE("manufactured coefficient vector is reproduced through the matrix") {
    auto mesh = make_mesh(uniform_breaks(3), uniform_breaks(3));
    auto spaces = make_plate_spaces(3, 2, mesh);
    auto pb = annulus_problem(1e-2, [](double, double) { return 1.0; });
    auto cs = apply_boundary_conditions(spaces, pb.bc);
    auto sys = assemble_system(pb, spaces, cs, 4);

    Eigen::VectorXd xstar = random_free_vector(sys.dofs, 1234);
    Eigen::VectorXd b = sys.matrix * xstar;

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(sys.matrix);
    REQUIRE(ldlt.info() == Eigen::Success);
    Eigen::VectorXd x = ldlt.solve(b);
    x += ldlt.solve(b - sys.matrix * x);

    CHECK((x - xstar).norm() <= 1e-8 * xstar.norm());
}

TEST_CASE("default quadrature already integrates the polynomial geometry exactly") {
    // On the unit square the integrands are polynomials, so q = p + 1 Gauss
    // points per direction match a doubled rule to roundoff.
    const int p = 3;
    auto mesh = make_mesh(uniform_breaks(2), uniform_breaks(2));
    auto spaces = make_plate_spaces(p, p - 1, mesh);
    auto pb = square_problem(1e-2, [](double x, double y) { return x * x - y; });
    auto cs = apply_boundary_conditions(spaces, pb.bc);

    auto sys_a = assemble_system(pb, spaces, cs, p + 1);
    auto sys_b = assemble_system(pb, spaces, cs, 2 * (p + 1));

    Eigen::SparseMatrix<double> diff = sys_a.matrix - sys_b.matrix;
    CHECK(diff.norm() <= 1e-13 * sys_b.matrix.norm());
    CHECK((sys_a.rhs - sys_b.rhs).norm() <= 1e-13 * (sys_b.rhs.norm() + 1.0));
}

TEST_CASE("quadrature order outside the tabulated range is rejected") {
    auto mesh = make_mesh(uniform_breaks(1), uniform_breaks(1));
    auto spaces = make_plate_spaces(2, 1, mesh);
    auto pb = square_problem(1e-2, [](double, double) { return 1.0; });
    auto cs = apply_boundary_conditions(spaces, pb.bc);
    CHECK_THROWS_AS(assemble_system(pb, spaces, cs, 0), InvalidArgument);
    CHECK_THROWS_AS(assemble_system(pb, spaces, cs, 31), InvalidArgument);
}

TEST_CASE("degenerate geometry is reported as a numerical failure") {
    GeometryMap bad = unit_square_map();
    for (Eigen::Index i = 0; i < bad.control_points.rows(); ++i)
        bad.control_points(i, 0) = 0.5;

    PlateProblem pb{MaterialParams{}, 1e-2, bad, BoundarySpec::all(EdgeKind::clamped),
                    [](double, double) { return 1.0; }};

    auto mesh = make_mesh(uniform_breaks(1), uniform_breaks(1));
    auto spaces = make_plate_spaces(2, 1, mesh);
    auto cs = apply_boundary_conditions(spaces, pb.bc);
    CHECK_THROWS_AS(assemble_system(pb, spaces, cs, 3), NumericalError);
}

TEST_CASE("energy identity holds for the solved system") {
    auto mesh = make_mesh(uniform_breaks(3), uniform_breaks(3));
    auto spaces = make_plate_spaces(3, 2, mesh);
    auto pb = annulus_problem(1e-3, [](double x, double y) { return 1e4 * (x - y); });
    auto cs = apply_boundary_conditions(spaces, pb.bc);
    auto sys = assemble_system(pb, spaces, cs, 4);

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(sys.matrix);
    REQUIRE(ldlt.info() == Eigen::Success);
    Eigen::VectorXd x = ldlt.solve(sys.rhs);
    x += ldlt.solve(sys.rhs - sys.matrix * x);

    const double energy = x.dot(sys.matrix * x);
    const double work = sys.rhs.dot(x);
    CHECK(energy == doctest::Approx(work).epsilon(1e-10));
}

TEST_CASE("weak residual of the Galerkin solution vanishes against free tests") {
    auto mesh = make_mesh(uniform_breaks(3), uniform_breaks(2));
    auto spaces = make_plate_spaces(3, 2, mesh);
    auto pb = annulus_problem(1e-2, [](double x, double y) { return 1e3 * x * y; });
    auto cs = apply_boundary_conditions(spaces, pb.bc);
    const int q = 4;

    auto sol = solve_plate(pb, spaces, cs, q);
    Eigen::VectorXd r = weak_residual(pb, spaces, cs, as_reference(sol), q);

    auto sys = assemble_system(pb, spaces, cs, q);
    const double scale = std::max(1.0, sys.rhs.lpNorm<Eigen::Infinity>());
    CHECK(r.lpNorm<Eigen::Infinity>() <= 1e-8 * scale);
}

TEST_CASE("mixed form is symmetric and vanishes on the zero triple") {
    auto mesh = make_mesh(uniform_breaks(2), uniform_breaks(2));
    auto spaces = make_plate_spaces(3, 2, mesh);
    auto pb = annulus_problem(1e-2, [](double, double) { return 1.0; });

    FieldTriple zero;
    zero.theta1 = Eigen::VectorXd::Zero(spaces.theta1.size());
    zero.theta2 = Eigen::VectorXd::Zero(spaces.theta2.size());
    zero.w = Eigen::VectorXd::Zero(spaces.w.size());
    zero.shear1 = zero.theta1;
    zero.shear2 = zero.theta2;

    std::mt19937 gen(99);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    auto random_triple = [&]() {
        FieldTriple ft = zero;
        for (auto* vec : {&ft.theta1, &ft.theta2, &ft.w, &ft.shear1, &ft.shear2})
            for (Eigen::Index i = 0; i < vec->size(); ++i)
                (*vec)[i] = dist(gen);
        return ft;
    };
    FieldTriple a = random_triple();
    FieldTriple b = random_triple();

    CHECK(mixed_form_value(pb, spaces, zero, a, 4) == 0.0);
    const double ab = mixed_form_value(pb, spaces, a, b, 4);
    const double ba = mixed_form_value(pb, spaces, b, a, 4);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
}

TEST_CASE("primal solution with recovered shear satisfies the mixed equations") {
    auto mesh = make_mesh(uniform_breaks(3), uniform_breaks(3));
    auto spaces = make_plate_spaces(3, 2, mesh);
    const double t = 1e-2;
    auto pb = annulus_problem(t, [](double x, double y) { return 1e4 * std::sin(x + y); });
    auto cs = apply_boundary_conditions(spaces, pb.bc);
    const int q = 4;

    auto sol = solve_plate(pb, spaces, cs, q);
    auto sys = assemble_system(pb, spaces, cs, q);

    const double c = pb.material.shear_modulus() * pb.material.k_shear / (t * t);
    auto gw = gradient_coefficients(spaces, sol.w);
    FieldTriple primal;
    primal.theta1 = sol.theta1;
    primal.theta2 = sol.theta2;
    primal.w = sol.w;
    primal.shear1 = c * (sol.theta1 - gw[0]);
    primal.shear2 = c * (sol.theta2 - gw[1]);

    Eigen::VectorXd xtest = random_free_vector(sys.dofs, 777);
    auto fields = scatter_fields(spaces, sys.dofs, xtest);
    FieldTriple test;
    test.theta1 = fields[0];
    test.theta2 = fields[1];
    test.w = fields[2];
    // Shear test components multiply beta - grad u - t^2/(mu k) tau, which the
    // recovered shear cancels pointwise, so any values work here.
    test.shear1 = Eigen::VectorXd::Constant(spaces.theta1.size(), 0.37);
    test.shear2 = Eigen::VectorXd::Constant(spaces.theta2.size(), -1.21);

    const double lhs = mixed_form_value(pb, spaces, primal, test, q);
    const double rhs = sys.rhs.dot(xtest);
    const double scale = std::max(std::abs(rhs), 1e-12);
    CHECK(std::abs(lhs - rhs) <= 1e-8 * scale);
}
