#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "rmiga/errors.hpp"
#include "rmiga/tensor_space.hpp"

using namespace rmiga;

namespace {

std::vector<double> uniform_breakpoints(int elements) {
    std::vector<double> z(elements + 1);
    for (int i = 0; i <= elements; ++i)
        z[i] = static_cast<double>(i) / elements;
    return z;
}

ParametricMesh uniform_mesh(int n) {
    return make_mesh(uniform_breakpoints(n), uniform_breakpoints(n));
}

Eigen::VectorXd random_coeffs(int n, unsigned seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::VectorXd c(n);
    for (int i = 0; i < n; ++i)
        c[i] = dist(gen);
    return c;
}

} // namespace

TEST_CASE("parametric mesh structure") {
    const ParametricMesh mesh = uniform_mesh(2);
    CHECK(mesh.elements.size() == 4);
    CHECK(mesh.global_h == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
    CHECK(mesh.quasi_uniformity == doctest::Approx(1.0));

    const ParametricMesh skew = make_mesh({0.0, 0.1, 1.0}, {0.0, 0.5, 1.0});
    CHECK(skew.quasi_uniformity < 1.0);
    CHECK(skew.quasi_uniformity > 0.0);
    double area = 0.0;
    for (const auto& q : skew.elements)
        area += (q.u1 - q.u0) * (q.v1 - q.v0);
    CHECK(area == doctest::Approx(1.0).epsilon(1e-14));

    CHECK_THROWS_AS(make_mesh({0.0, 0.6, 0.4, 1.0}, {0.0, 1.0}), InvalidArgument);
    CHECK_THROWS_AS(make_mesh({0.0, 0.5}, {0.0, 1.0}), InvalidArgument);
}

TEST_CASE("compatible plate spaces have the advertised dimensions") {
    const PlateSpaces s32 = make_plate_spaces(3, 2, uniform_mesh(2));
    CHECK(s32.w.size() == 25);
    CHECK(s32.theta1.size() == 20);
    CHECK(s32.theta2.size() == 20);
    CHECK(s32.theta1.size_u() == s32.w.size_u() - 1);
    CHECK(s32.theta2.size_v() == s32.w.size_v() - 1);

    const PlateSpaces s21 = make_plate_spaces(2, 1, uniform_mesh(1));
    CHECK(s21.w.size_u() == 3);
    CHECK(s21.theta1.size_u() == 2);
    CHECK(s21.theta2.size_v() == 2);

    for (int p = 2; p <= 4; ++p)
        for (int alpha = 1; alpha <= p - 1; ++alpha)
            for (int n : {1, 3, 4}) {
                const PlateSpaces s = make_plate_spaces(p, alpha, uniform_mesh(n));
                const int r = p - alpha;
                const int dim1d = p + 1 + (n - 1) * r;
                CHECK(s.w.size() == dim1d * dim1d);
                CHECK(s.theta1.size_u() == s.w.size_u() - 1);
                CHECK(s.theta1.u().regularity() == alpha - 1);
                CHECK(s.theta2.v().regularity() == alpha - 1);
                CHECK(s.w.u().regularity() == alpha);
            }

    CHECK_THROWS_AS(make_plate_spaces(1, 1, uniform_mesh(2)), InvalidArgument);
    CHECK_THROWS_AS(make_plate_spaces(3, 0, uniform_mesh(2)), InvalidArgument);
    CHECK_THROWS_AS(make_plate_spaces(3, 3, uniform_mesh(2)), InvalidArgument);
}

TEST_CASE("boundary conditions constrain the advertised dof sets") {
    const PlateSpaces spaces = make_plate_spaces(3, 2, uniform_mesh(2));

    SUBCASE("all sides clamped") {
        const ConstraintSet cs = apply_boundary_conditions(spaces, BoundarySpec::all(EdgeKind::clamped));
        CHECK(cs.num_free(2) == 9);
        CHECK(cs.num_free(0) == 6);
        CHECK(cs.num_free(1) == 6);
    }

    SUBCASE("all sides hard simply supported") {
        const ConstraintSet cs =
            apply_boundary_conditions(spaces, BoundarySpec::all(EdgeKind::simply_supported_hard));
        CHECK(cs.num_fixed(2) == 16);
        // theta1 fixed only along v=0 and v=1, theta2 only along u=0 and u=1
        CHECK(cs.num_fixed(0) == 8);
        CHECK(cs.num_fixed(1) == 8);
        for (int i = 0; i < spaces.theta1.size_u(); ++i) {
            CHECK(cs.fixed[0][spaces.theta1.index(i, 0)]);
            CHECK(cs.fixed[0][spaces.theta1.index(i, spaces.theta1.size_v() - 1)]);
        }
        for (int j = 1; j + 1 < spaces.theta1.size_v(); ++j)
            CHECK_FALSE(cs.fixed[0][spaces.theta1.index(0, j)]);
    }

    SUBCASE("soft support and free sides leave rotations alone") {
        BoundarySpec bc;
        bc.sides = {EdgeKind::simply_supported_soft, EdgeKind::free_edge, EdgeKind::free_edge,
                    EdgeKind::free_edge};
        const ConstraintSet cs = apply_boundary_conditions(spaces, bc);
        CHECK(cs.num_fixed(0) == 0);
        CHECK(cs.num_fixed(1) == 0);
        CHECK(cs.num_fixed(2) == spaces.w.size_v());
    }

    SUBCASE("all sides free rejected") {
        CHECK_THROWS_AS(apply_boundary_conditions(spaces, BoundarySpec::all(EdgeKind::free_edge)),
                        InvalidArgument);
    }
}

TEST_CASE("constrained fields vanish on the constrained boundary") {
    BoundarySpec bc;
    bc.sides = {EdgeKind::clamped, EdgeKind::simply_supported_hard, EdgeKind::simply_supported_soft,
                EdgeKind::free_edge};
    for (int level : {2, 4}) {
        const PlateSpaces spaces = make_plate_spaces(3, 2, uniform_mesh(level));
        const ConstraintSet cs = apply_boundary_conditions(spaces, bc);
        Eigen::VectorXd w = random_coeffs(spaces.w.size(), 31 + level);
        Eigen::VectorXd t1 = random_coeffs(spaces.theta1.size(), 41 + level);
        Eigen::VectorXd t2 = random_coeffs(spaces.theta2.size(), 51 + level);
        for (int k = 0; k < w.size(); ++k)
            if (cs.fixed[2][k])
                w[k] = 0.0;
        for (int k = 0; k < t1.size(); ++k)
            if (cs.fixed[0][k])
                t1[k] = 0.0;
        for (int k = 0; k < t2.size(); ++k)
            if (cs.fixed[1][k])
                t2[k] = 0.0;

        for (int s = 0; s <= 50; ++s) {
            const double x = s / 50.0;
            // w constrained on u=0 (clamped), u=1 (hard), v=0 (soft); free on v=1
            CHECK(std::abs(spaces.w.eval(w, 0.0, x)[0]) <= 1e-12);
            CHECK(std::abs(spaces.w.eval(w, 1.0, x)[0]) <= 1e-12);
            CHECK(std::abs(spaces.w.eval(w, x, 0.0)[0]) <= 1e-12);
            // clamped side u=0: both rotation components vanish
            CHECK(std::abs(spaces.theta1.eval(t1, 0.0, x)[0]) <= 1e-12);
            CHECK(std::abs(spaces.theta2.eval(t2, 0.0, x)[0]) <= 1e-12);
            // hard side u=1: tangential component (theta2) vanishes
            CHECK(std::abs(spaces.theta2.eval(t2, 1.0, x)[0]) <= 1e-12);
        }
    }
}

TEST_CASE("gradient inclusion holds for the compatible triple") {
    const std::vector<double> zx = {0.0, 0.21, 0.48, 0.77, 1.0};
    const std::vector<double> zy = {0.0, 0.18, 0.52, 0.8, 1.0};
    for (int p : {2, 3, 4}) {
        const PlateSpaces spaces = make_plate_spaces(p, p - 1, make_mesh(zx, zy));
        CHECK(verify_gradient_inclusion(spaces) <= 1e-10);
    }
    const PlateSpaces bezier = make_plate_spaces(2, 1, uniform_mesh(1));
    CHECK(verify_gradient_inclusion(bezier) <= 1e-12);
}

TEST_CASE("gradient inclusion check has teeth") {
    const int p = 3, alpha = 2;
    const ParametricMesh mesh = make_mesh({0.0, 0.3, 0.65, 1.0}, {0.0, 0.4, 0.7, 1.0});
    const PlateSpaces spaces = make_plate_spaces(p, alpha, mesh);
    // too-smooth rotation spaces: degree (p,p) with regularity alpha in both
    // directions cannot hold the less regular derivative
    const TensorSpace wrong(KnotVector(p, mesh.breakpoints_u, p - alpha),
                            KnotVector(p, mesh.breakpoints_v, p - alpha));
    CHECK(gradient_representation_residual(spaces.w, wrong, wrong) > 1e-4);
}

TEST_CASE("exact gradient coefficients") {
    const PlateSpaces spaces = make_plate_spaces(3, 2, make_mesh({0.0, 0.25, 0.6, 1.0}, {0.0, 0.5, 1.0}));
    const Eigen::VectorXd w = random_coeffs(spaces.w.size(), 77);
    const auto grad = gradient_coefficients(spaces, w);
    REQUIRE(grad[0].size() == spaces.theta1.size());
    REQUIRE(grad[1].size() == spaces.theta2.size());
    std::mt19937 gen(5);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int s = 0; s < 100; ++s) {
        const double u = dist(gen), v = dist(gen);
        const Eigen::Vector3d we = spaces.w.eval(w, u, v);
        CHECK(spaces.theta1.eval(grad[0], u, v)[0] == doctest::Approx(we[1]).epsilon(1e-11));
        CHECK(spaces.theta2.eval(grad[1], u, v)[0] == doctest::Approx(we[2]).epsilon(1e-11));
    }
}

TEST_CASE("discrete shear boundary characterization") {
    const PlateSpaces spaces = make_plate_spaces(3, 2, uniform_mesh(3));

    SUBCASE("zero field passes") {
        const Eigen::VectorXd z1 = Eigen::VectorXd::Zero(spaces.theta1.size());
        const Eigen::VectorXd z2 = Eigen::VectorXd::Zero(spaces.theta2.size());
        CHECK(check_shear_characterization(spaces, BoundarySpec::all(EdgeKind::clamped), z1, z2));
    }

    SUBCASE("gradient of a constrained deflection passes under clamping") {
        const ConstraintSet cs =
            apply_boundary_conditions(spaces, BoundarySpec::all(EdgeKind::clamped));
        Eigen::VectorXd w = random_coeffs(spaces.w.size(), 13);
        for (int k = 0; k < w.size(); ++k)
            if (cs.fixed[2][k])
                w[k] = 0.0;
        const auto grad = gradient_coefficients(spaces, w);
        CHECK(check_shear_characterization(spaces, BoundarySpec::all(EdgeKind::clamped), grad[0],
                                           grad[1]));
    }

    SUBCASE("constant field fails tangential condition on a clamped side") {
        BoundarySpec bc;
        bc.sides = {EdgeKind::clamped, EdgeKind::free_edge, EdgeKind::free_edge, EdgeKind::free_edge};
        // s = (0,1): tangent along u=0 is the second component
        const Eigen::VectorXd s1 = Eigen::VectorXd::Zero(spaces.theta1.size());
        const Eigen::VectorXd s2 = Eigen::VectorXd::Ones(spaces.theta2.size());
        CHECK_FALSE(check_shear_characterization(spaces, bc, s1, s2));
        // s = (1,0) has zero tangential component there
        const Eigen::VectorXd o1 = Eigen::VectorXd::Ones(spaces.theta1.size());
        const Eigen::VectorXd z2 = Eigen::VectorXd::Zero(spaces.theta2.size());
        CHECK(check_shear_characterization(spaces, bc, o1, z2));
    }

    SUBCASE("corner shared by soft and clamped closures") {
        BoundarySpec bc;
        bc.sides = {EdgeKind::clamped, EdgeKind::free_edge, EdgeKind::simply_supported_soft,
                    EdgeKind::free_edge};
        Eigen::VectorXd s1 = Eigen::VectorXd::Zero(spaces.theta1.size());
        const Eigen::VectorXd s2 = Eigen::VectorXd::Zero(spaces.theta2.size());
        s1[spaces.theta1.index(0, 0)] = 1.0; // nonzero normal component at (0,0)
        CHECK_FALSE(check_shear_characterization(spaces, bc, s1, s2));
        s1[spaces.theta1.index(0, 0)] = 0.0;
        s1[spaces.theta1.index(2, 2)] = 1.0; // interior bump is fine
        CHECK(check_shear_characterization(spaces, bc, s1, s2));
    }
}
