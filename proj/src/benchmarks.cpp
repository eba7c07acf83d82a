#include "rmiga/benchmarks.hpp"

#include <algorithm>
#include <cmath>

#include "rmiga/errors.hpp"

namespace rmiga {

namespace {

// Factor polynomials of the clamped-square closed form, all through u = x^2 - x:
// P = u^3 (so psi = P(x) P(y) / 3), Q = x(x-1)(5x^2-5x+1) = u(5u + 1).
struct FactorPolys {
    double P, dP, ddP, Q, dQ;
};

FactorPolys factor_polys(double x) {
    const double u = x * x - x;
    const double du = 2.0 * x - 1.0;
    FactorPolys f;
    f.P = u * u * u;
    f.dP = 3.0 * u * u * du;
    f.ddP = 6.0 * u * (du * du + u);
    f.Q = u * (5.0 * u + 1.0);
    f.dQ = (10.0 * u + 1.0) * du;
    return f;
}

LoadFunction clamped_square_load(const MaterialParams& mat) {
    const double d = mat.bending_modulus();
    return [d](double x, double y) {
        const double ux = x * x - x;
        const double uy = y * y - y;
        const double qx = 5.0 * ux + 1.0;
        const double qy = 5.0 * uy + 1.0;
        return 12.0 * d *
               (uy * qx * (2.0 * uy * uy + ux * qy) + ux * qy * (2.0 * ux * ux + uy * qx));
    };
}

ReferenceField clamped_square_exact(const MaterialParams& mat, double t) {
    // theta = grad psi; grad w = theta - ct grad g with the boundary-layer-free
    // correction g = P(y) Q(x) + P(x) Q(y); shear = 2 D grad g independent of t.
    const double ct = 2.0 * t * t / (5.0 * (1.0 - mat.nu));
    const double cs = 2.0 * mat.bending_modulus();
    return [ct, cs](double x, double y) {
        const FactorPolys fx = factor_polys(x);
        const FactorPolys fy = factor_polys(y);

        PlateFieldSample s;
        const Eigen::Vector2d theta(fx.dP * fy.P / 3.0, fx.P * fy.dP / 3.0);
        const Eigen::Vector2d grad_g(fy.P * fx.dQ + fx.dP * fy.Q, fx.P * fy.dQ + fy.dP * fx.Q);
        s.w = fx.P * fy.P / 3.0 - ct * (fy.P * fx.Q + fx.P * fy.Q);
        s.theta = theta;
        s.grad_w = theta - ct * grad_g;
        s.grad_theta(0, 0) = fx.ddP * fy.P / 3.0;
        s.grad_theta(0, 1) = fx.dP * fy.dP / 3.0;
        s.grad_theta(1, 0) = fx.dP * fy.dP / 3.0;
        s.grad_theta(1, 1) = fx.P * fy.ddP / 3.0;
        s.shear = cs * grad_g;
        return s;
    };
}

LoadFunction annulus_load(const MaterialParams&) {
    return [](double x, double y) { return 1e4 * std::sin(2.0 * std::atan2(y, x)); };
}

std::vector<double> split_bands(const std::vector<double>& bands, int n) {
    std::vector<double> out;
    out.reserve((bands.size() - 1) * n + 1);
    out.push_back(bands.front());
    for (std::size_t s = 0; s + 1 < bands.size(); ++s)
        for (int i = 1; i <= n; ++i)
            out.push_back(bands[s] + (bands[s + 1] - bands[s]) * i / n);
    return out;
}

} // namespace

CaseSpec square_clamped_case() {
    return CaseSpec{
        "case1",
        unit_square_map(),
        BoundarySpec::all(EdgeKind::clamped),
        [](const MaterialParams& m, double) { return clamped_square_load(m); },
        [](const MaterialParams& m, double t) { return clamped_square_exact(m, t); },
    };
}

CaseSpec annulus_hard_case() {
    return CaseSpec{
        "case2",
        quarter_annulus_map(1.0, 2.5),
        BoundarySpec::all(EdgeKind::simply_supported_hard),
        [](const MaterialParams& m, double) { return annulus_load(m); },
        nullptr,
    };
}

CaseSpec annulus_mixed_case(MeshRecipe recipe) {
    BoundarySpec bc;
    bc.sides = {EdgeKind::simply_supported_hard, EdgeKind::simply_supported_hard,
                EdgeKind::simply_supported_soft, EdgeKind::free_edge};
    CaseSpec spec{
        recipe == MeshRecipe::layer_adapted ? "case3-adapted" : "case3-uniform",
        quarter_annulus_map(1.0, 2.5),
        bc,
        [](const MaterialParams& m, double) { return annulus_load(m); },
        nullptr,
    };
    spec.recipe = recipe;
    return spec;
}

CaseSpec case_by_name(const std::string& name) {
    if (name == "case1")
        return square_clamped_case();
    if (name == "case2")
        return annulus_hard_case();
    if (name == "case3-uniform")
        return annulus_mixed_case(MeshRecipe::uniform);
    if (name == "case3-adapted")
        return annulus_mixed_case(MeshRecipe::layer_adapted);
    throw InvalidArgument("case_by_name: unknown case '" + name +
                          "' (expected case1, case2, case3-uniform, or case3-adapted)");
}

ParametricMesh build_mesh(const CaseSpec& spec, int level) {
    if (level < 1)
        throw InvalidArgument("build_mesh: level must be at least 1, got " + std::to_string(level));
    std::vector<double> bands_u = spec.geometry.kv_u.breakpoints();
    std::vector<double> bands_v = spec.geometry.kv_v.breakpoints();
    if (spec.recipe == MeshRecipe::layer_adapted) {
        const double lf = spec.layer_fraction;
        if (!(lf > 0.0) || !(lf < 0.5))
            throw InvalidArgument("build_mesh: layer_fraction must lie in (0, 0.5)");
        bands_v = merge_breakpoints(bands_v, {0.0, lf, 1.0 - lf, 1.0});
    }
    return make_mesh(split_bands(bands_u, level), split_bands(bands_v, level));
}

PlateProblem make_problem(const CaseSpec& spec, const MaterialParams& material, double t) {
    PlateProblem pb{material, t, spec.geometry, spec.bc, spec.load(material, t)};
    pb.validate();
    return pb;
}

DiscreteSolution solve_case(const CaseSpec& spec, const MaterialParams& material, double t, int p,
                            int alpha, int level, int q, double tol) {
    const PlateProblem pb = make_problem(spec, material, t);
    const ParametricMesh mesh = build_mesh(spec, level);
    const PlateSpaces spaces = make_plate_spaces(p, alpha, mesh);
    const ConstraintSet constraints = apply_boundary_conditions(spaces, spec.bc);
    return solve_plate(pb, spaces, constraints, q, tol);
}

namespace {

void validate_levels(const std::vector<int>& levels) {
    if (levels.empty())
        throw InvalidArgument("convergence study: no levels given");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (levels[i] < 1)
            throw InvalidArgument("convergence study: levels must be positive");
        if (i > 0 && levels[i] <= levels[i - 1])
            throw InvalidArgument("convergence study: levels must be strictly increasing");
    }
}

int effective_q(const StudyOptions& opt) { return opt.q > 0 ? opt.q : opt.p + 1; }

} // namespace

DiscreteSolution solve_reference(const CaseSpec& spec, const StudyOptions& opt) {
    validate_levels(opt.levels);
    const int rl = opt.reference_level > 0 ? opt.reference_level : spec.reference_level;
    const int max_level = opt.levels.back();
    if (rl < 4 * max_level)
        throw InvalidArgument("convergence study: reference level " + std::to_string(rl) +
                              " must be at least four times the finest study level " +
                              std::to_string(max_level));
    return solve_case(spec, opt.material, opt.thickness, spec.reference_degree, spec.reference_alpha,
                      rl, spec.reference_degree + 1, opt.tol);
}

StudyResult run_convergence_study(const CaseSpec& spec, const StudyOptions& opt) {
    validate_levels(opt.levels);
    const int alpha = opt.alpha >= 0 ? opt.alpha : opt.p - 1;
    const int q = effective_q(opt);
    const int q_err = std::min(q + 2, 30);

    ReferenceField reference;
    std::shared_ptr<const DiscreteSolution> ref_sol;
    if (spec.exact) {
        reference = spec.exact(opt.material, opt.thickness);
    } else {
        ref_sol = opt.reference ? opt.reference
                                : std::make_shared<const DiscreteSolution>(solve_reference(spec, opt));
        reference = as_reference(*ref_sol);
    }

    StudyResult result;
    for (int level : opt.levels) {
        const DiscreteSolution sol =
            solve_case(spec, opt.material, opt.thickness, opt.p, alpha, level, q, opt.tol);

        StudyRow row;
        row.level = level;
        if (ref_sol) {
            const auto& sm = sol.spaces.mesh;
            const auto& rm = ref_sol->spaces.mesh;
            if (rm.global_h > 0.25 * sm.global_h * (1.0 + 1e-9))
                throw InvalidArgument(
                    "convergence study: reference mesh must be at least four times finer than "
                    "every study mesh");
            const ParametricMesh integration =
                make_mesh(merge_breakpoints(sm.breakpoints_u, rm.breakpoints_u),
                          merge_breakpoints(sm.breakpoints_v, rm.breakpoints_v));
            row.report = error_norms(sol, reference, q_err, integration);
        } else {
            row.report = error_norms(sol, reference, q_err);
        }
        result.rows.push_back(row);
    }

    std::vector<double> hs, errs_theta, errs_w;
    for (const StudyRow& row : result.rows) {
        hs.push_back(row.report.h);
        errs_theta.push_back(row.report.err_theta_h1);
        errs_w.push_back(row.report.err_w_h1);
    }
    const auto slopes_theta = convergence_slope(errs_theta, hs);
    const auto slopes_w = convergence_slope(errs_w, hs);
    for (std::size_t i = 1; i < result.rows.size(); ++i) {
        result.rows[i].slope_theta_h1 = slopes_theta[i - 1];
        result.rows[i].slope_w_h1 = slopes_w[i - 1];
    }
    return result;
}

} // namespace rmiga
