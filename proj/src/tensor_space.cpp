#include "rmiga/tensor_space.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/QR>

#include "rmiga/errors.hpp"

namespace rmiga {

double ParametricElement::diameter() const {
    return std::hypot(u1 - u0, v1 - v0);
}

ParametricMesh make_mesh(std::vector<double> breakpoints_u, std::vector<double> breakpoints_v) {
    // reuse the knot-vector validation of the breakpoint lists
    KnotVector check_u(1, breakpoints_u, 1);
    KnotVector check_v(1, breakpoints_v, 1);

    ParametricMesh mesh;
    mesh.breakpoints_u = std::move(breakpoints_u);
    mesh.breakpoints_v = std::move(breakpoints_v);

    const int nu = mesh.num_elements_u();
    const int nv = mesh.num_elements_v();
    mesh.elements.reserve(static_cast<std::size_t>(nu) * nv);
    double hmin = std::numeric_limits<double>::max();
    double hmax = 0.0;
    for (int j = 0; j < nv; ++j)
        for (int i = 0; i < nu; ++i) {
            ParametricElement q;
            q.iu = i;
            q.iv = j;
            q.u0 = mesh.breakpoints_u[i];
            q.u1 = mesh.breakpoints_u[i + 1];
            q.v0 = mesh.breakpoints_v[j];
            q.v1 = mesh.breakpoints_v[j + 1];
            const double d = q.diameter();
            hmin = std::min(hmin, d);
            hmax = std::max(hmax, d);
            mesh.elements.push_back(q);
        }
    mesh.global_h = hmax;
    mesh.quasi_uniformity = hmin / hmax;
    return mesh;
}

TensorSpace::TensorSpace(KnotVector kv_u, KnotVector kv_v)
    : u_(std::move(kv_u)), v_(std::move(kv_v)) {}

Eigen::Vector3d TensorSpace::eval(const Eigen::VectorXd& coeffs, double uhat, double vhat) const {
    if (coeffs.size() != size())
        throw InvalidArgument("TensorSpace::eval: coefficient count " + std::to_string(coeffs.size()) +
                              " does not match dimension " + std::to_string(size()));
    const BasisEvaluation bu = eval_basis(u_, uhat, 1);
    const BasisEvaluation bv = eval_basis(v_, vhat, 1);
    Eigen::Vector3d out = Eigen::Vector3d::Zero();
    for (int j = 0; j < bv.count; ++j)
        for (int i = 0; i < bu.count; ++i) {
            const double c = coeffs[index(bu.first_active + i, bv.first_active + j)];
            out[0] += c * bu.value(0, i) * bv.value(0, j);
            out[1] += c * bu.value(1, i) * bv.value(0, j);
            out[2] += c * bu.value(0, i) * bv.value(1, j);
        }
    return out;
}

void BoundarySpec::validate() const {
    const bool pinned = std::any_of(sides.begin(), sides.end(), [](EdgeKind k) {
        return k != EdgeKind::free_edge;
    });
    if (!pinned)
        throw InvalidArgument("BoundarySpec: at least one side must be clamped or simply supported");
}

BoundarySpec BoundarySpec::all(EdgeKind kind) {
    BoundarySpec bc;
    bc.sides = {kind, kind, kind, kind};
    return bc;
}

PlateSpaces make_plate_spaces(int p, int alpha, const ParametricMesh& mesh) {
    if (p < 2)
        throw InvalidArgument("make_plate_spaces: degree p must be >= 2, got " + std::to_string(p));
    if (alpha < 1 || alpha > p - 1)
        throw InvalidArgument("make_plate_spaces: regularity alpha=" + std::to_string(alpha) +
                              " violates 1 <= alpha <= p-1 for p=" + std::to_string(p));
    const int r = p - alpha;
    KnotVector wu(p, mesh.breakpoints_u, r);
    KnotVector wv(p, mesh.breakpoints_v, r);
    KnotVector du = derivative_space(wu);
    KnotVector dv = derivative_space(wv);
    return PlateSpaces{TensorSpace(wu, wv), TensorSpace(du, wv), TensorSpace(wu, dv), mesh, p, alpha};
}

int ConstraintSet::num_fixed(int field) const {
    return static_cast<int>(std::count(fixed[field].begin(), fixed[field].end(), true));
}

int ConstraintSet::num_free(int field) const {
    return static_cast<int>(fixed[field].size()) - num_fixed(field);
}

namespace {

/// Marks the boundary layer of basis functions touching one side of a tensor
/// space: the first/last basis function of the transverse direction.
void mark_side(const TensorSpace& space, Side side, std::vector<bool>& fixed) {
    const int nu = space.size_u();
    const int nv = space.size_v();
    switch (side) {
    case Side::u_min:
        for (int j = 0; j < nv; ++j)
            fixed[space.index(0, j)] = true;
        break;
    case Side::u_max:
        for (int j = 0; j < nv; ++j)
            fixed[space.index(nu - 1, j)] = true;
        break;
    case Side::v_min:
        for (int i = 0; i < nu; ++i)
            fixed[space.index(i, 0)] = true;
        break;
    case Side::v_max:
        for (int i = 0; i < nu; ++i)
            fixed[space.index(i, nv - 1)] = true;
        break;
    }
}

} // namespace

ConstraintSet apply_boundary_conditions(const PlateSpaces& spaces, const BoundarySpec& bc) {
    bc.validate();
    ConstraintSet cs;
    cs.fixed[0].assign(spaces.theta1.size(), false);
    cs.fixed[1].assign(spaces.theta2.size(), false);
    cs.fixed[2].assign(spaces.w.size(), false);

    for (int s = 0; s < 4; ++s) {
        const Side side = static_cast<Side>(s);
        const EdgeKind kind = bc.sides[s];
        if (kind != EdgeKind::free_edge)
            mark_side(spaces.w, side, cs.fixed[2]);
        if (kind == EdgeKind::clamped) {
            mark_side(spaces.theta1, side, cs.fixed[0]);
            mark_side(spaces.theta2, side, cs.fixed[1]);
        } else if (kind == EdgeKind::simply_supported_hard) {
            // tangential rotation only: theta2 runs along u = const sides,
            // theta1 along v = const sides
            if (side == Side::u_min || side == Side::u_max)
                mark_side(spaces.theta2, side, cs.fixed[1]);
            else
                mark_side(spaces.theta1, side, cs.fixed[0]);
        }
    }
    return cs;
}

namespace {

std::vector<double> dense_samples(const std::vector<double>& breakpoints, int per_element) {
    std::vector<double> pts;
    for (std::size_t e = 0; e + 1 < breakpoints.size(); ++e)
        for (int k = 0; k < per_element; ++k)
            pts.push_back(breakpoints[e] +
                          (breakpoints[e + 1] - breakpoints[e]) * (k + 0.5) / per_element);
    return pts;
}

/// Max pointwise least-squares defect of fitting `samples` (values of a target
/// function on the grid xs x ys) in the given tensor space.
double fit_residual(const TensorSpace& space, const std::vector<double>& xs,
                    const std::vector<double>& ys, const Eigen::MatrixXd& samples) {
    const int rows = static_cast<int>(xs.size() * ys.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, space.size());
    Eigen::VectorXd b(rows);
    int row = 0;
    for (std::size_t j = 0; j < ys.size(); ++j)
        for (std::size_t i = 0; i < xs.size(); ++i, ++row) {
            const BasisEvaluation bu = eval_basis(space.u(), xs[i], 0);
            const BasisEvaluation bv = eval_basis(space.v(), ys[j], 0);
            for (int jj = 0; jj < bv.count; ++jj)
                for (int ii = 0; ii < bu.count; ++ii)
                    A(row, space.index(bu.first_active + ii, bv.first_active + jj)) =
                        bu.value(0, ii) * bv.value(0, jj);
            b[row] = samples(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    const Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
    const double scale = std::max(1.0, b.lpNorm<Eigen::Infinity>());
    return (A * c - b).lpNorm<Eigen::Infinity>() / scale;
}

} // namespace

double gradient_representation_residual(const TensorSpace& w, const TensorSpace& t1,
                                        const TensorSpace& t2) {
    const int per_element = w.u().degree() + 3;
    const std::vector<double> xs = dense_samples(w.u().breakpoints(), per_element);
    const std::vector<double> ys = dense_samples(w.v().breakpoints(), per_element);

    // one representative coefficient vector exercising every basis function
    Eigen::VectorXd coeffs(w.size());
    for (int k = 0; k < w.size(); ++k)
        coeffs[k] = std::sin(0.7 * k + 0.3) + 0.01 * k;

    Eigen::MatrixXd du(xs.size(), ys.size());
    Eigen::MatrixXd dv(xs.size(), ys.size());
    for (std::size_t j = 0; j < ys.size(); ++j)
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const Eigen::Vector3d e = w.eval(coeffs, xs[i], ys[j]);
            du(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = e[1];
            dv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = e[2];
        }
    return std::max(fit_residual(t1, xs, ys, du), fit_residual(t2, xs, ys, dv));
}

double verify_gradient_inclusion(const PlateSpaces& spaces) {
    return gradient_representation_residual(spaces.w, spaces.theta1, spaces.theta2);
}

std::array<Eigen::VectorXd, 2> gradient_coefficients(const PlateSpaces& spaces,
                                                     const Eigen::VectorXd& w_coeffs) {
    if (w_coeffs.size() != spaces.w.size())
        throw InvalidArgument("gradient_coefficients: coefficient count does not match W");
    const int nu = spaces.w.size_u();
    const int nv = spaces.w.size_v();

    // d/du: apply the univariate derivative formula to each coefficient row
    Eigen::MatrixXd grid = Eigen::Map<const Eigen::MatrixXd>(w_coeffs.data(), nu, nv);
    Eigen::MatrixXd du = derivative_coefficients(spaces.w.u(), grid);
    Eigen::MatrixXd dv = derivative_coefficients(spaces.w.v(), grid.transpose()).transpose();

    std::array<Eigen::VectorXd, 2> out;
    out[0] = Eigen::Map<const Eigen::VectorXd>(du.data(), du.size());
    out[1] = Eigen::Map<const Eigen::VectorXd>(dv.data(), dv.size());
    return out;
}

namespace {

Eigen::Vector2d eval_pair(const PlateSpaces& spaces, const Eigen::VectorXd& s1,
                          const Eigen::VectorXd& s2, double uhat, double vhat) {
    return {spaces.theta1.eval(s1, uhat, vhat)[0], spaces.theta2.eval(s2, uhat, vhat)[0]};
}

} // namespace

bool check_shear_characterization(const PlateSpaces& spaces, const BoundarySpec& bc,
                                  const Eigen::VectorXd& s1, const Eigen::VectorXd& s2) {
    bc.validate();
    const double scale = std::max({1.0, s1.lpNorm<Eigen::Infinity>(), s2.lpNorm<Eigen::Infinity>()});
    const double tol = 1e-10 * scale;
    const int samples = 64;

    for (int s = 0; s < 4; ++s) {
        const Side side = static_cast<Side>(s);
        const EdgeKind kind = bc.sides[s];
        if (kind != EdgeKind::clamped && kind != EdgeKind::simply_supported_hard)
            continue;
        for (int k = 0; k <= samples; ++k) {
            const double x = static_cast<double>(k) / samples;
            double uhat = 0.0, vhat = 0.0;
            double tangential = 0.0;
            const Eigen::Vector2d val = [&] {
                switch (side) {
                case Side::u_min: uhat = 0.0; vhat = x; break;
                case Side::u_max: uhat = 1.0; vhat = x; break;
                case Side::v_min: uhat = x; vhat = 0.0; break;
                case Side::v_max: uhat = x; vhat = 1.0; break;
                }
                return eval_pair(spaces, s1, s2, uhat, vhat);
            }();
            // tangent along u = const sides is the v axis and vice versa
            tangential = (side == Side::u_min || side == Side::u_max) ? val[1] : val[0];
            if (std::abs(tangential) > tol)
                return false;
        }
    }

    // corners where a soft simply supported closure meets a clamped closure
    struct Corner {
        Side a, b;
        double u, v;
    };
    const Corner corners[4] = {
        {Side::u_min, Side::v_min, 0.0, 0.0},
        {Side::u_max, Side::v_min, 1.0, 0.0},
        {Side::u_min, Side::v_max, 0.0, 1.0},
        {Side::u_max, Side::v_max, 1.0, 1.0},
    };
    for (const Corner& c : corners) {
        const EdgeKind ka = bc.at(c.a);
        const EdgeKind kb = bc.at(c.b);
        const bool mixed = (ka == EdgeKind::simply_supported_soft && kb == EdgeKind::clamped) ||
                           (kb == EdgeKind::simply_supported_soft && ka == EdgeKind::clamped);
        if (!mixed)
            continue;
        const Eigen::Vector2d val = eval_pair(spaces, s1, s2, c.u, c.v);
        if (val.lpNorm<Eigen::Infinity>() > tol)
            return false;
    }
    return true;
}

} // namespace rmiga
