#include "rmiga/geometry.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "rmiga/errors.hpp"

namespace rmiga {

bool GeometryMap::is_rational() const {
    for (Eigen::Index i = 0; i < weights.size(); ++i)
        if (std::abs(weights[i] - 1.0) > 1e-15)
            return true;
    return false;
}

GeometryMap unit_square_map() {
    GeometryMap map{KnotVector(1, {0.0, 1.0}, 1), KnotVector(1, {0.0, 1.0}, 1),
                    Eigen::MatrixX2d(4, 2), Eigen::VectorXd::Ones(4)};
    map.control_points << 0, 0, 1, 0, 0, 1, 1, 1;
    return map;
}

GeometryMap quarter_annulus_map(double r_in, double r_out) {
    if (!(r_in > 0.0 && r_out > r_in))
        throw InvalidArgument("quarter_annulus_map: radii must satisfy 0 < r_in < r_out, got r_in=" +
                              std::to_string(r_in) + ", r_out=" + std::to_string(r_out));
    GeometryMap map{KnotVector(2, {0.0, 1.0}, 1), KnotVector(1, {0.0, 1.0}, 1),
                    Eigen::MatrixX2d(6, 2), Eigen::VectorXd(6)};
    // unit arc control polygon (1,0), (1,1), (0,1) scaled by each radius
    const double radii[2] = {r_in, r_out};
    const double arc_w[3] = {1.0, std::sqrt(2.0) / 2.0, 1.0};
    const double arc_x[3] = {1.0, 1.0, 0.0};
    const double arc_y[3] = {0.0, 1.0, 1.0};
    for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 3; ++i) {
            map.control_points(map.index(i, j), 0) = radii[j] * arc_x[i];
            map.control_points(map.index(i, j), 1) = radii[j] * arc_y[i];
            map.weights(map.index(i, j)) = arc_w[i];
        }
    return map;
}

MapSample evaluate_map(const GeometryMap& map, double uhat, double vhat) {
    const int ndu = std::min(2, map.kv_u.degree());
    const int ndv = std::min(2, map.kv_v.degree());
    const BasisEvaluation bu = eval_basis(map.kv_u, uhat, ndu);
    const BasisEvaluation bv = eval_basis(map.kv_v, vhat, ndv);
    auto du = [&](int d, int k) { return d <= ndu ? bu.value(d, k) : 0.0; };
    auto dv = [&](int d, int k) { return d <= ndv ? bv.value(d, k) : 0.0; };

    // weighted numerator A = sum w_ij c_ij B_i B_j and denominator W, with all
    // parametric derivatives up to second order
    Eigen::Vector2d A[3][3];
    double W[3][3];
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            A[a][b].setZero();
            W[a][b] = 0.0;
        }
    for (int j = 0; j < bv.count; ++j)
        for (int i = 0; i < bu.count; ++i) {
            const int g = map.index(bu.first_active + i, bv.first_active + j);
            const double w = map.weights[g];
            const Eigen::Vector2d cw = w * map.control_points.row(g).transpose();
            for (int a = 0; a + 0 < 3; ++a)
                for (int b = 0; a + b < 3; ++b) {
                    const double basis = du(a, i) * dv(b, j);
                    A[a][b] += basis * cw;
                    W[a][b] += basis * w;
                }
        }

    MapSample s;
    const double w0 = W[0][0];
    s.point = A[0][0] / w0;
    const Eigen::Vector2d Su = (A[1][0] - W[1][0] * s.point) / w0;
    const Eigen::Vector2d Sv = (A[0][1] - W[0][1] * s.point) / w0;
    s.jacobian.col(0) = Su;
    s.jacobian.col(1) = Sv;
    s.hess_uu = (A[2][0] - 2.0 * W[1][0] * Su - W[2][0] * s.point) / w0;
    s.hess_uv = (A[1][1] - W[1][0] * Sv - W[0][1] * Su - W[1][1] * s.point) / w0;
    s.hess_vv = (A[0][2] - 2.0 * W[0][1] * Sv - W[0][2] * s.point) / w0;

    s.det = s.jacobian(0, 0) * s.jacobian(1, 1) - s.jacobian(0, 1) * s.jacobian(1, 0);
    if (!(std::abs(s.det) > 1e-14))
        throw NumericalError("evaluate_map: singular jacobian (det=" + std::to_string(s.det) +
                             ") at parametric point (" + std::to_string(uhat) + ", " +
                             std::to_string(vhat) + ")");
    Eigen::Matrix2d inv;
    inv << s.jacobian(1, 1), -s.jacobian(0, 1), -s.jacobian(1, 0), s.jacobian(0, 0);
    inv /= s.det;
    s.inv_transpose = inv.transpose();
    return s;
}

Eigen::Vector2d push_forward_scalar(const MapSample& sample, const Eigen::Vector2d& parametric_gradient) {
    return sample.inv_transpose * parametric_gradient;
}

Eigen::Vector2d covariant_push_forward(const MapSample& sample, const Eigen::Vector2d& v) {
    return sample.inv_transpose * v;
}

Eigen::Matrix2d covariant_gradient(const MapSample& sample, const Eigen::Vector2d& theta_hat,
                                   const Eigen::Matrix2d& dtheta_hat) {
    const Eigen::Matrix2d& A = sample.inv_transpose;
    // d(DF^{-T})/du_k = -A H_k^T A with H_k the derivative of the jacobian
    Eigen::Matrix2d Hu, Hv;
    Hu.col(0) = sample.hess_uu;
    Hu.col(1) = sample.hess_uv;
    Hv.col(0) = sample.hess_uv;
    Hv.col(1) = sample.hess_vv;
    const Eigen::Matrix2d Au = -A * Hu.transpose() * A;
    const Eigen::Matrix2d Av = -A * Hv.transpose() * A;

    Eigen::Matrix2d P;
    P.col(0) = Au * theta_hat + A * dtheta_hat.col(0);
    P.col(1) = Av * theta_hat + A * dtheta_hat.col(1);
    return P * sample.jacobian.inverse();
}

GeometryMap refine_geometry(const GeometryMap& map, const std::vector<double>& new_breakpoints_u,
                            const std::vector<double>& new_breakpoints_v) {
    // projective control points (w x, w y, w)
    Eigen::MatrixXd hom(map.control_points.rows(), 3);
    hom.col(0) = map.control_points.col(0).cwiseProduct(map.weights);
    hom.col(1) = map.control_points.col(1).cwiseProduct(map.weights);
    hom.col(2) = map.weights;

    GeometryMap out = map;
    if (!new_breakpoints_u.empty()) {
        const KnotVector fine = insert_knots(out.kv_u, new_breakpoints_u);
        const int nv = out.kv_v.size();
        Eigen::MatrixXd next(fine.size() * nv, 3);
        for (int j = 0; j < nv; ++j) {
            const Eigen::MatrixXd rows = hom.middleRows(j * out.kv_u.size(), out.kv_u.size());
            next.middleRows(j * fine.size(), fine.size()) = refine_coefficients(out.kv_u, fine, rows);
        }
        hom = std::move(next);
        out.kv_u = fine;
    }
    if (!new_breakpoints_v.empty()) {
        const KnotVector fine = insert_knots(out.kv_v, new_breakpoints_v);
        const int nu = out.kv_u.size();
        // v-direction coefficients are strided; regroup per column index i
        Eigen::MatrixXd next(nu * fine.size(), 3);
        Eigen::MatrixXd column(out.kv_v.size(), 3);
        for (int i = 0; i < nu; ++i) {
            for (int j = 0; j < out.kv_v.size(); ++j)
                column.row(j) = hom.row(i + nu * j);
            const Eigen::MatrixXd refined = refine_coefficients(out.kv_v, fine, column);
            for (int j = 0; j < fine.size(); ++j)
                next.row(i + nu * j) = refined.row(j);
        }
        hom = std::move(next);
        out.kv_v = fine;
    }

    out.weights = hom.col(2);
    out.control_points.resize(hom.rows(), 2);
    out.control_points.col(0) = hom.col(0).cwiseQuotient(out.weights);
    out.control_points.col(1) = hom.col(1).cwiseQuotient(out.weights);
    return out;
}

namespace {

KnotVector knot_vector_from_sequence(int degree, const std::vector<double>& knots) {
    const int n = static_cast<int>(knots.size()) - degree - 1;
    if (n < degree + 1)
        throw InvalidArgument("load_geometry: knot sequence too short for degree " +
                              std::to_string(degree));
    for (int i = 0; i <= degree; ++i)
        if (knots[i] != 0.0 || knots[knots.size() - 1 - i] != 1.0)
            throw InvalidArgument("load_geometry: knot sequence must be open on [0,1] with boundary "
                                  "multiplicity degree+1");
    std::map<double, int> interior;
    for (std::size_t i = degree + 1; i + degree + 1 < knots.size(); ++i)
        interior[knots[i]] += 1;
    int mult = -1;
    std::vector<double> breakpoints{0.0};
    for (const auto& [z, m] : interior) {
        if (mult == -1)
            mult = m;
        else if (m != mult)
            throw InvalidArgument("load_geometry: interior knot multiplicities must be uniform");
        breakpoints.push_back(z);
    }
    breakpoints.push_back(1.0);
    return KnotVector(degree, std::move(breakpoints), mult == -1 ? 1 : mult);
}

} // namespace

GeometryMap load_geometry(std::istream& in) {
    int pu = 0, pv = 0, nku = 0, nkv = 0;
    if (!(in >> pu >> pv >> nku >> nkv))
        throw InvalidArgument("load_geometry: expected header 'degree_u degree_v nknots_u nknots_v'");
    if (pu < 1 || pv < 1 || nku < 2 * (pu + 1) || nkv < 2 * (pv + 1))
        throw InvalidArgument("load_geometry: invalid degrees or knot counts in header");
    std::vector<double> ku(nku), kvv(nkv);
    for (double& x : ku)
        if (!(in >> x))
            throw InvalidArgument("load_geometry: truncated u knot sequence");
    for (double& x : kvv)
        if (!(in >> x))
            throw InvalidArgument("load_geometry: truncated v knot sequence");

    GeometryMap map{knot_vector_from_sequence(pu, ku), knot_vector_from_sequence(pv, kvv),
                    Eigen::MatrixX2d(), Eigen::VectorXd()};
    const int n = map.size_u() * map.size_v();
    map.control_points.resize(n, 2);
    map.weights.resize(n);
    for (int k = 0; k < n; ++k) {
        double x, y, w;
        if (!(in >> x >> y >> w))
            throw InvalidArgument("load_geometry: expected " + std::to_string(n) +
                                  " control rows 'x y w', file ends at row " + std::to_string(k));
        if (!(w > 0.0))
            throw InvalidArgument("load_geometry: weights must be positive, row " + std::to_string(k));
        map.control_points(k, 0) = x;
        map.control_points(k, 1) = y;
        map.weights(k) = w;
    }
    return map;
}

GeometryMap load_geometry_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw InvalidArgument("load_geometry: cannot open '" + path + "'");
    return load_geometry(in);
}

void save_geometry(const GeometryMap& map, std::ostream& out) {
    out.precision(17);
    out << map.kv_u.degree() << " " << map.kv_v.degree() << "\n";
    out << map.kv_u.knots().size() << " " << map.kv_v.knots().size() << "\n";
    for (std::size_t i = 0; i < map.kv_u.knots().size(); ++i)
        out << (i ? " " : "") << map.kv_u.knots()[i];
    out << "\n";
    for (std::size_t i = 0; i < map.kv_v.knots().size(); ++i)
        out << (i ? " " : "") << map.kv_v.knots()[i];
    out << "\n";
    for (Eigen::Index k = 0; k < map.control_points.rows(); ++k)
        out << map.control_points(k, 0) << " " << map.control_points(k, 1) << " " << map.weights(k)
            << "\n";
}

} // namespace rmiga
