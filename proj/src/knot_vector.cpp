#include "rmiga/knot_vector.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "rmiga/errors.hpp"

namespace rmiga {

namespace {

constexpr double kKnotTol = 1e-14; // knots live in [0,1]

std::string describe(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

} // namespace

KnotVector::KnotVector(int degree, std::vector<double> breakpoints, int interior_multiplicity)
    : degree_(degree), multiplicity_(interior_multiplicity), breakpoints_(std::move(breakpoints)) {
    if (degree_ < 0)
        throw InvalidArgument("KnotVector: degree must be >= 0, got " + std::to_string(degree_));
    if (multiplicity_ < 1 || multiplicity_ > degree_ + 1)
        throw InvalidArgument("KnotVector: interior multiplicity r=" + std::to_string(multiplicity_) +
                              " outside [1, degree+1] for degree " + std::to_string(degree_));
    if (breakpoints_.size() < 2)
        throw InvalidArgument("KnotVector: breakpoints must contain at least {0, 1}");
    if (std::abs(breakpoints_.front()) > kKnotTol || std::abs(breakpoints_.back() - 1.0) > kKnotTol)
        throw InvalidArgument("KnotVector: breakpoints must start at 0 and end at 1");
    breakpoints_.front() = 0.0;
    breakpoints_.back() = 1.0;
    for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
        if (!(breakpoints_[i] > breakpoints_[i - 1] + kKnotTol))
            throw InvalidArgument("KnotVector: breakpoints must be strictly increasing, offending value " +
                                  describe(breakpoints_[i]));
    }

    const int m = num_breakpoints();
    size_ = degree_ + 1 + (m - 2) * multiplicity_;
    knots_.reserve(size_ + degree_ + 1);
    knots_.insert(knots_.end(), degree_ + 1, 0.0);
    for (int i = 1; i + 1 < m; ++i)
        knots_.insert(knots_.end(), multiplicity_, breakpoints_[i]);
    knots_.insert(knots_.end(), degree_ + 1, 1.0);
}

int KnotVector::find_span(double x) const {
    if (x >= 1.0)
        return size_ - 1; // left limit at the right end
    auto it = std::upper_bound(knots_.begin() + degree_, knots_.begin() + size_ + 1, x);
    return static_cast<int>(it - knots_.begin()) - 1;
}

int KnotVector::element_of(double x) const {
    return (find_span(x) - degree_) / multiplicity_;
}

double KnotVector::greville(int i) const {
    if (degree_ == 0)
        return 0.5 * (knots_[i] + knots_[i + 1]);
    double s = 0.0;
    for (int j = 1; j <= degree_; ++j)
        s += knots_[i + j];
    return s / degree_;
}

bool KnotVector::operator==(const KnotVector& other) const {
    if (degree_ != other.degree_ || multiplicity_ != other.multiplicity_ ||
        breakpoints_.size() != other.breakpoints_.size())
        return false;
    for (std::size_t i = 0; i < breakpoints_.size(); ++i)
        if (std::abs(breakpoints_[i] - other.breakpoints_[i]) > kKnotTol)
            return false;
    return true;
}

KnotVector make_knot_vector(int degree, std::vector<double> breakpoints, int interior_multiplicity) {
    return KnotVector(degree, std::move(breakpoints), interior_multiplicity);
}

BasisEvaluation eval_basis(const KnotVector& kv, double x, int nderiv) {
    if (!(x >= 0.0 && x <= 1.0))
        throw InvalidArgument("eval_basis: x=" + describe(x) + " outside [0,1]");
    if (nderiv < 0 || nderiv > kv.degree())
        throw InvalidArgument("eval_basis: nderiv=" + std::to_string(nderiv) +
                              " outside [0, degree=" + std::to_string(kv.degree()) + "]");

    const int p = kv.degree();
    const int span = kv.find_span(x);
    const auto& U = kv.knots();

    BasisEvaluation out;
    out.first_active = span - p;
    out.nderiv = nderiv;
    out.count = p + 1;
    out.table.assign((nderiv + 1) * (p + 1), 0.0);

    // Cox-de Boor over the active span with the derivative bookkeeping of the
    // classical DersBasisFuns procedure.
    std::vector<double> ndu((p + 1) * (p + 1));
    std::vector<double> left(p + 1), right(p + 1);
    auto at = [&ndu, p](int i, int j) -> double& { return ndu[i * (p + 1) + j]; };

    at(0, 0) = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = x - U[span + 1 - j];
        right[j] = U[span + j] - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            at(j, r) = right[r + 1] + left[j - r];
            const double temp = at(r, j - 1) / at(j, r);
            at(r, j) = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        at(j, j) = saved;
    }
    for (int j = 0; j <= p; ++j)
        out.table[j] = at(j, p);

    if (nderiv > 0) {
        std::vector<double> a(2 * (p + 1));
        for (int r = 0; r <= p; ++r) {
            int s1 = 0, s2 = 1;
            a[0] = 1.0;
            for (int k = 1; k <= nderiv; ++k) {
                double d = 0.0;
                const int rk = r - k;
                const int pk = p - k;
                if (r >= k) {
                    a[s2 * (p + 1)] = a[s1 * (p + 1)] / at(pk + 1, rk);
                    d = a[s2 * (p + 1)] * at(rk, pk);
                }
                const int j1 = (rk >= -1) ? 1 : -rk;
                const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
                for (int j = j1; j <= j2; ++j) {
                    a[s2 * (p + 1) + j] =
                        (a[s1 * (p + 1) + j] - a[s1 * (p + 1) + j - 1]) / at(pk + 1, rk + j);
                    d += a[s2 * (p + 1) + j] * at(rk + j, pk);
                }
                if (r <= pk) {
                    a[s2 * (p + 1) + k] = -a[s1 * (p + 1) + k - 1] / at(pk + 1, r);
                    d += a[s2 * (p + 1) + k] * at(r, pk);
                }
                out.table[k * (p + 1) + r] = d;
                std::swap(s1, s2);
            }
        }
        double factor = p;
        for (int k = 1; k <= nderiv; ++k) {
            for (int j = 0; j <= p; ++j)
                out.table[k * (p + 1) + j] *= factor;
            factor *= (p - k);
        }
    }
    return out;
}

KnotVector derivative_space(const KnotVector& kv) {
    if (kv.degree() < 1 || kv.regularity() < 0)
        throw InvalidArgument("derivative_space: unsupported space, needs degree >= 1 and regularity >= 0 "
                              "(got degree " + std::to_string(kv.degree()) + ", regularity " +
                              std::to_string(kv.regularity()) + ")");
    return KnotVector(kv.degree() - 1, kv.breakpoints(), kv.interior_multiplicity());
}

KnotVector insert_knots(const KnotVector& kv, const std::vector<double>& new_breakpoints) {
    std::vector<double> merged = kv.breakpoints();
    for (double z : new_breakpoints) {
        if (!(z > kKnotTol && z < 1.0 - kKnotTol))
            throw InvalidArgument("insert_knots: breakpoint " + describe(z) +
                                  " must lie strictly inside (0,1)");
        for (double existing : merged)
            if (std::abs(existing - z) <= kKnotTol)
                throw InvalidArgument("insert_knots: breakpoint " + describe(z) + " already present");
        merged.push_back(z);
    }
    std::sort(merged.begin(), merged.end());
    return KnotVector(kv.degree(), std::move(merged), kv.interior_multiplicity());
}

KnotVector uniform_refine(const KnotVector& kv, int parts) {
    if (parts < 1)
        throw InvalidArgument("uniform_refine: parts must be >= 1");
    if (parts == 1)
        return kv;
    const auto& Z = kv.breakpoints();
    std::vector<double> inserted;
    for (std::size_t e = 0; e + 1 < Z.size(); ++e)
        for (int k = 1; k < parts; ++k)
            inserted.push_back(Z[e] + (Z[e + 1] - Z[e]) * k / parts);
    return insert_knots(kv, inserted);
}

KnotVector degree_elevate(const KnotVector& kv, int target_degree) {
    if (target_degree < kv.degree())
        throw InvalidArgument("degree_elevate: target degree " + std::to_string(target_degree) +
                              " below current degree " + std::to_string(kv.degree()));
    const int raise = target_degree - kv.degree();
    return KnotVector(target_degree, kv.breakpoints(), kv.interior_multiplicity() + raise);
}

double eval_spline(const KnotVector& kv, const Eigen::VectorXd& coeffs, double x, int deriv) {
    const BasisEvaluation b = eval_basis(kv, x, deriv);
    double s = 0.0;
    for (int k = 0; k < b.count; ++k)
        s += coeffs[b.first_active + k] * b.value(deriv, k);
    return s;
}

namespace {

// Single-knot (Boehm) insertion applied to the raw knot sequence and the
// coefficient rows. Adapted for clamped knot vectors on [0,1].
void boehm_insert(std::vector<double>& knots, int p, Eigen::MatrixXd& coeffs, double u) {
    const int n = static_cast<int>(coeffs.rows());
    // span k with knots[k] <= u < knots[k+1], left limit not needed (u in (0,1))
    int k = static_cast<int>(std::upper_bound(knots.begin() + p, knots.begin() + n + 1, u) -
                             knots.begin()) - 1;
    Eigen::MatrixXd next(n + 1, coeffs.cols());
    for (int i = 0; i <= k - p; ++i)
        next.row(i) = coeffs.row(i);
    for (int i = k - p + 1; i <= k; ++i) {
        const double denom = knots[i + p] - knots[i];
        const double a = (u - knots[i]) / denom;
        next.row(i) = a * coeffs.row(i) + (1.0 - a) * coeffs.row(i - 1);
    }
    for (int i = k + 1; i <= n; ++i)
        next.row(i) = coeffs.row(i - 1);
    knots.insert(knots.begin() + k + 1, u);
    coeffs = std::move(next);
}

} // namespace

Eigen::MatrixXd refine_coefficients(const KnotVector& from, const KnotVector& to,
                                    const Eigen::MatrixXd& coeffs) {
    if (to.degree() != from.degree() || to.interior_multiplicity() != from.interior_multiplicity())
        throw InvalidArgument("refine_coefficients: target must share degree and multiplicity");
    if (coeffs.rows() != from.size())
        throw InvalidArgument("refine_coefficients: coefficient count " + std::to_string(coeffs.rows()) +
                              " does not match space dimension " + std::to_string(from.size()));

    std::vector<double> knots = from.knots();
    Eigen::MatrixXd work = coeffs;
    const auto& old_z = from.breakpoints();
    for (double z : to.breakpoints()) {
        const bool is_new = std::none_of(old_z.begin(), old_z.end(),
                                         [z](double w) { return std::abs(w - z) <= kKnotTol; });
        if (!is_new)
            continue;
        for (int rep = 0; rep < from.interior_multiplicity(); ++rep)
            boehm_insert(knots, from.degree(), work, z);
    }
    if (work.rows() != to.size())
        throw InvalidArgument("refine_coefficients: target is not a refinement of the source");
    return work;
}

Eigen::MatrixXd derivative_coefficients(const KnotVector& kv, const Eigen::MatrixXd& coeffs) {
    const KnotVector target = derivative_space(kv);
    const int p = kv.degree();
    const auto& U = kv.knots();
    Eigen::MatrixXd out(target.size(), coeffs.cols());
    for (int i = 0; i < target.size(); ++i)
        out.row(i) = p * (coeffs.row(i + 1) - coeffs.row(i)) / (U[i + p + 1] - U[i + 1]);
    return out;
}

namespace {

Eigen::SparseMatrix<double> greville_collocation(const KnotVector& kv) {
    const int n = kv.size();
    Eigen::SparseMatrix<double> C(n, n);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(n * (kv.degree() + 1));
    for (int s = 0; s < n; ++s) {
        const BasisEvaluation b = eval_basis(kv, kv.greville(s), 0);
        for (int k = 0; k < b.count; ++k)
            trip.emplace_back(s, b.first_active + k, b.value(0, k));
    }
    C.setFromTriplets(trip.begin(), trip.end());
    return C;
}

} // namespace

Eigen::MatrixXd elevate_coefficients(const KnotVector& from, const KnotVector& to,
                                     const Eigen::MatrixXd& coeffs) {
    if (to.regularity() < 0)
        throw InvalidArgument("elevate_coefficients: target space must have regularity >= 0");
    if (coeffs.rows() != from.size())
        throw InvalidArgument("elevate_coefficients: coefficient count does not match space dimension");

    Eigen::MatrixXd samples(to.size(), coeffs.cols());
    for (int s = 0; s < to.size(); ++s) {
        const BasisEvaluation b = eval_basis(from, to.greville(s), 0);
        samples.row(s).setZero();
        for (int k = 0; k < b.count; ++k)
            samples.row(s) += b.value(0, k) * coeffs.row(b.first_active + k);
    }
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(greville_collocation(to));
    if (lu.info() != Eigen::Success)
        throw NumericalError("elevate_coefficients: singular Greville collocation matrix");
    Eigen::MatrixXd out(to.size(), coeffs.cols());
    for (int c = 0; c < coeffs.cols(); ++c)
        out.col(c) = lu.solve(samples.col(c));
    return out;
}

Eigen::VectorXd greville_interpolate(const KnotVector& kv, const Eigen::VectorXd& values_at_greville) {
    if (values_at_greville.size() != kv.size())
        throw InvalidArgument("greville_interpolate: sample count does not match space dimension");
    if (kv.regularity() < 0)
        throw InvalidArgument("greville_interpolate: space must have regularity >= 0");
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(greville_collocation(kv));
    if (lu.info() != Eigen::Success)
        throw NumericalError("greville_interpolate: singular collocation matrix");
    return lu.solve(values_at_greville);
}

} // namespace rmiga
