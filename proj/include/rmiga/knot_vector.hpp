#pragma once

#include <vector>

#include <Eigen/Dense>

namespace rmiga {

/// Open knot vector on [0,1] with uniform interior multiplicity.
///
/// The first and last knots repeat degree+1 times, every interior breakpoint
/// repeats exactly `interior_multiplicity` times. The spanned spline space has
/// regularity alpha = degree - interior_multiplicity across interior
/// breakpoints and dimension degree + 1 + (m - 2) * interior_multiplicity,
/// where m is the number of breakpoints.
class KnotVector {
public:
    KnotVector(int degree, std::vector<double> breakpoints, int interior_multiplicity);

    int degree() const { return degree_; }
    int interior_multiplicity() const { return multiplicity_; }
    /// Continuous derivatives across interior breakpoints (may be -1).
    int regularity() const { return degree_ - multiplicity_; }
    /// Number of basis functions.
    int size() const { return size_; }
    int num_breakpoints() const { return static_cast<int>(breakpoints_.size()); }
    int num_elements() const { return num_breakpoints() - 1; }

    const std::vector<double>& breakpoints() const { return breakpoints_; }
    /// Full knot sequence of length size() + degree() + 1.
    const std::vector<double>& knots() const { return knots_; }

    /// Span index k with knots[k] <= x < knots[k+1]; right-continuous at
    /// interior breakpoints, left limit at x = 1.
    int find_span(double x) const;
    /// Breakpoint interval containing x, same limit conventions as find_span.
    int element_of(double x) const;
    /// Knot span index of the first (left) knot of breakpoint interval e.
    int span_of_element(int e) const { return degree_ + e * multiplicity_; }
    /// Index of the first basis function supported on element e.
    int first_active_of_element(int e) const { return e * multiplicity_; }
    /// Greville abscissa of basis function i.
    double greville(int i) const;

    bool operator==(const KnotVector& other) const;

private:
    int degree_;
    int multiplicity_;
    int size_;
    std::vector<double> breakpoints_;
    std::vector<double> knots_;
};

/// Values and derivatives of the degree+1 basis functions active at a point.
struct BasisEvaluation {
    int first_active = 0;
    int nderiv = 0;
    int count = 0; // degree + 1
    /// Row-major (nderiv+1) x count table; row d holds d-th derivatives.
    std::vector<double> table;

    double value(int deriv, int k) const { return table[deriv * count + k]; }
};

KnotVector make_knot_vector(int degree, std::vector<double> breakpoints, int interior_multiplicity);

/// All active basis values and derivatives up to order nderiv (nderiv <= degree)
/// at x in [0,1], by the Cox-de Boor recursion over the active span.
BasisEvaluation eval_basis(const KnotVector& kv, double x, int nderiv);

/// Knot vector of the image space of d/dx: one degree and one regularity lower
/// on the same breakpoints. Requires degree >= 1 and regularity >= 0.
KnotVector derivative_space(const KnotVector& kv);

/// Refined knot vector with the given breakpoints added (same degree and
/// interior multiplicity). New breakpoints must lie strictly inside (0,1) and
/// be distinct from existing ones.
KnotVector insert_knots(const KnotVector& kv, const std::vector<double>& new_breakpoints);

/// Subdivide every breakpoint interval into `parts` equal pieces.
KnotVector uniform_refine(const KnotVector& kv, int parts);

/// Knot vector of degree target_degree on the same breakpoints, with interior
/// multiplicity raised so the regularity class is preserved.
KnotVector degree_elevate(const KnotVector& kv, int target_degree);

/// Evaluate the spline with the given coefficients (column per component).
double eval_spline(const KnotVector& kv, const Eigen::VectorXd& coeffs, double x, int deriv = 0);

/// Control values of a represented function after knot insertion, via repeated
/// single-knot (Boehm) insertion. Rows of `coeffs` follow basis numbering;
/// `to` must equal insert_knots(from, ...) of the same degree and multiplicity.
Eigen::MatrixXd refine_coefficients(const KnotVector& from, const KnotVector& to,
                                    const Eigen::MatrixXd& coeffs);

/// Coefficients of the exact derivative in derivative_space(kv).
Eigen::MatrixXd derivative_coefficients(const KnotVector& kv, const Eigen::MatrixXd& coeffs);

/// Re-represent a spline of `from` in the (super)space `to` by interpolation
/// at the Greville abscissae of `to`. Exact for functions contained in `to`;
/// requires regularity(to) >= 0.
Eigen::MatrixXd elevate_coefficients(const KnotVector& from, const KnotVector& to,
                                     const Eigen::MatrixXd& coeffs);

/// Interpolate point samples at the Greville abscissae of kv.
Eigen::VectorXd greville_interpolate(const KnotVector& kv, const Eigen::VectorXd& values_at_greville);

} // namespace rmiga
