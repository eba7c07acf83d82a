#include "rmiga/assembly.hpp"

#include <cmath>
#include <string>

#include "rmiga/errors.hpp"
#include "rmiga/quadrature.hpp"

namespace rmiga {

DofMap DofMap::build(const PlateSpaces& spaces, const ConstraintSet& constraints) {
    const int sizes[3] = {spaces.theta1.size(), spaces.theta2.size(), spaces.w.size()};
    DofMap map;
    int next = 0;
    for (int f = 0; f < 3; ++f) {
        if (static_cast<int>(constraints.fixed[f].size()) != sizes[f])
            throw InvalidArgument("DofMap: constraint mask of field " + std::to_string(f) +
                                  " does not match the space dimension");
        map.block_offset[f] = next;
        map.to_free[f].assign(sizes[f], -1);
        for (int i = 0; i < sizes[f]; ++i)
            if (!constraints.fixed[f][i])
                map.to_free[f][i] = next++;
    }
    map.total_free = next;
    return map;
}

namespace {

/// 1D quadrature and basis tables for one parametric direction: the degree-p
/// factor shared by W and one rotation component, and the degree-(p-1) factor
/// of the other component.
struct DirectionTables {
    std::vector<double> points;  // element-major [e * q + g]
    std::vector<double> weights; // includes the element length factor
    std::vector<BasisEvaluation> full;
    std::vector<BasisEvaluation> reduced;
    int q = 0;
};

DirectionTables build_tables(const KnotVector& full, const KnotVector& reduced,
                             const QuadratureRule& rule) {
    DirectionTables t;
    t.q = rule.size();
    const auto& z = full.breakpoints();
    const int nel = full.num_elements();
    t.points.resize(nel * t.q);
    t.weights.resize(nel * t.q);
    t.full.reserve(nel * t.q);
    t.reduced.reserve(nel * t.q);
    for (int e = 0; e < nel; ++e) {
        const double len = z[e + 1] - z[e];
        for (int g = 0; g < t.q; ++g) {
            const double x = z[e] + len * rule.points[g];
            t.points[e * t.q + g] = x;
            t.weights[e * t.q + g] = len * rule.weights[g];
            t.full.push_back(eval_basis(full, x, 1));
            t.reduced.push_back(eval_basis(reduced, x, 1));
        }
    }
    return t;
}

/// Static per-element layout of the three field blocks.
struct ElementLayout {
    int p = 0;
    int count_t1 = 0, count_t2 = 0, count_w = 0, count = 0;

    explicit ElementLayout(int degree)
        : p(degree), count_t1(degree * (degree + 1)), count_t2(degree * (degree + 1)),
          count_w((degree + 1) * (degree + 1)), count(count_t1 + count_t2 + count_w) {}

    int field_of(int local) const { return local < count_t1 ? 0 : (local < count_t1 + count_t2 ? 1 : 2); }
};

/// Per-quadrature-point physical data of every local basis function.
struct PointBasis {
    // all local dofs: shear operand (pushed rotation value or -grad w)
    std::vector<Eigen::Vector2d> shear_op;
    // rotation dofs only: physical symmetric gradient and its trace
    std::vector<double> e11, e22, e12;
    // w dofs only: basis value (scalar push-forward leaves values unchanged)
    std::vector<double> wval;

    explicit PointBasis(const ElementLayout& layout)
        : shear_op(layout.count), e11(layout.count_t1 + layout.count_t2),
          e22(layout.count_t1 + layout.count_t2), e12(layout.count_t1 + layout.count_t2),
          wval(layout.count_w) {}
};

struct GeometryPointData {
    Eigen::Matrix2d A;      // DF^{-T}
    Eigen::Matrix2d Au, Av; // its parametric derivatives
    Eigen::Matrix2d dfinv;
    Eigen::Vector2d point;
    double weight = 0.0; // quadrature weight including |det DF|
};

GeometryPointData geometry_point(const GeometryMap& geometry, double u, double v, double wq, int eu,
                                 int ev) {
    MapSample s;
    try {
        s = evaluate_map(geometry, u, v);
    } catch (const NumericalError& err) {
        throw NumericalError("assembly: element (" + std::to_string(eu) + ", " + std::to_string(ev) +
                             "): " + err.what());
    }
    GeometryPointData g;
    g.A = s.inv_transpose;
    Eigen::Matrix2d Hu, Hv;
    Hu.col(0) = s.hess_uu;
    Hu.col(1) = s.hess_uv;
    Hv.col(0) = s.hess_uv;
    Hv.col(1) = s.hess_vv;
    g.Au = -g.A * Hu.transpose() * g.A;
    g.Av = -g.A * Hv.transpose() * g.A;
    g.dfinv = s.jacobian.inverse();
    g.point = s.point;
    g.weight = wq * std::abs(s.det);
    return g;
}

/// Fills the per-point basis data from the 1D tables of one element point.
void fill_point_basis(const ElementLayout& L, const GeometryPointData& g, const BasisEvaluation& bu,
                      const BasisEvaluation& bru, const BasisEvaluation& bv,
                      const BasisEvaluation& brv, PointBasis& out) {
    const int p = L.p;
    // theta1: parametric field (N, 0), N = reduced_u x full_v
    for (int j = 0; j <= p; ++j)
        for (int i = 0; i < p; ++i) {
            const int k = i + p * j;
            const double n = bru.value(0, i) * bv.value(0, j);
            const double nu = bru.value(1, i) * bv.value(0, j);
            const double nv = bru.value(0, i) * bv.value(1, j);
            out.shear_op[k] = n * g.A.col(0);
            const Eigen::Vector2d pu = n * g.Au.col(0) + nu * g.A.col(0);
            const Eigen::Vector2d pv = n * g.Av.col(0) + nv * g.A.col(0);
            const double g00 = pu[0] * g.dfinv(0, 0) + pv[0] * g.dfinv(1, 0);
            const double g01 = pu[0] * g.dfinv(0, 1) + pv[0] * g.dfinv(1, 1);
            const double g10 = pu[1] * g.dfinv(0, 0) + pv[1] * g.dfinv(1, 0);
            const double g11 = pu[1] * g.dfinv(0, 1) + pv[1] * g.dfinv(1, 1);
            out.e11[k] = g00;
            out.e22[k] = g11;
            out.e12[k] = 0.5 * (g01 + g10);
        }
    // theta2: parametric field (0, N), N = full_u x reduced_v
    for (int j = 0; j < p; ++j)
        for (int i = 0; i <= p; ++i) {
            const int k = L.count_t1 + i + (p + 1) * j;
            const double n = bu.value(0, i) * brv.value(0, j);
            const double nu = bu.value(1, i) * brv.value(0, j);
            const double nv = bu.value(0, i) * brv.value(1, j);
            out.shear_op[k] = n * g.A.col(1);
            const Eigen::Vector2d pu = n * g.Au.col(1) + nu * g.A.col(1);
            const Eigen::Vector2d pv = n * g.Av.col(1) + nv * g.A.col(1);
            const double g00 = pu[0] * g.dfinv(0, 0) + pv[0] * g.dfinv(1, 0);
            const double g01 = pu[0] * g.dfinv(0, 1) + pv[0] * g.dfinv(1, 1);
            const double g10 = pu[1] * g.dfinv(0, 0) + pv[1] * g.dfinv(1, 0);
            const double g11 = pu[1] * g.dfinv(0, 1) + pv[1] * g.dfinv(1, 1);
            out.e11[k] = g00;
            out.e22[k] = g11;
            out.e12[k] = 0.5 * (g01 + g10);
        }
    // w: scalar N = full_u x full_v, shear operand -DF^{-T} grad N
    for (int j = 0; j <= p; ++j)
        for (int i = 0; i <= p; ++i) {
            const int k = i + (p + 1) * j;
            const double n = bu.value(0, i) * bv.value(0, j);
            const double nu = bu.value(1, i) * bv.value(0, j);
            const double nv = bu.value(0, i) * bv.value(1, j);
            out.wval[k] = n;
            out.shear_op[L.count_t1 + L.count_t2 + k] = -(g.A * Eigen::Vector2d(nu, nv));
        }
}

/// Global field-dof index of each local dof on element (eu, ev).
void fill_element_dofs(const ElementLayout& L, const PlateSpaces& spaces, int eu, int ev,
                       std::vector<int>& field_dof) {
    const int p = L.p;
    const int first_u = spaces.w.u().first_active_of_element(eu);
    const int first_v = spaces.w.v().first_active_of_element(ev);
    int k = 0;
    for (int j = 0; j <= p; ++j)
        for (int i = 0; i < p; ++i, ++k)
            field_dof[k] = spaces.theta1.index(first_u + i, first_v + j);
    for (int j = 0; j < p; ++j)
        for (int i = 0; i <= p; ++i, ++k)
            field_dof[k] = spaces.theta2.index(first_u + i, first_v + j);
    for (int j = 0; j <= p; ++j)
        for (int i = 0; i <= p; ++i, ++k)
            field_dof[k] = spaces.w.index(first_u + i, first_v + j);
}

struct BendingCoefficients {
    double d = 0.0;
    double nu = 0.0;
    double cshear = 0.0;
};

BendingCoefficients bending_coefficients(const PlateProblem& problem) {
    BendingCoefficients c;
    c.d = problem.material.bending_modulus();
    c.nu = problem.material.nu;
    c.cshear = problem.material.shear_modulus() * problem.material.k_shear /
               (problem.thickness * problem.thickness);
    return c;
}

/// 1D element ranges of basis functions (uniform interior multiplicity).
int first_element_of_basis(const KnotVector& kv, int i) {
    const int r = kv.interior_multiplicity();
    const int p = kv.degree();
    return i <= p ? 0 : (i - p + r - 1) / r;
}

int last_element_of_basis(const KnotVector& kv, int i) {
    return std::min(kv.num_elements() - 1, i / kv.interior_multiplicity());
}

const TensorSpace& field_space(const PlateSpaces& spaces, int f) {
    return f == 0 ? spaces.theta1 : (f == 1 ? spaces.theta2 : spaces.w);
}

} // namespace

LinearSystem assemble_system(const PlateProblem& problem, const PlateSpaces& spaces,
                             const ConstraintSet& constraints, int q) {
    problem.validate();
    const QuadratureRule rule = gauss_rule(q);
    const int p = spaces.degree;
    const ElementLayout L(p);
    const DofMap dofs = DofMap::build(spaces, constraints);
    const BendingCoefficients mat = bending_coefficients(problem);

    const DirectionTables tu = build_tables(spaces.w.u(), spaces.theta1.u(), rule);
    const DirectionTables tv = build_tables(spaces.w.v(), spaces.theta2.v(), rule);

    const int n = dofs.total_free;
    Eigen::SparseMatrix<double> A(n, n);

    // sparsity: per free dof, the tensor-overlap partners in all three fields
    // (contiguous 1D index ranges derived from the shared element ranges)
    {
        Eigen::VectorXi counts = Eigen::VectorXi::Zero(n);
        auto for_each_partner = [&](int f, int dof, auto&& body) {
            const TensorSpace& space = field_space(spaces, f);
            const int iu = dof % space.size_u();
            const int iv = dof / space.size_u();
            const int eu0 = first_element_of_basis(space.u(), iu);
            const int eu1 = last_element_of_basis(space.u(), iu);
            const int ev0 = first_element_of_basis(space.v(), iv);
            const int ev1 = last_element_of_basis(space.v(), iv);
            for (int g = 0; g < 3; ++g) {
                const TensorSpace& other = field_space(spaces, g);
                const int ru = other.u().interior_multiplicity();
                const int rv = other.v().interior_multiplicity();
                const int ju0 = std::max(0, eu0 * ru);
                const int ju1 = std::min(other.size_u() - 1, eu1 * ru + other.u().degree());
                const int jv0 = std::max(0, ev0 * rv);
                const int jv1 = std::min(other.size_v() - 1, ev1 * rv + other.v().degree());
                for (int jv = jv0; jv <= jv1; ++jv)
                    for (int ju = ju0; ju <= ju1; ++ju) {
                        const int partner = dofs.to_free[g][other.index(ju, jv)];
                        if (partner >= 0)
                            body(partner);
                    }
            }
        };

        for (int f = 0; f < 3; ++f)
            for (std::size_t dof = 0; dof < dofs.to_free[f].size(); ++dof) {
                const int col = dofs.to_free[f][dof];
                if (col < 0)
                    continue;
                int c = 0;
                for_each_partner(f, static_cast<int>(dof), [&](int) { ++c; });
                counts[col] = c;
            }
        A.reserve(counts);
        for (int f = 0; f < 3; ++f)
            for (std::size_t dof = 0; dof < dofs.to_free[f].size(); ++dof) {
                const int col = dofs.to_free[f][dof];
                if (col < 0)
                    continue;
                for_each_partner(f, static_cast<int>(dof), [&](int row) { A.insert(row, col); });
            }
        A.makeCompressed();
    }

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd Kloc(L.count, L.count);
    Eigen::VectorXd floc(L.count_w);
    std::vector<int> field_dof(L.count);
    std::vector<int> free_dof(L.count);
    PointBasis basis(L);

    for (const ParametricElement& elem : spaces.mesh.elements) {
        const int eu = elem.iu, ev = elem.iv;
        Kloc.setZero();
        floc.setZero();
        fill_element_dofs(L, spaces, eu, ev, field_dof);
        for (int k = 0; k < L.count; ++k)
            free_dof[k] = dofs.to_free[L.field_of(k)][field_dof[k]];

        for (int gv = 0; gv < q; ++gv)
            for (int gu = 0; gu < q; ++gu) {
                const int su = eu * q + gu;
                const int sv = ev * q + gv;
                const GeometryPointData g =
                    geometry_point(problem.geometry, tu.points[su], tv.points[sv],
                                   tu.weights[su] * tv.weights[sv], eu, ev);
                fill_point_basis(L, g, tu.full[su], tu.reduced[su], tv.full[sv], tv.reduced[sv],
                                 basis);

                const int nrot = L.count_t1 + L.count_t2;
                for (int a = 0; a < L.count; ++a) {
                    const bool arot = a < nrot;
                    for (int b = a; b < L.count; ++b) {
                        double k = mat.cshear * basis.shear_op[a].dot(basis.shear_op[b]);
                        if (arot && b < nrot)
                            k += mat.d * ((1.0 - mat.nu) * (basis.e11[a] * basis.e11[b] +
                                                            basis.e22[a] * basis.e22[b] +
                                                            2.0 * basis.e12[a] * basis.e12[b]) +
                                          mat.nu * (basis.e11[a] + basis.e22[a]) *
                                              (basis.e11[b] + basis.e22[b]));
                        Kloc(a, b) += g.weight * k;
                    }
                }
                const double fval = problem.load(g.point[0], g.point[1]);
                for (int k = 0; k < L.count_w; ++k)
                    floc[k] += g.weight * fval * basis.wval[k];
            }

        for (int a = 0; a < L.count; ++a) {
            const int I = free_dof[a];
            if (I < 0)
                continue;
            for (int b = a; b < L.count; ++b) {
                const int J = free_dof[b];
                if (J < 0)
                    continue;
                const double v = Kloc(a, b);
                A.coeffRef(I, J) += v;
                if (I != J)
                    A.coeffRef(J, I) += v;
            }
        }
        for (int k = 0; k < L.count_w; ++k) {
            const int I = free_dof[L.count_t1 + L.count_t2 + k];
            if (I >= 0)
                rhs[I] += floc[k];
        }
    }

    return LinearSystem{std::move(A), std::move(rhs), dofs};
}

Eigen::VectorXd weak_residual(const PlateProblem& problem, const PlateSpaces& spaces,
                              const ConstraintSet& constraints, const ReferenceField& fields,
                              int q) {
    problem.validate();
    if (!fields)
        throw InvalidArgument("weak_residual: reference fields not set");
    const QuadratureRule rule = gauss_rule(q);
    const int p = spaces.degree;
    const ElementLayout L(p);
    const DofMap dofs = DofMap::build(spaces, constraints);
    const BendingCoefficients mat = bending_coefficients(problem);

    const DirectionTables tu = build_tables(spaces.w.u(), spaces.theta1.u(), rule);
    const DirectionTables tv = build_tables(spaces.w.v(), spaces.theta2.v(), rule);

    Eigen::VectorXd r = Eigen::VectorXd::Zero(dofs.total_free);
    std::vector<int> field_dof(L.count);
    PointBasis basis(L);

    for (const ParametricElement& elem : spaces.mesh.elements) {
        const int eu = elem.iu, ev = elem.iv;
        fill_element_dofs(L, spaces, eu, ev, field_dof);
        for (int gv = 0; gv < q; ++gv)
            for (int gu = 0; gu < q; ++gu) {
                const int su = eu * q + gu;
                const int sv = ev * q + gv;
                const GeometryPointData g =
                    geometry_point(problem.geometry, tu.points[su], tv.points[sv],
                                   tu.weights[su] * tv.weights[sv], eu, ev);
                fill_point_basis(L, g, tu.full[su], tu.reduced[su], tv.full[sv], tv.reduced[sv],
                                 basis);
                const PlateFieldSample ref = fields(tu.points[su], tv.points[sv]);
                const Eigen::Vector2d kdev = ref.theta - ref.grad_w;
                const double re11 = ref.grad_theta(0, 0);
                const double re22 = ref.grad_theta(1, 1);
                const double re12 = 0.5 * (ref.grad_theta(0, 1) + ref.grad_theta(1, 0));
                const double rtrace = re11 + re22;
                const double fval = problem.load(g.point[0], g.point[1]);

                const int nrot = L.count_t1 + L.count_t2;
                for (int a = 0; a < L.count; ++a) {
                    const int I = dofs.to_free[L.field_of(a)][field_dof[a]];
                    if (I < 0)
                        continue;
                    double contrib = mat.cshear * kdev.dot(basis.shear_op[a]);
                    if (a < nrot)
                        contrib += mat.d * ((1.0 - mat.nu) * (re11 * basis.e11[a] +
                                                              re22 * basis.e22[a] +
                                                              2.0 * re12 * basis.e12[a]) +
                                            mat.nu * rtrace * (basis.e11[a] + basis.e22[a]));
                    else
                        contrib -= fval * basis.wval[a - nrot];
                    r[I] += g.weight * contrib;
                }
            }
    }
    return r;
}

double mixed_form_value(const PlateProblem& problem, const PlateSpaces& spaces, const FieldTriple& a,
                        const FieldTriple& b, int q) {
    problem.validate();
    const QuadratureRule rule = gauss_rule(q);
    const BendingCoefficients mat = bending_coefficients(problem);
    const double mu_k = problem.material.shear_modulus() * problem.material.k_shear;
    const double t2 = problem.thickness * problem.thickness;

    struct Fields {
        Eigen::Vector2d rot, shear, grad_w;
        double e11, e22, e12, trace;
    };
    auto sample_triple = [&](const FieldTriple& tri, const MapSample& s, double u, double v) {
        const Eigen::Vector3d t1 = spaces.theta1.eval(tri.theta1, u, v);
        const Eigen::Vector3d t2v = spaces.theta2.eval(tri.theta2, u, v);
        const Eigen::Vector3d wv = spaces.w.eval(tri.w, u, v);
        const Eigen::Vector3d s1 = spaces.theta1.eval(tri.shear1, u, v);
        const Eigen::Vector3d s2 = spaces.theta2.eval(tri.shear2, u, v);
        Fields f;
        f.rot = s.inv_transpose * Eigen::Vector2d(t1[0], t2v[0]);
        f.shear = s.inv_transpose * Eigen::Vector2d(s1[0], s2[0]);
        f.grad_w = s.inv_transpose * Eigen::Vector2d(wv[1], wv[2]);
        Eigen::Matrix2d dtheta;
        dtheta << t1[1], t1[2], t2v[1], t2v[2];
        const Eigen::Matrix2d G = covariant_gradient(s, {t1[0], t2v[0]}, dtheta);
        f.e11 = G(0, 0);
        f.e22 = G(1, 1);
        f.e12 = 0.5 * (G(0, 1) + G(1, 0));
        f.trace = f.e11 + f.e22;
        return f;
    };

    double value = 0.0;
    for (const ParametricElement& elem : spaces.mesh.elements) {
        for (int gv = 0; gv < q; ++gv)
            for (int gu = 0; gu < q; ++gu) {
                const double u = elem.u0 + (elem.u1 - elem.u0) * rule.points[gu];
                const double v = elem.v0 + (elem.v1 - elem.v0) * rule.points[gv];
                const double wq = (elem.u1 - elem.u0) * (elem.v1 - elem.v0) * rule.weights[gu] *
                                  rule.weights[gv];
                const MapSample s = evaluate_map(problem.geometry, u, v);
                const Fields fa = sample_triple(a, s, u, v);
                const Fields fb = sample_triple(b, s, u, v);

                double contrib = mat.d * ((1.0 - mat.nu) * (fa.e11 * fb.e11 + fa.e22 * fb.e22 +
                                                            2.0 * fa.e12 * fb.e12) +
                                          mat.nu * fa.trace * fb.trace);
                contrib += fa.shear.dot(fb.rot - fb.grad_w);
                contrib += (fa.rot - fa.grad_w).dot(fb.shear);
                contrib -= (t2 / mu_k) * fa.shear.dot(fb.shear);
                value += wq * std::abs(s.det) * contrib;
            }
    }
    return value;
}

} // namespace rmiga
