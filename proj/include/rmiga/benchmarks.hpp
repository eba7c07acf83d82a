#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rmiga/norms.hpp"
#include "rmiga/problem.hpp"
#include "rmiga/solver.hpp"

namespace rmiga {

enum class MeshRecipe { uniform, layer_adapted };

/// One benchmark configuration: patch geometry, side conditions, load, an
/// optional closed-form solution, and how study meshes and the reference are
/// produced when no closed form exists.
struct CaseSpec {
    std::string name;
    GeometryMap geometry;
    BoundarySpec bc;
    /// Load for the given material and thickness (the clamped-square load
    /// carries the bending modulus; the annulus loads ignore both arguments).
    std::function<LoadFunction(const MaterialParams&, double t)> load;
    /// Closed-form fields for the given material and thickness, if any.
    std::function<ReferenceField(const MaterialParams&, double t)> exact;

    MeshRecipe recipe = MeshRecipe::uniform;
    double layer_fraction = 0.03; // parametric width of the graded edge bands
    int reference_level = 128;    // fallback discrete reference
    int reference_degree = 3;
    int reference_alpha = 2;
};

/// Clamped unit square with the polynomial manufactured solution; the exact
/// fields and load are closed forms, so errors need no discrete reference.
CaseSpec square_clamped_case();

/// Quarter annulus (radii 1 and 2.5), all sides hard simply supported, load
/// 1e4 sin(2 phi). Errors are measured against a fine discrete reference.
CaseSpec annulus_hard_case();

/// Same annulus and load with mixed sides: soft simple support on the inner
/// arc, free outer arc, hard simple support on the straight edges. Boundary
/// layers form along the arcs, so the mesh recipe is selectable.
CaseSpec annulus_mixed_case(MeshRecipe recipe);

/// Lookup by CLI label: case1, case2, case3-uniform, case3-adapted.
CaseSpec case_by_name(const std::string& name);

/// Mesh for one refinement level. Level N splits every geometry breakpoint
/// span into N parts; the layer_adapted recipe first inserts radial bands of
/// parametric width layer_fraction along v = 0 and v = 1 and then splits each
/// band into N parts, grading resolution into the boundary layers.
ParametricMesh build_mesh(const CaseSpec& spec, int level);

PlateProblem make_problem(const CaseSpec& spec, const MaterialParams& material, double t);

/// Assemble and solve one case at one level.
DiscreteSolution solve_case(const CaseSpec& spec, const MaterialParams& material, double t, int p,
                            int alpha, int level, int q, double tol = 1e-10);

struct StudyOptions {
    int p = 3;
    int alpha = -1; // -1: p - 1
    double thickness = 1e-3;
    std::vector<int> levels = {4, 8, 16, 32};
    int q = 0; // 0: p + 1
    double tol = 1e-10;
    MaterialParams material;
    /// Discrete-reference override; 0 keeps the case default.
    int reference_level = 0;
    /// Prebuilt reference solution, shared between studies of the same case
    /// and thickness; must be at least four times finer than every study mesh.
    std::shared_ptr<const DiscreteSolution> reference;
};

struct StudyRow {
    int level = 0;
    ErrorReport report;
    /// Slope against the previous row; empty on the first row.
    std::optional<double> slope_theta_h1;
    std::optional<double> slope_w_h1;
};

struct StudyResult {
    std::vector<StudyRow> rows;
};

/// Solve the discrete reference a study would use (for reuse across studies).
DiscreteSolution solve_reference(const CaseSpec& spec, const StudyOptions& options);

/// Solve every level and measure errors against the closed form or against
/// the discrete reference on the union integration mesh.
StudyResult run_convergence_study(const CaseSpec& spec, const StudyOptions& options);

} // namespace rmiga
