#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rmiga/benchmarks.hpp"

namespace rmiga {

struct SampleGrid {
    int nx = 33;
    int ny = 33;
};

/// One validated run request. `case_spec` holds either a named benchmark case
/// or a custom problem (geometry file, side conditions, load expression).
struct RunConfig {
    std::string command; // solve | convergence | verify
    std::optional<CaseSpec> case_spec;
    int p = 3;
    int alpha = -1; // -1: p - 1
    double thickness = 1e-3;
    int level = 0;           // solve
    std::vector<int> levels; // convergence
    int q = 0;               // 0: p + 1
    double tol = 1e-10;
    int reference_level = 0; // 0: case default
    MaterialParams material;
    SampleGrid sample;
    std::uint64_t seed = 0;
    std::string output; // optional artifact name override
};

/// Parse and schema-validate a JSON run configuration. Unknown keys are
/// rejected with a suggestion, wrong types with the key name and the expected
/// type, and defaults (q, tol, material) are filled in.
RunConfig parse_config(const std::string& text);
RunConfig load_config_file(const std::string& path);

/// Execute the command. solve writes a field dump, convergence a CSV table,
/// verify streams one line per invariant check to `log` (throwing
/// NumericalError if any check fails). Returns the artifact paths written.
std::vector<std::string> run(const RunConfig& config, const std::string& output_dir,
                             std::ostream& log);

/// Seeded invariant suite behind the verify command: partition of unity,
/// gradient inclusion, assembled-matrix symmetry, and solve reproduction.
/// Prints one pass/fail line per check; returns true when all pass.
bool run_verification(std::uint64_t seed, std::ostream& out);

/// Convergence table with the fixed column set; 12 significant digits.
void write_convergence_csv(const StudyResult& result, std::ostream& out);

/// Plain-text field dump: a "nx ny" header, then one "x y w theta1 theta2
/// gamma1 gamma2" row per lattice point, u varying fastest.
void write_field_dump(const DiscreteSolution& sol, const SampleGrid& grid, std::ostream& out);

} // namespace rmiga
