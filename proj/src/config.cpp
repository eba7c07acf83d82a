#include "rmiga/config.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "rmiga/assembly.hpp"
#include "rmiga/errors.hpp"
#include "rmiga/expression.hpp"

namespace rmiga {

namespace {

using nlohmann::json;

int edit_distance(const std::string& a, const std::string& b) {
    std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j)
        prev[j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = static_cast<int>(i);
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const int subst = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, subst});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

// Near-miss spellings resolve to the canonical key.
const std::vector<std::pair<std::string, std::string>>& key_aliases() {
    static const std::vector<std::pair<std::string, std::string>> aliases = {
        {"degree", "p"},         {"order", "p"},           {"regularity", "alpha"},
        {"smoothness", "alpha"}, {"thickness", "t"},       {"tolerance", "tol"},
        {"quadrature", "q"},     {"refinement", "levels"}, {"reference", "reference_level"},
    };
    return aliases;
}

std::string suggest_key(const std::string& bad, const std::vector<std::string>& known) {
    std::string best;
    int best_dist = std::max(2, static_cast<int>(bad.size()) / 3) + 1;
    for (const std::string& key : known) {
        const int d = edit_distance(bad, key);
        if (d < best_dist) {
            best_dist = d;
            best = key;
        }
    }
    for (const auto& [alias, target] : key_aliases()) {
        const int d = edit_distance(bad, alias);
        if (d < best_dist) {
            best_dist = d;
            best = target;
        }
    }
    return best;
}

void check_keys(const json& obj, const std::string& context, const std::vector<std::string>& known) {
    for (const auto& item : obj.items()) {
        if (std::find(known.begin(), known.end(), item.key()) != known.end())
            continue;
        std::string msg = "config: unknown key \"" + item.key() + "\"";
        if (!context.empty())
            msg += " in " + context;
        const std::string hint = suggest_key(item.key(), known);
        if (!hint.empty())
            msg += " (did you mean \"" + hint + "\"?)";
        throw InvalidArgument(msg);
    }
}

[[noreturn]] void type_error(const std::string& key, const char* expected) {
    throw InvalidArgument("config: key \"" + key + "\" expects " + expected);
}

int get_int(const json& obj, const std::string& key) {
    const json& v = obj.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned())
        type_error(key, "an integer");
    return v.get<int>();
}

double get_double(const json& obj, const std::string& key) {
    const json& v = obj.at(key);
    if (!v.is_number())
        type_error(key, "a number");
    return v.get<double>();
}

std::string get_string(const json& obj, const std::string& key) {
    const json& v = obj.at(key);
    if (!v.is_string())
        type_error(key, "a string");
    return v.get<std::string>();
}

EdgeKind parse_edge_kind(const std::string& label) {
    if (label == "clamped")
        return EdgeKind::clamped;
    if (label == "ss_hard")
        return EdgeKind::simply_supported_hard;
    if (label == "ss_soft")
        return EdgeKind::simply_supported_soft;
    if (label == "free")
        return EdgeKind::free_edge;
    throw InvalidArgument("config: unknown boundary kind \"" + label +
                          "\" (expected clamped, ss_hard, ss_soft, or free)");
}

CaseSpec parse_problem_block(const json& obj) {
    check_keys(obj, "\"problem\"", {"geometry", "bc", "load"});
    for (const char* key : {"geometry", "bc", "load"})
        if (!obj.contains(key))
            throw InvalidArgument(std::string("config: \"problem\" requires key \"") + key + "\"");

    GeometryMap geometry = load_geometry_file(get_string(obj, "geometry"));

    const json& bc_json = obj.at("bc");
    if (!bc_json.is_array() || bc_json.size() != 4)
        type_error("bc", "an array of four side labels [u_min, u_max, v_min, v_max]");
    BoundarySpec bc;
    for (int side = 0; side < 4; ++side) {
        if (!bc_json[side].is_string())
            type_error("bc", "an array of four side labels [u_min, u_max, v_min, v_max]");
        bc.sides[side] = parse_edge_kind(bc_json[side].get<std::string>());
    }
    bc.validate();

    const Expression load = Expression::parse(get_string(obj, "load"));
    return CaseSpec{
        "custom",
        std::move(geometry),
        bc,
        [load](const MaterialParams&, double) { return load.as_load(); },
        nullptr,
    };
}

MaterialParams parse_material_block(const json& obj) {
    check_keys(obj, "\"material\"", {"E", "nu", "k_shear"});
    MaterialParams mat;
    if (obj.contains("E"))
        mat.E = get_double(obj, "E");
    if (obj.contains("nu"))
        mat.nu = get_double(obj, "nu");
    if (obj.contains("k_shear"))
        mat.k_shear = get_double(obj, "k_shear");
    mat.validate();
    return mat;
}

SampleGrid parse_sample_block(const json& obj) {
    check_keys(obj, "\"sample\"", {"nx", "ny"});
    SampleGrid grid;
    if (obj.contains("nx"))
        grid.nx = get_int(obj, "nx");
    if (obj.contains("ny"))
        grid.ny = get_int(obj, "ny");
    if (grid.nx < 2 || grid.ny < 2)
        throw InvalidArgument("config: sample counts must be at least 2");
    return grid;
}

std::vector<int> parse_levels(const json& obj) {
    const json& v = obj.at("levels");
    if (!v.is_array() || v.empty())
        type_error("levels", "a non-empty array of integers");
    std::vector<int> levels;
    for (const json& item : v) {
        if (!item.is_number_integer() && !item.is_number_unsigned())
            type_error("levels", "a non-empty array of integers");
        levels.push_back(item.get<int>());
    }
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (levels[i] < 1)
            throw InvalidArgument("config: levels must be positive");
        if (i > 0 && levels[i] <= levels[i - 1])
            throw InvalidArgument("config: levels must be strictly increasing");
    }
    return levels;
}

void require_key(const json& obj, const char* key, const std::string& command) {
    if (!obj.contains(key))
        throw InvalidArgument("config: command \"" + command + "\" requires key \"" + key + "\"");
}

std::string format_sig(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.11e", value);
    return buf;
}

} // namespace

RunConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& err) {
        throw InvalidArgument(std::string("config: ") + err.what());
    }
    if (!root.is_object())
        throw InvalidArgument("config: top level must be an object");

    check_keys(root, "", {"command", "case", "problem", "p", "alpha", "t", "level", "levels", "q",
                          "tol", "reference_level", "material", "sample", "seed", "output"});

    RunConfig cfg;
    require_key(root, "command", "(any)");
    cfg.command = get_string(root, "command");
    if (cfg.command != "solve" && cfg.command != "convergence" && cfg.command != "verify")
        throw InvalidArgument("config: command must be solve, convergence, or verify, got \"" +
                              cfg.command + "\"");

    if (root.contains("case") && root.contains("problem"))
        throw InvalidArgument("config: give either \"case\" or \"problem\", not both");
    if (root.contains("case"))
        cfg.case_spec = case_by_name(get_string(root, "case"));
    else if (root.contains("problem")) {
        const json& pb = root.at("problem");
        if (!pb.is_object())
            type_error("problem", "an object with geometry, bc, and load");
        cfg.case_spec = parse_problem_block(pb);
    }

    if (root.contains("material")) {
        const json& mat = root.at("material");
        if (!mat.is_object())
            type_error("material", "an object with E, nu, k_shear");
        cfg.material = parse_material_block(mat);
    }
    if (root.contains("sample")) {
        const json& sample = root.at("sample");
        if (!sample.is_object())
            type_error("sample", "an object with nx, ny");
        cfg.sample = parse_sample_block(sample);
    }

    if (root.contains("p"))
        cfg.p = get_int(root, "p");
    if (root.contains("alpha"))
        cfg.alpha = get_int(root, "alpha");
    if (root.contains("t")) {
        cfg.thickness = get_double(root, "t");
        if (!(cfg.thickness > 0.0))
            throw InvalidArgument("config: t must be positive, got " +
                                  std::to_string(cfg.thickness));
    }
    if (root.contains("level")) {
        cfg.level = get_int(root, "level");
        if (cfg.level < 1)
            throw InvalidArgument("config: level must be at least 1");
    }
    if (root.contains("levels"))
        cfg.levels = parse_levels(root);
    if (root.contains("q")) {
        cfg.q = get_int(root, "q");
        if (cfg.q < 1 || cfg.q > 30)
            throw InvalidArgument("config: q must lie in [1, 30]");
    }
    if (root.contains("tol")) {
        cfg.tol = get_double(root, "tol");
        if (!(cfg.tol > 0.0))
            throw InvalidArgument("config: tol must be positive");
    }
    if (root.contains("reference_level")) {
        cfg.reference_level = get_int(root, "reference_level");
        if (cfg.reference_level < 1)
            throw InvalidArgument("config: reference_level must be at least 1");
    }
    if (root.contains("seed")) {
        const json& v = root.at("seed");
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
            type_error("seed", "a non-negative integer");
        cfg.seed = v.get<std::uint64_t>();
    }
    if (root.contains("output"))
        cfg.output = get_string(root, "output");

    if (cfg.command != "verify") {
        if (!cfg.case_spec)
            throw InvalidArgument("config: command \"" + cfg.command +
                                  "\" requires \"case\" or \"problem\"");
        require_key(root, "p", cfg.command);
        require_key(root, "alpha", cfg.command);
        require_key(root, "t", cfg.command);
        if (cfg.command == "solve")
            require_key(root, "level", cfg.command);
        else
            require_key(root, "levels", cfg.command);
    }
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw InvalidArgument("config: cannot open file " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

void write_convergence_csv(const StudyResult& result, std::ostream& out) {
    out << "level,h,n_dof,err_theta_h1,err_theta_l2,err_w_h1,err_w_l2,err_shear_t_weighted,"
           "slope_theta_h1,slope_w_h1\n";
    for (const StudyRow& row : result.rows) {
        const ErrorReport& r = row.report;
        out << row.level << ',' << format_sig(r.h) << ',' << r.ndof << ','
            << format_sig(r.err_theta_h1) << ',' << format_sig(r.err_theta_l2) << ','
            << format_sig(r.err_w_h1) << ',' << format_sig(r.err_w_l2) << ','
            << format_sig(r.err_shear_scaled) << ','
            << (row.slope_theta_h1 ? format_sig(*row.slope_theta_h1) : "nan") << ','
            << (row.slope_w_h1 ? format_sig(*row.slope_w_h1) : "nan") << '\n';
    }
}

void write_field_dump(const DiscreteSolution& sol, const SampleGrid& grid, std::ostream& out) {
    if (grid.nx < 2 || grid.ny < 2)
        throw InvalidArgument("write_field_dump: sample counts must be at least 2");
    out << grid.nx << ' ' << grid.ny << '\n';
    for (int j = 0; j < grid.ny; ++j) {
        const double vhat = double(j) / (grid.ny - 1);
        for (int i = 0; i < grid.nx; ++i) {
            const double uhat = double(i) / (grid.nx - 1);
            const MapSample map = evaluate_map(sol.geometry, uhat, vhat);
            const PlateFieldSample s = eval_solution(sol, uhat, vhat);
            out << format_sig(map.point[0]) << ' ' << format_sig(map.point[1]) << ' '
                << format_sig(s.w) << ' ' << format_sig(s.theta[0]) << ' ' << format_sig(s.theta[1])
                << ' ' << format_sig(s.shear[0]) << ' ' << format_sig(s.shear[1]) << '\n';
        }
    }
}

bool run_verification(std::uint64_t seed, std::ostream& out) {
    std::mt19937_64 gen(seed ? seed : 0x9e3779b97f4a7c15ull);
    bool all_pass = true;
    auto report = [&](const std::string& name, double value, double limit) {
        const bool pass = value <= limit;
        all_pass = all_pass && pass;
        char value_buf[40], limit_buf[40];
        std::snprintf(value_buf, sizeof value_buf, "%.3e", value);
        std::snprintf(limit_buf, sizeof limit_buf, "%.0e", limit);
        out << (pass ? "PASS" : "FAIL") << "  " << name << ": " << value_buf << " (limit "
            << limit_buf << ")\n";
    };

    // jittered interior breakpoints keep the mesh nonuniform but valid
    auto random_breaks = [&](int n) {
        std::uniform_real_distribution<double> jitter(-0.3, 0.3);
        std::vector<double> z(n + 1);
        z[0] = 0.0;
        z[n] = 1.0;
        for (int i = 1; i < n; ++i)
            z[i] = (i + jitter(gen)) / n;
        return z;
    };

    double pou = 0.0;
    for (int p = 2; p <= 4; ++p) {
        const KnotVector kv(p, random_breaks(5), 1);
        for (int s = 0; s <= 200; ++s) {
            const double x = s / 200.0;
            const BasisEvaluation basis = eval_basis(kv, x, 0);
            double sum = 0.0;
            for (int i = 0; i < basis.count; ++i)
                sum += basis.value(0, i);
            pou = std::max(pou, std::abs(sum - 1.0));
        }
    }
    report("partition of unity", pou, 1e-12);

    double inclusion = 0.0;
    for (int p = 2; p <= 4; ++p) {
        const ParametricMesh mesh = make_mesh(random_breaks(4), random_breaks(4));
        inclusion = std::max(inclusion, verify_gradient_inclusion(make_plate_spaces(p, p - 1, mesh)));
    }
    report("gradient inclusion", inclusion, 1e-10);

    std::uniform_real_distribution<double> log_t(-4.0, -1.0);
    const double t = std::pow(10.0, log_t(gen));
    const ParametricMesh mesh = make_mesh(random_breaks(2), random_breaks(2));
    const PlateSpaces spaces = make_plate_spaces(3, 2, mesh);
    PlateProblem pb{MaterialParams{}, t, quarter_annulus_map(1.0, 2.5),
                    BoundarySpec::all(EdgeKind::clamped), [](double x, double y) { return x - y; }};
    const ConstraintSet constraints = apply_boundary_conditions(spaces, pb.bc);
    const LinearSystem system = assemble_system(pb, spaces, constraints, 4);

    const Eigen::SparseMatrix<double> asym =
        system.matrix - Eigen::SparseMatrix<double>(system.matrix.transpose());
    report("assembled symmetry", asym.norm(), 0.0);

    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Eigen::VectorXd xstar(system.dofs.total_free);
    for (Eigen::Index i = 0; i < xstar.size(); ++i)
        xstar[i] = unit(gen);
    LinearSystem manufactured;
    manufactured.matrix = system.matrix;
    manufactured.rhs = system.matrix * xstar;
    manufactured.dofs = system.dofs;
    const Eigen::VectorXd recovered = solve(manufactured);
    report("solve reproduction", (recovered - xstar).norm() / xstar.norm(), 1e-8);

    return all_pass;
}

std::vector<std::string> run(const RunConfig& cfg, const std::string& output_dir, std::ostream& log) {
    if (cfg.command == "verify") {
        if (!run_verification(cfg.seed, log))
            throw NumericalError("verification failed");
        return {};
    }
    if (!cfg.case_spec)
        throw InvalidArgument("run: no case or problem configured");
    const CaseSpec& spec = *cfg.case_spec;
    const int alpha = cfg.alpha >= 0 ? cfg.alpha : cfg.p - 1;
    const int q = cfg.q > 0 ? cfg.q : cfg.p + 1;

    namespace fs = std::filesystem;
    const fs::path dir = output_dir.empty() ? fs::path(".") : fs::path(output_dir);
    fs::create_directories(dir);

    if (cfg.command == "solve") {
        const DiscreteSolution sol =
            solve_case(spec, cfg.material, cfg.thickness, cfg.p, alpha, cfg.level, q, cfg.tol);
        const fs::path path = dir / (cfg.output.empty() ? "field_" + spec.name + ".txt" : cfg.output);
        std::ofstream out(path);
        if (!out)
            throw InvalidArgument("run: cannot open output file " + path.string());
        write_field_dump(sol, cfg.sample, out);
        return {path.string()};
    }

    StudyOptions opt;
    opt.p = cfg.p;
    opt.alpha = alpha;
    opt.thickness = cfg.thickness;
    opt.levels = cfg.levels;
    opt.q = cfg.q;
    opt.tol = cfg.tol;
    opt.material = cfg.material;
    opt.reference_level = cfg.reference_level;
    const StudyResult result = run_convergence_study(spec, opt);

    const fs::path path =
        dir / (cfg.output.empty() ? "convergence_" + spec.name + ".csv" : cfg.output);
    std::ofstream out(path);
    if (!out)
        throw InvalidArgument("run: cannot open output file " + path.string());
    write_convergence_csv(result, out);
    return {path.string()};
}

} // namespace rmiga
