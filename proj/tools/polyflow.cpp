#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "polyflow/diagnostics.hpp"
#include "polyflow/kernel.hpp"
#include "polyflow/nonlinearity.hpp"
#include "polyflow/norms.hpp"
#include "polyflow/semigroup.hpp"
#include "polyflow/solver.hpp"
#include "polyflow/target.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace polyflow;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    int schema_version = 1;
    int n = 1;
    int m = 1;
    int l = 3;
    int points = 64;
    double length = 16.0 * M_PI;
    double delta_N = 0.45;
    double cutoff_inner = 0.4;
    double cutoff_outer = 0.5;
    double T = 0.25;
    std::size_t M = 64;
    int picard_max = 40;
    double picard_tol = 1e-9;
    double ball_radius = 0.05;
    double R = -1.0;
    int stride = 4;
    int k = 0;  // derivative count for the operator-bound report
    std::string bank = "logosc_0.05";
    std::uint64_t seed = 1;
    std::string out = "out";
    std::string input;  // trajectory path for the norms subcommand
};

const std::set<std::string> kKnownKeys = {
    "schema_version", "n",          "m",          "l",           "points",     "length",
    "delta_N",        "cutoff_inner", "cutoff_outer", "T",       "M",          "picard_max",
    "picard_tol",     "ball_radius", "R",          "stride",     "k",          "bank",
    "seed",           "out",        "input"};

template <typename T>
void fetch(const json& j, const char* key, T& dst) {
    if (!j.contains(key)) return;
    try {
        dst = j.at(key).get<T>();
    } catch (const std::exception&) {
        throw ConfigError(std::string("config field '") + key + "' has the wrong type");
    }
}

RunConfig load_config(const std::string& path) {
    RunConfig c;
    if (path.empty()) return c;
    std::ifstream in(path);
    if (!in) throw ConfigError("config file not readable: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    for (const auto& item : j.items())
        if (!kKnownKeys.count(item.key()))
            throw ConfigError("unknown config field '" + item.key() + "'");
    if (!j.contains("schema_version")) throw ConfigError("config field 'schema_version' is required");
    fetch(j, "schema_version", c.schema_version);
    if (c.schema_version != 1) throw ConfigError("config field 'schema_version' must be 1");
    fetch(j, "n", c.n);
    fetch(j, "m", c.m);
    fetch(j, "l", c.l);
    fetch(j, "points", c.points);
    fetch(j, "length", c.length);
    fetch(j, "delta_N", c.delta_N);
    fetch(j, "cutoff_inner", c.cutoff_inner);
    fetch(j, "cutoff_outer", c.cutoff_outer);
    fetch(j, "T", c.T);
    fetch(j, "M", c.M);
    fetch(j, "picard_max", c.picard_max);
    fetch(j, "picard_tol", c.picard_tol);
    fetch(j, "ball_radius", c.ball_radius);
    fetch(j, "R", c.R);
    fetch(j, "stride", c.stride);
    fetch(j, "k", c.k);
    fetch(j, "bank", c.bank);
    fetch(j, "seed", c.seed);
    fetch(j, "out", c.out);
    fetch(j, "input", c.input);
    return c;
}

void check(bool ok, const char* field, const char* what) {
    if (!ok) throw ConfigError(std::string("config field '") + field + "': " + what);
}

void validate_config(const RunConfig& c) {
    check(c.n >= 1 && c.n <= 3, "n", "must be 1..3");
    check(c.m >= 1 && c.m <= 3, "m", "must be 1..3");
    check(c.l == 3, "l", "only the round two-sphere target is built in");
    check(c.points >= 8 && (c.points & (c.points - 1)) == 0, "points", "must be a power of two >= 8");
    check(c.length > 0.0, "length", "must be positive");
    check(c.T > 0.0, "T", "must be positive");
    check(c.M >= 8, "M", "must be at least 8");
    check(c.picard_max >= 1, "picard_max", "must be positive");
    check(c.picard_tol > 0.0, "picard_tol", "must be positive");
    check(c.ball_radius > 0.0, "ball_radius", "must be positive");
    check(c.stride >= 1, "stride", "must be positive");
    check(c.k >= 0 && c.k <= c.m - 1, "k", "must satisfy 0 <= k <= m-1");
    check(c.delta_N > 0.0 && c.delta_N < 0.5, "delta_N", "must lie in (0, 1/2)");
    check(c.cutoff_inner > 0.0 && c.cutoff_inner < c.cutoff_outer, "cutoff_inner",
          "must be positive and below cutoff_outer");
    check(c.cutoff_outer <= 1.0 - c.delta_N, "cutoff_outer", "must stay inside the tube");
}

GridSpec grid_of(const RunConfig& c) { return make_grid(c.n, c.length, c.points); }

TargetManifold target_of(const RunConfig& c) {
    return make_sphere(c.l, c.delta_N, c.cutoff_inner, c.cutoff_outer);
}

FlowParams flow_of(const RunConfig& c) {
    FlowParams p;
    p.m = c.m;
    p.T = c.T;
    p.M = c.M;
    p.picard_max = c.picard_max;
    p.picard_tol = c.picard_tol;
    p.ball_radius = c.ball_radius;
    p.seed = c.seed;
    p.norm_stride = c.stride;
    return p;
}

Field bank_entry(const RunConfig& c) {
    const GridSpec spec = grid_of(c);
    for (const BankEntry& e : make_test_bank(spec))
        if (e.name == c.bank) return e.u0;
    throw ConfigError("config field 'bank': unknown entry '" + c.bank + "'");
}

void atomic_write(const fs::path& path, const std::string& body) {
    fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        out << body;
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

void emit(const RunConfig& c, const std::string& name, const json& doc) {
    const std::string body = doc.dump(2) + "\n";
    atomic_write(fs::path(c.out) / name, body);
    std::cout << body;
}

json status_json(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "converged";
        case SolveStatus::MaxIterations: return "max_iterations";
        case SolveStatus::Diverged: return "diverged";
        default: return "aborted";
    }
}

json norm_json(const NormReport& nr) {
    return json{{"sup_inf", nr.sup_inf},
                {"x_sup_parts", nr.x_sup_parts},
                {"x_cyl_parts", nr.x_cyl_parts},
                {"seminorm", nr.seminorm()},
                {"total", nr.total()}};
}

int cmd_kernel(const RunConfig& c) {
    json doc;
    doc["schema_version"] = 1;
    doc["subcommand"] = "kernel";
    std::vector<double> xs;
    for (double x = -10.0; x <= 10.0 + 1e-12; x += 0.05) xs.push_back(x);
    const KernelProfile prof = profile_g(c.m, 1, xs, 2);
    for (int k = 0; k <= 2; ++k) {
        const DecayFit fit = verify_decay(prof, k, 5.0);
        const L1ScalingResult l1 = l1_scaling_check(c.m, k, {0.1, 0.3, 1.0, 3.0});
        json entry;
        entry["k"] = k;
        entry["decay_C_fit"] = fit.C_fit;
        entry["decay_range_stable"] = fit.range_stable;
        entry["l1_weighted"] = l1.weighted;
        entry["l1_max_rel_dev"] = l1.max_rel_dev;
        doc["derivatives"].push_back(entry);
    }
    emit(c, "kernel.json", doc);
    return 0;
}

int cmd_evolve(const RunConfig& c) {
    const Field u0 = bank_entry(c);
    const Trajectory tr = imex_solve(u0, flow_of(c), target_of(c), 2);
    fs::create_directories(c.out);
    write_trajectory((fs::path(c.out) / "evolve.ptrj").string(), tr);
    const DissipationReport dr = dissipation_report(tr, c.m);
    json doc;
    doc["schema_version"] = 1;
    doc["subcommand"] = "evolve";
    doc["bank"] = c.bank;
    doc["final_sup"] = sup_norm(tr.fields.back());
    doc["constraint_drift"] = dist_to_N(tr.fields.back()).first;
    doc["energy_initial"] = dr.energy.front();
    doc["energy_final"] = dr.energy.back();
    doc["max_uphill"] = dr.max_uphill;
    doc["trajectory"] = "evolve.ptrj";
    emit(c, "evolve.json", doc);
    return 0;
}

int cmd_picard(const RunConfig& c) {
    const Field u0 = bank_entry(c);
    auto [tr, diag] = picard_solve(u0, flow_of(c), target_of(c));
    if (diag.status == SolveStatus::Aborted) {
        std::cerr << "compute abort: non-finite iterate at iteration " << diag.abort_index << "\n";
        return 3;
    }
    fs::create_directories(c.out);
    write_trajectory((fs::path(c.out) / "picard.ptrj").string(), tr);
    json doc;
    doc["schema_version"] = 1;
    doc["subcommand"] = "picard";
    doc["bank"] = c.bank;
    doc["status"] = status_json(diag.status);
    doc["iterations"] = diag.iterations;
    doc["iterate_distances"] = diag.iterate_distances;
    doc["theta_hat"] = diag.theta_hat;
    doc["duhamel_residual"] = diag.duhamel_residual;
    doc["constraint_drift"] = diag.constraint_drift;
    doc["trajectory"] = "picard.ptrj";
    emit(c, "picard.json", doc);
    return 0;
}

int cmd_norms(const RunConfig& c) {
    if (c.input.empty()) throw ConfigError("config field 'input': required for norms");
    const Trajectory tr = read_trajectory(c.input);
    json doc;
    doc["schema_version"] = 1;
    doc["subcommand"] = "norms";
    doc["input"] = c.input;
    doc["x_norm"] = norm_json(x_norm(tr, c.m, c.R, c.stride));
    doc["bmo_initial"] = bmo_seminorm(tr.fields.front(), c.R < 0 ? tr.fields.front().spec.length / 4
                                                                 : c.R,
                                      c.stride);
    for (int k = 0; k <= c.m - 1; ++k)
        doc["yk"].push_back(yk_norm(tr, k, c.m, c.R, c.stride));
    emit(c, "norms.json", doc);
    return 0;
}

int cmd_probe(const RunConfig& c) {
    const Field u0 = bank_entry(c);
    const ContractionProbe probe = contraction_probe(u0, flow_of(c), target_of(c), 10);
    const BallReport ball = ball_check(u0, flow_of(c), target_of(c));
    json doc;
    doc["schema_version"] = 1;
    doc["subcommand"] = "probe";
    doc["bank"] = c.bank;
    doc["ratios"] = probe.ratios;
    doc["theta_hat"] = probe.theta_hat;
    doc["ball_all_inside"] = ball.all_inside;
    doc["ball_worst_margin"] = ball.worst_margin;
    doc["ball_center_x"] = ball.center_x;
    doc["ball_center_y"] = ball.center_y;
    emit(c, "probe.json", doc);
    return 0;
}

int cmd_verify(const RunConfig& c) {
    const GridSpec spec = grid_of(c);
    const TargetManifold tm = target_of(c);
    const double R = c.R > 0 ? c.R : spec.length / 4.0;
    json doc;
    doc["schema_version"] = 1;
    doc["subcommand"] = "verify";

    std::string smoothing_csv = "entry,bmo,c_sup_1,c_cyl_1,c_carleson\n";
    std::string distance_csv = "entry,bmo,max_dist,delta_floor,K_hat\n";
    std::string constraint_csv = "entry,max_rho,residual,ortho_normalized\n";
    std::string dissipation_csv = "entry,energy_initial,energy_final,max_uphill\n";

    for (const BankEntry& e : make_test_bank(spec)) {
        json entry;
        entry["name"] = e.name;

        const SmoothingReport sr = smoothing_report(e.u0, c.m, R, c.T, c.M, c.stride);
        entry["smoothing"] = {{"vacuous", sr.vacuous},
                              {"bmo", sr.bmo},
                              {"c_sup", sr.c_sup},
                              {"c_cyl", sr.c_cyl},
                              {"c_carleson", sr.c_carleson}};
        smoothing_csv += e.name + "," + std::to_string(sr.bmo) + "," +
                         (sr.c_sup.empty() ? "0" : std::to_string(sr.c_sup[0])) + "," +
                         (sr.c_cyl.empty() ? "0" : std::to_string(sr.c_cyl[0])) + "," +
                         std::to_string(sr.c_carleson) + "\n";

        const DistanceReport dr = distance_report(e.u0, c.m, R, c.T, c.M, c.stride);
        entry["distance"] = {{"bmo", dr.bmo},
                             {"max_dist", dr.max_dist},
                             {"delta_floor", dr.delta_floor},
                             {"K_hat", dr.K_hat}};
        distance_csv += e.name + "," + std::to_string(dr.bmo) + "," + std::to_string(dr.max_dist) +
                        "," + std::to_string(dr.delta_floor) + "," + std::to_string(dr.K_hat) + "\n";

        auto [tr, diag] = picard_solve(e.u0, flow_of(c), tm);
        entry["picard_status"] = status_json(diag.status);
        entry["theta_hat"] = diag.theta_hat;

        const ConstraintReport cr = constraint_report(tr, tm, c.m);
        entry["constraint"] = {{"max_rho", cr.max_rho},
                               {"residual", cr.residual},
                               {"ortho_normalized", cr.ortho_normalized},
                               {"truncated", cr.truncated}};
        constraint_csv += e.name + "," + std::to_string(cr.max_rho) + "," +
                          std::to_string(cr.residual) + "," + std::to_string(cr.ortho_normalized) +
                          "\n";

        const DissipationReport ds = dissipation_report(tr, c.m);
        entry["dissipation"] = {{"energy_initial", ds.energy.front()},
                                {"energy_final", ds.energy.back()},
                                {"max_uphill", ds.max_uphill}};
        dissipation_csv += e.name + "," + std::to_string(ds.energy.front()) + "," +
                           std::to_string(ds.energy.back()) + "," + std::to_string(ds.max_uphill) +
                           "\n";

        entry["tangency_residual"] = tangency_residual(e.u0, c.m, tm);
        doc["entries"].push_back(entry);
    }

    const SBoundReport sb = s_bound_report(spec, c.m, c.k, c.T, c.M, c.seed);
    doc["s_bound"] = {{"k", c.k}, {"ratios", sb.ratios}, {"max_ratio", sb.max_ratio},
                      {"skipped", sb.skipped}};

    atomic_write(fs::path(c.out) / "smoothing.csv", smoothing_csv);
    atomic_write(fs::path(c.out) / "distance.csv", distance_csv);
    atomic_write(fs::path(c.out) / "constraint.csv", constraint_csv);
    atomic_write(fs::path(c.out) / "dissipation.csv", dissipation_csv);
    emit(c, "verify.json", doc);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudo-spectral polyharmonic map flow toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_override;
    std::uint64_t seed_override = 0;
    int threads = 0;
    bool have_seed = false;
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--out", out_override, "output directory override");
    app.add_option("--seed", seed_override, "seed override")->each([&](const std::string&) {
        have_seed = true;
    });
    app.add_option("--threads", threads, "worker threads (or POLYFLOW_THREADS)");

    for (const char* name : {"kernel", "evolve", "picard", "norms", "probe", "verify"})
        app.add_subcommand(name);

    CLI11_PARSE(app, argc, argv);
    const std::string sub = app.get_subcommands().front()->get_name();

    if (threads == 0)
        if (const char* env = std::getenv("POLYFLOW_THREADS")) threads = std::atoi(env);

    try {
        RunConfig c = load_config(config_path);
        if (!out_override.empty()) c.out = out_override;
        if (have_seed) c.seed = seed_override;
        validate_config(c);

        if (sub == "kernel") return cmd_kernel(c);
        if (sub == "evolve") return cmd_evolve(c);
        if (sub == "picard") return cmd_picard(c);
        if (sub == "norms") return cmd_norms(c);
        if (sub == "probe") return cmd_probe(c);
        return cmd_verify(c);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "compute abort: " << e.what() << "\n";
        return 3;
    }
}
