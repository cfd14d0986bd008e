#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "polyflow/grid.hpp"
#include "polyflow/norms.hpp"

namespace fs = std::filesystem;

static std::string g_cli;

namespace {

struct RunResult {
    int status = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = g_cli + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    RunResult r;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
    const int rc = pclose(p);
    r.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    return r;
}

void write_file(const fs::path& p, const std::string& body) {
    std::ofstream out(p);
    out << body;
}

const char* kBaseConfig =
    R"({"schema_version":1,"n":1,"m":1,"points":64,"length":50.26548245743669,
        "T":0.25,"M":32,"bank":"logosc_0.05","seed":5,"out":"OUTDIR"})";

std::string config_with_out(const fs::path& dir) {
    std::string c = kBaseConfig;
    c.replace(c.find("OUTDIR"), 6, dir.string());
    return c;
}

}  // namespace

TEST_CASE("missing subcommand fails") { CHECK(run_cli("").status != 0); }

TEST_CASE("invalid configs exit 2 with the field named") {
    const fs::path dir = fs::temp_directory_path() / "pf_cli_bad";
    fs::create_directories(dir);

    write_file(dir / "negT.json",
               R"({"schema_version":1,"T":-0.5,"out":")" + (dir / "o").string() + "\"}");
    CHECK(run_cli("picard --config " + (dir / "negT.json").string()).status == 2);

    write_file(dir / "unknown.json", R"({"schema_version":1,"wavelength":3})");
    CHECK(run_cli("picard --config " + (dir / "unknown.json").string()).status == 2);

    write_file(dir / "nover.json", R"({"T":0.25})");
    CHECK(run_cli("picard --config " + (dir / "nover.json").string()).status == 2);

    CHECK(run_cli("picard --config " + (dir / "missing.json").string()).status == 2);
    fs::remove_all(dir);
}

TEST_CASE("picard summary is deterministic") {
    const fs::path dir = fs::temp_directory_path() / "pf_cli_det";
    fs::create_directories(dir);
    write_file(dir / "cfg.json", config_with_out(dir / "o"));
    const RunResult a = run_cli("picard --config " + (dir / "cfg.json").string());
    const RunResult b = run_cli("picard --config " + (dir / "cfg.json").string());
    CHECK(a.status == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.find("\"status\": \"converged\"") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("constant data converges in one iteration") {
    const fs::path dir = fs::temp_directory_path() / "pf_cli_const";
    fs::create_directories(dir);
    std::string cfg = config_with_out(dir / "o");
    cfg.replace(cfg.find("logosc_0.05"), 11, "constant");
    write_file(dir / "cfg.json", cfg);
    const RunResult r = run_cli("picard --config " + (dir / "cfg.json").string());
    CHECK(r.status == 0);
    CHECK(r.out.find("\"iterations\": 1") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("snapshots round trip through the norms subcommand") {
    const fs::path dir = fs::temp_directory_path() / "pf_cli_rt";
    fs::create_directories(dir);
    write_file(dir / "cfg.json", config_with_out(dir / "o"));
    REQUIRE(run_cli("evolve --config " + (dir / "cfg.json").string()).status == 0);

    // Byte-exact reread of the trajectory snapshot.
    using namespace polyflow;
    const Trajectory tr = read_trajectory((dir / "o" / "evolve.ptrj").string());
    CHECK(tr.fields.size() == 33);
    const char* rewrite = "pf_cli_rt_copy.ptrj";
    write_trajectory(rewrite, tr);
    std::ifstream f1(dir / "o" / "evolve.ptrj", std::ios::binary);
    std::ifstream f2(rewrite, std::ios::binary);
    std::stringstream s1, s2;
    s1 << f1.rdbuf();
    s2 << f2.rdbuf();
    CHECK(s1.str() == s2.str());
    std::remove(rewrite);

    std::string ncfg = config_with_out(dir / "o");
    ncfg.insert(ncfg.rfind('}'), ",\"input\":\"" + (dir / "o" / "evolve.ptrj").string() + "\"");
    write_file(dir / "ncfg.json", ncfg);
    const RunResult n = run_cli("norms --config " + (dir / "ncfg.json").string());
    CHECK(n.status == 0);
    CHECK(n.out.find("\"x_norm\"") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("probe and verify emit artifacts") {
    const fs::path dir = fs::temp_directory_path() / "pf_cli_pv";
    fs::create_directories(dir);
    write_file(dir / "cfg.json", config_with_out(dir / "o"));
    CHECK(run_cli("probe --config " + (dir / "cfg.json").string()).status == 0);
    const RunResult v = run_cli("verify --config " + (dir / "cfg.json").string());
    CHECK(v.status == 0);
    CHECK(fs::exists(dir / "o" / "verify.json"));
    CHECK(fs::exists(dir / "o" / "smoothing.csv"));
    CHECK(fs::exists(dir / "o" / "distance.csv"));
    CHECK(fs::exists(dir / "o" / "constraint.csv"));
    CHECK(fs::exists(dir / "o" / "dissipation.csv"));
    // No stray temp files after atomic writes.
    for (const auto& e : fs::directory_iterator(dir / "o"))
        CHECK(e.path().extension() != ".tmp");
    fs::remove_all(dir);
}

TEST_CASE("seed override changes probe draws") {
    const fs::path dir = fs::temp_directory_path() / "pf_cli_seed";
    fs::create_directories(dir);
    write_file(dir / "cfg.json", config_with_out(dir / "o"));
    const RunResult a = run_cli("probe --config " + (dir / "cfg.json").string() + " --seed 101");
    const RunResult b = run_cli("probe --config " + (dir / "cfg.json").string() + " --seed 102");
    const RunResult a2 = run_cli("probe --config " + (dir / "cfg.json").string() + " --seed 101");
    CHECK(a.status == 0);
    CHECK(a.out != b.out);
    CHECK(a.out == a2.out);
    fs::remove_all(dir);
}

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: test_cli <path-to-cli>\n");
        return 1;
    }
    g_cli = argv[1];
    doctest::Context ctx;
    return ctx.run();
}
