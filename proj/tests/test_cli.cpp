#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "kwalk/cli.hpp"

using nlohmann::json;

namespace {

struct CliResult {
    int exit_code;
    std::string out;
    std::string err;
};

CliResult run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = kwalk::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string temp_path(const std::string& name) {
    return std::string("/tmp/kwalk_cli_test_") + name;
}

// Drop '#' metadata lines (timings differ run to run); keep the body.
std::string csv_body(const std::string& text) {
    std::istringstream in(text);
    std::string line, body;
    while (std::getline(in, line))
        if (line.empty() || line[0] != '#') body += line + '\n';
    return body;
}

}  // namespace

TEST_CASE("gen emits a canonical edge list", "[cli]") {
    auto r = run_cli({"gen", "--family", "cycle", "--n", "4"});
    CHECK(r.exit_code == 0);
    CHECK(r.out == "4 4\n0 1\n0 3\n1 2\n2 3\n");
    CHECK(r.err.empty());
}

TEST_CASE("gen --out writes the file instead of stdout", "[cli]") {
    std::string path = temp_path("gen.graph");
    auto r = run_cli({"gen", "--family", "complete", "--n", "3", "--out", path});
    CHECK(r.exit_code == 0);
    CHECK(r.out.empty());
    CHECK(slurp(path) == "3 3\n0 1\n0 2\n1 2\n");
    std::remove(path.c_str());
}

TEST_CASE("random families demand a seed", "[cli]") {
    auto r = run_cli({"gen", "--family", "random_regular", "--n", "16", "--d", "4"});
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("--seed") != std::string::npos);
    auto ok = run_cli({"gen", "--family", "random_regular", "--n", "16", "--d", "4",
                       "--seed", "3"});
    CHECK(ok.exit_code == 0);
    CHECK_NOTHROW(kwalk::parse_graph(ok.out));
    // Deterministic families run seedless.
    CHECK(run_cli({"gen", "--family", "hypercube", "--n", "8"}).exit_code == 0);
}

TEST_CASE("usage errors exit with 2", "[cli]") {
    CHECK(run_cli({"gen", "--family", "cycle"}).exit_code == 2);          // missing --n
    CHECK(run_cli({"gen", "--family", "moebius", "--n", "4"}).exit_code == 2);
    CHECK(run_cli({"frobnicate"}).exit_code == 2);                        // no such command
    CHECK(run_cli({}).exit_code == 2);                                    // no subcommand
    CHECK(run_cli({"cover", "--bogus"}).exit_code == 2);                  // unknown flag
    CHECK(run_cli({"cover", "--family", "cycle", "--n", "8"}).exit_code == 2);  // no seed
}

TEST_CASE("version and help exit cleanly", "[cli]") {
    auto v = run_cli({"--version"});
    CHECK(v.exit_code == 0);
    CHECK(v.out == "kwalk 1.0.0\n");
    auto h = run_cli({"--help"});
    CHECK(h.exit_code == 0);
    CHECK(h.out == slurp(std::string(KWALK_TEST_DATA_DIR) + "/help_top.txt"));
}

TEST_CASE("subcommand help is golden", "[cli]") {
    for (const std::string& sub :
         {"gen", "cover", "hit", "mix", "bounds", "compose", "table1", "barbell", "scan"}) {
        auto r = run_cli({sub, "--help"});
        INFO("subcommand " << sub);
        CHECK(r.exit_code == 0);
        CHECK(r.out == slurp(std::string(KWALK_TEST_DATA_DIR) + "/help_" + sub + ".txt"));
    }
}

TEST_CASE("cover estimate matches the clique closed form", "[cli]") {
    auto r = run_cli({"cover", "--family", "complete", "--n", "16", "--self-loops",
                      "--trials", "400", "--seed", "9"});
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.out);
    double exact = 16.0 * kwalk::harmonic_number(15);
    CHECK(std::abs(j["mean"].get<double>() - exact) <=
          3.0 * j["stderr"].get<double>());
    CHECK(j["trials"] == 400);
    CHECK(j["seed"] == 9);
}

TEST_CASE("cover reads a graph file and honors --out", "[cli]") {
    std::string gpath = temp_path("cycle8.graph");
    {
        std::ofstream out(gpath);
        out << kwalk::serialize_graph(kwalk::gen_cycle(8));
    }
    std::string jpath = temp_path("cover.json");
    auto r = run_cli({"cover", "--graph", gpath, "--k", "2", "--trials", "80", "--seed",
                      "4", "--out", jpath});
    CHECK(r.exit_code == 0);
    json j = json::parse(slurp(gpath == jpath ? gpath : jpath));
    CHECK(j["mean"].get<double>() > 0.0);
    std::remove(gpath.c_str());
    std::remove(jpath.c_str());
    // --graph and --family are mutually exclusive.
    CHECK(run_cli({"cover", "--graph", gpath, "--family", "cycle", "--n", "8", "--seed",
                   "1"}).exit_code == 2);
}

TEST_CASE("cover --max reports the argmax candidate", "[cli]") {
    auto r = run_cli({"cover", "--family", "barbell", "--n", "13", "--trials", "60",
                      "--seed", "2", "--max"});
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(j.contains("vertex"));
    CHECK(j["estimate"].contains("mean"));
    CHECK(j["candidates"].is_array());
    CHECK(!j["candidates"].empty());
}

TEST_CASE("exact hitting times through the CLI", "[cli]") {
    auto r = run_cli({"hit", "--family", "cycle", "--n", "8", "--from", "0", "--to", "4",
                      "--exact"});
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(j["h"] == Catch::Approx(16.0));
    CHECK(j["h_max"] == Catch::Approx(16.0));
    CHECK(j["h_min"] == Catch::Approx(7.0));

    auto all = run_cli({"hit", "--family", "cycle", "--n", "8", "--exact", "--all"});
    REQUIRE(all.exit_code == 0);
    std::istringstream in(all.out);
    std::string first;
    REQUIRE(std::getline(in, first));
    CHECK(first == "0,7,12,15,16,15,12,7");

    // Monte Carlo estimate agrees with the exact value at 3 sigma.
    auto mc = run_cli({"hit", "--family", "cycle", "--n", "8", "--from", "0", "--to", "4",
                       "--trials", "600", "--seed", "12"});
    REQUIRE(mc.exit_code == 0);
    json e = json::parse(mc.out);
    CHECK(std::abs(e["mean"].get<double>() - 16.0) <= 3.0 * e["stderr"].get<double>());

    CHECK(run_cli({"hit", "--family", "cycle", "--n", "8", "--from", "0", "--to", "4"})
              .exit_code == 2);  // no seed, no --exact
    CHECK(run_cli({"hit", "--family", "cycle", "--n", "8", "--all"}).exit_code == 2);
}

TEST_CASE("mixing subcommand kernels", "[cli]") {
    auto fast = run_cli({"mix", "--family", "complete", "--n", "8", "--self-loops",
                         "--kernel", "plain"});
    REQUIRE(fast.exit_code == 0);
    json j = json::parse(fast.out);
    CHECK(j["t_m"] == 1);
    CHECK(j["lazy"] == false);
    CHECK(j["max_distance"].get<double>() < 1e-12);
    CHECK(j["threshold"] == Catch::Approx(std::exp(-1.0)));

    // Bipartite + plain kernel is an invariant failure (exit 1); auto
    // switches to lazy and succeeds.
    CHECK(run_cli({"mix", "--family", "cycle", "--n", "4", "--kernel", "plain"})
              .exit_code == 1);
    auto lazy = run_cli({"mix", "--family", "cycle", "--n", "4"});
    REQUIRE(lazy.exit_code == 0);
    CHECK(json::parse(lazy.out)["lazy"] == true);
}

TEST_CASE("bounds subcommand evaluates closed forms", "[cli]") {
    auto cyc = run_cli({"bounds", "--name", "cycle", "--n", "100", "--k", "1000"});
    REQUIRE(cyc.exit_code == 0);
    json j = json::parse(cyc.out);
    CHECK(j["value"] == Catch::Approx(69.54337514486126).epsilon(1e-12));
    CHECK(j["upper"] == Catch::Approx(2895.2965460216788).epsilon(1e-12));

    auto mat = run_cli({"bounds", "--name", "matthews", "--h-min", "7", "--h-max", "16",
                        "--n", "8"});
    REQUIRE(mat.exit_code == 0);
    json m = json::parse(mat.out);
    CHECK(m["value"] == Catch::Approx(7.0 * kwalk::harmonic_number(8)));
    CHECK(m["intermediates"]["H_n"] == Catch::Approx(kwalk::harmonic_number(8)));

    auto baby = run_cli({"bounds", "--name", "baby_matthews", "--h-max", "1", "--n",
                         "1000", "--k", "3"});
    REQUIRE(baby.exit_code == 0);
    CHECK(json::parse(baby.out)["value"] ==
          Catch::Approx(11.257865797883442).epsilon(1e-12));

    CHECK(run_cli({"bounds", "--name", "grid", "--n", "1000", "--dims", "2", "--k", "4"})
              .exit_code == 2);  // 1000 is not a square
    CHECK(run_cli({"bounds", "--name", "nonsense"}).exit_code == 2);
}

TEST_CASE("compose subcommand verdict drives the exit code", "[cli]") {
    auto r = run_cli({"compose", "--family", "complete", "--n", "2", "--tc", "2", "--th",
                      "2", "--k", "2", "--ell", "1", "--trials", "100", "--seed", "6"});
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(j["holds"] == true);
    CHECK(j["rhs"] == 1.0);
    // T_c not divisible by k is a usage-level error.
    CHECK(run_cli({"compose", "--family", "cycle", "--n", "8", "--tc", "127", "--th",
                   "16", "--k", "2", "--seed", "1"}).exit_code == 2);
}

TEST_CASE("table1 runs a config and is worker-independent", "[cli]") {
    std::string cfg_path = temp_path("table1.json");
    {
        std::ofstream out(cfg_path);
        out << R"({"scenarios":[{"family":"cycle","sizes":[16],"ks":[1,2],
                   "trials":60,"seed":3}],"format":"csv","dense_limit":32})";
    }
    auto solo = run_cli({"table1", "--config", cfg_path, "--workers", "1"});
    auto wide = run_cli({"table1", "--config", cfg_path, "--workers", "4"});
    REQUIRE(solo.exit_code == 0);
    REQUIRE(wide.exit_code == 0);
    CHECK(csv_body(solo.out) == csv_body(wide.out));
    CHECK(solo.out.find("family,n,k,") != std::string::npos);
    CHECK(solo.out.find("# ") != std::string::npos);  // metadata present
    std::remove(cfg_path.c_str());

    CHECK(run_cli({"table1", "--config", "/nonexistent.json"}).exit_code == 2);
    std::string bad_path = temp_path("bad.json");
    {
        std::ofstream out(bad_path);
        out << "{not json";
    }
    CHECK(run_cli({"table1", "--config", bad_path}).exit_code == 2);
    std::remove(bad_path.c_str());
}

TEST_CASE("barbell subcommand reports gates consistently", "[cli]") {
    auto r = run_cli({"barbell", "--n", "41", "--trials", "200", "--seed", "5"});
    json j = json::parse(r.out);
    bool gates = j["quadratic_ok"].get<bool>() && j["linear_ok"].get<bool>();
    CHECK(r.exit_code == (gates ? 0 : 1));
    CHECK(j["n_small"] == 21);
    CHECK(j["s_hat"].get<double>() > 0.0);
    CHECK(run_cli({"barbell", "--n", "40", "--trials", "50", "--seed", "1"}).exit_code == 2);
}

TEST_CASE("scan subcommand always exits zero on findings", "[cli]") {
    std::string cfg_path = temp_path("scan.json");
    {
        std::ofstream out(cfg_path);
        out << R"({"scenarios":[{"family":"barbell","sizes":[41],"ks":[64],
                   "trials":80,"seed":14,"start":"center"}]})";
    }
    auto r = run_cli({"scan", "--config", cfg_path});
    CHECK(r.exit_code == 0);  // exceptions are findings, not failures
    CHECK(r.out.find("exception_candidate") != std::string::npos);
    std::istringstream in(r.out);
    std::string line;
    bool found_row = false;
    while (std::getline(in, line))
        if (line.rfind("barbell,41,64,", 0) == 0) {
            found_row = true;
            CHECK(line.find(",1,") != std::string::npos);
        }
    CHECK(found_row);
    std::remove(cfg_path.c_str());
}
