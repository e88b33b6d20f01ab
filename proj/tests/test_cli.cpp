#include <doctest/doctest.h>

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "qvm/calibration.hpp"
#include "qvm/cli.hpp"
#include "qvm/config.hpp"
#include "qvm/error.hpp"
#include "qvm/hardware_graph.hpp"
#include "qvm/serialize.hpp"

using namespace qvm;
namespace fs = std::filesystem;

namespace {

// Shared scratch directory, wiped once per binary run so reruns never see
// stale files.
const fs::path& scratch() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "qvm_cli_tests";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string path_of(const std::string& name) { return (scratch() / name).string(); }

int cli(std::initializer_list<std::string> args) { return run_cli(std::vector<std::string>(args)); }

// A small two-circuit workload the scheduler can always place: files and
// manifest are materialized next to each other so relative resolution is
// exercised too.
std::string write_small_workload() {
    write_text_file(path_of("bell.qasm"),
                    "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\ncreg c[2];\n"
                    "h q[0];\ncx q[0],q[1];\nmeasure q -> c;\n");
    write_text_file(path_of("ghz3.qasm"),
                    "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[3];\ncreg c[3];\n"
                    "h q[0];\ncx q[0],q[1];\ncx q[1],q[2];\nmeasure q -> c;\n");
    std::string manifest = path_of("small.json");
    write_text_file(manifest,
                    "{\"name\": \"small\", \"circuits\": ["
                    "{\"id\": \"bell\", \"file\": \"bell.qasm\"},"
                    "{\"id\": \"ghz3\", \"file\": \"ghz3.qasm\"}]}\n");
    return manifest;
}

}  // namespace

TEST_CASE("gen-fixture writes a parseable snapshot, byte-identical on rerun") {
    REQUIRE(cli({"gen-fixture", "--out", path_of("snap.json")}) == 0);
    REQUIRE(cli({"gen-fixture", "--out", path_of("snap_again.json")}) == 0);
    CHECK(read_text_file(path_of("snap.json")) == read_text_file(path_of("snap_again.json")));

    CalibrationSnapshot snap = parse_snapshot(read_text_file(path_of("snap.json")));
    CHECK(snap.qubits.size() == 156);
    CHECK(snap.couplers.size() == 172);
}

TEST_CASE("discover emits a pool that round-trips and stays deterministic") {
    REQUIRE(cli({"gen-fixture", "--out", path_of("snap.json")}) == 0);
    REQUIRE(cli({"discover", "--snapshot", path_of("snap.json"), "--out", path_of("pool.json"),
                 "--seed", "7"}) == 0);
    REQUIRE(cli({"discover", "--snapshot", path_of("snap.json"), "--out", path_of("pool2.json"),
                 "--seed", "7"}) == 0);
    CHECK(read_text_file(path_of("pool.json")) == read_text_file(path_of("pool2.json")));

    HardwareGraph g = HardwareGraph::build(parse_snapshot(read_text_file(path_of("snap.json"))));
    RegionPool pool = load_pool(path_of("pool.json"), g);
    REQUIRE(!pool.regions.empty());
    std::set<int> seen;
    for (const Region& r : pool.regions) {
        CHECK(r.vertices.size() >= 3);
        CHECK(r.scores.q >= 0.0);
        CHECK(r.scores.q <= 1.0);
        CHECK(!r.edges.empty());  // rebuilt from the graph on load
        for (int v : r.vertices) CHECK(seen.insert(v).second);
    }
    CHECK(pool.covered.size() + pool.uncovered.size() == g.num_vertices());
}

TEST_CASE("config file overrides discovery and rejects bad values") {
    REQUIRE(cli({"gen-fixture", "--out", path_of("snap.json")}) == 0);
    write_text_file(path_of("min4.json"), "{\"min_region_size\": 4, \"seed\": 7}\n");
    REQUIRE(cli({"discover", "--snapshot", path_of("snap.json"), "--out", path_of("pool4.json"),
                 "--config", path_of("min4.json")}) == 0);
    HardwareGraph g = HardwareGraph::build(parse_snapshot(read_text_file(path_of("snap.json"))));
    RegionPool pool = load_pool(path_of("pool4.json"), g);
    for (const Region& r : pool.regions) CHECK(r.vertices.size() >= 4);

    write_text_file(path_of("bad_sum.json"), "{\"score_weights\": [0.5, 0.5, 0.1, 0.1]}\n");
    CHECK(cli({"discover", "--snapshot", path_of("snap.json"), "--out", path_of("x.json"),
               "--config", path_of("bad_sum.json")}) == 1);
    write_text_file(path_of("typo.json"), "{\"scoer_weights\": [0.25, 0.35, 0.2, 0.2]}\n");
    CHECK(cli({"discover", "--snapshot", path_of("snap.json"), "--out", path_of("x.json"),
               "--config", path_of("typo.json")}) == 1);

    CHECK_THROWS_AS(parse_config("{\"shots\": 0}"), ValidationError);
    CHECK_THROWS_AS(parse_config("{\"seed\": -4}"), ValidationError);
    CHECK_THROWS_AS(parse_config("{\"fitness_weights\": [0.2, 0.4]}"), ValidationError);
    Config round = parse_config(config_to_json(Config{}));
    CHECK(round.shots == 1024);
    CHECK(round.min_region_size == 3);
    CHECK(round.score_weights.gate == doctest::Approx(0.35));
}

TEST_CASE("schedule writes jobs and flags infeasible-only workloads with exit 2") {
    REQUIRE(cli({"gen-fixture", "--out", path_of("snap.json")}) == 0);
    REQUIRE(cli({"discover", "--snapshot", path_of("snap.json"), "--out", path_of("pool.json"),
                 "--seed", "7"}) == 0);
    std::string manifest = write_small_workload();
    REQUIRE(cli({"schedule", "--snapshot", path_of("snap.json"), "--pool", path_of("pool.json"),
                 "--workload", manifest, "--batch-cap", "2", "--out",
                 path_of("sched.json")}) == 0);
    std::string sched = read_text_file(path_of("sched.json"));
    CHECK(sched.find("\"jobs_used\": 1") != std::string::npos);
    CHECK(sched.find("\"infeasible\": []") != std::string::npos);

    // A 200-qubit register cannot fit the 156-qubit device: the only
    // circuit is infeasible, so the command signals exit code 2.
    write_text_file(path_of("wide.qasm"),
                    "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[200];\ncreg c[200];\n"
                    "h q[0];\nmeasure q -> c;\n");
    write_text_file(path_of("wide.json"),
                    "{\"name\": \"wide\", \"circuits\": ["
                    "{\"id\": \"wide\", \"file\": \"wide.qasm\"}]}\n");
    CHECK(cli({"schedule", "--snapshot", path_of("snap.json"), "--pool", path_of("pool.json"),
               "--workload", path_of("wide.json"), "--batch-cap", "1", "--out",
               path_of("sched_wide.json")}) == 2);
    CHECK(read_text_file(path_of("sched_wide.json")).find("\"wide\"") != std::string::npos);
}

TEST_CASE("run emits a report that renders as md and csv, byte-stable on rerun") {
    REQUIRE(cli({"gen-fixture", "--out", path_of("snap.json")}) == 0);
    REQUIRE(cli({"discover", "--snapshot", path_of("snap.json"), "--out", path_of("pool.json"),
                 "--seed", "7"}) == 0);
    std::string manifest = write_small_workload();
    auto run_once = [&](const std::string& out) {
        return cli({"run", "--snapshot", path_of("snap.json"), "--pool", path_of("pool.json"),
                    "--workload", manifest, "--batch-cap", "2", "--shots", "64", "--seed", "9",
                    "--report", path_of(out), "--baseline", "--sweep", "1:3"});
    };
    REQUIRE(run_once("report.json") == 0);
    REQUIRE(run_once("report_again.json") == 0);
    CHECK(read_text_file(path_of("report.json")) == read_text_file(path_of("report_again.json")));

    ReportFile rf = load_report(path_of("report.json"));
    CHECK(rf.schema_version == 1);
    CHECK(rf.experiment.results.size() == 2);
    REQUIRE(rf.baseline.has_value());
    REQUIRE(rf.sweep.has_value());
    CHECK(rf.sweep->points.size() == 3);
    // Round-trip: serializing the parsed report reproduces the file.
    CHECK(report_to_json(rf) == read_text_file(path_of("report.json")));

    REQUIRE(cli({"report", "--in", path_of("report.json"), "--format", "md", "--out",
                 path_of("report.md")}) == 0);
    std::string md = read_text_file(path_of("report.md"));
    CHECK(md.find("| Batch | Jobs | CostReduction | MeanFidelity |") != std::string::npos);
    CHECK(md.find("| Circuit | Fidelity | Baseline | Delta |") != std::string::npos);
    CHECK(md.find("(1% tolerance)") != std::string::npos);
    CHECK(md.find("Pearson r") != std::string::npos);

    REQUIRE(cli({"report", "--in", path_of("report.json"), "--format", "csv", "--out",
                 path_of("report.csv")}) == 0);
    std::string csv = read_text_file(path_of("report.csv"));
    CHECK(csv.rfind("batch_cap,jobs_used,cost_reduction,mean_fidelity,std_fidelity", 0) == 0);

    CHECK(cli({"report", "--in", path_of("report.json"), "--format", "yaml"}) == 1);
    CHECK(cli({"report", "--in", path_of("nope.json"), "--format", "md"}) == 1);
}

TEST_CASE("run returns exit 2 when every circuit is infeasible") {
    REQUIRE(cli({"gen-fixture", "--out", path_of("snap.json")}) == 0);
    REQUIRE(cli({"discover", "--snapshot", path_of("snap.json"), "--out", path_of("pool.json"),
                 "--seed", "7"}) == 0);
    write_text_file(path_of("wide.qasm"),
                    "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[200];\ncreg c[200];\n"
                    "h q[0];\nmeasure q -> c;\n");
    write_text_file(path_of("wide.json"),
                    "{\"name\": \"wide\", \"circuits\": ["
                    "{\"id\": \"wide\", \"file\": \"wide.qasm\"}]}\n");
    CHECK(cli({"run", "--snapshot", path_of("snap.json"), "--pool", path_of("pool.json"),
               "--workload", path_of("wide.json"), "--batch-cap", "1", "--shots", "16",
               "--seed", "3", "--report", path_of("report_wide.json")}) == 2);
    ReportFile rf = load_report(path_of("report_wide.json"));
    CHECK(rf.experiment.results.empty());
    CHECK(rf.experiment.infeasible == std::vector<std::string>{"wide"});
}

TEST_CASE("inject-defects composed with discover matches a pre-edited snapshot") {
    REQUIRE(cli({"gen-fixture", "--out", path_of("snap.json")}) == 0);
    REQUIRE(cli({"inject-defects", "--snapshot", path_of("snap.json"), "--kill-coupler", "4,5",
                 "--out", path_of("snap_injected.json")}) == 0);

    // The same edit made by hand on the parsed snapshot must produce the
    // same bytes, and discovery downstream must not notice the difference.
    CalibrationSnapshot snap = parse_snapshot(read_text_file(path_of("snap.json")));
    snap.find_coupler(4, 5)->operational = false;
    write_text_file(path_of("snap_edited.json"), snapshot_to_json(snap));
    CHECK(read_text_file(path_of("snap_injected.json")) ==
          read_text_file(path_of("snap_edited.json")));

    REQUIRE(cli({"discover", "--snapshot", path_of("snap_injected.json"), "--out",
                 path_of("pool_injected.json"), "--seed", "7"}) == 0);
    REQUIRE(cli({"discover", "--snapshot", path_of("snap_edited.json"), "--out",
                 path_of("pool_edited.json"), "--seed", "7"}) == 0);
    CHECK(read_text_file(path_of("pool_injected.json")) ==
          read_text_file(path_of("pool_edited.json")));

    // The killed coupler never appears inside a region.
    HardwareGraph g =
        HardwareGraph::build(parse_snapshot(read_text_file(path_of("snap_injected.json"))));
    RegionPool pool = load_pool(path_of("pool_injected.json"), g);
    for (const Region& r : pool.regions)
        for (const GraphEdge& e : r.edges) CHECK_FALSE((e.u == 4 && e.v == 5));

    // Degrading keeps the coupler but pins its error to the ceiling.
    REQUIRE(cli({"inject-defects", "--snapshot", path_of("snap.json"), "--degrade-coupler",
                 "4,5", "--out", path_of("snap_degraded.json")}) == 0);
    CalibrationSnapshot deg = parse_snapshot(read_text_file(path_of("snap_degraded.json")));
    REQUIRE(deg.find_coupler(4, 5) != nullptr);
    CHECK(deg.find_coupler(4, 5)->operational);
    CHECK(deg.find_coupler(4, 5)->gate_error == doctest::Approx(1.0));

    CHECK(cli({"inject-defects", "--snapshot", path_of("snap.json"), "--kill-coupler", "4;5",
               "--out", path_of("x.json")}) == 1);
}

TEST_CASE("usage errors exit 1, help exits 0") {
    CHECK(cli({}) == 1);
    CHECK(cli({"frobnicate"}) == 1);
    CHECK(cli({"discover", "--bogus-flag"}) == 1);
    CHECK(cli({"--help"}) == 0);
    CHECK(cli({"schedule", "--snapshot", path_of("snap.json")}) == 1);  // missing required
}
