#include "qvm/serialize.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qvm/error.hpp"
#include "qvm/qasm.hpp"

namespace qvm {

using json = nlohmann::json;

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write file '" + path + "'");
    out << text;
    if (!out) throw ValidationError("write to '" + path + "' failed");
}

namespace {

json parse_json_text(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(what + " is not valid JSON: " + e.what());
    }
}

}  // namespace

std::vector<WorkloadItem> load_workload(const std::string& manifest_path) {
    json j = parse_json_text(read_text_file(manifest_path), "workload manifest");
    if (!j.is_object() || !j.contains("circuits") || !j["circuits"].is_array())
        throw ValidationError("workload manifest needs a 'circuits' array");

    std::filesystem::path base = std::filesystem::path(manifest_path).parent_path();
    std::vector<WorkloadItem> workload;
    std::set<std::string> seen;
    for (const json& entry : j["circuits"]) {
        if (!entry.is_object() || !entry.contains("id") || !entry.contains("file"))
            throw ValidationError("each workload circuit needs 'id' and 'file'");
        std::string id = entry["id"].get<std::string>();
        std::string file = entry["file"].get<std::string>();
        if (id.empty()) throw ValidationError("workload circuit with empty id");
        if (!seen.insert(id).second)
            throw ValidationError("duplicate circuit id '" + id + "' in workload");
        std::filesystem::path p(file);
        if (p.is_relative()) p = base / p;
        workload.push_back({id, load_qasm_file(p.string())});
    }
    return workload;
}

std::string pool_to_json(const RegionPool& pool) {
    json j;
    j["schema_version"] = 1;
    json regions = json::array();
    for (const Region& r : pool.regions) {
        json jr;
        jr["id"] = r.id;
        jr["vertices"] = r.vertices;
        jr["scores"] = {{"s_conn", r.scores.s_conn}, {"s_gate", r.scores.s_gate},
                        {"s_ro", r.scores.s_ro},     {"s_unif", r.scores.s_unif},
                        {"q", r.scores.q}};
        regions.push_back(jr);
    }
    j["regions"] = regions;
    j["covered"] = pool.covered;
    j["uncovered"] = pool.uncovered;
    return j.dump(2) + "\n";
}

RegionPool parse_pool(const std::string& json_text, const HardwareGraph& g) {
    json j = parse_json_text(json_text, "region pool");
    if (!j.is_object() || !j.contains("regions") || !j["regions"].is_array())
        throw ValidationError("region pool needs a 'regions' array");

    RegionPool pool;
    for (const json& jr : j["regions"]) {
        Region r;
        r.id = jr.at("id").get<int>();
        r.vertices = jr.at("vertices").get<std::vector<int>>();
        for (int v : r.vertices)
            if (!g.has_vertex(v))
                throw ValidationError("region " + std::to_string(r.id) + " references vertex " +
                                      std::to_string(v) + " missing from the graph");
        const json& s = jr.at("scores");
        r.scores.s_conn = s.at("s_conn").get<double>();
        r.scores.s_gate = s.at("s_gate").get<double>();
        r.scores.s_ro = s.at("s_ro").get<double>();
        r.scores.s_unif = s.at("s_unif").get<double>();
        r.scores.q = s.at("q").get<double>();
        r.edges = induced_edges(g, r.vertices);
        pool.regions.push_back(std::move(r));
    }
    if (j.contains("covered")) pool.covered = j["covered"].get<std::vector<int>>();
    if (j.contains("uncovered")) pool.uncovered = j["uncovered"].get<std::vector<int>>();
    return pool;
}

RegionPool load_pool(const std::string& path, const HardwareGraph& g) {
    return parse_pool(read_text_file(path), g);
}

namespace {

json run_result_to_json(const RunResult& r) {
    json jr;
    jr["circuit_id"] = r.circuit_id;
    jr["counts"] = r.counts;
    jr["shots"] = r.shots;
    jr["d_l1"] = r.d_l1;
    jr["fidelity"] = r.fidelity;
    jr["swap_count"] = r.swap_count;
    jr["footprint"] = r.footprint;
    jr["job_index"] = r.job_index;
    return jr;
}

RunResult run_result_from_json(const json& jr) {
    RunResult r;
    r.circuit_id = jr.at("circuit_id").get<std::string>();
    r.counts = jr.at("counts").get<Counts>();
    r.shots = jr.at("shots").get<int>();
    r.d_l1 = jr.at("d_l1").get<double>();
    r.fidelity = jr.at("fidelity").get<double>();
    r.swap_count = jr.at("swap_count").get<int>();
    r.footprint = jr.at("footprint").get<std::vector<int>>();
    r.job_index = jr.at("job_index").get<int>();
    return r;
}

json experiment_to_json(const ExperimentReport& rep) {
    json je;
    je["batch_cap"] = rep.batch_cap;
    je["shots"] = rep.shots;
    je["seed"] = rep.seed;
    je["jobs_used"] = rep.jobs_used;
    je["cost_reduction"] = rep.cost_reduction;
    je["mean_fidelity"] = rep.mean_fidelity;
    je["std_fidelity"] = rep.std_fidelity;
    json results = json::array();
    for (const RunResult& r : rep.results) results.push_back(run_result_to_json(r));
    je["results"] = results;
    je["infeasible"] = rep.infeasible;
    je["cache_hits"] = rep.cache_hits;
    je["cache_misses"] = rep.cache_misses;
    return je;
}

ExperimentReport experiment_from_json(const json& je) {
    ExperimentReport rep;
    rep.batch_cap = je.at("batch_cap").get<int>();
    rep.shots = je.at("shots").get<int>();
    rep.seed = je.at("seed").get<std::uint64_t>();
    rep.jobs_used = je.at("jobs_used").get<int>();
    rep.cost_reduction = je.at("cost_reduction").get<double>();
    rep.mean_fidelity = je.at("mean_fidelity").get<double>();
    rep.std_fidelity = je.at("std_fidelity").get<double>();
    for (const json& jr : je.at("results")) rep.results.push_back(run_result_from_json(jr));
    rep.infeasible = je.at("infeasible").get<std::vector<std::string>>();
    rep.cache_hits = je.at("cache_hits").get<int>();
    rep.cache_misses = je.at("cache_misses").get<int>();
    return rep;
}

}  // namespace

std::string report_to_json(const ReportFile& report) {
    json j;
    j["schema_version"] = report.schema_version;
    j["batch_cap"] = report.batch_cap;
    j["shots"] = report.shots;
    j["seed"] = report.seed;
    j["experiment"] = experiment_to_json(report.experiment);
    if (report.baseline) j["baseline"] = experiment_to_json(*report.baseline);
    if (report.sweep) {
        json js;
        json points = json::array();
        for (const BatchPoint& p : report.sweep->points) {
            json jp;
            jp["batch_cap"] = p.batch_cap;
            jp["jobs_used"] = p.jobs_used;
            jp["cost_reduction"] = p.cost_reduction;
            jp["mean_fidelity"] = p.mean_fidelity;
            jp["std_fidelity"] = p.std_fidelity;
            jp["infeasible"] = p.infeasible;
            points.push_back(jp);
        }
        js["points"] = points;
        js["pearson_r"] = report.sweep->pearson_r;
        j["sweep"] = js;
    }
    return j.dump(2) + "\n";
}

ReportFile parse_report(const std::string& json_text) {
    json j = parse_json_text(json_text, "report");
    if (!j.is_object() || !j.contains("schema_version"))
        throw ValidationError("report needs a schema_version field");
    ReportFile rf;
    rf.schema_version = j["schema_version"].get<int>();
    if (rf.schema_version != 1)
        throw ValidationError("unsupported report schema_version " +
                              std::to_string(rf.schema_version));
    rf.batch_cap = j.at("batch_cap").get<int>();
    rf.shots = j.at("shots").get<int>();
    rf.seed = j.at("seed").get<std::uint64_t>();
    rf.experiment = experiment_from_json(j.at("experiment"));
    if (j.contains("baseline")) rf.baseline = experiment_from_json(j["baseline"]);
    if (j.contains("sweep")) {
        SweepResult sw;
        for (const json& jp : j["sweep"].at("points")) {
            BatchPoint p;
            p.batch_cap = jp.at("batch_cap").get<int>();
            p.jobs_used = jp.at("jobs_used").get<int>();
            p.cost_reduction = jp.at("cost_reduction").get<double>();
            p.mean_fidelity = jp.at("mean_fidelity").get<double>();
            p.std_fidelity = jp.at("std_fidelity").get<double>();
            p.infeasible = jp.at("infeasible").get<int>();
            sw.points.push_back(p);
        }
        sw.pearson_r = j["sweep"].at("pearson_r").get<double>();
        rf.sweep = sw;
    }
    return rf;
}

ReportFile load_report(const std::string& path) { return parse_report(read_text_file(path)); }

}  // namespace qvm
