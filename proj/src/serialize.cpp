#include "stepreg/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace stepreg {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_double_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

Json step_function_to_json(const StepFunction& f) {
    Json j;
    j["breakpoints"] = Json::array();
    for (const Rat& b : f.breakpoints()) j["breakpoints"].push_back(b.to_double());
    j["heights"] = f.heights();
    return j;
}

StepFunction step_function_from_json(const Json& j) {
    const std::vector<double> bps = j.at("breakpoints").get<std::vector<double>>();
    std::vector<double> heights = j.at("heights").get<std::vector<double>>();
    return StepFunction::from_reals(bps, std::move(heights));
}

Json partition_to_json(const Partition& p) {
    Json j;
    j["n"] = p.n;
    j["splits"] = p.splits;
    j["kind"] = (p.kind == PartitionKind::EquivalentBlock) ? "EB" : "BI";
    return j;
}

Partition partition_from_json(const Json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind != "EB" && kind != "BI")
        throw std::invalid_argument("partition_from_json: kind must be \"EB\" or \"BI\"");
    return make_partition(j.at("n").get<int>(), j.at("splits").get<std::vector<int>>(),
                          kind == "EB" ? PartitionKind::EquivalentBlock
                                       : PartitionKind::BalancedInterval);
}

Json complexity_result_to_json(const ComplexityResult& r) {
    Json j;
    if (r.k)
        j["k"] = *r.k;
    else
        j["k"] = "exceeds-cap";
    j["cap"] = r.cap;
    j["witness_breakpoints"] = Json::array();
    for (const Rat& b : r.witness) j["witness_breakpoints"].push_back(b.to_double());
    return j;
}

Json posterior_summary_to_json(const PosteriorSummary& s, bool include_samples) {
    Json j;
    Json loge = Json::object(), post = Json::object();
    for (const auto& [k, v] : s.log_evidence_per_k) loge[std::to_string(k)] = v;
    for (const auto& [k, v] : s.posterior_k) post[std::to_string(k)] = v;
    j["log_evidence_per_k"] = loge;
    j["posterior_k"] = post;
    j["mean_on_grid"] = s.mean_on_grid;
    j["k_mode"] = s.k_mode();
    Json d;
    d["engine"] = s.diagnostics.engine;
    d["accept_birth"] = s.diagnostics.accept_birth;
    d["accept_death"] = s.diagnostics.accept_death;
    d["accept_relocate"] = s.diagnostics.accept_relocate;
    d["ess_k"] = s.diagnostics.ess_k;
    d["prior_tail_ok"] = s.diagnostics.prior_tail_ok;
    d["skipped_k"] = s.diagnostics.skipped_k;
    d["card_exact"] = s.diagnostics.card_exact;
    d["noise_scale"] = s.diagnostics.noise_scale;
    j["diagnostics"] = d;
    if (include_samples) {
        Json arr = Json::array();
        for (const StepFunction& f : s.samples) arr.push_back(step_function_to_json(f));
        j["samples"] = arr;
    }
    return j;
}

void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << contents;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_dataset_csv(const Dataset& d, const std::string& csv_path) {
    std::ostringstream out;
    out << "x,y\n";
    for (int i = 0; i < d.grid.n; ++i)
        out << format_double(d.grid.points[i]) << ',' << format_double(d.responses[i]) << '\n';
    write_text_file(csv_path, out.str());
}

void write_dataset_sidecar(const Dataset& d, const std::string& json_path) {
    Json j;
    j["n"] = d.grid.n;
    j["seed"] = d.seed;
    j["noise_sd"] = d.noise_sd;
    write_text_file(json_path, j.dump(2) + "\n");
}

Dataset read_dataset(const std::string& csv_path, const std::string& sidecar_path) {
    std::istringstream in(read_text_file(csv_path));
    std::string line;
    if (!std::getline(in, line) || line.rfind("x,y", 0) != 0)
        throw std::invalid_argument("read_dataset: expected header \"x,y\" in " + csv_path);
    std::vector<double> ys;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("read_dataset: malformed row: " + line);
        ys.push_back(std::stod(line.substr(comma + 1)));
    }
    if (ys.empty()) throw std::invalid_argument("read_dataset: no rows in " + csv_path);
    Dataset d;
    d.grid = make_grid(static_cast<int>(ys.size()));
    d.responses = std::move(ys);
    if (!sidecar_path.empty()) {
        const Json j = Json::parse(read_text_file(sidecar_path));
        if (j.at("n").get<int>() != d.grid.n)
            throw std::invalid_argument("read_dataset: sidecar n disagrees with CSV rows");
        d.seed = j.at("seed").get<std::uint64_t>();
        d.noise_sd = j.at("noise_sd").get<double>();
    }
    return d;
}

std::string concentration_rows_to_csv(const std::vector<ConcentrationRow>& rows) {
    std::ostringstream out;
    out << "n,k_f0,epsilon_n,median_error,mass_outside,k_mode_hit_rate,epsilon_n_bi\n";
    for (const ConcentrationRow& r : rows)
        out << r.n << ',' << r.k_f0 << ',' << format_double_short(r.epsilon_n) << ','
            << format_double_short(r.median_error) << ','
            << format_double_short(r.mass_outside) << ','
            << format_double_short(r.k_mode_hit_rate) << ','
            << format_double_short(r.epsilon_n_bi) << '\n';
    return out.str();
}

std::string ck_rows_to_csv(const std::vector<CkRow>& rows) {
    std::ostringstream out;
    out << "c_k,k_mode,median_error\n";
    for (const CkRow& r : rows)
        out << format_double_short(r.c_k) << ',' << r.k_mode << ','
            << format_double_short(r.median_error) << '\n';
    return out.str();
}

}  // namespace stepreg
