#ifndef STEPREG_SERIALIZE_HPP
#define STEPREG_SERIALIZE_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "stepreg/complexity.hpp"
#include "stepreg/experiments.hpp"
#include "stepreg/model.hpp"
#include "stepreg/partitions.hpp"
#include "stepreg/posterior.hpp"

namespace stepreg {

using Json = nlohmann::json;

// StepFunction <-> {"breakpoints": [...], "heights": [...]}
Json step_function_to_json(const StepFunction& f);
StepFunction step_function_from_json(const Json& j);

// Partition <-> {"n": ..., "splits": [...], "kind": "EB"|"BI"}
Json partition_to_json(const Partition& p);
Partition partition_from_json(const Json& j);

Json complexity_result_to_json(const ComplexityResult& r);

Json posterior_summary_to_json(const PosteriorSummary& s, bool include_samples = true);

// Dataset files: CSV with header "x,y" plus a JSON sidecar
// {"n": ..., "seed": ..., "noise_sd": ...}. Doubles are written with 17
// significant digits so a read-back reproduces them bit for bit.
void write_dataset_csv(const Dataset& d, const std::string& csv_path);
void write_dataset_sidecar(const Dataset& d, const std::string& json_path);
Dataset read_dataset(const std::string& csv_path, const std::string& sidecar_path = "");

std::string format_double(double v);        // %.17g, round-trip exact
std::string format_double_short(double v);  // %.12g, presentation tables

std::string concentration_rows_to_csv(const std::vector<ConcentrationRow>& rows);
std::string ck_rows_to_csv(const std::vector<CkRow>& rows);

void write_text_file(const std::string& path, const std::string& contents);
std::string read_text_file(const std::string& path);

}  // namespace stepreg

#endif
