#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gemlaw/bench_laws.hpp"
#include "gemlaw/hull.hpp"
#include "gemlaw/ingest.hpp"
#include "gemlaw/parametric.hpp"
#include "gemlaw/sensitivity.hpp"

namespace gemlaw {

using Json = nlohmann::json;

// JSON encodings. Keys are emitted in sorted order by the JSON library, so
// identical inputs produce byte-identical documents.
Json to_json(const ModelShape& shape);
Json to_json(const ArchConfig& arch);
Json to_json(const FlopBreakdown& breakdown);
Json to_json(const LineFit& fit);
Json to_json(const FrontierPoint& point);
Json to_json(const HullFit& fit);
Json to_json(const ParametricLaw& law);
Json to_json(const ParametricFitReport& report);
Json to_json(const CoeffGrid& grid);
Json to_json(const FitConfig& config);
Json to_json(const Prescription& prescription);
Json to_json(const ErrLaw& law);
Json to_json(const AccLaw& law);
Json to_json(const FilterSpec& spec);
Json to_json(const AblationTable& table);
Json to_json(const LooResult& result);
Json to_json(const DeltaGridResult& result);
Json to_json(std::span<const OvertrainingPoint> points);

ModelShape shape_from_json(const Json& j);
FilterSpec filter_from_json(const Json& j);
CoeffGrid grid_from_json(const Json& j);
ParametricLaw law_from_json(const Json& j);
std::vector<AblationRowSpec> ablation_rows_from_json(const Json& j);

/// Report envelope: tool name/version, the fully resolved configuration,
/// SHA-256 digests of every input file, and the result. No timestamps, so
/// reruns over identical inputs are byte-identical.
Json make_report(const std::string& kind, Json config,
                 const std::vector<std::filesystem::path>& inputs, Json result);

void write_json_file(const std::filesystem::path& path, const Json& doc);
Json read_json_file(const std::filesystem::path& path);

/// Prescription table as CSV: compute,n_opt,d_opt,tokens_per_param.
std::string prescription_csv(const Prescription& p);

}  // namespace gemlaw
