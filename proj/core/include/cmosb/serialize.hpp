#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>
#include <vector>

#include "cmosb/attack.hpp"
#include "cmosb/gbdt.hpp"
#include "cmosb/leaf_log.hpp"
#include "cmosb/protocol.hpp"
#include "cmosb/sbo.hpp"

namespace cmosb::io {

using nlohmann::json;

// Major.minor; readers accept any minor of their own major.
inline constexpr std::string_view kSchemaVersion = "1.0";

// Throws IngestionError when `doc` lacks schema_version, carries another
// major, or names a different document kind.
void check_schema(const json& doc, std::string_view kind);
json stamped(std::string_view kind);

json to_json(const gbdt::Forest& forest);
gbdt::Forest forest_from_json(const json& doc);

// The attacker's inputs: the passive-party leaf view plus the probe set and
// the labels it is assumed to know.
struct LeafLogDocument {
  fed::LeafAssignmentLog log;
  std::vector<std::size_t> probe_rows;
  std::vector<int> probe_labels;
  attack::AttackerKnowledge knowledge;
  int class_count = 2;
};

json to_json(const LeafLogDocument& doc);
LeafLogDocument leaf_log_from_json(const json& doc);

json to_json(const attack::AttackReport& report);
json to_json(const fed::TrainingConfig& config);
fed::TrainingConfig training_config_from_json(const json& doc);
json to_json(const fed::HECounters& counters);
json to_json(const objectives::ObjectiveVector& v);
json to_json(const fed::RoundMetrics& m);
// Training report: config, objectives, counters and per-round metrics.
json run_report(const fed::TrainingConfig& config, const fed::SboResult& result, std::uint64_t seed);

// One transcript line (no schema stamp; the stream header carries it).
json to_json(const fed::TranscriptRecord& record);

}  // namespace cmosb::io
