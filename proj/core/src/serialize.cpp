#include "cmosb/serialize.hpp"

#include "cmosb/error.hpp"

namespace cmosb::io {

namespace {

std::string major_of(std::string_view version) {
  return std::string(version.substr(0, version.find('.')));
}

const char* owner_name(gbdt::NodeOwner o) {
  switch (o) {
    case gbdt::NodeOwner::Active: return "active";
    case gbdt::NodeOwner::Passive: return "passive";
    case gbdt::NodeOwner::Local: return "local";
  }
  return "active";
}

gbdt::NodeOwner owner_from(const std::string& s) {
  if (s == "active") return gbdt::NodeOwner::Active;
  if (s == "passive") return gbdt::NodeOwner::Passive;
  if (s == "local") return gbdt::NodeOwner::Local;
  throw IngestionError("forest: unknown node owner '" + s + "'");
}

template <typename F>
auto guarded(std::string_view what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw IngestionError(std::string(what) + ": malformed document: " + e.what());
  }
}

}  // namespace

void check_schema(const json& doc, std::string_view kind) {
  if (!doc.is_object() || !doc.contains("schema_version") || !doc["schema_version"].is_string())
    throw IngestionError(std::string(kind) + ": missing schema_version");
  const auto version = doc["schema_version"].get<std::string>();
  if (major_of(version) != major_of(kSchemaVersion))
    throw IngestionError(std::string(kind) + ": unsupported schema_version " + version);
  if (doc.contains("kind") && doc["kind"] != kind)
    throw IngestionError(std::string("expected a ") + std::string(kind) + " document, got " +
                         doc["kind"].dump());
}

json stamped(std::string_view kind) {
  return {{"schema_version", kSchemaVersion}, {"kind", kind}};
}

json to_json(const gbdt::Forest& forest) {
  json doc = stamped("forest");
  doc["learning_rate"] = forest.learning_rate;
  doc["loss"] = forest.loss == gbdt::LossKind::Logistic ? "logistic" : "softmax";
  doc["class_count"] = forest.class_count;
  doc["feature_count"] = forest.feature_count;
  json edges = json::array();
  for (std::size_t f = 0; f < forest.edges.feature_count(); ++f) edges.push_back(forest.edges.cuts(f));
  doc["edges"] = std::move(edges);
  json trees = json::array();
  for (const auto& t : forest.trees) {
    json nodes = json::array();
    for (const auto& n : t.nodes)
      nodes.push_back({{"feature", n.feature},
                       {"bin", n.bin},
                       {"threshold", n.threshold},
                       {"left", n.left},
                       {"right", n.right},
                       {"weight", n.weight},
                       {"depth", n.depth},
                       {"owner", owner_name(n.owner)}});
    trees.push_back({{"class_slot", t.class_slot}, {"federated", t.federated}, {"nodes", std::move(nodes)}});
  }
  doc["trees"] = std::move(trees);
  return doc;
}

gbdt::Forest forest_from_json(const json& doc) {
  check_schema(doc, "forest");
  return guarded("forest", [&] {
    gbdt::Forest f;
    f.learning_rate = doc.at("learning_rate").get<double>();
    const auto loss = doc.at("loss").get<std::string>();
    if (loss != "logistic" && loss != "softmax") throw IngestionError("forest: unknown loss " + loss);
    f.loss = loss == "logistic" ? gbdt::LossKind::Logistic : gbdt::LossKind::Softmax;
    f.class_count = doc.at("class_count").get<int>();
    f.feature_count = doc.at("feature_count").get<std::size_t>();
    f.edges = gbdt::BinEdges(doc.at("edges").get<std::vector<std::vector<double>>>());
    for (const auto& t : doc.at("trees")) {
      gbdt::DecisionTree tree;
      tree.class_slot = t.at("class_slot").get<int>();
      tree.federated = t.at("federated").get<bool>();
      for (const auto& n : t.at("nodes"))
        tree.nodes.push_back({n.at("feature").get<int>(), n.at("bin").get<int>(),
                              n.at("threshold").get<double>(), n.at("left").get<int>(),
                              n.at("right").get<int>(), n.at("weight").get<double>(),
                              n.at("depth").get<int>(), owner_from(n.at("owner").get<std::string>())});
      const auto count = static_cast<int>(tree.nodes.size());
      if (count == 0) throw IngestionError("forest: tree without nodes");
      for (const auto& n : tree.nodes)
        if (!n.is_leaf() && (n.left <= 0 || n.right <= 0 || n.left >= count || n.right >= count))
          throw IngestionError("forest: child index out of range");
      f.trees.push_back(std::move(tree));
    }
    return f;
  });
}

json to_json(const LeafLogDocument& d) {
  json doc = stamped("leaf_log");
  doc["class_count"] = d.class_count;
  doc["probe_rows"] = d.probe_rows;
  doc["probe_labels"] = d.probe_labels;
  doc["known"] = d.knowledge.known;
  json trees = json::array();
  for (const auto& t : d.log.trees) {
    json leaves = json::array();
    for (const auto& l : t.leaves) leaves.push_back({{"leaf_id", l.leaf_id}, {"instances", l.instances}});
    trees.push_back({{"round", t.round}, {"class_slot", t.class_slot}, {"leaves", std::move(leaves)}});
  }
  doc["trees"] = std::move(trees);
  return doc;
}

LeafLogDocument leaf_log_from_json(const json& doc) {
  check_schema(doc, "leaf_log");
  return guarded("leaf_log", [&] {
    LeafLogDocument d;
    d.class_count = doc.at("class_count").get<int>();
    d.probe_rows = doc.at("probe_rows").get<std::vector<std::size_t>>();
    d.probe_labels = doc.at("probe_labels").get<std::vector<int>>();
    d.knowledge.known = doc.at("known").get<std::vector<std::vector<std::size_t>>>();
    if (d.probe_rows.size() != d.probe_labels.size())
      throw IngestionError("leaf_log: probe rows and labels differ in length");
    if (d.class_count < 2 || d.knowledge.class_count() != d.class_count)
      throw IngestionError("leaf_log: known labels do not cover every class");
    for (const auto& t : doc.at("trees")) {
      fed::LoggedTree tree;
      tree.round = t.at("round").get<int>();
      tree.class_slot = t.at("class_slot").get<int>();
      for (const auto& l : t.at("leaves"))
        tree.leaves.push_back({l.at("leaf_id").get<int>(), l.at("instances").get<std::vector<std::size_t>>()});
      d.log.trees.push_back(std::move(tree));
    }
    return d;
  });
}

json to_json(const attack::AttackReport& r) {
  json doc = stamped("attack_report");
  doc["privacy_leakage"] = r.accuracy;
  doc["applicable"] = r.applicable;
  doc["degenerate"] = r.degenerate;
  doc["cluster_sizes"] = r.cluster_sizes;
  doc["cluster_labels"] = r.cluster_labels;
  doc["confusion"] = r.confusion;
  return doc;
}

json to_json(const fed::TrainingConfig& c) {
  return {{"n_f", c.federated_rounds},       {"n_l", c.local_rounds},
          {"d", c.max_depth},                {"r", c.subsample},
          {"p", c.purity_threshold},         {"eta", c.learning_rate},
          {"complete_secure", c.complete_secure}, {"purity_defense", c.purity_defense}};
}

fed::TrainingConfig training_config_from_json(const json& doc) {
  return guarded("training config", [&] {
    fed::TrainingConfig c;
    c.federated_rounds = doc.at("n_f").get<int>();
    c.local_rounds = doc.at("n_l").get<int>();
    c.max_depth = doc.at("d").get<int>();
    c.subsample = doc.at("r").get<double>();
    c.purity_threshold = doc.at("p").get<double>();
    c.learning_rate = doc.at("eta").get<double>();
    c.complete_secure = doc.at("complete_secure").get<bool>();
    c.purity_defense = doc.value("purity_defense", true);
    return c;
  });
}

json to_json(const fed::HECounters& c) { return {{"enc", c.enc}, {"dec", c.dec}, {"add", c.add}}; }

json to_json(const objectives::ObjectiveVector& v) {
  return {{"utility_loss", v.utility_loss},
          {"training_cost", v.training_cost},
          {"privacy_leakage", v.privacy_leakage}};
}

json to_json(const fed::RoundMetrics& m) {
  return {{"round", m.round},
          {"cost", m.cost},
          {"leakage", m.leakage},
          {"logged_leaves", m.logged_leaves},
          {"counters", to_json(m.counters)}};
}

json run_report(const fed::TrainingConfig& config, const fed::SboResult& result, std::uint64_t seed) {
  json doc = stamped("run_report");
  doc["seed"] = seed;
  doc["config"] = to_json(config);
  doc["objectives"] = to_json(result.objectives);
  doc["counters"] = to_json(result.counters);
  doc["federated_splits"] = result.federated_splits;
  doc["passive_splits"] = result.passive_splits;
  doc["logged_leaves"] = result.log.entry_count();
  json rounds = json::array();
  for (const auto& m : result.rounds) rounds.push_back(to_json(m));
  doc["rounds"] = std::move(rounds);
  return doc;
}

json to_json(const fed::TranscriptRecord& r) {
  return {{"round", r.round},
          {"class_slot", r.class_slot},
          {"node", r.node},
          {"message_kind", r.message_kind},
          {"payload_size", r.payload_size},
          {"counter_deltas", to_json(r.counter_deltas)}};
}

}  // namespace cmosb::io
