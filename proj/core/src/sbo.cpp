#include "cmosb/sbo.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cmosb/error.hpp"
#include "cmosb/random.hpp"

namespace cmosb::fed {

namespace {

void require(bool ok, const char* field, const std::string& range) {
  if (!ok) throw ParameterError(std::string("training config: ") + field + " must be in " + range);
}

}  // namespace

void TrainingConfig::validate() const {
  require(federated_rounds >= 1, "n_f", "[1, inf)");
  require(local_rounds >= 0, "n_l", "[0, inf)");
  require(max_depth >= 1 && max_depth <= 8, "d", "[1, 8]");
  require(subsample > 0.0 && subsample <= 1.0, "r", "(0, 1]");
  require(purity_threshold >= 0.0 && purity_threshold <= 1.0, "p", "[0, 1]");
  require(learning_rate > 0.0 && learning_rate <= 1.0, "eta", "(0, 1]");
}

bool TrainingConfig::within_search_space() const {
  return federated_rounds >= 1 && federated_rounds <= 16 && local_rounds >= 1 &&
         local_rounds <= 16 && max_depth >= 1 && max_depth <= 8 && subsample >= 0.1 &&
         subsample <= 1.0 && purity_threshold >= 0.1 && purity_threshold <= 1.0 &&
         learning_rate >= 0.01 && learning_rate <= 0.3;
}

double node_purity(std::span<const std::size_t> instances, std::span<const int> labels) {
  if (instances.empty()) throw ParameterError("node_purity: empty instance set");
  std::vector<std::size_t> counts;
  for (std::size_t row : instances) {
    const auto y = static_cast<std::size_t>(labels[row]);
    if (y >= counts.size()) counts.resize(y + 1, 0);
    ++counts[y];
  }
  const auto top = *std::max_element(counts.begin(), counts.end());
  return static_cast<double>(top) / static_cast<double>(instances.size());
}

TrainingContext TrainingContext::prepare(std::shared_ptr<const data::Dataset> dataset,
                                         const ContextOptions& options, std::uint64_t seed) {
  if (!dataset) throw ParameterError("training context: no dataset");
  const auto& ds = *dataset;
  if (ds.class_count < 2) throw ParameterError("training context: need at least two classes");
  if (ds.cols() < 2) throw ParameterError("training context: need at least two feature columns");
  if (options.known_per_class == 0 || options.probe_per_class == 0)
    throw ParameterError("training context: probe and known counts must be positive");
  options.cost_model.validate();

  TrainingContext ctx;
  const std::size_t active = options.active_count == 0 ? std::max<std::size_t>(1, ds.cols() / 2)
                                                       : options.active_count;
  ctx.partition = data::vertical_partition(ds, active, derive_seed(seed, {0x70}),
                                           options.shuffled_partition);
  ctx.split = data::train_test_split(ds, derive_seed(seed, {0x71}));
  ctx.bins = gbdt::BinnedMatrix(ds.features,
                                gbdt::quantile_binning(ds.features, ctx.split.train_rows, options.bins));

  std::vector<int> train_labels;
  train_labels.reserve(ctx.split.train_rows.size());
  for (std::size_t row : ctx.split.train_rows) train_labels.push_back(ds.labels[row]);
  std::vector<std::size_t> class_sizes(static_cast<std::size_t>(ds.class_count), 0);
  for (int y : train_labels) ++class_sizes[static_cast<std::size_t>(y)];
  const auto smallest = *std::min_element(class_sizes.begin(), class_sizes.end());
  if (smallest == 0) throw SamplingError("training context: a class is absent from the train split");
  const std::size_t per_class = std::min(options.probe_per_class, smallest);

  // Class-sorted probe order would let index-block fallbacks line up with the
  // classes, so the probe is shuffled.
  auto probe = data::sample_balanced(train_labels, per_class, derive_seed(seed, {0x72}));
  Rng rng(derive_seed(seed, {0x74}));
  std::shuffle(probe.begin(), probe.end(), rng);
  for (std::size_t pos : probe) {
    ctx.probe_rows.push_back(ctx.split.train_rows[pos]);
    ctx.probe_labels.push_back(train_labels[pos]);
  }
  ctx.knowledge = attack::sample_knowledge(ctx.probe_labels, ds.class_count,
                                           std::min(options.known_per_class, per_class),
                                           derive_seed(seed, {0x73}));
  ctx.split_params = options.split;
  ctx.cost_model = options.cost_model;
  ctx.backend = options.backend;
  ctx.modulus_bits = options.modulus_bits;
  ctx.dataset = std::move(dataset);
  return ctx;
}

namespace {

// Grows one federated tree depth-first, left child first, logging the leaves
// the passive party can observe.
class FederatedTreeBuilder {
 public:
  FederatedTreeBuilder(const TrainingConfig& config, const TrainingContext& ctx, ActiveParty& active,
                       PassiveParty* passive, const SplitContext& where,
                       const TranscriptSink* transcript)
      : config_(config),
        ctx_(ctx),
        active_(active),
        passive_(passive),
        where_(where),
        transcript_(transcript) {}

  void build(std::vector<std::size_t> instances) {
    tree_.nodes.push_back(gbdt::TreeNode{.depth = 0});
    grow(0, std::move(instances), false);
  }

  gbdt::DecisionTree& tree() { return tree_; }
  LoggedTree& logged() { return logged_; }
  std::size_t splits() const { return splits_; }
  std::size_t passive_splits() const { return passive_splits_; }

 private:
  void grow(int node, std::vector<std::size_t> instances, bool passive_on_path) {
    const auto grads = active_.gradients();
    double g = 0.0;
    double h = 0.0;
    for (std::size_t row : instances) {
      g += grads[row].g;
      h += grads[row].h;
    }
    tree_.nodes[node].weight = gbdt::leaf_weight(g, h, ctx_.split_params);
    const int depth = tree_.nodes[node].depth;

    if (depth >= config_.max_depth || instances.size() < 2) {
      leaf(node, std::move(instances), passive_on_path);
      return;
    }
    if (config_.purity_defense &&
        node_purity(instances, ctx_.dataset->labels) >= config_.purity_threshold) {
      gbdt::grow_local_subtree(tree_, node, ctx_.bins, ctx_.partition.active_columns,
                               std::move(instances), grads, config_.max_depth, ctx_.split_params,
                               gbdt::NodeOwner::Local);
      return;
    }

    SplitContext at = where_;
    at.node = node;
    auto decision = split_finding(instances, active_, passive_, ctx_.split_params, at, transcript_);
    if (decision.owner == SplitOwner::None) {
      leaf(node, std::move(instances), passive_on_path);
      return;
    }
    ++splits_;
    const bool by_passive = decision.owner == SplitOwner::Passive;
    if (by_passive) ++passive_splits_;
    instances.clear();
    instances.shrink_to_fit();

    const int left = static_cast<int>(tree_.nodes.size());
    tree_.nodes.push_back(gbdt::TreeNode{.depth = depth + 1});
    const int right = static_cast<int>(tree_.nodes.size());
    tree_.nodes.push_back(gbdt::TreeNode{.depth = depth + 1});
    auto& n = tree_.nodes[node];
    n.feature = static_cast<int>(decision.feature);
    n.bin = decision.bin;
    n.threshold = ctx_.bins.edges().cut_value(decision.feature, decision.bin);
    n.left = left;
    n.right = right;
    n.owner = by_passive ? gbdt::NodeOwner::Passive : gbdt::NodeOwner::Active;
    grow(left, std::move(decision.left), passive_on_path || by_passive);
    grow(right, std::move(decision.right), passive_on_path || by_passive);
  }

  void leaf(int node, std::vector<std::size_t> instances, bool passive_on_path) {
    if (passive_on_path) logged_.leaves.push_back({node, std::move(instances)});
  }

  const TrainingConfig& config_;
  const TrainingContext& ctx_;
  ActiveParty& active_;
  PassiveParty* passive_;
  SplitContext where_;
  const TranscriptSink* transcript_;
  gbdt::DecisionTree tree_;
  LoggedTree logged_;
  std::size_t splits_ = 0;
  std::size_t passive_splits_ = 0;
};

std::vector<std::size_t> subsample_rows(std::span<const std::size_t> train_rows, double ratio,
                                        std::uint64_t seed) {
  const auto k = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(train_rows.size())));
  if (k == 0) throw ParameterError("sbo_train: subsample ratio selects no instance");
  std::vector<std::size_t> rows(train_rows.begin(), train_rows.end());
  Rng rng(seed);
  std::shuffle(rows.begin(), rows.end(), rng);
  rows.resize(k);
  std::sort(rows.begin(), rows.end());
  return rows;
}

}  // namespace

SboResult sbo_train(const TrainingConfig& config, const TrainingContext& ctx, std::uint64_t seed,
                    const TranscriptSink* transcript) {
  config.validate();
  if (!ctx.dataset) throw ParameterError("sbo_train: context has no dataset");
  const auto& ds = *ctx.dataset;
  const auto& train = ctx.split.train_rows;

  SboResult result;
  auto& forest = result.forest;
  forest.learning_rate = config.learning_rate;
  forest.loss = gbdt::loss_for_classes(ds.class_count);
  forest.class_count = ds.class_count;
  forest.feature_count = ds.cols();
  forest.edges = ctx.bins.edges();
  const int slots = forest.slots();
  Matrix scores(ds.rows(), static_cast<std::size_t>(slots));

  // Stage 1: active party alone, own columns, no HE.
  for (int round = 0; round < config.local_rounds; ++round) {
    const auto grads = gbdt::compute_gradients(ds.labels, scores, forest.loss);
    for (int slot = 0; slot < slots; ++slot) {
      auto tree = gbdt::train_local_tree(ctx.bins, ctx.partition.active_columns, train,
                                         grads[static_cast<std::size_t>(slot)], config.max_depth,
                                         ctx.split_params, gbdt::NodeOwner::Local);
      tree.class_slot = slot;
      gbdt::add_tree_scores(tree, forest.learning_rate, ctx.bins, train, scores);
      forest.trees.push_back(std::move(tree));
    }
  }

  // Stage 2: federated rounds.
  auto scheme = make_scheme(ctx.backend, derive_seed(seed, {0x5c4e}), ctx.modulus_bits);
  ActiveParty active(ctx.bins, ctx.partition.active_columns, *scheme);
  PassiveParty passive(ctx.bins, ctx.partition.passive_columns, *scheme);
  attack::CoLocationCounter colocation(ctx.probe_rows);
  double leakage = 0.0;
  double cost = 0.0;

  for (int round = 0; round < config.federated_rounds; ++round) {
    const HECounters at_start = scheme->counters();
    const auto rows = subsample_rows(train, config.subsample, derive_seed(seed, {0x5b, static_cast<std::uint64_t>(round)}));
    const auto grads = gbdt::compute_gradients(ds.labels, scores, forest.loss);
    const bool active_only = config.complete_secure && round == 0;
    std::size_t round_leaves = 0;

    for (int slot = 0; slot < slots; ++slot) {
      const HECounters before = scheme->counters();
      auto message = active.encrypt_gradients(slot, rows, grads[static_cast<std::size_t>(slot)]);
      if (transcript && *transcript)
        (*transcript)({round, slot, -1, "encrypted_gradients", 2 * rows.size(),
                       scheme->counters() - before});
      passive.receive_gradients(std::move(message));

      FederatedTreeBuilder builder(config, ctx, active, active_only ? nullptr : &passive,
                                   {round, slot, 0}, transcript);
      builder.build(rows);
      auto& tree = builder.tree();
      tree.class_slot = slot;
      tree.federated = true;
      gbdt::add_tree_scores(tree, forest.learning_rate, ctx.bins, train, scores);
      forest.trees.push_back(std::move(tree));
      result.federated_splits += builder.splits();
      result.passive_splits += builder.passive_splits();

      auto& logged = builder.logged();
      logged.round = round;
      logged.class_slot = slot;
      round_leaves += logged.leaves.size();
      colocation.add_tree(logged);
      result.log.trees.push_back(std::move(logged));
    }

    RoundMetrics m;
    m.round = round;
    m.counters = scheme->counters() - at_start;
    m.cost = objectives::training_cost(m.counters, ctx.cost_model);
    m.leakage =
        attack::run_attack(colocation, ctx.probe_labels, ctx.knowledge, ds.class_count).accuracy;
    m.logged_leaves = round_leaves;
    cost += m.cost;
    leakage = std::max(leakage, m.leakage);
    result.rounds.push_back(m);
  }

  result.counters = scheme->counters();
  result.objectives.training_cost = cost;
  result.objectives.privacy_leakage = leakage;
  result.objectives.utility_loss =
      objectives::utility_loss(forest, ds.features, ds.labels, ctx.split.test_rows);
  return result;
}

}  // namespace cmosb::fed
