#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cmosb/binning.hpp"
#include "cmosb/gbdt.hpp"
#include "cmosb/he_scheme.hpp"

namespace cmosb::fed {

// One audit line of the message-level simulation.
struct TranscriptRecord {
  int round = 0;
  int class_slot = 0;
  int node = -1;  // -1 for per-round messages
  std::string message_kind;
  std::size_t payload_size = 0;
  HECounters counter_deltas;
};

using TranscriptSink = std::function<void(const TranscriptRecord&)>;

// Active -> passive: encrypted (g, h) of the round's subsample, indexed by row id.
struct EncryptedGradients {
  int class_slot = 0;
  std::vector<std::size_t> rows;
  std::vector<Ciphertext> g;  // parallel to rows
  std::vector<Ciphertext> h;
};

struct EncryptedBin {
  int bin = 0;
  Ciphertext sum_g;
  Ciphertext sum_h;
  std::size_t count = 0;
};

// Passive -> active: populated bins of one passive feature.
struct EncryptedHistogram {
  std::size_t feature = 0;
  std::vector<EncryptedBin> bins;
};

// A split the passive party holds in its model shard.
struct ShardEntry {
  int round = 0;
  int class_slot = 0;
  int node = 0;
  std::size_t feature = 0;
  int bin = 0;
};

class PassiveParty {
 public:
  PassiveParty(const gbdt::BinnedMatrix& bins, std::vector<std::size_t> columns,
               HomomorphicScheme& scheme);

  const std::vector<std::size_t>& columns() const { return columns_; }
  void receive_gradients(EncryptedGradients message);

  // Ciphertext histograms over I for every passive feature. Adding into an
  // empty bin is an assignment, so each statistic costs |I| - populated adds.
  std::vector<EncryptedHistogram> aggregate(std::span<const std::size_t> instances);

  // Partitions I by its own feature and records the split; returns I_L.
  std::vector<std::size_t> apply_split(const ShardEntry& entry, std::span<const std::size_t> instances);

  const std::vector<ShardEntry>& model_shard() const { return shard_; }

 private:
  const gbdt::BinnedMatrix& bins_;
  std::vector<std::size_t> columns_;
  HomomorphicScheme& scheme_;
  std::vector<std::int32_t> slot_of_row_;
  EncryptedGradients gradients_;
  std::vector<ShardEntry> shard_;
};

class ActiveParty {
 public:
  ActiveParty(const gbdt::BinnedMatrix& bins, std::vector<std::size_t> columns,
              HomomorphicScheme& scheme);

  const std::vector<std::size_t>& columns() const { return columns_; }
  const HECounters& counters() const { return scheme_.counters(); }

  // Quantizes `gradients` (indexed by row id) to the fixed-point grid, keeps
  // them for its own histograms and encrypts the rows of the subsample.
  EncryptedGradients encrypt_gradients(int class_slot, std::span<const std::size_t> rows,
                                       std::span<const gbdt::GradientPair> gradients);

  std::span<const gbdt::GradientPair> gradients() const { return gradients_; }
  std::vector<gbdt::FeatureHistogram> own_histograms(std::span<const std::size_t> instances) const;
  std::vector<gbdt::FeatureHistogram> decrypt_histograms(std::span<const EncryptedHistogram> hists);
  std::pair<std::vector<std::size_t>, std::vector<std::size_t>> partition(
      std::size_t feature, int bin, std::span<const std::size_t> instances) const;

 private:
  const gbdt::BinnedMatrix& bins_;
  std::vector<std::size_t> columns_;
  HomomorphicScheme& scheme_;
  std::vector<gbdt::GradientPair> gradients_;
};

enum class SplitOwner { None, Active, Passive };

struct SplitDecision {
  SplitOwner owner = SplitOwner::None;  // None: the node becomes a leaf
  std::size_t feature = 0;
  int bin = 0;
  double gain = 0.0;
  std::vector<std::size_t> left;
  std::vector<std::size_t> right;
};

struct SplitContext {
  int round = 0;
  int class_slot = 0;
  int node = 0;
};

// One SecureBoost split-finding exchange over node instance space I. `passive`
// may be null, restricting the search to active features. Ties between the
// parties go to the active party, then to the lower feature and bin.
SplitDecision split_finding(std::span<const std::size_t> instances, ActiveParty& active,
                            PassiveParty* passive, const gbdt::SplitParams& params,
                            const SplitContext& where, const TranscriptSink* transcript = nullptr);

}  // namespace cmosb::fed
