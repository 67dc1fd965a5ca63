#include "cmosb/protocol.hpp"

#include <algorithm>
#include <optional>
#include <tuple>

#include "cmosb/error.hpp"

namespace cmosb::fed {

PassiveParty::PassiveParty(const gbdt::BinnedMatrix& bins, std::vector<std::size_t> columns,
                           HomomorphicScheme& scheme)
    : bins_(bins), columns_(std::move(columns)), scheme_(scheme), slot_of_row_(bins.rows(), -1) {}

void PassiveParty::receive_gradients(EncryptedGradients message) {
  for (std::size_t row : gradients_.rows) slot_of_row_[row] = -1;
  gradients_ = std::move(message);
  for (std::size_t i = 0; i < gradients_.rows.size(); ++i)
    slot_of_row_[gradients_.rows[i]] = static_cast<std::int32_t>(i);
}

std::vector<EncryptedHistogram> PassiveParty::aggregate(std::span<const std::size_t> instances) {
  std::vector<EncryptedHistogram> out;
  out.reserve(columns_.size());
  struct Slot {
    std::optional<Ciphertext> g;
    std::optional<Ciphertext> h;
    std::size_t count = 0;
  };
  for (std::size_t f : columns_) {
    std::vector<Slot> slots(static_cast<std::size_t>(bins_.edges().bin_count(f)));
    for (std::size_t row : instances) {
      const std::int32_t at = slot_of_row_[row];
      if (at < 0) throw ParameterError("passive party: instance without encrypted gradient");
      auto& s = slots[bins_(row, f)];
      const auto& g = gradients_.g[static_cast<std::size_t>(at)];
      const auto& h = gradients_.h[static_cast<std::size_t>(at)];
      if (s.count == 0) {
        s.g = g;
        s.h = h;
      } else {
        s.g = scheme_.add(*s.g, g);
        s.h = scheme_.add(*s.h, h);
      }
      ++s.count;
    }
    EncryptedHistogram hist{f, {}};
    for (std::size_t b = 0; b < slots.size(); ++b)
      if (slots[b].count > 0)
        hist.bins.push_back({static_cast<int>(b), std::move(*slots[b].g), std::move(*slots[b].h),
                             slots[b].count});
    out.push_back(std::move(hist));
  }
  return out;
}

std::vector<std::size_t> PassiveParty::apply_split(const ShardEntry& entry,
                                                   std::span<const std::size_t> instances) {
  if (std::find(columns_.begin(), columns_.end(), entry.feature) == columns_.end())
    throw ParameterError("passive party: split on a feature it does not hold");
  shard_.push_back(entry);
  std::vector<std::size_t> left;
  for (std::size_t row : instances)
    if (bins_(row, entry.feature) <= entry.bin) left.push_back(row);
  return left;
}

ActiveParty::ActiveParty(const gbdt::BinnedMatrix& bins, std::vector<std::size_t> columns,
                         HomomorphicScheme& scheme)
    : bins_(bins), columns_(std::move(columns)), scheme_(scheme), gradients_(bins.rows()) {}

EncryptedGradients ActiveParty::encrypt_gradients(int class_slot, std::span<const std::size_t> rows,
                                                  std::span<const gbdt::GradientPair> gradients) {
  const auto& codec = scheme_.codec();
  std::fill(gradients_.begin(), gradients_.end(), gbdt::GradientPair{});
  EncryptedGradients msg;
  msg.class_slot = class_slot;
  msg.rows.assign(rows.begin(), rows.end());
  msg.g.reserve(rows.size());
  msg.h.reserve(rows.size());
  for (std::size_t row : rows) {
    gradients_[row] = {codec.quantize(gradients[row].g), codec.quantize(gradients[row].h)};
    msg.g.push_back(scheme_.encrypt(gradients[row].g));
    msg.h.push_back(scheme_.encrypt(gradients[row].h));
  }
  return msg;
}

std::vector<gbdt::FeatureHistogram> ActiveParty::own_histograms(
    std::span<const std::size_t> instances) const {
  std::vector<gbdt::FeatureHistogram> out;
  out.reserve(columns_.size());
  for (std::size_t f : columns_) out.push_back(gbdt::build_histogram(bins_, f, instances, gradients_));
  return out;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> ActiveParty::partition(
    std::size_t feature, int bin, std::span<const std::size_t> instances) const {
  return gbdt::partition_instances(bins_, feature, bin, instances);
}

std::vector<gbdt::FeatureHistogram> ActiveParty::decrypt_histograms(
    std::span<const EncryptedHistogram> hists) {
  std::vector<gbdt::FeatureHistogram> out;
  out.reserve(hists.size());
  for (const auto& eh : hists) {
    gbdt::FeatureHistogram h(static_cast<std::size_t>(bins_.edges().bin_count(eh.feature)));
    for (const auto& b : eh.bins)
      h[static_cast<std::size_t>(b.bin)] = {scheme_.decrypt(b.sum_g), scheme_.decrypt(b.sum_h), b.count};
    out.push_back(std::move(h));
  }
  return out;
}

SplitDecision split_finding(std::span<const std::size_t> instances, ActiveParty& active,
                            PassiveParty* passive, const gbdt::SplitParams& params,
                            const SplitContext& where, const TranscriptSink* transcript) {
  // Active party's own plaintext statistics.
  const auto own = active.own_histograms(instances);
  std::vector<gbdt::HistogramRef> refs;
  for (std::size_t i = 0; i < own.size(); ++i) refs.push_back({active.columns()[i], own[i]});
  const auto best_active = gbdt::find_best_split(refs, params);

  std::optional<gbdt::SplitCandidate> best_passive;
  if (passive != nullptr && !passive->columns().empty()) {
    if (transcript && *transcript)
      (*transcript)({where.round, where.class_slot, where.node, "node_request", instances.size(), {}});
    HECounters before = active.counters();
    const auto encrypted = passive->aggregate(instances);
    std::size_t populated = 0;
    for (const auto& eh : encrypted) populated += eh.bins.size();
    if (transcript && *transcript)
      (*transcript)({where.round, where.class_slot, where.node, "encrypted_histograms",
                     2 * populated, active.counters() - before});
    before = active.counters();
    const auto plain = active.decrypt_histograms(encrypted);
    if (transcript && *transcript)
      (*transcript)({where.round, where.class_slot, where.node, "decrypt_histograms", 2 * populated,
                     active.counters() - before});
    std::vector<gbdt::HistogramRef> prefs;
    for (std::size_t i = 0; i < plain.size(); ++i) prefs.push_back({encrypted[i].feature, plain[i]});
    best_passive = gbdt::find_best_split(prefs, params);
  }

  SplitDecision out;
  const bool passive_wins =
      best_passive && (!best_active || gbdt::gain_exceeds(best_passive->gain, best_active->gain));
  if (passive_wins) {
    out.owner = SplitOwner::Passive;
    out.feature = best_passive->feature;
    out.bin = best_passive->bin;
    out.gain = best_passive->gain;
    out.left = passive->apply_split(
        {where.round, where.class_slot, where.node, out.feature, out.bin}, instances);
    if (transcript && *transcript)
      (*transcript)({where.round, where.class_slot, where.node, "split_command", 1, {}});
    // I_R = I \ I_L, both ordered as I.
    std::size_t li = 0;
    for (std::size_t row : instances) {
      if (li < out.left.size() && out.left[li] == row)
        ++li;
      else
        out.right.push_back(row);
    }
    if (transcript && *transcript)
      (*transcript)({where.round, where.class_slot, where.node, "partition", out.left.size(), {}});
  } else if (best_active) {
    out.owner = SplitOwner::Active;
    out.feature = best_active->feature;
    out.bin = best_active->bin;
    out.gain = best_active->gain;
    std::tie(out.left, out.right) = active.partition(out.feature, out.bin, instances);
  }
  return out;
}

}  // namespace cmosb::fed
