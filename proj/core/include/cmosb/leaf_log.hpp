#pragma once

#include <cstddef>
#include <vector>

namespace cmosb::fed {

struct LoggedLeaf {
  int leaf_id = 0;
  std::vector<std::size_t> instances;  // dataset row ids
  friend bool operator==(const LoggedLeaf&, const LoggedLeaf&) = default;
};

// Passive-party view of one federated tree: leaves whose routing path crosses
// at least one passive-party split. Leaves inside active-local subtrees are absent.
struct LoggedTree {
  int round = 0;  // 0-based federated round
  int class_slot = 0;
  std::vector<LoggedLeaf> leaves;
  friend bool operator==(const LoggedTree&, const LoggedTree&) = default;
};

struct LeafAssignmentLog {
  std::vector<LoggedTree> trees;  // one per federated tree, including trees with no logged leaves

  std::size_t entry_count() const;  // total logged leaves
  bool empty() const { return entry_count() == 0; }
  // Trees of rounds [0, rounds).
  LeafAssignmentLog through_round(int rounds) const;
  friend bool operator==(const LeafAssignmentLog&, const LeafAssignmentLog&) = default;
};

}  // namespace cmosb::fed
