#include "cmosb/leaf_log.hpp"

namespace cmosb::fed {

std::size_t LeafAssignmentLog::entry_count() const {
  std::size_t n = 0;
  for (const auto& t : trees) n += t.leaves.size();
  return n;
}

LeafAssignmentLog LeafAssignmentLog::through_round(int rounds) const {
  LeafAssignmentLog out;
  for (const auto& t : trees)
    if (t.round < rounds) out.trees.push_back(t);
  return out;
}

}  // namespace cmosb::fed
