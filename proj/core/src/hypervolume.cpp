#include <algorithm>

#include "cmosb/error.hpp"
#include "cmosb/moo.hpp"

namespace cmosb::moo {

namespace {

// Volume over the first `dim` objectives: sweep the last one and recurse on
// the points below each slab.
double slice(std::vector<const Objectives*> pts, std::span<const double> ref, std::size_t dim) {
  if (pts.empty()) return 0.0;
  if (dim == 1) {
    double lo = ref[0];
    for (const auto* p : pts) lo = std::min(lo, (*p)[0]);
    return ref[0] - lo;
  }
  const std::size_t k = dim - 1;
  std::stable_sort(pts.begin(), pts.end(),
                   [k](const Objectives* a, const Objectives* b) { return (*a)[k] < (*b)[k]; });
  double volume = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double upper = i + 1 < pts.size() ? (*pts[i + 1])[k] : ref[k];
    const double height = upper - (*pts[i])[k];
    if (height <= 0.0) continue;
    volume += height * slice({pts.begin(), pts.begin() + static_cast<long>(i) + 1}, ref, k);
  }
  return volume;
}

}  // namespace

double hypervolume(const std::vector<Objectives>& points, std::span<const double> reference,
                   std::size_t* clipped) {
  std::vector<const Objectives*> inside;
  std::size_t beyond = 0;
  for (const auto& p : points) {
    if (p.size() != reference.size()) throw ParameterError("hypervolume: dimension mismatch");
    bool strictly_inside = true;
    bool outside = false;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (!(p[i] < reference[i])) strictly_inside = false;
      if (p[i] > reference[i]) outside = true;
    }
    if (outside) ++beyond;
    if (strictly_inside) inside.push_back(&p);
  }
  if (clipped) *clipped = beyond;
  if (reference.empty()) return 0.0;
  return slice(std::move(inside), reference, reference.size());
}

std::vector<std::size_t> pareto_front(const std::vector<Objectives>& points) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < points.size() && !dominated; ++j)
      dominated = j != i && dominates(points[j], points[i]);
    if (!dominated) out.push_back(i);
  }
  return out;
}

double normalized_hypervolume(const std::vector<Objectives>& points, std::span<const double> reference,
                              std::span<const double> scale, std::size_t* clipped) {
  if (scale.size() != reference.size()) throw ParameterError("hypervolume: scale dimension mismatch");
  for (double s : scale)
    if (!(s > 0.0)) throw ParameterError("hypervolume: scale must be positive");
  Objectives ref(reference.size());
  for (std::size_t i = 0; i < ref.size(); ++i) ref[i] = reference[i] / scale[i];
  std::vector<Objectives> front;
  for (std::size_t i : pareto_front(points)) {
    Objectives p = points[i];
    for (std::size_t k = 0; k < p.size(); ++k) p[k] /= scale[k];
    front.push_back(std::move(p));
  }
  const double hv = hypervolume(front, ref);
  if (clipped) {
    // Counted over every point, not only the front.
    std::size_t all = 0;
    for (const auto& p : points)
      for (std::size_t k = 0; k < p.size(); ++k)
        if (p[k] > reference[k]) {
          ++all;
          break;
        }
    *clipped = all;
  }
  return hv;
}

}  // namespace cmosb::moo
