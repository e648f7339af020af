#include "echotdoa/tdoa.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace echotdoa {

double raw_range_diff(const ToaEstimate& toa_i, const ToaEstimate& toa_j,
                      double speed_of_sound) {
  if (!(speed_of_sound > 0.0)) {
    throw std::invalid_argument("speed of sound must be positive");
  }
  return speed_of_sound * (toa_i.toa_mod_s - toa_j.toa_mod_s);
}

double correct_range_difference(double diff_m, double anchor_distance_m,
                                const CorrectionConfig& config) {
  if (anchor_distance_m < 0.0) {
    throw std::invalid_argument("anchor distance must be non-negative");
  }
  if (config.margin_m < 0.0) {
    throw std::invalid_argument("mobility margin must be non-negative");
  }
  double wrap = config.speed_of_sound * config.period_s;
  double band = anchor_distance_m + config.margin_m;
  // Correction is only decidable when the wrapped images of the
  // reachable band [-band, band] do not overlap it.
  if (!(wrap > 2.0 * band)) {
    throw std::invalid_argument(
        "chirp period too short to disambiguate the wrap for this "
        "anchor distance and margin");
  }
  if (std::abs(diff_m) > band) {
    return diff_m > 0.0 ? diff_m - wrap : diff_m + wrap;
  }
  return diff_m;
}

RangeDiffSet form_corrected_set(std::span<const ToaEstimate> estimates,
                                const Scene& scene,
                                const CorrectionConfig& config,
                                int reference_id, bool apply_correction) {
  if (estimates.size() < 2) {
    throw std::invalid_argument(
        "need at least two arrival estimates to form range differences");
  }
  const ToaEstimate* ref = nullptr;
  for (const ToaEstimate& e : estimates) {
    if (e.anchor_id == reference_id) {
      ref = &e;
      break;
    }
  }
  if (ref == nullptr) {
    throw std::out_of_range("reference anchor " + std::to_string(reference_id) +
                            " has no arrival estimate");
  }
  const Anchor& ref_anchor = scene.anchor(reference_id);

  RangeDiffSet out;
  out.reference_id = reference_id;
  out.diffs.reserve(estimates.size() - 1);
  for (const ToaEstimate& e : estimates) {
    if (e.anchor_id == reference_id) {
      continue;
    }
    double d = raw_range_diff(e, *ref, config.speed_of_sound);
    RangeDiffEntry entry;
    entry.anchor_id = e.anchor_id;
    if (apply_correction) {
      double dist = range(scene.anchor(e.anchor_id).position,
                          ref_anchor.position);
      entry.diff_m = correct_range_difference(d, dist, config);
      entry.corrected = entry.diff_m != d;
    } else {
      entry.diff_m = d;
    }
    out.diffs.push_back(entry);
  }
  return out;
}

}  // namespace echotdoa
