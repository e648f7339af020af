#pragma once

#include <span>
#include <vector>

#include "echotdoa/detection.hpp"
#include "echotdoa/geometry.hpp"

namespace echotdoa {

/// Wrap-correction parameters: one repetition period of slack exists
/// because arrival times are only known modulo the period.
struct CorrectionConfig {
  double margin_m = 0.1;        // mobility margin d_M
  double period_s = 0.015;      // chirp repetition period
  double speed_of_sound = 343.0;
};

/// Range difference of one anchor against the reference anchor.
struct RangeDiffEntry {
  int anchor_id = -1;
  double diff_m = 0.0;
  bool corrected = false;  // true when a wrap term was removed
};

/// All range differences of one trial against a common reference.
struct RangeDiffSet {
  int reference_id = -1;
  std::vector<RangeDiffEntry> diffs;
};

/// Raw range difference v * (toa_i - toa_j) from two folded arrival
/// times.  Because each toa lies in [0, period), the result can be off
/// by +-(v * period) from the true difference.
double raw_range_diff(const ToaEstimate& toa_i, const ToaEstimate& toa_j,
                      double speed_of_sound);

/// Removes the wrap term from a raw range difference: any value beyond
/// the reachable band |d| <= anchor_distance + margin must have wrapped,
/// and the sign says in which direction.  Requires the period to be
/// long enough that the corrected band and its wrapped images do not
/// overlap; throws std::invalid_argument otherwise.
double correct_range_difference(double diff_m, double anchor_distance_m,
                                const CorrectionConfig& config);

/// Builds the range-difference set of one trial.  Estimates must
/// contain the reference anchor (std::out_of_range otherwise) and at
/// least one other anchor (std::invalid_argument).  With apply_correction
/// false the raw differences are passed through unchanged.
RangeDiffSet form_corrected_set(std::span<const ToaEstimate> estimates,
                                const Scene& scene,
                                const CorrectionConfig& config,
                                int reference_id, bool apply_correction);

}  // namespace echotdoa
