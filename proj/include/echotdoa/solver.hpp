#pragma once

#include <span>
#include <stdexcept>
#include <string>

#include "echotdoa/geometry.hpp"
#include "echotdoa/tdoa.hpp"

namespace echotdoa {

enum class SolveMethod { closed_form, iterative };

/// Failure of a position solve.  The kind distinguishes geometric
/// degeneracy from measurements no position can explain.
class SolverError : public std::runtime_error {
 public:
  enum class Kind { singular_system, infeasible, divergence, rank_deficient };

  SolverError(Kind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Solved position with diagnostics of how it was obtained.
struct PositionFix {
  Point3 position;
  SolveMethod method = SolveMethod::closed_form;
  double residual_norm = 0.0;
  bool half_plane_selected = false;  // y > 0 branch of the mirror ambiguity
  bool near_singular = false;        // y^2 clamped up to 0
};

/// Closed-form hyperbolic fix for three collinear anchors on the x axis.
/// The two range differences d21 = R2 - R1 and d31 = R3 - R1 (meters,
/// against the first anchor) linearize into a 2x2 system in (R1, x);
/// y follows from R1^2 = (x - x1)^2 + y^2, taking the y >= 0 branch.
/// Throws std::invalid_argument when the anchors are not three distinct
/// collinear points on the x axis, and SolverError for a singular
/// system or an infeasible R1 < 0.
PositionFix solve_linear_array(std::span<const Anchor> anchors, double d21_m,
                               double d31_m);

/// Gauss-Newton refinement from an initial guess, for general planar
/// anchor layouts.  Stops when the step norm falls below 1e-10 (at most
/// 50 iterations); throws SolverError on a rank-deficient normal system
/// or when the step norm grows 5 times in a row (divergence).
PositionFix solve_iterative(std::span<const Anchor> anchors,
                            const RangeDiffSet& diffs, const Point3& initial);

/// Euclidean norm of the range-difference residuals at a candidate
/// position, in meters.
double residual_norm(const Point3& position, std::span<const Anchor> anchors,
                     const RangeDiffSet& diffs);

}  // namespace echotdoa
