#include "echotdoa/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace echotdoa {

namespace {

const Anchor& find_anchor(std::span<const Anchor> anchors, int id) {
  for (const Anchor& a : anchors) {
    if (a.id == id) {
      return a;
    }
  }
  throw std::out_of_range("no anchor with id " + std::to_string(id));
}

void check_linear_array(std::span<const Anchor> anchors) {
  if (anchors.size() != 3) {
    throw std::invalid_argument(
        "the closed-form solver needs exactly three anchors");
  }
  for (const Anchor& a : anchors) {
    if (std::abs(a.position.y) > 1e-9 || std::abs(a.position.z) > 1e-9) {
      throw std::invalid_argument("anchor " + std::to_string(a.id) +
                                  " is not on the x axis");
    }
  }
  if (anchors[0].position.x == anchors[1].position.x ||
      anchors[0].position.x == anchors[2].position.x ||
      anchors[1].position.x == anchors[2].position.x) {
    throw std::invalid_argument("linear-array anchors must be distinct");
  }
}

}  // namespace

double residual_norm(const Point3& position, std::span<const Anchor> anchors,
                     const RangeDiffSet& diffs) {
  const Anchor& ref = find_anchor(anchors, diffs.reference_id);
  double r_ref = range(ref.position, position);
  double acc = 0.0;
  for (const RangeDiffEntry& e : diffs.diffs) {
    const Anchor& a = find_anchor(anchors, e.anchor_id);
    double f = (range(a.position, position) - r_ref) - e.diff_m;
    acc += f * f;
  }
  return std::sqrt(acc);
}

PositionFix solve_linear_array(std::span<const Anchor> anchors, double d21_m,
                               double d31_m) {
  check_linear_array(anchors);
  double x1 = anchors[0].position.x;
  double x2 = anchors[1].position.x;
  double x3 = anchors[2].position.x;

  // Differencing the squared-range equations of anchors 2 and 3 against
  // anchor 1 leaves a linear 2x2 system in (R1, x):
  //   2*d21*R1 + 2*(x2 - x1)*x = (x2^2 - x1^2) - d21^2
  //   2*d31*R1 + 2*(x3 - x1)*x = (x3^2 - x1^2) - d31^2
  double a11 = 2.0 * d21_m;
  double a12 = 2.0 * (x2 - x1);
  double a21 = 2.0 * d31_m;
  double a22 = 2.0 * (x3 - x1);
  double b1 = (x2 * x2 - x1 * x1) - d21_m * d21_m;
  double b2 = (x3 * x3 - x1 * x1) - d31_m * d31_m;

  double det = a11 * a22 - a12 * a21;
  double span = std::max({x1, x2, x3}) - std::min({x1, x2, x3});
  if (std::abs(det) / (4.0 * span * span) < 1e-12) {
    throw SolverError(SolverError::Kind::singular_system,
                      "range differences leave the linear system singular");
  }
  double r1 = (b1 * a22 - b2 * a12) / det;
  double x = (a11 * b2 - a21 * b1) / det;
  if (r1 < 0.0) {
    throw SolverError(SolverError::Kind::infeasible,
                      "no position is consistent with the range differences "
                      "(negative reference range)");
  }

  PositionFix fix;
  fix.method = SolveMethod::closed_form;
  double y_sq = r1 * r1 - (x - x1) * (x - x1);
  double y = 0.0;
  if (y_sq > 0.0) {
    y = std::sqrt(y_sq);
  } else {
    fix.near_singular = true;  // clamped to the array line
  }
  fix.position = {x, y, 0.0};
  fix.half_plane_selected = y > 0.0;

  RangeDiffSet diffs;
  diffs.reference_id = anchors[0].id;
  diffs.diffs = {{anchors[1].id, d21_m, false}, {anchors[2].id, d31_m, false}};
  fix.residual_norm = residual_norm(fix.position, anchors, diffs);
  return fix;
}

PositionFix solve_iterative(std::span<const Anchor> anchors,
                            const RangeDiffSet& diffs, const Point3& initial) {
  if (anchors.size() < 3) {
    throw std::invalid_argument(
        "the iterative solver needs at least three anchors");
  }
  if (diffs.diffs.size() < 2) {
    throw std::invalid_argument(
        "the iterative solver needs at least two range differences");
  }
  const Anchor& ref = find_anchor(anchors, diffs.reference_id);
  for (const RangeDiffEntry& e : diffs.diffs) {
    find_anchor(anchors, e.anchor_id);  // fail early on unknown ids
  }

  Point3 p{initial.x, initial.y, 0.0};
  double prev_step = std::numeric_limits<double>::infinity();
  int growing = 0;
  for (int iter = 0; iter < 50; ++iter) {
    double r_ref = range(ref.position, p);
    if (r_ref < 1e-12) {
      throw SolverError(SolverError::Kind::rank_deficient,
                        "iterate landed on the reference anchor");
    }
    double ux_ref = (p.x - ref.position.x) / r_ref;
    double uy_ref = (p.y - ref.position.y) / r_ref;

    // Gauss-Newton normal equations: rows are the unit-vector
    // differences u_i - u_ref, residuals the unexplained diff.
    double jtj00 = 0.0, jtj01 = 0.0, jtj11 = 0.0;
    double jtf0 = 0.0, jtf1 = 0.0;
    for (const RangeDiffEntry& e : diffs.diffs) {
      const Anchor& a = find_anchor(anchors, e.anchor_id);
      double r_i = range(a.position, p);
      if (r_i < 1e-12) {
        throw SolverError(SolverError::Kind::rank_deficient,
                          "iterate landed on anchor " +
                              std::to_string(e.anchor_id));
      }
      double jx = (p.x - a.position.x) / r_i - ux_ref;
      double jy = (p.y - a.position.y) / r_i - uy_ref;
      double f = (r_i - r_ref) - e.diff_m;
      jtj00 += jx * jx;
      jtj01 += jx * jy;
      jtj11 += jy * jy;
      jtf0 += jx * f;
      jtf1 += jy * f;
    }
    double det = jtj00 * jtj11 - jtj01 * jtj01;
    double scale = jtj00 + jtj11;
    if (scale == 0.0 || std::abs(det) <= 1e-14 * scale * scale) {
      throw SolverError(SolverError::Kind::rank_deficient,
                        "normal equations are rank deficient");
    }
    double dx = -(jtj11 * jtf0 - jtj01 * jtf1) / det;
    double dy = -(jtj00 * jtf1 - jtj01 * jtf0) / det;
    p.x += dx;
    p.y += dy;
    double step = std::sqrt(dx * dx + dy * dy);
    if (step < 1e-10) {
      break;
    }
    if (step > prev_step) {
      if (++growing >= 5) {
        throw SolverError(SolverError::Kind::divergence,
                          "step norm grew for five consecutive iterations");
      }
    } else {
      growing = 0;
    }
    prev_step = step;
  }

  PositionFix fix;
  fix.method = SolveMethod::iterative;
  fix.position = p;
  fix.half_plane_selected = p.y > 0.0;
  fix.residual_norm = residual_norm(p, anchors, diffs);
  return fix;
}

}  // namespace echotdoa
