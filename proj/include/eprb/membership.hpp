#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "eprb/inequalities.hpp"
#include "eprb/strategies.hpp"

// Local-polytope membership for a vector of the four measured correlations:
// feasibility of writing it as a convex combination of the 16 deterministic
// strategies. Decided twice, by a phase-1 simplex and by the 8 CHSH facets;
// the two answers must agree (they are equivalent descriptions of the same
// polytope on [-1,1]^4).

namespace eprb {

inline constexpr double kMembershipTol = 1e-7;

namespace detail {

struct Phase1Result {
  double objective = 0.0;            // sum of artificials at optimum
  std::vector<double> weights;       // candidate convex weights
  double residual = 0.0;             // constraint violation of the weights
};

// Minimizes the sum of artificial variables for  V w = rhs, w >= 0  using a
// dense tableau with Bland's rule. Sizes here are 5 rows by 21 columns.
inline Phase1Result simplex_phase1(const std::vector<std::array<double, 4>>& vertices,
                                   const std::array<double, 4>& target) {
  const std::size_t n = vertices.size();
  const std::size_t rows = 5;
  const std::size_t cols = n + rows;  // structural + artificial

  std::vector<double> rhs(rows);
  for (std::size_t r = 0; r < 4; ++r) rhs[r] = target[r];
  rhs[4] = 1.0;

  std::vector<std::vector<double>> a(rows, std::vector<double>(cols, 0.0));
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t k = 0; k < n; ++k) a[r][k] = vertices[k][r];
  for (std::size_t k = 0; k < n; ++k) a[4][k] = 1.0;

  for (std::size_t r = 0; r < rows; ++r) {
    if (rhs[r] < 0.0) {
      rhs[r] = -rhs[r];
      for (std::size_t k = 0; k < n; ++k) a[r][k] = -a[r][k];
    }
    a[r][n + r] = 1.0;
  }

  std::vector<std::size_t> basis(rows);
  for (std::size_t r = 0; r < rows; ++r) basis[r] = n + r;

  // reduced-cost row for minimizing the artificial sum
  std::vector<double> cost(cols, 0.0);
  double objective = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t k = 0; k < cols; ++k) cost[k] -= a[r][k];
    for (std::size_t r2 = 0; r2 < rows; ++r2) cost[n + r2] = 0.0;
    objective -= rhs[r];
  }

  constexpr double kPivotTol = 1e-11;
  for (int iter = 0; iter < 10000; ++iter) {
    // Bland: smallest-index column with negative reduced cost
    std::size_t enter = cols;
    for (std::size_t k = 0; k < cols; ++k) {
      if (cost[k] < -kPivotTol) {
        enter = k;
        break;
      }
    }
    if (enter == cols) break;

    std::size_t leave = rows;
    double best_ratio = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      if (a[r][enter] > kPivotTol) {
        const double ratio = rhs[r] / a[r][enter];
        if (leave == rows || ratio < best_ratio - 1e-15 ||
            (std::abs(ratio - best_ratio) <= 1e-15 && basis[r] < basis[leave])) {
          leave = r;
          best_ratio = ratio;
        }
      }
    }
    if (leave == rows) throw std::logic_error("simplex_phase1: unbounded phase-1 problem");

    const double pivot = a[leave][enter];
    for (std::size_t k = 0; k < cols; ++k) a[leave][k] /= pivot;
    rhs[leave] /= pivot;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == leave || a[r][enter] == 0.0) continue;
      const double f = a[r][enter];
      for (std::size_t k = 0; k < cols; ++k) a[r][k] -= f * a[leave][k];
      rhs[r] -= f * rhs[leave];
    }
    const double fc = cost[enter];
    if (fc != 0.0) {
      for (std::size_t k = 0; k < cols; ++k) cost[k] -= fc * a[leave][k];
      objective -= fc * rhs[leave];
    }
    basis[leave] = enter;
  }

  Phase1Result out;
  out.objective = -objective;  // objective accumulated with flipped sign
  out.weights.assign(n, 0.0);
  for (std::size_t r = 0; r < rows; ++r)
    if (basis[r] < n) out.weights[basis[r]] = std::max(0.0, rhs[r]);

  std::array<double, 5> residual{};
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t r = 0; r < 4; ++r) residual[r] += out.weights[k] * vertices[k][r];
    residual[4] += out.weights[k];
  }
  double worst = 0.0;
  for (std::size_t r = 0; r < 4; ++r) worst = std::max(worst, std::abs(residual[r] - target[r]));
  worst = std::max(worst, std::abs(residual[4] - 1.0));
  out.residual = worst;
  return out;
}

}  // namespace detail

struct MembershipResult {
  bool is_member = false;
  bool boundary_case = false;
  std::vector<double> weights;  // convex weights over the 16 strategies when feasible
  std::optional<ConsistencyInequality> violated_facet;
  double facet_min_slack = 0.0;  // most binding facet slack
  double lp_residual = 0.0;
};

// Decides whether the four measured correlations admit a local deterministic
// mixture. Certificates: the weight vector when feasible, the most violated
// facet otherwise. Points within kMembershipTol of the boundary may get
// contradictory raw answers from the two routes; they are flagged as boundary
// cases with both certificates attached. Disagreement away from the boundary
// is a hard error.
inline MembershipResult lhv_membership(const CorrelationSet& c) {
  for (PairLabel p : kMeasuredPairs)
    if (!c.has(p)) throw missing_label_error(p);

  const std::array<double, 4> target = {
      c.value(PairLabel::AB), c.value(PairLabel::ABp), c.value(PairLabel::ApB),
      c.value(PairLabel::ApBp)};

  std::vector<std::array<double, 4>> vertices;
  for (const DeterministicStrategy& s : enumerate_deterministic_strategies()) {
    const CorrelationSet sc = s.correlations();
    vertices.push_back({sc.value(PairLabel::AB), sc.value(PairLabel::ABp),
                        sc.value(PairLabel::ApB), sc.value(PairLabel::ApBp)});
  }

  const detail::Phase1Result lp = detail::simplex_phase1(vertices, target);
  const bool lp_member = lp.objective <= kMembershipTol && lp.residual <= kMembershipTol;

  double min_slack = std::numeric_limits<double>::infinity();
  std::optional<ConsistencyInequality> worst;
  std::vector<ConsistencyInequality> facets = derive_chsh_facets();
  for (ConsistencyInequality& facet : facets) {
    const double slack = evaluate(facet, c);
    if (slack < min_slack) {
      min_slack = slack;
      worst = std::move(facet);
    }
  }
  const bool facet_member = min_slack >= -kMembershipTol;

  MembershipResult out;
  out.facet_min_slack = min_slack;
  out.lp_residual = lp_member ? lp.residual : lp.objective;

  if (lp_member == facet_member) {
    out.is_member = lp_member;
    if (lp_member) out.weights = lp.weights;
    if (!lp_member || min_slack < 0.0) out.violated_facet = worst;
    return out;
  }

  // Disagreements can only happen for points within float noise of the
  // boundary, where the two routes' decision quantities straddle their
  // thresholds by ulps. A guard band 10x the tolerance separates that from a
  // genuine equivalence failure.
  if (std::abs(min_slack) <= 10.0 * kMembershipTol) {
    // boundary case: attach both certificates and side with the facets
    out.is_member = facet_member;
    out.boundary_case = true;
    out.weights = lp.weights;
    out.violated_facet = worst;
    return out;
  }

  throw std::logic_error(
      "lhv_membership: LP and facet checks disagree away from the boundary (facet slack " +
      std::to_string(min_slack) + ", LP objective " + std::to_string(lp.objective) + ")");
}

}  // namespace eprb
