#pragma once

#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "eprb/correlations.hpp"

// Boolean-logic consistency inequalities among two-point correlations, and the
// CHSH facets obtained by eliminating the unmeasured pairs AA' and BB'.
//
// For a pairing (XY), (XY') sharing the setting X, and a combination of
// equal/unequal events (s = +1 for "=", -1 for "x"), canonical probability
// forces
//
//     s1 <XY> + s2 <XY'> + s1 s2 <YY'> >= -1.
//
// Four pairings times four combinations give the 16 consistency inequalities.
// Summing two of them so that the unmeasured third correlation cancels yields
// the 8 CHSH facets with bound -2.

namespace eprb {

// thrown when an inequality references a correlation the set does not carry;
// unmeasured is never treated as zero
class missing_label_error : public std::invalid_argument {
 public:
  explicit missing_label_error(PairLabel label)
      : std::invalid_argument("correlation not measured: " + std::string(to_string(label))),
        label_(label) {}
  PairLabel label() const { return label_; }

 private:
  PairLabel label_;
};

struct ConsistencyInequality {
  enum class Kind { Consistency, ChshFacet };

  std::string name;
  Kind kind = Kind::Consistency;
  std::map<PairLabel, double> coefficients;  // absent label means coefficient 0
  double lower_bound = -1.0;

  // derivation provenance
  int pairing = 0;      // 1..4 for consistency inequalities
  int combination = 0;  // 1..4 in the order (=,=), (=,x), (x,=), (x,x)
  std::vector<std::pair<std::string, std::string>> parents;  // facet: combined base pairs

  double coefficient(PairLabel p) const {
    auto it = coefficients.find(p);
    return it == coefficients.end() ? 0.0 : it->second;
  }

  // "E(AB) - E(AB') - E(BB') >= -1"
  std::string display() const {
    std::string out;
    for (PairLabel p : kAllPairs) {
      const double c = coefficient(p);
      if (c == 0.0) continue;
      if (out.empty()) {
        if (c < 0.0) out += "-";
      } else {
        out += c > 0.0 ? " + " : " - ";
      }
      out += display_string(p);
    }
    out += " >= ";
    out += std::to_string(static_cast<int>(lower_bound));
    return out;
  }
};

namespace detail {

struct Pairing {
  PairLabel first;   // (XY)
  PairLabel second;  // (XY')
  PairLabel third;   // (YY'), the unmeasured one
};

inline constexpr std::array<Pairing, 4> kPairings = {{
    {PairLabel::AB, PairLabel::ABp, PairLabel::BBp},
    {PairLabel::ApB, PairLabel::ApBp, PairLabel::BBp},
    {PairLabel::AB, PairLabel::ApB, PairLabel::AAp},
    {PairLabel::ABp, PairLabel::ApBp, PairLabel::AAp},
}};

// combinations in the order (=,=), (=,x), (x,=), (x,x)
inline constexpr std::array<std::pair<int, int>, 4> kCombinations = {
    {{+1, +1}, {+1, -1}, {-1, +1}, {-1, -1}}};

inline char sign_char(int s) { return s > 0 ? '=' : 'x'; }

}  // namespace detail

// The 16 consistency inequalities, named "C<pairing>.<s1><s2>" with
// e for "=" and x for "x", e.g. C1.ex.
inline std::vector<ConsistencyInequality> generate_consistency_inequalities() {
  std::vector<ConsistencyInequality> out;
  out.reserve(16);
  for (int p = 0; p < 4; ++p) {
    const detail::Pairing& pairing = detail::kPairings[static_cast<std::size_t>(p)];
    for (int c = 0; c < 4; ++c) {
      const auto [s1, s2] = detail::kCombinations[static_cast<std::size_t>(c)];
      ConsistencyInequality ineq;
      ineq.kind = ConsistencyInequality::Kind::Consistency;
      ineq.pairing = p + 1;
      ineq.combination = c + 1;
      ineq.name = "C" + std::to_string(p + 1) + ".";
      ineq.name += s1 > 0 ? 'e' : 'x';
      ineq.name += s2 > 0 ? 'e' : 'x';
      ineq.coefficients[pairing.first] = s1;
      ineq.coefficients[pairing.second] = s2;
      ineq.coefficients[pairing.third] = s1 * s2;
      ineq.lower_bound = -1.0;
      out.push_back(std::move(ineq));
    }
  }
  return out;
}

// slack = sum coeff * value - lower_bound; >= 0 means satisfied
inline double evaluate(const ConsistencyInequality& ineq, const CorrelationSet& c) {
  double lhs = 0.0;
  for (const auto& [label, coeff] : ineq.coefficients) {
    if (coeff == 0.0) continue;
    if (!c.has(label)) throw missing_label_error(label);
    lhs += coeff * c.value(label);
  }
  return lhs - ineq.lower_bound;
}

// Sums ordered pairs of base inequalities whose coefficient on the unmeasured
// pair cancels. Every 4-term survivor has coefficients +-1 on the measured
// pairs and bound -2; deduplication must leave exactly 8 of them.
inline std::vector<ConsistencyInequality> derive_chsh_facets() {
  const std::vector<ConsistencyInequality> base = generate_consistency_inequalities();
  std::vector<ConsistencyInequality> facets;

  auto signature = [](const ConsistencyInequality& f) {
    std::string sig;
    for (PairLabel p : kMeasuredPairs) sig += f.coefficient(p) > 0.0 ? '+' : '-';
    return sig;
  };

  for (std::size_t i = 0; i < base.size(); ++i) {
    for (std::size_t j = i + 1; j < base.size(); ++j) {
      std::map<PairLabel, double> sum;
      for (const auto& [l, v] : base[i].coefficients) sum[l] += v;
      for (const auto& [l, v] : base[j].coefficients) sum[l] += v;
      if (sum[PairLabel::AAp] != 0.0 || sum[PairLabel::BBp] != 0.0) continue;

      bool four_unit_terms = true;
      for (PairLabel p : kMeasuredPairs)
        if (std::abs(sum[p]) != 1.0) four_unit_terms = false;
      if (!four_unit_terms) continue;

      ConsistencyInequality facet;
      facet.kind = ConsistencyInequality::Kind::ChshFacet;
      for (PairLabel p : kMeasuredPairs) facet.coefficients[p] = sum[p];
      facet.lower_bound = -2.0;
      facet.name = "CHSH[" + signature(facet) + "]";
      facet.parents.emplace_back(base[i].name, base[j].name);

      bool merged = false;
      for (ConsistencyInequality& existing : facets) {
        if (existing.name == facet.name) {
          existing.parents.emplace_back(base[i].name, base[j].name);
          merged = true;
          break;
        }
      }
      if (!merged) facets.push_back(std::move(facet));
    }
  }

  if (facets.size() != 8)
    throw std::logic_error("derive_chsh_facets: expected 8 facets, got " +
                           std::to_string(facets.size()));
  return facets;
}

// Exhaustive check of the derivation over all 2^4 deterministic assignments
// of (A, A', B, B'): the subset relation behind each pairing and all 16
// inequalities with {0,1}-valued probabilities.
struct BooleanDerivationReport {
  int inequality_checks = 0;
  int inequality_failures = 0;
  int subset_checks = 0;
  int subset_failures = 0;
  std::vector<std::string> failures;

  bool passed() const { return inequality_failures == 0 && subset_failures == 0; }
};

inline BooleanDerivationReport verify_boolean_derivation() {
  BooleanDerivationReport report;
  const std::vector<ConsistencyInequality> base = generate_consistency_inequalities();

  for (int mask = 0; mask < 16; ++mask) {
    std::map<Setting, int> value = {
        {Setting::A, (mask & 8) ? -1 : +1},
        {Setting::Ap, (mask & 4) ? -1 : +1},
        {Setting::B, (mask & 2) ? -1 : +1},
        {Setting::Bp, (mask & 1) ? -1 : +1},
    };
    auto equal = [&](PairLabel p) {
      const auto [x, y] = settings_of(p);
      return value[x] == value[y];
    };
    // indicator probability of the sign-selected event
    auto prob = [&](PairLabel p, int sign) {
      return (equal(p) == (sign > 0)) ? 1.0 : 0.0;
    };

    for (const ConsistencyInequality& ineq : base) {
      const detail::Pairing& pairing =
          detail::kPairings[static_cast<std::size_t>(ineq.pairing - 1)];
      const auto [s1, s2] =
          detail::kCombinations[static_cast<std::size_t>(ineq.combination - 1)];

      // complement of the union: (XY)_{!s1} and (XY')_{!s2} both occur; it
      // must then sit inside (YY')_{s1 s2}
      report.subset_checks++;
      const bool premise = prob(pairing.first, -s1) == 1.0 && prob(pairing.second, -s2) == 1.0;
      if (premise && prob(pairing.third, s1 * s2) != 1.0) {
        report.subset_failures++;
        report.failures.push_back("subset relation failed: assignment " + std::to_string(mask) +
                                  " inequality " + ineq.name);
      }

      report.inequality_checks++;
      const double total =
          prob(pairing.first, s1) + prob(pairing.second, s2) + prob(pairing.third, s1 * s2);
      if (total < 1.0) {
        report.inequality_failures++;
        report.failures.push_back("inequality failed: assignment " + std::to_string(mask) +
                                  " inequality " + ineq.name);
      }
    }
  }
  return report;
}

// |<AB> -+ <A'B>| + |<AB'> +- <A'B'>|, the two sign readings of the combined
// inequality; the CHSH statistic S is the larger of the two.
enum class ChshPattern {
  UpperSigns,  // |E(AB) - E(A'B)| + |E(AB') + E(A'B')|
  LowerSigns,  // |E(AB) + E(A'B)| + |E(AB') - E(A'B')|
};

inline std::string display_string(ChshPattern pattern) {
  return pattern == ChshPattern::UpperSigns ? "|E(AB) - E(A'B)| + |E(AB') + E(A'B')|"
                                            : "|E(AB) + E(A'B)| + |E(AB') - E(A'B')|";
}

inline double chsh_value(const CorrelationSet& c, ChshPattern pattern) {
  for (PairLabel p : kMeasuredPairs)
    if (!c.has(p)) throw missing_label_error(p);
  const double ab = c.value(PairLabel::AB);
  const double abp = c.value(PairLabel::ABp);
  const double apb = c.value(PairLabel::ApB);
  const double apbp = c.value(PairLabel::ApBp);
  return pattern == ChshPattern::UpperSigns ? std::abs(ab - apb) + std::abs(abp + apbp)
                                            : std::abs(ab + apb) + std::abs(abp - apbp);
}

struct ChshResult {
  double value = 0.0;
  ChshPattern pattern = ChshPattern::UpperSigns;
};

inline ChshResult chsh_max(const CorrelationSet& c) {
  const double upper = chsh_value(c, ChshPattern::UpperSigns);
  const double lower = chsh_value(c, ChshPattern::LowerSigns);
  if (upper >= lower) return {upper, ChshPattern::UpperSigns};
  return {lower, ChshPattern::LowerSigns};
}

}  // namespace eprb
