#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace eprb {

// The four polarizer settings: A, A' at port alpha and B, B' at port beta.
// Machine-readable names use "Ap"/"Bp" for the primed settings.
enum class Setting { A, Ap, B, Bp };

// The six two-point correlations. AAp and BBp are never co-measured in shot
// records; they exist only for hidden-variable models.
enum class PairLabel { AB, ABp, ApB, ApBp, AAp, BBp };

inline constexpr std::array<Setting, 4> kAllSettings = {Setting::A, Setting::Ap, Setting::B,
                                                        Setting::Bp};
inline constexpr std::array<PairLabel, 6> kAllPairs = {PairLabel::AB,   PairLabel::ABp,
                                                       PairLabel::ApB,  PairLabel::ApBp,
                                                       PairLabel::AAp,  PairLabel::BBp};
inline constexpr std::array<PairLabel, 4> kMeasuredPairs = {PairLabel::AB, PairLabel::ABp,
                                                            PairLabel::ApB, PairLabel::ApBp};

inline std::string_view to_string(Setting s) {
  switch (s) {
    case Setting::A: return "A";
    case Setting::Ap: return "Ap";
    case Setting::B: return "B";
    case Setting::Bp: return "Bp";
  }
  throw std::invalid_argument("bad setting");
}

inline std::string_view display_string(Setting s) {
  switch (s) {
    case Setting::A: return "A";
    case Setting::Ap: return "A'";
    case Setting::B: return "B";
    case Setting::Bp: return "B'";
  }
  throw std::invalid_argument("bad setting");
}

inline Setting parse_setting(std::string_view s) {
  if (s == "A") return Setting::A;
  if (s == "Ap" || s == "A'") return Setting::Ap;
  if (s == "B") return Setting::B;
  if (s == "Bp" || s == "B'") return Setting::Bp;
  throw std::invalid_argument("unknown setting label: " + std::string(s));
}

inline std::string_view to_string(PairLabel p) {
  switch (p) {
    case PairLabel::AB: return "AB";
    case PairLabel::ABp: return "ABp";
    case PairLabel::ApB: return "ApB";
    case PairLabel::ApBp: return "ApBp";
    case PairLabel::AAp: return "AAp";
    case PairLabel::BBp: return "BBp";
  }
  throw std::invalid_argument("bad pair label");
}

inline std::string display_string(PairLabel p) {
  switch (p) {
    case PairLabel::AB: return "E(AB)";
    case PairLabel::ABp: return "E(AB')";
    case PairLabel::ApB: return "E(A'B)";
    case PairLabel::ApBp: return "E(A'B')";
    case PairLabel::AAp: return "E(AA')";
    case PairLabel::BBp: return "E(BB')";
  }
  throw std::invalid_argument("bad pair label");
}

inline PairLabel parse_pair(std::string_view s) {
  if (s == "AB") return PairLabel::AB;
  if (s == "ABp" || s == "AB'") return PairLabel::ABp;
  if (s == "ApB" || s == "A'B") return PairLabel::ApB;
  if (s == "ApBp" || s == "A'B'") return PairLabel::ApBp;
  if (s == "AAp" || s == "AA'") return PairLabel::AAp;
  if (s == "BBp" || s == "BB'") return PairLabel::BBp;
  throw std::invalid_argument("unknown pair label: " + std::string(s));
}

// Unordered: pair_label(B, A) == pair_label(A, B).
inline PairLabel pair_label(Setting x, Setting y) {
  if (x == y) throw std::invalid_argument("pair_label: settings must differ");
  auto has = [&](Setting s) { return x == s || y == s; };
  if (has(Setting::A) && has(Setting::B)) return PairLabel::AB;
  if (has(Setting::A) && has(Setting::Bp)) return PairLabel::ABp;
  if (has(Setting::Ap) && has(Setting::B)) return PairLabel::ApB;
  if (has(Setting::Ap) && has(Setting::Bp)) return PairLabel::ApBp;
  if (has(Setting::A) && has(Setting::Ap)) return PairLabel::AAp;
  return PairLabel::BBp;
}

inline std::pair<Setting, Setting> settings_of(PairLabel p) {
  switch (p) {
    case PairLabel::AB: return {Setting::A, Setting::B};
    case PairLabel::ABp: return {Setting::A, Setting::Bp};
    case PairLabel::ApB: return {Setting::Ap, Setting::B};
    case PairLabel::ApBp: return {Setting::Ap, Setting::Bp};
    case PairLabel::AAp: return {Setting::A, Setting::Ap};
    case PairLabel::BBp: return {Setting::B, Setting::Bp};
  }
  throw std::invalid_argument("bad pair label");
}

// One experimental run: which polarizers were active and the two +-1 readings.
struct ShotRecord {
  std::int64_t run_index = 0;
  Setting setting_a = Setting::A;
  Setting setting_b = Setting::B;
  int outcome_a = +1;
  int outcome_b = +1;
};

// Plug-in standard error of a +-1 product mean.
inline double standard_error(double correlation, std::int64_t n) {
  const double var = std::max(0.0, 1.0 - correlation * correlation);
  return std::sqrt(var / static_cast<double>(n));
}

struct CorrelationEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t shot_count = 0;
};

// <XY> = (1/N) sum a_i b_i over a homogeneous block of shots.
inline CorrelationEstimate correlation_from_shots(std::span<const ShotRecord> records) {
  if (records.empty()) throw std::invalid_argument("correlation_from_shots: empty input");
  const Setting sa = records.front().setting_a;
  const Setting sb = records.front().setting_b;
  double sum = 0.0;
  for (const ShotRecord& r : records) {
    if (r.setting_a != sa || r.setting_b != sb)
      throw std::invalid_argument("correlation_from_shots: mixed setting pairs");
    if ((r.outcome_a != 1 && r.outcome_a != -1) || (r.outcome_b != 1 && r.outcome_b != -1))
      throw std::invalid_argument("correlation_from_shots: outcomes must be +-1");
    sum += static_cast<double>(r.outcome_a) * static_cast<double>(r.outcome_b);
  }
  const std::int64_t n = static_cast<std::int64_t>(records.size());
  const double e = sum / static_cast<double>(n);
  return {e, standard_error(e, n), n};
}

inline constexpr double kCorrelationRangeTol = 1e-9;

// Partial map from pair label to correlation value; absence means unmeasured,
// which is distinct from zero everywhere in this project.
class CorrelationSet {
 public:
  struct Entry {
    double value = 0.0;
    std::optional<double> std_error;
    std::optional<std::int64_t> shot_count;
  };

  void set(PairLabel p, double value) { set(p, Entry{value, std::nullopt, std::nullopt}); }

  void set(PairLabel p, Entry e) {
    if (std::abs(e.value) > 1.0 + kCorrelationRangeTol)
      throw std::invalid_argument("correlation out of range for " + std::string(to_string(p)) +
                                  ": " + std::to_string(e.value));
    entries_[p] = e;
  }

  bool has(PairLabel p) const { return entries_.count(p) != 0; }

  double value(PairLabel p) const { return entry(p).value; }

  const Entry& entry(PairLabel p) const {
    auto it = entries_.find(p);
    if (it == entries_.end())
      throw std::out_of_range("correlation not present: " + std::string(to_string(p)));
    return it->second;
  }

  const std::map<PairLabel, Entry>& entries() const { return entries_; }

  bool has_all_measured() const {
    for (PairLabel p : kMeasuredPairs)
      if (!has(p)) return false;
    return true;
  }

 private:
  std::map<PairLabel, Entry> entries_;
};

// P((XY)_=) and P((XY)_x): probabilities of equal and unequal readings.
struct EqualityProbabilities {
  double p_equal = 0.0;
  double p_unequal = 0.0;

  EqualityProbabilities(double eq, double uneq) : p_equal(eq), p_unequal(uneq) {
    if (eq < -1e-12 || eq > 1.0 + 1e-12 || uneq < -1e-12 || uneq > 1.0 + 1e-12)
      throw std::invalid_argument("equality probabilities out of [0,1]");
    if (std::abs(eq + uneq - 1.0) > 1e-12)
      throw std::invalid_argument("equality probabilities must sum to 1");
  }
};

// 2 P((XY)_=) = 1 + <XY>
inline EqualityProbabilities prob_from_correlation(double e) {
  if (std::abs(e) > 1.0 + kCorrelationRangeTol)
    throw std::invalid_argument("correlation outside [-1, 1]: " + std::to_string(e));
  e = std::clamp(e, -1.0, 1.0);
  return EqualityProbabilities((1.0 + e) / 2.0, (1.0 - e) / 2.0);
}

// <XY> = P((XY)_=) - P((XY)_x)
inline double correlation_from_prob(const EqualityProbabilities& p) {
  return p.p_equal - p.p_unequal;
}

}  // namespace eprb
