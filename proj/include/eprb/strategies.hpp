#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "eprb/correlations.hpp"

namespace eprb {

// One deterministic local strategy: a fixed +-1 value per setting. The 16 of
// them are the vertices of the local polytope.
struct DeterministicStrategy {
  int a = +1;
  int ap = +1;
  int b = +1;
  int bp = +1;

  int value(Setting s) const {
    switch (s) {
      case Setting::A: return a;
      case Setting::Ap: return ap;
      case Setting::B: return b;
      case Setting::Bp: return bp;
    }
    throw std::invalid_argument("bad setting");
  }

  // full six-entry correlation set, products of the assigned values
  CorrelationSet correlations() const {
    CorrelationSet c;
    for (PairLabel p : kAllPairs) {
      const auto [x, y] = settings_of(p);
      c.set(p, static_cast<double>(value(x) * value(y)));
    }
    return c;
  }
};

inline std::vector<DeterministicStrategy> enumerate_deterministic_strategies() {
  std::vector<DeterministicStrategy> out;
  out.reserve(16);
  for (int mask = 0; mask < 16; ++mask) {
    out.push_back({(mask & 8) ? -1 : +1, (mask & 4) ? -1 : +1, (mask & 2) ? -1 : +1,
                   (mask & 1) ? -1 : +1});
  }
  return out;
}

inline std::vector<CorrelationSet> deterministic_strategies() {
  std::vector<CorrelationSet> out;
  out.reserve(16);
  for (const DeterministicStrategy& s : enumerate_deterministic_strategies())
    out.push_back(s.correlations());
  return out;
}

}  // namespace eprb
