#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "eprb/correlations.hpp"
#include "eprb/rng.hpp"
#include "eprb/strategies.hpp"

// Local-hidden-variable models: a normalized distribution over a hidden
// variable lambda plus four deterministic +-1 response functions, one per
// setting. Correlations are <XY> = integral of rho(lambda) X(lambda)
// Y(lambda); the unmeasured pairs AA' and BB' are defined by exactly the same
// integral and are computed on request.
//
// Response functions come from a closed set of serializable families (no user
// code runs when a model file is loaded):
//   - sign_cos: lambda -> sign(cos(lambda - offset)), interval domains
//   - table:    per-point +-1 lookup, finite domains

namespace eprb {

struct SignCosResponse {
  double offset = 0.0;
  int operator()(double lambda) const { return std::cos(lambda - offset) >= 0.0 ? +1 : -1; }
};

struct TableResponse {
  std::vector<int> values;
};

class LhvModel {
 public:
  // Finite domain: points are opaque labels carrying weights, responses are
  // lookup tables. Weights are normalized on construction.
  static LhvModel finite(std::vector<double> weights, std::map<Setting, TableResponse> responses) {
    FiniteModel m;
    m.weights = normalize_weights(std::move(weights));
    for (Setting s : kAllSettings) {
      auto it = responses.find(s);
      if (it == responses.end())
        throw std::invalid_argument("LhvModel: missing response for setting " +
                                    std::string(to_string(s)));
      if (it->second.values.size() != m.weights.size())
        throw std::invalid_argument("LhvModel: table length does not match point count");
      for (int v : it->second.values)
        if (v != 1 && v != -1)
          throw std::invalid_argument("LhvModel: table responses must be +-1");
      m.tables[setting_index(s)] = it->second.values;
    }
    LhvModel model;
    model.impl_ = std::move(m);
    return model;
  }

  // Interval domain with midpoint quadrature. The default weight is uniform;
  // any nonnegative weight function can be supplied in code. The quadrature
  // grid doubles as the sampling distribution (inverse CDF over cell masses),
  // so sampled and integrated correlations describe the same discrete model.
  static LhvModel interval(double lo, double hi, int quadrature_points,
                           std::map<Setting, SignCosResponse> responses,
                           std::function<double(double)> weight_fn = {}) {
    if (!(hi > lo)) throw std::invalid_argument("LhvModel: empty interval");
    if (quadrature_points < 1) throw std::invalid_argument("LhvModel: need quadrature points");
    IntervalModel m;
    m.lo = lo;
    m.hi = hi;
    const double step = (hi - lo) / quadrature_points;
    m.grid.resize(quadrature_points);
    std::vector<double> mass(quadrature_points);
    for (int k = 0; k < quadrature_points; ++k) {
      m.grid[k] = lo + (k + 0.5) * step;
      const double w = weight_fn ? weight_fn(m.grid[k]) : 1.0;
      if (w < 0.0) throw std::invalid_argument("LhvModel: negative weight function value");
      mass[k] = w * step;
    }
    m.mass = normalize_weights(std::move(mass));
    for (Setting s : kAllSettings) {
      auto it = responses.find(s);
      if (it == responses.end())
        throw std::invalid_argument("LhvModel: missing response for setting " +
                                    std::string(to_string(s)));
      m.responses[setting_index(s)] = it->second;
    }
    LhvModel model;
    model.impl_ = std::move(m);
    model.check_responses();
    return model;
  }

  // Convex mixture: with probability w behave as `first`, else as `second`.
  // Equivalent to an LHV model on the disjoint union of the two domains.
  static LhvModel mixture(double w, LhvModel first, LhvModel second) {
    if (w < 0.0 || w > 1.0) throw std::invalid_argument("LhvModel: mixture weight outside [0,1]");
    MixtureModel m;
    m.weight = w;
    m.first = std::make_shared<LhvModel>(std::move(first));
    m.second = std::make_shared<LhvModel>(std::move(second));
    LhvModel model;
    model.impl_ = std::move(m);
    return model;
  }

  // <XY>; exact weighted sum for finite domains, midpoint quadrature for
  // intervals, convex combination for mixtures. x == y gives 1.
  double correlation(Setting x, Setting y) const {
    if (const FiniteModel* m = std::get_if<FiniteModel>(&impl_)) {
      const auto& rx = m->tables[setting_index(x)];
      const auto& ry = m->tables[setting_index(y)];
      double acc = 0.0;
      for (std::size_t k = 0; k < m->weights.size(); ++k)
        acc += m->weights[k] * rx[k] * ry[k];
      return acc;
    }
    if (const IntervalModel* m = std::get_if<IntervalModel>(&impl_)) {
      const SignCosResponse& rx = m->responses[setting_index(x)];
      const SignCosResponse& ry = m->responses[setting_index(y)];
      double acc = 0.0;
      for (std::size_t k = 0; k < m->grid.size(); ++k)
        acc += m->mass[k] * rx(m->grid[k]) * ry(m->grid[k]);
      return acc;
    }
    const MixtureModel& m = std::get<MixtureModel>(impl_);
    return m.weight * m.first->correlation(x, y) +
           (1.0 - m.weight) * m.second->correlation(x, y);
  }

  // Draws one lambda and returns both responses. Consumes exactly one
  // uniform per component model traversed, so streams replay byte-for-byte.
  std::pair<int, int> sample_responses(Setting x, Setting y, RngStream& rng) const {
    if (const FiniteModel* m = std::get_if<FiniteModel>(&impl_)) {
      const std::size_t k = rng.pick_category(m->cumulative());
      return {m->tables[setting_index(x)][k], m->tables[setting_index(y)][k]};
    }
    if (const IntervalModel* m = std::get_if<IntervalModel>(&impl_)) {
      const std::size_t k = rng.pick_category(m->cumulative());
      const double lambda = m->grid[k];
      return {m->responses[setting_index(x)](lambda), m->responses[setting_index(y)](lambda)};
    }
    const MixtureModel& m = std::get<MixtureModel>(impl_);
    const LhvModel& branch = rng.bernoulli(m.weight) ? *m.first : *m.second;
    return branch.sample_responses(x, y, rng);
  }

  // Full six-entry correlation set. AA' and BB' are computable for any model
  // even though no experiment co-measures them.
  CorrelationSet correlations() const {
    CorrelationSet c;
    for (PairLabel p : kAllPairs) {
      const auto [x, y] = settings_of(p);
      c.set(p, correlation(x, y));
    }
    return c;
  }

  static LhvModel from_json(const nlohmann::json& j);
  static LhvModel load(const std::string& path);

 private:
  static std::size_t setting_index(Setting s) { return static_cast<std::size_t>(s); }

  static std::vector<double> normalize_weights(std::vector<double> w) {
    if (w.empty()) throw std::invalid_argument("LhvModel: empty weight list");
    double total = 0.0;
    for (double v : w) {
      if (v < 0.0 || !std::isfinite(v))
        throw std::invalid_argument("LhvModel: weights must be finite and nonnegative");
      total += v;
    }
    if (total <= 0.0) throw std::invalid_argument("LhvModel: total weight must be positive");
    for (double& v : w) v /= total;
    return w;
  }

  struct FiniteModel {
    std::vector<double> weights;
    std::array<std::vector<int>, 4> tables;
    mutable std::vector<double> cum;

    std::span<const double> cumulative() const {
      if (cum.empty()) {
        cum.resize(weights.size());
        std::partial_sum(weights.begin(), weights.end(), cum.begin());
      }
      return cum;
    }
  };

  struct IntervalModel {
    double lo = 0.0, hi = 1.0;
    std::vector<double> grid;
    std::vector<double> mass;
    std::array<SignCosResponse, 4> responses;
    mutable std::vector<double> cum;

    std::span<const double> cumulative() const {
      if (cum.empty()) {
        cum.resize(mass.size());
        std::partial_sum(mass.begin(), mass.end(), cum.begin());
      }
      return cum;
    }
  };

  struct MixtureModel {
    double weight = 0.5;
    std::shared_ptr<const LhvModel> first;
    std::shared_ptr<const LhvModel> second;
  };

  // every response must be exactly +-1 across the domain; tables are checked
  // entry by entry on construction, families are spot-checked on the grid
  void check_responses() const {
    if (const IntervalModel* m = std::get_if<IntervalModel>(&impl_)) {
      const std::size_t n = std::max<std::size_t>(m->grid.size(), 1024);
      const double step = (m->hi - m->lo) / static_cast<double>(n);
      for (Setting s : kAllSettings) {
        const SignCosResponse& r = m->responses[setting_index(s)];
        for (std::size_t k = 0; k < n; ++k) {
          const int v = r(m->lo + (k + 0.5) * step);
          if (v != 1 && v != -1)
            throw std::logic_error("LhvModel: response is not +-1 valued");
        }
      }
    }
  }

  std::variant<FiniteModel, IntervalModel, MixtureModel> impl_;
};

// <XY> per the hidden-variable integral; any of the six pairs is allowed.
inline double lhv_correlation(const LhvModel& model, Setting x, Setting y) {
  return model.correlation(x, y);
}

// One simulated run: draws lambda, reads the configured polarizer pair.
// xa must be an alpha-port setting and yb a beta-port setting.
inline ShotRecord sample_shot(const LhvModel& model, Setting xa, Setting yb, RngStream& rng,
                              std::int64_t run_index = 0) {
  if (xa != Setting::A && xa != Setting::Ap)
    throw std::invalid_argument("sample_shot: first setting must be A or A'");
  if (yb != Setting::B && yb != Setting::Bp)
    throw std::invalid_argument("sample_shot: second setting must be B or B'");
  const auto [a, b] = model.sample_responses(xa, yb, rng);
  return ShotRecord{run_index, xa, yb, a, b};
}

inline LhvModel LhvModel::from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "finite") {
    std::vector<double> weights = j.at("weights").get<std::vector<double>>();
    std::map<Setting, TableResponse> responses;
    for (Setting s : kAllSettings) {
      const nlohmann::json& r = j.at("responses").at(std::string(to_string(s)));
      if (r.at("family").get<std::string>() != "table")
        throw std::invalid_argument("finite models take table responses");
      responses[s] = TableResponse{r.at("values").get<std::vector<int>>()};
    }
    return finite(std::move(weights), std::move(responses));
  }
  if (kind == "interval") {
    const double lo = j.at("lo").get<double>();
    const double hi = j.at("hi").get<double>();
    const int points = j.value("quadrature_points", 4096);
    std::map<Setting, SignCosResponse> responses;
    for (Setting s : kAllSettings) {
      const nlohmann::json& r = j.at("responses").at(std::string(to_string(s)));
      if (r.at("family").get<std::string>() != "sign_cos")
        throw std::invalid_argument("interval models take sign_cos responses");
      responses[s] = SignCosResponse{r.at("offset").get<double>()};
    }
    return interval(lo, hi, points, std::move(responses));
  }
  if (kind == "mixture") {
    return mixture(j.at("weight").get<double>(), from_json(j.at("first")),
                   from_json(j.at("second")));
  }
  throw std::invalid_argument("unknown LHV model kind: " + kind);
}

inline LhvModel LhvModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open LHV model file: " + path);
  nlohmann::json j;
  in >> j;
  return from_json(j);
}

}  // namespace eprb
