#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "eprb/harness.hpp"
#include "eprb/inequalities.hpp"
#include "eprb/quantum.hpp"
#include "eprb/strategies.hpp"
#include "test_util.hpp"

using namespace eprb;
using Catch::Approx;

namespace {
constexpr double kPi = std::numbers::pi;

CorrelationSet qm_correlations(double ta, double tap, double tb, double tbp) {
  const DensityOperator bell = DensityOperator::from_pure(bell_state());
  auto corr = [&](double x, double y) {
    return expectation(bell,
                       tensor(polarizer_observable(Angle{x}), polarizer_observable(Angle{y})));
  };
  CorrelationSet c;
  c.set(PairLabel::AB, corr(ta, tb));
  c.set(PairLabel::ABp, corr(ta, tbp));
  c.set(PairLabel::ApB, corr(tap, tb));
  c.set(PairLabel::ApBp, corr(tap, tbp));
  return c;
}
}  // namespace

TEST_CASE("correlation from shots") {
  const std::vector<ShotRecord> agree = {{0, Setting::A, Setting::B, +1, +1},
                                         {1, Setting::A, Setting::B, -1, -1}};
  CHECK(correlation_from_shots(agree).value == 1.0);

  const std::vector<ShotRecord> split = {{0, Setting::A, Setting::B, +1, -1},
                                         {1, Setting::A, Setting::B, +1, +1}};
  const CorrelationEstimate est = correlation_from_shots(split);
  CHECK(est.value == 0.0);
  CHECK(est.shot_count == 2);
  CHECK(est.std_error == Approx(std::sqrt(0.5)).margin(1e-15));

  CHECK_THROWS_AS(correlation_from_shots(std::vector<ShotRecord>{}), std::invalid_argument);
  const std::vector<ShotRecord> mixed = {{0, Setting::A, Setting::B, +1, +1},
                                         {1, Setting::A, Setting::Bp, +1, +1}};
  CHECK_THROWS_AS(correlation_from_shots(mixed), std::invalid_argument);
}

TEST_CASE("a million QM shots reproduce the analytic correlation") {
  // oracle: expectation of A(0) x B(pi/8) on the Bell pair
  const double expected = 0.7071067811865476;

  ExperimentConfig config;
  QmSource qm;
  qm.angles = {{Setting::A, 0.0}, {Setting::Ap, 0.0}, {Setting::B, kPi / 8.0},
               {Setting::Bp, 0.0}};
  config.source = std::move(qm);
  auto sampler = make_pair_sampler(config, PairLabel::AB);

  RngStream rng(20240201);
  const std::int64_t n = 1'000'000;
  std::vector<ShotRecord> records;
  records.reserve(n);
  for (std::int64_t i = 0; i < n; ++i) {
    const auto [a, b] = sampler(rng);
    records.push_back({i, Setting::A, Setting::B, a, b});
  }
  const CorrelationEstimate est = correlation_from_shots(records);
  CHECK(std::abs(est.value - expected) < 5.0 * est.std_error);
}

TEST_CASE("probability / correlation maps") {
  const EqualityProbabilities balanced = prob_from_correlation(0.0);
  CHECK(balanced.p_equal == 0.5);
  CHECK(balanced.p_unequal == 0.5);

  const EqualityProbabilities perfect = prob_from_correlation(1.0);
  CHECK(perfect.p_equal == 1.0);
  CHECK(perfect.p_unequal == 0.0);

  const EqualityProbabilities anti = prob_from_correlation(-0.5);
  CHECK(anti.p_equal == 0.25);
  CHECK(anti.p_unequal == 0.75);

  CHECK(correlation_from_prob(balanced) == 0.0);
  CHECK(correlation_from_prob(perfect) == 1.0);

  RngStream rng(123);
  for (int i = 0; i < 1000; ++i) {
    const double e = rng.uniform() * 2.0 - 1.0;
    CHECK(std::abs(correlation_from_prob(prob_from_correlation(e)) - e) <= 1e-15);
  }

  CHECK_THROWS_AS(prob_from_correlation(1.1), std::invalid_argument);
  CHECK_THROWS_AS(prob_from_correlation(-1.0 - 1e-8), std::invalid_argument);
  CHECK_NOTHROW(prob_from_correlation(1.0 + 5e-10));
  CHECK_THROWS_AS(EqualityProbabilities(0.7, 0.7), std::invalid_argument);
}

TEST_CASE("the sixteen consistency inequalities") {
  const std::vector<ConsistencyInequality> base = generate_consistency_inequalities();
  REQUIRE(base.size() == 16);

  std::set<std::string> names;
  std::set<std::vector<double>> signatures;
  for (const ConsistencyInequality& ineq : base) {
    names.insert(ineq.name);
    std::vector<double> sig;
    for (PairLabel p : kAllPairs) sig.push_back(ineq.coefficient(p));
    signatures.insert(sig);

    CHECK(ineq.lower_bound == -1.0);
    int nonzero = 0;
    for (PairLabel p : kAllPairs)
      if (ineq.coefficient(p) != 0.0) {
        ++nonzero;
        CHECK(std::abs(ineq.coefficient(p)) == 1.0);
      }
    CHECK(nonzero == 3);
    CHECK(ineq.pairing >= 1);
    CHECK(ineq.pairing <= 4);
    CHECK(ineq.combination >= 1);
    CHECK(ineq.combination <= 4);
  }
  CHECK(names.size() == 16);
  CHECK(signatures.size() == 16);

  // the third coefficient is the product of the first two
  const std::map<int, std::array<PairLabel, 3>> pairing_labels = {
      {1, {PairLabel::AB, PairLabel::ABp, PairLabel::BBp}},
      {2, {PairLabel::ApB, PairLabel::ApBp, PairLabel::BBp}},
      {3, {PairLabel::AB, PairLabel::ApB, PairLabel::AAp}},
      {4, {PairLabel::ABp, PairLabel::ApBp, PairLabel::AAp}},
  };
  for (const ConsistencyInequality& ineq : base) {
    const auto& labels = pairing_labels.at(ineq.pairing);
    CHECK(ineq.coefficient(labels[2]) ==
          ineq.coefficient(labels[0]) * ineq.coefficient(labels[1]));
  }

  auto find = [&](const std::string& name) {
    return *std::find_if(base.begin(), base.end(),
                         [&](const auto& i) { return i.name == name; });
  };

  const ConsistencyInequality c1ee = find("C1.ee");
  CHECK(c1ee.coefficient(PairLabel::AB) == 1.0);
  CHECK(c1ee.coefficient(PairLabel::ABp) == 1.0);
  CHECK(c1ee.coefficient(PairLabel::BBp) == 1.0);
  CHECK(c1ee.coefficient(PairLabel::ApB) == 0.0);
  CHECK(c1ee.display() == "E(AB) + E(AB') + E(BB') >= -1");

  const ConsistencyInequality c1ex = find("C1.ex");
  CHECK(c1ex.coefficient(PairLabel::AB) == 1.0);
  CHECK(c1ex.coefficient(PairLabel::ABp) == -1.0);
  CHECK(c1ex.coefficient(PairLabel::BBp) == -1.0);
  CHECK(c1ex.display() == "E(AB) - E(AB') - E(BB') >= -1");

  const ConsistencyInequality c2ee = find("C2.ee");
  CHECK(c2ee.coefficient(PairLabel::ApB) == 1.0);
  CHECK(c2ee.coefficient(PairLabel::ApBp) == 1.0);
  CHECK(c2ee.coefficient(PairLabel::BBp) == 1.0);
}

TEST_CASE("boolean derivation brute force") {
  const BooleanDerivationReport report = verify_boolean_derivation();
  CHECK(report.inequality_checks == 256);
  CHECK(report.inequality_failures == 0);
  CHECK(report.subset_checks == 256);
  CHECK(report.subset_failures == 0);
  CHECK(report.passed());
  CHECK(report.failures.empty());

  // direct instance: A=+1, B=-1, B'=-1 makes both (AB)x and (AB')x occur,
  // and then B = B'
  const int a = +1, b = -1, bp = -1;
  CHECK(a != b);
  CHECK(a != bp);
  CHECK(b == bp);
}

TEST_CASE("minimum slack zero is attained by deterministic assignments") {
  const std::vector<ConsistencyInequality> base = generate_consistency_inequalities();
  for (const CorrelationSet& c : deterministic_strategies()) {
    double min_slack = 1e9;
    for (const ConsistencyInequality& ineq : base) {
      const double slack = evaluate(ineq, c);
      CHECK(slack >= 0.0);
      min_slack = std::min(min_slack, slack);
    }
    CHECK(min_slack == 0.0);  // some inequality is always tight
  }
}

TEST_CASE("chsh facet derivation") {
  const std::vector<ConsistencyInequality> facets = derive_chsh_facets();
  REQUIRE(facets.size() == 8);

  std::set<std::string> patterns;
  for (const ConsistencyInequality& facet : facets) {
    CHECK(facet.lower_bound == -2.0);
    CHECK(facet.coefficient(PairLabel::AAp) == 0.0);
    CHECK(facet.coefficient(PairLabel::BBp) == 0.0);
    int minus = 0;
    std::string pattern;
    for (PairLabel p : kMeasuredPairs) {
      CHECK(std::abs(facet.coefficient(p)) == 1.0);
      if (facet.coefficient(p) < 0.0) ++minus;
      pattern += facet.coefficient(p) > 0.0 ? '+' : '-';
    }
    CHECK(minus % 2 == 1);
    patterns.insert(pattern);
    CHECK(facet.parents.size() >= 1);
  }
  CHECK(patterns.size() == 8);

  // vertex-enumeration oracle: a sign pattern is a facet with bound -2 iff
  // its minimum over the 16 deterministic strategies is exactly -2; the even
  // patterns bottom out at -4 instead
  const std::vector<CorrelationSet> vertices = deterministic_strategies();
  for (int mask = 0; mask < 16; ++mask) {
    std::array<double, 4> signs{};
    int minus = 0;
    for (int k = 0; k < 4; ++k) {
      signs[k] = (mask >> k) & 1 ? -1.0 : 1.0;
      if (signs[k] < 0) ++minus;
    }
    double lowest = 1e9;
    for (const CorrelationSet& v : vertices) {
      double dot = 0.0;
      for (int k = 0; k < 4; ++k) dot += signs[k] * v.value(kMeasuredPairs[k]);
      lowest = std::min(lowest, dot);
    }
    CHECK(lowest == (minus % 2 == 1 ? -2.0 : -4.0));
  }

  const auto combined =
      std::find_if(facets.begin(), facets.end(),
                   [](const auto& f) { return f.name == "CHSH[+-++]"; });
  REQUIRE(combined != facets.end());
  CHECK(combined->coefficient(PairLabel::AB) == 1.0);
  CHECK(combined->coefficient(PairLabel::ABp) == -1.0);
  CHECK(combined->coefficient(PairLabel::ApB) == 1.0);
  CHECK(combined->coefficient(PairLabel::ApBp) == 1.0);
  CHECK(combined->display() == "E(AB) - E(AB') + E(A'B) + E(A'B') >= -2");
  // provenance: the (=,x) member of pairing 1 combined with the (=,=) member
  // of pairing 2
  REQUIRE_FALSE(combined->parents.empty());
  CHECK(combined->parents.front().first == "C1.ex");
  CHECK(combined->parents.front().second == "C2.ee");
}

TEST_CASE("evaluate and slack semantics") {
  const std::vector<ConsistencyInequality> base = generate_consistency_inequalities();
  const std::vector<ConsistencyInequality> facets = derive_chsh_facets();

  CorrelationSet zeros;
  for (PairLabel p : kAllPairs) zeros.set(p, 0.0);
  CHECK(evaluate(base.front(), zeros) == 1.0);

  // missing labels are an error, not an implicit zero
  CorrelationSet partial;
  partial.set(PairLabel::AB, 0.3);
  CHECK_THROWS_AS(evaluate(base.front(), partial), missing_label_error);
  try {
    evaluate(base.front(), partial);
  } catch (const missing_label_error& e) {
    CHECK(e.label() == PairLabel::ABp);
  }

  // deterministic strategies sit inside every facet with slack 0, 2 or 4
  for (const CorrelationSet& v : deterministic_strategies()) {
    for (const ConsistencyInequality& facet : facets) {
      const double slack = evaluate(facet, v);
      CHECK((slack == 0.0 || slack == 2.0 || slack == 4.0));
    }
  }

  // quantum correlations at angles tuned to push the combined inequality
  // to its extreme: slack 2 - 2 sqrt 2 on the CHSH[+-++] facet
  const CorrelationSet tsirelson =
      qm_correlations(0.0, kPi / 4.0, 5.0 * kPi / 8.0, 7.0 * kPi / 8.0);
  const auto combined =
      std::find_if(facets.begin(), facets.end(),
                   [](const auto& f) { return f.name == "CHSH[+-++]"; });
  REQUIRE(combined != facets.end());
  CHECK(evaluate(*combined, tsirelson) == Approx(2.0 - 2.0 * std::sqrt(2.0)).margin(1e-10));
}

TEST_CASE("chsh statistic") {
  CorrelationSet ones;
  for (PairLabel p : kMeasuredPairs) ones.set(p, 1.0);
  CHECK(chsh_value(ones, ChshPattern::UpperSigns) == 2.0);
  CHECK(chsh_value(ones, ChshPattern::LowerSigns) == 2.0);
  CHECK(chsh_max(ones).value == 2.0);

  CorrelationSet extremal;
  extremal.set(PairLabel::AB, 1.0);
  extremal.set(PairLabel::ABp, 1.0);
  extremal.set(PairLabel::ApB, 1.0);
  extremal.set(PairLabel::ApBp, -1.0);
  CHECK(chsh_max(extremal).value == 4.0);

  const CorrelationSet qm = qm_correlations(0.0, kPi / 4.0, kPi / 8.0, 3.0 * kPi / 8.0);
  CHECK(chsh_max(qm).value == Approx(2.0 * std::sqrt(2.0)).margin(1e-10));

  CorrelationSet partial;
  partial.set(PairLabel::AB, 0.5);
  CHECK_THROWS_AS(chsh_value(partial, ChshPattern::UpperSigns), missing_label_error);
}

TEST_CASE("a facet is violated exactly when S exceeds 2") {
  RngStream rng(171717);
  const std::vector<ConsistencyInequality> facets = derive_chsh_facets();
  int violated_count = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const CorrelationSet c = qm_correlations(rng.uniform() * kPi, rng.uniform() * kPi,
                                             rng.uniform() * kPi, rng.uniform() * kPi);
    CHECK(std::abs(c.value(PairLabel::AB)) <= 1.0 + 1e-12);

    double min_slack = 1e9;
    for (const ConsistencyInequality& facet : facets)
      min_slack = std::min(min_slack, evaluate(facet, c));
    const double s = chsh_max(c).value;
    CHECK((min_slack < 0.0) == (s > 2.0));
    CHECK(min_slack == Approx(2.0 - s).margin(1e-12));
    if (min_slack < 0.0) ++violated_count;
  }
  CHECK(violated_count > 0);  // random angles do land outside now and then
}

TEST_CASE("random LHV models satisfy every inequality") {
  RngStream rng(2025);
  const std::vector<ConsistencyInequality> base = generate_consistency_inequalities();
  const std::vector<ConsistencyInequality> facets = derive_chsh_facets();
  for (int trial = 0; trial < 25; ++trial) {
    const LhvModel model = testutil::random_lhv_model(rng);
    const CorrelationSet c = model.correlations();
    for (const ConsistencyInequality& ineq : base) CHECK(evaluate(ineq, c) >= -1e-9);
    for (const ConsistencyInequality& facet : facets) CHECK(evaluate(facet, c) >= -1e-9);
  }
}
