// Command-line front end: simulate EPRB shot data, analyze it against the
// consistency inequalities and CHSH facets, list the inequality family, and
// test local-polytope membership.
//
// Exit codes: 0 success / all satisfied, 2 configuration or IO error,
// 3 at least one facet violated (or point not a member). 1 is reserved for
// unexpected faults.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eprb/harness.hpp"
#include "eprb/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 2;
constexpr int kExitViolated = 3;

void print_human_summary(const eprb::ExperimentSummary& summary) {
  std::printf("pair      E          SE         N\n");
  for (const auto& [label, s] : summary.pairs)
    std::printf("%-8s %+.6f  %.6f  %lld\n", std::string(eprb::to_string(label)).c_str(),
                s.correlation, s.std_error, static_cast<long long>(s.shots));
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 std::optional<std::uint64_t> seed_override,
                 const std::vector<double>& angles, std::int64_t shots_override) {
  eprb::ExperimentConfig config;
  if (!angles.empty()) {
    eprb::QmSource qm;
    qm.angles[eprb::Setting::A] = angles[0];
    qm.angles[eprb::Setting::Ap] = angles[1];
    qm.angles[eprb::Setting::B] = angles[2];
    qm.angles[eprb::Setting::Bp] = angles[3];
    config.source = std::move(qm);
    config.shots_per_pair = shots_override > 0 ? shots_override : 10000;
    config.seed = seed_override.value_or(0);
  } else {
    config = eprb::load_experiment_config(config_path);
    if (seed_override) config.seed = *seed_override;
    if (shots_override > 0) config.shots_per_pair = shots_override;
  }

  const eprb::ExperimentSummary summary = eprb::run_experiment(config, out_dir);
  print_human_summary(summary);
  std::printf("wrote %zu shot file(s) and summary.json to %s\n", summary.pairs.size(),
              out_dir.c_str());
  return kExitOk;
}

void print_human_report(const eprb::ReportBundle& report) {
  std::printf("correlations:\n");
  for (const auto& [label, entry] : report.correlations.entries()) {
    std::printf("  %-7s %+.6f", eprb::display_string(label).c_str(), entry.value);
    if (entry.std_error) std::printf("  (SE %.6f)", *entry.std_error);
    if (entry.shot_count) std::printf("  N=%lld", static_cast<long long>(*entry.shot_count));
    std::printf("\n");
  }

  std::printf("\ninequalities:\n");
  for (const eprb::InequalityOutcome& r : report.inequality_results) {
    std::printf("  %-12s %-42s", r.inequality.name.c_str(), r.inequality.display().c_str());
    if (r.slack)
      std::printf(" slack %+.6f  %s\n", *r.slack, std::string(to_string(r.status)).c_str());
    else
      std::printf(" %s (%s)\n", std::string(to_string(r.status)).c_str(), r.note.c_str());
  }

  std::printf("\nCHSH: ");
  if (report.chsh)
    std::printf("S = %.6f with %s (local bound %.0f)\n", report.chsh->s_value,
                display_string(report.chsh->pattern).c_str(), report.chsh->bound);
  else
    std::printf("not evaluable (needs all four measured pairs)\n");

  std::printf("membership: ");
  if (!report.membership) {
    std::printf("not evaluable\n");
  } else if (report.membership->is_member) {
    std::printf("member of the local polytope%s\n",
                report.membership->boundary_case ? " (boundary case)" : "");
  } else {
    std::printf("NOT a member; violated facet %s with slack %+.6f\n",
                report.membership->violated_facet->name.c_str(),
                report.membership->facet_min_slack);
  }
}

int cmd_analyze(const std::string& shots_dir, bool as_json, const std::string& out_dir) {
  const eprb::CorrelationSet correlations = eprb::estimate(shots_dir);
  const eprb::ReportBundle report = eprb::analyze_correlations(correlations);

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream jf(std::filesystem::path(out_dir) / "report.json");
    std::ofstream cf(std::filesystem::path(out_dir) / "report.csv");
    if (!jf || !cf) throw std::runtime_error("cannot write report files to " + out_dir);
    jf << eprb::report_to_json(report);
    cf << eprb::report_to_csv(report);
  }

  if (as_json)
    std::fputs(eprb::report_to_json(report).c_str(), stdout);
  else
    print_human_report(report);

  return report.any_facet_violated() ? kExitViolated : kExitOk;
}

int cmd_facets(bool as_json) {
  const auto base = eprb::generate_consistency_inequalities();
  const auto facets = eprb::derive_chsh_facets();

  if (as_json) {
    eprb::JsonWriter w;
    w.begin_array();
    auto emit = [&w](const eprb::ConsistencyInequality& ineq) {
      w.begin_object();
      w.key("name").value(ineq.name);
      w.key("type").value(ineq.kind == eprb::ConsistencyInequality::Kind::ChshFacet
                              ? "chsh_facet"
                              : "consistency");
      w.key("display").value(ineq.display());
      w.key("coefficients").begin_object();
      for (eprb::PairLabel p : eprb::kAllPairs)
        if (ineq.coefficient(p) != 0.0) w.key(to_string(p)).value(ineq.coefficient(p));
      w.end_object();
      w.key("bound").value(ineq.lower_bound);
      if (ineq.kind == eprb::ConsistencyInequality::Kind::Consistency) {
        w.key("pairing").value(ineq.pairing);
        w.key("combination").value(ineq.combination);
      } else {
        w.key("derived_from").begin_array();
        for (const auto& [a, b] : ineq.parents) w.begin_array().value(a).value(b).end_array();
        w.end_array();
      }
      w.end_object();
    };
    for (const auto& ineq : base) emit(ineq);
    for (const auto& ineq : facets) emit(ineq);
    w.end_array();
    std::fputs((w.str() + "\n").c_str(), stdout);
    return kExitOk;
  }

  std::printf("consistency inequalities (pairing, combination):\n");
  for (const auto& ineq : base)
    std::printf("  %-7s %-40s [pairing %d, combination %d]\n", ineq.name.c_str(),
                ineq.display().c_str(), ineq.pairing, ineq.combination);
  std::printf("\nCHSH facets (unmeasured pair eliminated):\n");
  for (const auto& ineq : facets) {
    std::printf("  %-12s %-36s [", ineq.name.c_str(), ineq.display().c_str());
    for (std::size_t i = 0; i < ineq.parents.size(); ++i)
      std::printf("%s%s + %s", i ? ", " : "", ineq.parents[i].first.c_str(),
                  ineq.parents[i].second.c_str());
    std::printf("]\n");
  }
  return kExitOk;
}

int cmd_membership(const std::vector<double>& values, bool as_json) {
  for (double v : values)
    if (std::abs(v) > 1.0 + eprb::kCorrelationRangeTol)
      throw std::invalid_argument("correlation out of range [-1, 1]: " + std::to_string(v));

  eprb::CorrelationSet c;
  c.set(eprb::PairLabel::AB, values[0]);
  c.set(eprb::PairLabel::ABp, values[1]);
  c.set(eprb::PairLabel::ApB, values[2]);
  c.set(eprb::PairLabel::ApBp, values[3]);

  const eprb::MembershipResult result = eprb::lhv_membership(c);

  if (as_json) {
    eprb::JsonWriter w;
    w.begin_object();
    w.key("member").value(result.is_member);
    w.key("boundary_case").value(result.boundary_case);
    if (!result.weights.empty()) {
      w.key("weights").begin_array();
      for (double v : result.weights) w.value(v);
      w.end_array();
    }
    if (result.violated_facet) {
      w.key("violated_facet").value(result.violated_facet->name);
      w.key("facet_slack").value(result.facet_min_slack);
    }
    w.end_object();
    std::fputs((w.str() + "\n").c_str(), stdout);
  } else if (result.is_member) {
    std::printf("member of the local polytope%s\n",
                result.boundary_case ? " (boundary case)" : "");
    std::printf("certificate: convex weights over the 16 deterministic strategies\n");
    for (std::size_t k = 0; k < result.weights.size(); ++k)
      if (result.weights[k] > 0.0)
        std::printf("  strategy %2zu: weight %.6f\n", k, result.weights[k]);
  } else {
    std::printf("NOT a member of the local polytope\n");
    std::printf("violated facet: %s  (slack %+.6f)\n", result.violated_facet->name.c_str(),
                result.facet_min_slack);
  }
  return result.is_member ? kExitOk : kExitViolated;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EPRB correlation toolkit: simulate, analyze, and test Bell-type inequalities"};
  app.require_subcommand(1);

  // simulate
  std::string config_path;
  std::string out_dir;
  std::vector<double> angles;
  std::int64_t shots = 0;
  std::optional<std::uint64_t> seed;
  CLI::App* simulate = app.add_subcommand("simulate", "generate shot files from a config");
  simulate->add_option("--config", config_path, "experiment config (JSON)");
  simulate->add_option("--out", out_dir, "output directory")->required();
  simulate
      ->add_option("--angles", angles,
                   "QM analyzer angles thetaA,thetaA',thetaB,thetaB' in radians "
                   "(alternative to --config)")
      ->delimiter(',')
      ->expected(4);
  simulate->add_option("--shots-per-pair", shots, "shots per setting pair");
  std::uint64_t seed_value = 0;
  CLI::Option* seed_opt = simulate->add_option("--seed", seed_value, "RNG seed");

  // analyze / report
  std::string shots_dir;
  bool as_json = false;
  std::string report_out;
  CLI::App* analyze = app.add_subcommand("analyze", "estimate correlations and check inequalities");
  analyze->add_option("--shots", shots_dir, "directory of shot files")->required();
  analyze->add_flag("--json", as_json, "machine-readable output");

  std::string rep_shots_dir;
  std::string rep_out_dir;
  bool rep_json = false;
  CLI::App* report = app.add_subcommand("report", "analyze and write report.json / report.csv");
  report->add_option("--shots", rep_shots_dir, "directory of shot files")->required();
  report->add_option("--out", rep_out_dir, "directory for report files")->required();
  report->add_flag("--json", rep_json, "also print the JSON report");

  // facets
  bool facets_json = false;
  CLI::App* facets = app.add_subcommand("facets", "list the 16 consistency inequalities and 8 CHSH facets");
  facets->add_flag("--json", facets_json, "machine-readable output");

  // membership
  std::vector<double> member_values;
  bool member_json = false;
  CLI::App* membership =
      app.add_subcommand("membership", "test local-polytope membership of four correlations");
  membership
      ->add_option("values", member_values, "correlations in the order AB AB' A'B A'B'")
      ->expected(4);
  membership->add_flag("--json", member_json, "machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (simulate->parsed()) {
      if (seed_opt->count() > 0) seed = seed_value;
      if (angles.empty() && config_path.empty())
        throw std::invalid_argument("simulate needs --config or --angles");
      return cmd_simulate(config_path, out_dir, seed, angles, shots);
    }
    if (analyze->parsed()) return cmd_analyze(shots_dir, as_json, "");
    if (report->parsed()) {
      const int code = cmd_analyze(rep_shots_dir, rep_json, rep_out_dir);
      std::printf("report written to %s\n", rep_out_dir.c_str());
      return code;
    }
    if (facets->parsed()) return cmd_facets(facets_json);
    if (membership->parsed()) return cmd_membership(member_values, member_json);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  } catch (const std::runtime_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected fault: %s\n", e.what());
    return 1;
  }
  return kExitError;
}
