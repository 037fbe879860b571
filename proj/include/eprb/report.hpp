#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eprb/correlations.hpp"
#include "eprb/inequalities.hpp"
#include "eprb/jsonfmt.hpp"
#include "eprb/membership.hpp"

// Analysis of a correlation set against the full inequality family, bundled
// for reporting. Inequalities that reference an absent correlation are marked
// not evaluable instead of being silently skipped or zero-filled.

namespace eprb {

struct InequalityOutcome {
  enum class Status { Satisfied, Violated, NotEvaluable };

  ConsistencyInequality inequality;
  std::optional<double> slack;
  Status status = Status::NotEvaluable;
  std::string note;  // e.g. "unmeasured: BBp"
};

inline std::string_view to_string(InequalityOutcome::Status s) {
  switch (s) {
    case InequalityOutcome::Status::Satisfied: return "satisfied";
    case InequalityOutcome::Status::Violated: return "violated";
    case InequalityOutcome::Status::NotEvaluable: return "not_evaluable";
  }
  return "?";
}

struct ChshReport {
  double s_value = 0.0;
  ChshPattern pattern = ChshPattern::UpperSigns;
  double bound = 2.0;
};

struct ReportBundle {
  CorrelationSet correlations;
  std::vector<InequalityOutcome> inequality_results;  // 16 base then 8 facets
  std::optional<ChshReport> chsh;
  std::optional<MembershipResult> membership;

  bool any_facet_violated() const {
    for (const InequalityOutcome& r : inequality_results)
      if (r.inequality.kind == ConsistencyInequality::Kind::ChshFacet &&
          r.status == InequalityOutcome::Status::Violated)
        return true;
    return false;
  }
};

inline InequalityOutcome evaluate_outcome(ConsistencyInequality ineq, const CorrelationSet& c) {
  InequalityOutcome out;
  out.inequality = std::move(ineq);
  try {
    const double slack = evaluate(out.inequality, c);
    out.slack = slack;
    out.status = slack < 0.0 ? InequalityOutcome::Status::Violated
                             : InequalityOutcome::Status::Satisfied;
  } catch (const missing_label_error& e) {
    out.status = InequalityOutcome::Status::NotEvaluable;
    out.note = "unmeasured: " + std::string(to_string(e.label()));
  }
  return out;
}

// Evaluates whatever the correlation set supports: all 24 inequalities, the
// CHSH statistic, and polytope membership when the four measured pairs are
// present.
inline ReportBundle analyze_correlations(const CorrelationSet& c) {
  ReportBundle report;
  report.correlations = c;
  for (ConsistencyInequality& ineq : generate_consistency_inequalities())
    report.inequality_results.push_back(evaluate_outcome(std::move(ineq), c));
  for (ConsistencyInequality& facet : derive_chsh_facets())
    report.inequality_results.push_back(evaluate_outcome(std::move(facet), c));

  if (c.has_all_measured()) {
    const ChshResult s = chsh_max(c);
    report.chsh = ChshReport{s.value, s.pattern, 2.0};
    report.membership = lhv_membership(c);
  }
  return report;
}

inline std::string report_to_json(const ReportBundle& report) {
  JsonWriter w;
  w.begin_object();

  w.key("correlations").begin_object();
  for (const auto& [label, entry] : report.correlations.entries()) {
    w.key(to_string(label)).begin_object();
    w.key("E").value(entry.value);
    if (entry.std_error) w.key("SE").value(*entry.std_error);
    if (entry.shot_count) w.key("N").value(static_cast<long long>(*entry.shot_count));
    w.end_object();
  }
  w.end_object();

  w.key("inequalities").begin_array();
  for (const InequalityOutcome& r : report.inequality_results) {
    w.begin_object();
    w.key("name").value(r.inequality.name);
    w.key("type").value(r.inequality.kind == ConsistencyInequality::Kind::ChshFacet
                            ? "chsh_facet"
                            : "consistency");
    w.key("display").value(r.inequality.display());
    w.key("coefficients").begin_object();
    for (PairLabel p : kAllPairs) {
      const double coeff = r.inequality.coefficient(p);
      if (coeff != 0.0) w.key(to_string(p)).value(coeff);
    }
    w.end_object();
    w.key("bound").value(r.inequality.lower_bound);
    if (r.slack)
      w.key("slack").value(*r.slack);
    else
      w.key("slack").null();
    w.key("status").value(to_string(r.status));
    if (!r.note.empty()) w.key("note").value(r.note);
    if (!r.inequality.parents.empty()) {
      w.key("derived_from").begin_array();
      for (const auto& [p1, p2] : r.inequality.parents)
        w.begin_array().value(p1).value(p2).end_array();
      w.end_array();
    }
    w.end_object();
  }
  w.end_array();

  if (report.chsh) {
    w.key("chsh").begin_object();
    w.key("S").value(report.chsh->s_value);
    w.key("pattern").value(display_string(report.chsh->pattern));
    w.key("bound").value(report.chsh->bound);
    w.end_object();
  } else {
    w.key("chsh").null();
  }

  if (report.membership) {
    const MembershipResult& m = *report.membership;
    w.key("membership").begin_object();
    w.key("member").value(m.is_member);
    w.key("boundary_case").value(m.boundary_case);
    if (!m.weights.empty()) {
      w.key("weights").begin_array();
      for (double v : m.weights) w.value(v);
      w.end_array();
    }
    if (m.violated_facet) {
      w.key("violated_facet").value(m.violated_facet->name);
      w.key("facet_slack").value(m.facet_min_slack);
    }
    w.key("lp_residual").value(m.lp_residual);
    w.end_object();
  } else {
    w.key("membership").null();
  }

  w.end_object();
  return w.str() + "\n";
}

// One row per inequality, mirroring the JSON report.
inline std::string report_to_csv(const ReportBundle& report) {
  std::string out = "name,type,c_AB,c_ABp,c_ApB,c_ApBp,c_AAp,c_BBp,bound,slack,status\n";
  for (const InequalityOutcome& r : report.inequality_results) {
    out += r.inequality.name;
    out += r.inequality.kind == ConsistencyInequality::Kind::ChshFacet ? ",chsh_facet"
                                                                       : ",consistency";
    for (PairLabel p : kAllPairs) {
      out += ',';
      out += format_double17(r.inequality.coefficient(p));
    }
    out += ',';
    out += format_double17(r.inequality.lower_bound);
    out += ',';
    if (r.slack) out += format_double17(*r.slack);
    out += ',';
    out += to_string(r.status);
    out += '\n';
  }
  return out;
}

}  // namespace eprb
