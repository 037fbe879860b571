#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "eprb/correlations.hpp"
#include "eprb/jsonfmt.hpp"
#include "eprb/lhv.hpp"
#include "eprb/quantum.hpp"
#include "eprb/rng.hpp"

// End-to-end simulated EPRB experiments: per-pair shot generation from either
// the quantum Bell pair or an LHV model, line-delimited JSON shot files, and
// correlation estimation.
//
// Shots are generated per configured pair in blocks (no per-run setting
// switching). Each pair draws from its own RNG stream keyed by (seed, pair
// index in the canonical order AB, AB', A'B, A'B'), so adding a pair never
// changes another pair's data.

namespace eprb {

struct QmSource {
  // analyzer angle in radians per setting
  std::map<Setting, double> angles;
};

struct LhvSource {
  LhvModel model;
};

struct ExperimentConfig {
  std::variant<QmSource, LhvSource> source;
  std::int64_t shots_per_pair = 0;
  std::uint64_t seed = 0;
  std::vector<PairLabel> pairs = {PairLabel::AB, PairLabel::ABp, PairLabel::ApB, PairLabel::ApBp};
};

inline std::size_t measured_pair_index(PairLabel p) {
  for (std::size_t i = 0; i < kMeasuredPairs.size(); ++i)
    if (kMeasuredPairs[i] == p) return i;
  throw std::invalid_argument("not a measured pair: " + std::string(to_string(p)));
}

inline std::string shot_file_name(PairLabel p) {
  const auto [x, y] = settings_of(p);
  return "shots_" + std::string(to_string(x)) + "_" + std::string(to_string(y)) + ".jsonl";
}

// Per-shot sampler for one setting pair. QM sources draw from the Born
// probabilities of the Bell pair; LHV sources draw lambda and apply the
// response functions.
inline std::function<std::pair<int, int>(RngStream&)> make_pair_sampler(
    const ExperimentConfig& config, PairLabel pair) {
  const auto [xa, yb] = settings_of(pair);
  if (const QmSource* qm = std::get_if<QmSource>(&config.source)) {
    auto angle_of = [&](Setting s) {
      auto it = qm->angles.find(s);
      if (it == qm->angles.end())
        throw std::invalid_argument("config is missing the angle for setting " +
                                    std::string(to_string(s)));
      return Angle{it->second};
    };
    const DensityOperator bell = DensityOperator::from_pure(bell_state());
    const JointProbabilities jp = joint_probabilities(bell, angle_of(xa), angle_of(yb));
    // cumulative over (++, +-, -+, --)
    std::array<double, 4> cum{};
    double acc = 0.0;
    for (std::size_t k = 0; k < 4; ++k) cum[k] = (acc += jp.p[k]);
    return [cum](RngStream& rng) {
      const std::size_t k = rng.pick_category(cum);
      return std::pair<int, int>{k < 2 ? +1 : -1, (k % 2 == 0) ? +1 : -1};
    };
  }
  const LhvModel& model = std::get<LhvSource>(config.source).model;
  return [&model, xa = xa, yb = yb](RngStream& rng) {
    return model.sample_responses(xa, yb, rng);
  };
}

struct PairSummary {
  double correlation = 0.0;
  double std_error = 0.0;
  std::int64_t shots = 0;
};

struct ExperimentSummary {
  std::map<PairLabel, PairSummary> pairs;

  CorrelationSet correlations() const {
    CorrelationSet c;
    for (const auto& [label, s] : pairs)
      c.set(label, CorrelationSet::Entry{s.correlation, s.std_error, s.shots});
    return c;
  }
};

inline std::string summary_to_json(const ExperimentSummary& summary) {
  JsonWriter w;
  w.begin_object();
  for (const auto& [label, s] : summary.pairs) {
    w.key(to_string(label)).begin_object();
    w.key("E").value(s.correlation);
    w.key("SE").value(s.std_error);
    w.key("N").value(static_cast<long long>(s.shots));
    w.end_object();
  }
  w.end_object();
  return w.str() + "\n";
}

inline std::string shot_record_line(const ShotRecord& r) {
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "{\"run_index\":%lld,\"setting_a\":\"%s\",\"setting_b\":\"%s\","
                "\"outcome_a\":%d,\"outcome_b\":%d}\n",
                static_cast<long long>(r.run_index), std::string(to_string(r.setting_a)).c_str(),
                std::string(to_string(r.setting_b)).c_str(), r.outcome_a, r.outcome_b);
  return buf;
}

// Runs every configured pair: N shots each, one .jsonl file per pair plus
// summary.json in out_dir. Deterministic down to the byte for a given config.
inline ExperimentSummary run_experiment(const ExperimentConfig& config,
                                        const std::filesystem::path& out_dir) {
  if (config.shots_per_pair < 1)
    throw std::invalid_argument("run_experiment: shots_per_pair must be >= 1");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec && !std::filesystem::is_directory(out_dir))
    throw std::runtime_error("cannot create output directory: " + out_dir.string());

  ExperimentSummary summary;
  for (PairLabel pair : config.pairs) {
    const auto [xa, yb] = settings_of(pair);
    RngStream stream = derive_stream(config.seed, measured_pair_index(pair));
    auto sampler = make_pair_sampler(config, pair);

    const std::filesystem::path path = out_dir / shot_file_name(pair);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write shot file: " + path.string());

    double sum = 0.0;
    for (std::int64_t i = 0; i < config.shots_per_pair; ++i) {
      const auto [a, b] = sampler(stream);
      out << shot_record_line(ShotRecord{i, xa, yb, a, b});
      sum += static_cast<double>(a) * static_cast<double>(b);
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());

    const double e = sum / static_cast<double>(config.shots_per_pair);
    summary.pairs[pair] = {e, standard_error(e, config.shots_per_pair), config.shots_per_pair};
  }

  std::ofstream sf(out_dir / "summary.json");
  if (!sf) throw std::runtime_error("cannot write summary.json in " + out_dir.string());
  sf << summary_to_json(summary);
  return summary;
}

inline ShotRecord parse_shot_line(const std::string& line, const std::string& file,
                                  std::int64_t line_number) {
  try {
    const nlohmann::json j = nlohmann::json::parse(line);
    ShotRecord r;
    r.run_index = j.at("run_index").get<std::int64_t>();
    r.setting_a = parse_setting(j.at("setting_a").get<std::string>());
    r.setting_b = parse_setting(j.at("setting_b").get<std::string>());
    r.outcome_a = j.at("outcome_a").get<int>();
    r.outcome_b = j.at("outcome_b").get<int>();
    if ((r.outcome_a != 1 && r.outcome_a != -1) || (r.outcome_b != 1 && r.outcome_b != -1))
      throw std::runtime_error("outcomes must be +-1");
    if (r.setting_a != Setting::A && r.setting_a != Setting::Ap)
      throw std::runtime_error("setting_a must be A or Ap");
    if (r.setting_b != Setting::B && r.setting_b != Setting::Bp)
      throw std::runtime_error("setting_b must be B or Bp");
    return r;
  } catch (const std::exception& e) {
    throw std::runtime_error("malformed shot record at " + file + ":" +
                             std::to_string(line_number) + ": " + e.what());
  }
}

// Estimates per-pair correlations from every *.jsonl shot file under dir.
// Records are grouped by the setting pair they carry, so AA' and BB' can
// never appear: no record co-measures two same-port settings.
inline CorrelationSet estimate(const std::filesystem::path& shot_dir) {
  if (!std::filesystem::is_directory(shot_dir))
    throw std::runtime_error("shot directory does not exist: " + shot_dir.string());

  struct Accumulator {
    double sum = 0.0;
    std::int64_t n = 0;
  };
  std::map<PairLabel, Accumulator> acc;

  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(shot_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  for (const std::filesystem::path& path : files) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open shot file: " + path.string());
    std::string line;
    std::int64_t line_number = 0;
    while (std::getline(in, line)) {
      ++line_number;
      if (line.empty()) continue;
      const ShotRecord r = parse_shot_line(line, path.string(), line_number);
      Accumulator& a = acc[pair_label(r.setting_a, r.setting_b)];
      a.sum += static_cast<double>(r.outcome_a) * static_cast<double>(r.outcome_b);
      a.n += 1;
    }
  }

  if (acc.empty()) throw std::runtime_error("no pairs: no shot records found in " +
                                            shot_dir.string());

  CorrelationSet c;
  for (const auto& [label, a] : acc) {
    const double e = a.sum / static_cast<double>(a.n);
    c.set(label, CorrelationSet::Entry{e, standard_error(e, a.n), a.n});
  }
  return c;
}

// --- config file ---------------------------------------------------------

inline ExperimentConfig parse_experiment_config(const nlohmann::json& j,
                                                const std::filesystem::path& base_dir) {
  ExperimentConfig config;
  const nlohmann::json& src = j.at("source");
  const std::string kind = src.at("kind").get<std::string>();
  if (kind == "qm") {
    QmSource qm;
    for (Setting s : kAllSettings)
      qm.angles[s] = src.at("angles").at(std::string(to_string(s))).get<double>();
    config.source = std::move(qm);
  } else if (kind == "lhv") {
    if (src.contains("model")) {
      config.source = LhvSource{LhvModel::from_json(src.at("model"))};
    } else if (src.contains("model_file")) {
      const std::filesystem::path p = src.at("model_file").get<std::string>();
      config.source =
          LhvSource{LhvModel::load((p.is_absolute() ? p : base_dir / p).string())};
    } else {
      throw std::invalid_argument("lhv source needs \"model\" or \"model_file\"");
    }
  } else {
    throw std::invalid_argument("unknown source kind: " + kind);
  }

  config.shots_per_pair = j.at("shots_per_pair").get<std::int64_t>();
  config.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("pairs")) {
    config.pairs.clear();
    for (const nlohmann::json& p : j.at("pairs")) {
      const PairLabel label = parse_pair(p.get<std::string>());
      measured_pair_index(label);  // rejects AA' / BB'
      config.pairs.push_back(label);
    }
    if (config.pairs.empty()) throw std::invalid_argument("config lists no pairs");
  }
  return config;
}

inline ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error("cannot parse config file " + path.string() + ": " + e.what());
  }
  return parse_experiment_config(j, path.parent_path());
}

}  // namespace eprb
