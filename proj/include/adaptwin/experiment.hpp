#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <numbers>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

#include "adaptwin/binary.hpp"
#include "adaptwin/binary_scenarios.hpp"
#include "adaptwin/bound_profile.hpp"
#include "adaptwin/config.hpp"
#include "adaptwin/linear.hpp"
#include "adaptwin/random.hpp"
#include "adaptwin/rotation.hpp"
#include "adaptwin/scenario.hpp"
#include "adaptwin/select.hpp"

namespace adaptwin {

inline constexpr int kCsvSchemaVersion = 1;

struct ExperimentConfig {
  ScenarioSpec scenario;
  AlgoConfig algo{std::numbers::sqrt2, 1.0, 0.1, 1.0};
  std::size_t trials = 1;
  std::vector<std::size_t> baselines;
  std::string output_path;
  bool emit_trace = false;

  void validate() const {
    algo.validate();
    if (trials == 0) throw std::invalid_argument("config: trials must be >= 1");
    for (std::size_t b : baselines)
      if (b == 0 || b > scenario.T) throw std::invalid_argument("config: baseline windows must lie in [1, T]");
    if (const auto* p = std::get_if<AssouadParams>(&scenario.params); p != nullptr && p->nu > 2)
      throw std::invalid_argument("config: AssouadFamily experiments need nu <= 2 so thresholds shatter the atoms");
  }
};

// ---------------------------------------------------------------------------
// config text

using ConfigFields = std::map<std::string, std::string>;

/// `key = value` lines; '#' starts a comment, blank lines are ignored and a
/// repeated key is an error.
inline ConfigFields parse_config_fields(std::string_view text) {
  ConfigFields fields;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find('\n', start), text.size());
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto trim = [](std::string_view s) {
      while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
      while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
      return s;
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
    if (!fields.emplace(key, value).second) throw std::invalid_argument("config: duplicate key '" + key + "'");
  }
  return fields;
}

inline ExperimentConfig config_from_fields(const ConfigFields& fields) {
  constexpr std::string_view kScenarioPrefix = "scenario.";
  ExperimentConfig cfg;
  std::map<std::string, std::string> scenario_fields;
  for (const auto& [key, value] : fields) {
    if (key.starts_with(kScenarioPrefix)) {
      scenario_fields.emplace(key.substr(kScenarioPrefix.size()), value);
    } else if (key == "c1") {
      cfg.algo.c1 = kv::to_double(key, value);
    } else if (key == "c2") {
      cfg.algo.c2 = kv::to_double(key, value);
    } else if (key == "delta") {
      cfg.algo.delta = kv::to_double(key, value);
    } else if (key == "alpha") {
      cfg.algo.alpha = kv::to_double(key, value);
    } else if (key == "trials") {
      cfg.trials = static_cast<std::size_t>(kv::to_u64(key, value));
    } else if (key == "baselines") {
      if (!value.empty())
        for (auto piece : kv::split(value, ',')) cfg.baselines.push_back(static_cast<std::size_t>(kv::to_u64(key, piece)));
    } else if (key == "output_path") {
      cfg.output_path = value;
    } else if (key == "emit_trace") {
      if (value == "true" || value == "1") {
        cfg.emit_trace = true;
      } else if (value == "false" || value == "0") {
        cfg.emit_trace = false;
      } else {
        throw std::invalid_argument("config: emit_trace must be true or false");
      }
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  cfg.scenario = scenario_from_key_values(scenario_fields);
  // c1 defaults to sqrt(VC dimension) = sqrt(2) for thresholds and 1 for the
  // unit-ball linear class.
  if (!fields.contains("c1") && !cfg.scenario.is_binary()) cfg.algo.c1 = 1.0;
  cfg.validate();
  return cfg;
}

inline ExperimentConfig parse_config(std::string_view text) { return config_from_fields(parse_config_fields(text)); }

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// trials

struct TrialRow {
  std::size_t trial_id = 0;
  bool failed = false;
  std::string error;

  std::size_t selected_r = 0;
  StopReason stop_reason = StopReason::StreamExhausted;
  double excess_risk_adaptive = 0.0;
  std::vector<double> excess_risk_baselines;
  std::size_t oracle_r_star = 0;
  double u_at_selected = 0.0;
  double b_star = 0.0;
  double ratio = 0.0;

  SelectionTrace trace;
};

/// A configured experiment: the scenario and its bound profile are built once
/// and shared read-only by every trial.
class Experiment {
 public:
  explicit Experiment(ExperimentConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    if (cfg_.scenario.is_binary()) {
      auto s = make_binary_scenario(cfg_.scenario);
      profile_ = bound_profile(*s, cfg_.algo);
      scenario_ = std::move(s);
    } else {
      auto s = gen_regression_rotation(std::get<RotationParams>(cfg_.scenario.params), cfg_.scenario.T);
      profile_ = bound_profile(s, cfg_.algo);
      scenario_ = std::move(s);
    }
  }

  [[nodiscard]] const ExperimentConfig& config() const { return cfg_; }
  [[nodiscard]] const BoundProfile& profile() const { return profile_; }

  /// Seed of the stream used by a trial.
  [[nodiscard]] std::uint64_t trial_key(std::size_t trial_id) const { return derive_seed(cfg_.scenario.seed, trial_id); }

  /// Runs one trial; any error is recorded in the row instead of propagating.
  [[nodiscard]] TrialRow run_trial(std::size_t trial_id) const {
    TrialRow row;
    row.trial_id = trial_id;
    try {
      if (const auto* bin = std::get_if<std::unique_ptr<BinaryScenario>>(&scenario_)) {
        run_binary(**bin, row);
      } else {
        run_regression(std::get<RotationScenario>(scenario_), row);
      }
    } catch (const std::exception& e) {
      row = TrialRow{};
      row.trial_id = trial_id;
      row.failed = true;
      row.error = e.what();
    }
    return row;
  }

  /// All trials, ordered by trial id. Trials run on up to `threads` workers
  /// (0 picks the hardware concurrency).
  [[nodiscard]] std::vector<TrialRow> run_all(unsigned threads = 0) const {
    std::vector<TrialRow> rows(cfg_.trials);
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, cfg_.trials));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (std::size_t k = next++; k < rows.size(); k = next++) rows[k] = run_trial(k);
    };
    std::vector<std::jthread> pool;
    for (unsigned k = 1; k < threads; ++k) pool.emplace_back(work);
    work();
    return rows;
  }

 private:
  template <typename Scenario, typename Point, typename Discrepancy, typename Fit, typename Risk>
  void run_common(const Scenario& scenario, const std::vector<Point>& stream, Discrepancy&& disc, Fit&& fit,
                  Risk&& risk, TrialRow& row) const {
    const std::size_t horizon = stream.size();
    const std::span<const Point> all(stream);
    auto newest = [&](std::size_t r) { return all.subspan(horizon - r, r); };

    row.trace = select_window(
        horizon, [&](std::size_t r) { return disc(newest(r), all.subspan(horizon - 2 * r, r)); }, cfg_.algo);
    row.selected_r = row.trace.selected_r;
    row.stop_reason = row.trace.stop_reason;

    const double best = scenario.best_risk();
    row.excess_risk_adaptive = risk(fit(newest(row.selected_r))) - best;
    for (std::size_t b : cfg_.baselines) row.excess_risk_baselines.push_back(risk(fit(newest(b))) - best);

    row.oracle_r_star = profile_.r_star;
    row.b_star = profile_.b_star;
    row.u_at_selected = BoundProfile::u_at(scenario, row.selected_r, cfg_.algo);
    row.ratio = row.u_at_selected / row.b_star;
  }

  void run_binary(const BinaryScenario& scenario, TrialRow& row) const {
    const auto stream = scenario.stream(trial_key(row.trial_id));
    run_common(
        scenario, stream,
        [](std::span<const LabeledPoint> recent, std::span<const LabeledPoint> older) {
          return discrepancy_binary(recent, older).value();
        },
        [](std::span<const LabeledPoint> window) { return erm_threshold(window).hypothesis; },
        [&](const ThresholdHypothesis& h) { return scenario.risk(h); }, row);
  }

  void run_regression(const RotationScenario& scenario, TrialRow& row) const {
    const auto stream = scenario.stream(trial_key(row.trial_id));
    run_common(
        scenario, stream,
        [](std::span<const RegressionPoint> recent, std::span<const RegressionPoint> older) {
          return discrepancy_linear(recent, older);
        },
        [](std::span<const RegressionPoint> window) { return fit_linear(window).w; },
        [&](const Eigen::VectorXd& w) { return scenario.risk(w); }, row);
  }

  ExperimentConfig cfg_;
  BoundProfile profile_;
  std::variant<std::unique_ptr<BinaryScenario>, RotationScenario> scenario_;
};

inline TrialRow run_trial(const ExperimentConfig& cfg, std::size_t trial_id) { return Experiment(cfg).run_trial(trial_id); }

// ---------------------------------------------------------------------------
// reports

inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string csv_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += (c == '\n' || c == '\r') ? ' ' : c;
  }
  return out + "\"";
}

struct TrialSummary {
  std::size_t ok = 0;
  std::size_t failed = 0;
  std::size_t drift_detected = 0;
  double mean_selected_r = std::nan("");
  double mean_excess_adaptive = std::nan("");
  std::vector<double> mean_excess_baselines;
  double mean_u = std::nan("");
  double mean_ratio = std::nan("");
  std::size_t ratio_within_22 = 0;
  std::map<std::size_t, std::size_t> histogram;  // selected_r -> count
};

inline TrialSummary summarize(const std::vector<TrialRow>& rows, std::size_t n_baselines) {
  TrialSummary s;
  double sel = 0, exc = 0, u = 0, ratio = 0;
  std::vector<double> base(n_baselines, 0.0);
  for (const auto& r : rows) {
    if (r.failed) {
      ++s.failed;
      continue;
    }
    ++s.ok;
    if (r.stop_reason == StopReason::DriftDetected) ++s.drift_detected;
    if (r.ratio <= 22.0) ++s.ratio_within_22;
    ++s.histogram[r.selected_r];
    sel += static_cast<double>(r.selected_r);
    exc += r.excess_risk_adaptive;
    u += r.u_at_selected;
    ratio += r.ratio;
    for (std::size_t k = 0; k < n_baselines; ++k) base[k] += r.excess_risk_baselines[k];
  }
  s.mean_excess_baselines.assign(n_baselines, std::nan(""));
  if (s.ok > 0) {
    const double n = static_cast<double>(s.ok);
    s.mean_selected_r = sel / n;
    s.mean_excess_adaptive = exc / n;
    s.mean_u = u / n;
    s.mean_ratio = ratio / n;
    for (std::size_t k = 0; k < n_baselines; ++k) s.mean_excess_baselines[k] = base[k] / n;
  }
  return s;
}

/// Header, one row per trial in id order, then a summary row whose detail
/// field carries the schema version and the selected_r histogram.
inline std::string format_csv(const ExperimentConfig& cfg, const BoundProfile& profile, const std::vector<TrialRow>& rows) {
  std::string out = "trial_id,selected_r,stop_reason,excess_risk_adaptive";
  for (std::size_t b : cfg.baselines) out += ",excess_risk_r" + std::to_string(b);
  out += ",oracle_r_star,U_at_selected,B_star,ratio,detail\n";

  for (const auto& r : rows) {
    out += std::to_string(r.trial_id) + ',';
    if (r.failed) {
      out += "nan,Failed,nan";
      for (std::size_t k = 0; k < cfg.baselines.size(); ++k) out += ",nan";
      out += ",nan,nan,nan,nan," + csv_quote("error: " + r.error) + '\n';
      continue;
    }
    out += std::to_string(r.selected_r) + ',' + std::string(to_string(r.stop_reason)) + ',' +
           format_real(r.excess_risk_adaptive);
    for (double e : r.excess_risk_baselines) out += ',' + format_real(e);
    out += ',' + std::to_string(r.oracle_r_star) + ',' + format_real(r.u_at_selected) + ',' + format_real(r.b_star) +
           ',' + format_real(r.ratio) + ",\n";
  }

  const TrialSummary s = summarize(rows, cfg.baselines.size());
  std::string detail = "schema=" + std::to_string(kCsvSchemaVersion) + " hist=";
  bool first = true;
  for (const auto& [r, count] : s.histogram) {
    if (!first) detail += ',';
    detail += std::to_string(r) + ':' + std::to_string(count);
    first = false;
  }
  detail += " failed=" + std::to_string(s.failed);
  if (!profile.exact) detail += " oracle_tolerance=" + format_real(profile.tolerance);

  out += "summary," + format_real(s.mean_selected_r) + ",DriftDetected=" + std::to_string(s.drift_detected) + '/' +
         std::to_string(s.ok) + ',' + format_real(s.mean_excess_adaptive);
  for (double e : s.mean_excess_baselines) out += ',' + format_real(e);
  out += ',' + std::to_string(profile.r_star) + ',' + format_real(s.mean_u) + ',' + format_real(profile.b_star) + ',' +
         format_real(s.mean_ratio) + ',' + csv_quote(detail) + '\n';
  return out;
}

/// Writes `content` to `path`; a partially written file is removed before the
/// error is rethrown.
inline void write_report(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) {
    out.close();
    std::error_code ec;
    std::filesystem::remove(path, ec);
    throw std::runtime_error("write to '" + path.string() + "' failed");
  }
}

inline std::string format_profile(const BoundProfile& profile) {
  std::string out = profile.exact ? "bound profile (exact oracle)\n"
                                  : "bound profile (approximate oracle, tolerance " + format_real(profile.tolerance) + ")\n";
  out += "r,S,max_drift,window_drift,U,B\n";
  for (const auto& row : profile.rows) {
    out += std::to_string(row.r) + ',' + format_real(row.stat) + ',' + format_real(row.max_drift) + ',' +
           format_real(row.window_drift) + ',' + format_real(row.u) + ',' + format_real(row.b) + '\n';
  }
  out += "B_star=" + format_real(profile.b_star) + " r_star=" + std::to_string(profile.r_star) + '\n';
  return out;
}

inline std::string format_trace_steps(const SelectionTrace& trace) {
  std::string out;
  for (const auto& s : trace.steps) {
    out += "step i=" + std::to_string(s.i) + " r=" + std::to_string(s.r) +
           " discrepancy=" + format_real(s.empirical_discrepancy) + " threshold=" + format_real(s.threshold) +
           (s.passed ? " pass\n" : " fail\n");
  }
  out += "stop_reason=" + std::string(to_string(trace.stop_reason)) + " selected_r=" + std::to_string(trace.selected_r) +
         '\n';
  return out;
}

/// Step-by-step listing of one trial followed by the bound profile.
inline std::string trace_command(const Experiment& exp, std::size_t trial_id) {
  const TrialRow row = exp.run_trial(trial_id);
  if (row.failed) throw std::runtime_error("trial " + std::to_string(trial_id) + " failed: " + row.error);
  const auto& spec = exp.config().scenario;
  std::string out = "scenario=" + std::string(to_string(spec.kind())) + " T=" + std::to_string(spec.T) +
                    " seed=" + std::to_string(spec.seed) + " trial=" + std::to_string(trial_id) + '\n';
  out += format_trace_steps(row.trace);
  out += format_profile(exp.profile());
  return out;
}

/// Runs every trial and returns the CSV text. When the config asks for traces
/// and `trace_out` is given, each trial's steps are printed there in id order.
inline std::string run_experiment(const ExperimentConfig& cfg, std::ostream* trace_out = nullptr, unsigned threads = 0) {
  const Experiment exp(cfg);
  const auto rows = exp.run_all(threads);
  if (cfg.emit_trace && trace_out != nullptr) {
    for (const auto& r : rows) {
      *trace_out << "trial " << r.trial_id << '\n';
      *trace_out << (r.failed ? "failed: " + r.error + '\n' : format_trace_steps(r.trace));
    }
  }
  return format_csv(cfg, exp.profile(), rows);
}

/// One summary line per value of `param` (any config key).
inline std::string run_sweep(const ConfigFields& base, const std::string& param, std::span<const std::string> values,
                             unsigned threads = 0) {
  std::string out;
  for (const auto& value : values) {
    ConfigFields fields = base;
    fields[param] = value;
    const ExperimentConfig cfg = config_from_fields(fields);
    if (out.empty()) {
      out = "param,value,trials,failed,drift_detected,mean_selected_r,mean_excess_risk_adaptive";
      for (std::size_t b : cfg.baselines) out += ",mean_excess_risk_r" + std::to_string(b);
      out += ",oracle_r_star,B_star,mean_U_at_selected,mean_ratio,ratio_le_22\n";
    }
    const Experiment exp(cfg);
    const auto rows = exp.run_all(threads);
    const TrialSummary s = summarize(rows, cfg.baselines.size());
    out += param + ',' + csv_quote(value) + ',' + std::to_string(cfg.trials) + ',' + std::to_string(s.failed) + ',' +
           std::to_string(s.drift_detected) + ',' + format_real(s.mean_selected_r) + ',' +
           format_real(s.mean_excess_adaptive);
    for (double e : s.mean_excess_baselines) out += ',' + format_real(e);
    out += ',' + std::to_string(exp.profile().r_star) + ',' + format_real(exp.profile().b_star) + ',' +
           format_real(s.mean_u) + ',' + format_real(s.mean_ratio) + ',' + std::to_string(s.ratio_within_22) + '\n';
  }
  return out;
}

}  // namespace adaptwin
