#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace adaptwin {

/// Inclusive range of 1-based time indices [first, last]; the distribution it
/// denotes is the uniform average of P_first .. P_last.
struct TimeRange {
  std::size_t first = 1;
  std::size_t last = 1;

  [[nodiscard]] std::size_t size() const { return last - first + 1; }

  /// The newest r steps of a horizon T: [T - r + 1, T].
  static TimeRange newest(std::size_t horizon, std::size_t r) { return {horizon - r + 1, horizon}; }
  static TimeRange at(std::size_t t) { return {t, t}; }
};

enum class ScenarioKind { IID, MovingBoundary, AlternatingIntervals, AssouadFamily, RegressionRotation };

inline constexpr std::array<std::pair<ScenarioKind, std::string_view>, 5> kScenarioNames{{
    {ScenarioKind::IID, "IID"},
    {ScenarioKind::MovingBoundary, "MovingBoundary"},
    {ScenarioKind::AlternatingIntervals, "AlternatingIntervals"},
    {ScenarioKind::AssouadFamily, "AssouadFamily"},
    {ScenarioKind::RegressionRotation, "RegressionRotation"},
}};

inline std::string_view to_string(ScenarioKind k) {
  for (const auto& [kind, name] : kScenarioNames)
    if (kind == k) return name;
  return "?";
}

inline ScenarioKind parse_scenario_kind(std::string_view s) {
  for (const auto& [kind, name] : kScenarioNames)
    if (name == s) return kind;
  throw std::invalid_argument("unknown scenario kind '" + std::string(s) + "'");
}

/// Stationary threshold concept: y = 1{x >= c}, flipped with probability eta.
struct IidParams {
  double c = 0.5;
  double eta = 0.0;
};

/// Threshold boundary moving by `step` per time step, ending at c0 at time T.
struct MovingBoundaryParams {
  double c0 = 0.5;
  double step = 0.01;
  double eta = 0.0;
};

/// Two intervals of length Delta/2 starting at p0 and p1 whose labels flip on
/// alternating steps.
struct AlternatingParams {
  double Delta = 0.2;
  double p0 = 0.1;
  double p1 = 0.6;
};

/// Worst-case product family over nu shatter points. `delta_seq` holds
/// Delta_1..Delta_T and `tau` the sign vector of length nu.
struct AssouadParams {
  std::size_t nu = 2;
  std::vector<double> delta_seq;
  std::vector<int> tau;
};

/// Linear target rotating by theta per step (d = 2), ending at w0 at time T.
struct RotationParams {
  std::array<double, 2> w0{1.0, 0.0};
  double theta = 0.0;
  double sigma = 0.0;
};

using ScenarioParams = std::variant<IidParams, MovingBoundaryParams, AlternatingParams, AssouadParams, RotationParams>;

struct ScenarioSpec {
  std::size_t T = 1;
  std::uint64_t seed = 0;
  ScenarioParams params = IidParams{};

  [[nodiscard]] ScenarioKind kind() const { return static_cast<ScenarioKind>(params.index()); }
  [[nodiscard]] bool is_binary() const { return kind() != ScenarioKind::RegressionRotation; }
};

// ---------------------------------------------------------------------------
// flat key-value serialization

namespace kv {

inline double to_double(std::string_view key, std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v))
    throw std::invalid_argument("key '" + std::string(key) + "': not a finite number: '" + std::string(s) + "'");
  return v;
}

inline std::uint64_t to_u64(std::string_view key, std::string_view s) {
  std::uint64_t v = 0;
  const auto* end = s.data() + s.size();
  const bool hex = s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X');
  const auto [ptr, ec] = hex ? std::from_chars(s.data() + 2, end, v, 16) : std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end)
    throw std::invalid_argument("key '" + std::string(key) + "': not an unsigned integer: '" + std::string(s) + "'");
  return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    auto piece = s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    while (!piece.empty() && piece.front() == ' ') piece.remove_prefix(1);
    while (!piece.empty() && piece.back() == ' ') piece.remove_suffix(1);
    out.push_back(piece);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

template <typename Seq, typename F>
std::string join(const Seq& seq, F&& fmt) {
  std::string out;
  for (const auto& v : seq) {
    if (!out.empty()) out += ',';
    out += fmt(v);
  }
  return out;
}

}  // namespace kv

/// Expands a Delta sequence field: either an explicit comma list of T values
/// or `linear:<slope>` meaning Delta_r = slope * (r - 1).
inline std::vector<double> parse_delta_seq(std::string_view s, std::size_t horizon) {
  constexpr std::string_view kLinear = "linear:";
  if (s.starts_with(kLinear)) {
    const double slope = kv::to_double("delta_seq", s.substr(kLinear.size()));
    std::vector<double> out(horizon);
    for (std::size_t r = 1; r <= horizon; ++r) out[r - 1] = slope * static_cast<double>(r - 1);
    return out;
  }
  std::vector<double> out;
  for (auto piece : kv::split(s, ',')) out.push_back(kv::to_double("delta_seq", piece));
  return out;
}

/// Key-value pairs for a scenario; keys are kind, T, seed, then the
/// kind-specific parameter names.
inline std::vector<std::pair<std::string, std::string>> to_key_values(const ScenarioSpec& spec) {
  std::vector<std::pair<std::string, std::string>> out{
      {"kind", std::string(to_string(spec.kind()))},
      {"T", std::to_string(spec.T)},
      {"seed", std::to_string(spec.seed)},
  };
  const auto f = [](double v) { return kv::format_double(v); };
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, IidParams>) {
          out.push_back({"c", f(p.c)});
          out.push_back({"eta", f(p.eta)});
        } else if constexpr (std::is_same_v<P, MovingBoundaryParams>) {
          out.push_back({"c0", f(p.c0)});
          out.push_back({"step", f(p.step)});
          out.push_back({"eta", f(p.eta)});
        } else if constexpr (std::is_same_v<P, AlternatingParams>) {
          out.push_back({"Delta", f(p.Delta)});
          out.push_back({"p0", f(p.p0)});
          out.push_back({"p1", f(p.p1)});
        } else if constexpr (std::is_same_v<P, AssouadParams>) {
          out.push_back({"nu", std::to_string(p.nu)});
          out.push_back({"delta_seq", kv::join(p.delta_seq, f)});
          out.push_back({"tau", kv::join(p.tau, [](int v) { return std::to_string(v); })});
        } else {
          out.push_back({"w0", f(p.w0[0]) + "," + f(p.w0[1])});
          out.push_back({"theta", f(p.theta)});
          out.push_back({"sigma", f(p.sigma)});
        }
      },
      spec.params);
  return out;
}

/// Parses the flat key-value form. `kind` and `T` are required, every other
/// field falls back to its default; keys that do not belong to the kind are
/// rejected.
inline ScenarioSpec scenario_from_key_values(const std::map<std::string, std::string>& fields) {
  auto it = fields.find("kind");
  if (it == fields.end()) throw std::invalid_argument("scenario: missing 'kind'");
  const ScenarioKind kind = parse_scenario_kind(it->second);
  it = fields.find("T");
  if (it == fields.end()) throw std::invalid_argument("scenario: missing 'T'");

  ScenarioSpec spec;
  spec.T = static_cast<std::size_t>(kv::to_u64("T", it->second));
  if (spec.T == 0) throw std::invalid_argument("scenario: T must be >= 1");
  if (auto s = fields.find("seed"); s != fields.end()) spec.seed = kv::to_u64("seed", s->second);

  std::vector<std::string> allowed;
  auto get = [&](const std::string& key) -> const std::string* {
    allowed.push_back(key);
    auto f = fields.find(key);
    return f == fields.end() ? nullptr : &f->second;
  };
  auto num = [&](const std::string& key, double& dst) {
    if (const auto* v = get(key)) dst = kv::to_double(key, *v);
  };

  switch (kind) {
    case ScenarioKind::IID: {
      IidParams p;
      num("c", p.c);
      num("eta", p.eta);
      spec.params = p;
      break;
    }
    case ScenarioKind::MovingBoundary: {
      MovingBoundaryParams p;
      num("c0", p.c0);
      num("step", p.step);
      num("eta", p.eta);
      spec.params = p;
      break;
    }
    case ScenarioKind::AlternatingIntervals: {
      AlternatingParams p;
      num("Delta", p.Delta);
      num("p0", p.p0);
      num("p1", p.p1);
      spec.params = p;
      break;
    }
    case ScenarioKind::AssouadFamily: {
      AssouadParams p;
      if (const auto* v = get("nu")) p.nu = static_cast<std::size_t>(kv::to_u64("nu", *v));
      if (const auto* v = get("delta_seq")) {
        p.delta_seq = parse_delta_seq(*v, spec.T);
      } else {
        p.delta_seq.assign(spec.T, 0.0);
      }
      if (const auto* v = get("tau")) {
        for (auto piece : kv::split(*v, ',')) {
          if (piece == "1" || piece == "+1") {
            p.tau.push_back(1);
          } else if (piece == "-1") {
            p.tau.push_back(-1);
          } else {
            throw std::invalid_argument("tau: entries must be +1 or -1");
          }
        }
      } else {
        p.tau.assign(p.nu, 1);
      }
      spec.params = p;
      break;
    }
    case ScenarioKind::RegressionRotation: {
      RotationParams p;
      if (const auto* v = get("w0")) {
        const auto parts = kv::split(*v, ',');
        if (parts.size() != 2) throw std::invalid_argument("w0: expected two comma-separated numbers");
        p.w0 = {kv::to_double("w0", parts[0]), kv::to_double("w0", parts[1])};
      }
      num("theta", p.theta);
      num("sigma", p.sigma);
      spec.params = p;
      break;
    }
  }

  for (const auto& [key, value] : fields) {
    if (key == "kind" || key == "T" || key == "seed") continue;
    bool known = false;
    for (const auto& a : allowed) known = known || a == key;
    if (!known)
      throw std::invalid_argument("scenario: key '" + key + "' is not a parameter of " + std::string(to_string(kind)));
  }
  return spec;
}

}  // namespace adaptwin
