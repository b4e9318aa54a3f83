// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "adaptwin/adaptwin.hpp"
#include "support/ball_grid.hpp"
#include "support/tr_instances.hpp"

using namespace adaptwin;

namespace {

// Tolerances and limits.
constexpr double kTrSlack = 2e-3;
constexpr double kKktScale = 1e-8;
constexpr double kLinearGridTol = 2e-3;
constexpr double kEigTol = 1e-10;
constexpr double kRatioBound = 22.0;
constexpr std::size_t kMinHardCases = 20;

const AlgoConfig kDefaults{std::numbers::sqrt2, 1.0, 0.1, 1.0};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// 1
Outcome binary_exactness() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t mismatches = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t r = 1 + rng() % 64;
    // a third of the instances draw x from a coarse grid so ties are common
    const bool coarse = rep % 3 == 0;
    auto draw = [&] {
      std::vector<LabeledPoint> w(r);
      for (auto& p : w) p = {coarse ? std::floor(u(rng) * 8.0) / 8.0 : u(rng), static_cast<int>(rng() % 2)};
      return w;
    };
    const auto recent = draw();
    const auto older = draw();
    const Rational fast = discrepancy_binary(recent, older);
    const Rational general = discrepancy_binary_general(recent, older);
    const Rational brute = brute_force_discrepancy(recent, older);
    if (!(fast == general && general == brute)) ++mismatches;
  }
  return {mismatches == 0, fmt("%zu/1000 mismatches", mismatches)};
}

// 2
Outcome trust_region() {
  std::mt19937_64 rng(202);
  std::size_t hard = 0;
  std::size_t bad_value = 0;
  std::size_t bad_kkt = 0;
  double worst_gap = -1e300;
  for (int rep = 0; rep < 200; ++rep) {
    const Eigen::Index d = 1 + rep % 3;
    const bool is_hard = rep % 8 == 0;
    const auto inst = is_hard ? testing::hard_case_instance(rng, d) : testing::random_instance(rng, d);
    hard += is_hard;
    const auto s = trust_region_min(inst.a, inst.b);
    const double grid = testing::grid_trust_region_min(inst.a, inst.b);
    worst_gap = std::max(worst_gap, s.value - grid);
    if (s.value > grid + kTrSlack) ++bad_value;

    const Eigen::MatrixXd shifted = inst.a + s.multiplier * Eigen::MatrixXd::Identity(d, d);
    const double stationarity = (shifted * s.w - inst.b).norm();
    const double complementarity = s.multiplier * std::abs(1.0 - s.w.norm());
    const double feasibility = std::max(0.0, s.w.norm() - 1.0);
    const double dual = std::max(0.0, -s.multiplier);
    const double curvature = std::max(0.0, -Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(shifted).eigenvalues()(0));
    const double residual = std::max({stationarity, complementarity, feasibility, dual, curvature});
    if (residual > kKktScale * (1.0 + inst.b.norm())) ++bad_kkt;
  }
  return {bad_value == 0 && bad_kkt == 0 && hard >= kMinHardCases,
          fmt("value violations %zu, KKT violations %zu, hard cases %zu, worst value - grid %.2e", bad_value, bad_kkt,
              hard, worst_gap)};
}

// 3
Outcome linear_oracle() {
  std::mt19937_64 rng(303);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto window = [&](std::size_t r, Eigen::Index d) {
    std::vector<RegressionPoint> out;
    for (std::size_t k = 0; k < r; ++k) {
      Eigen::VectorXd x(d);
      for (Eigen::Index i = 0; i < d; ++i) x(i) = g(rng);
      x *= std::pow(u(rng), 1.0 / static_cast<double>(d)) / x.norm();
      out.push_back({x, 2.0 * u(rng) - 1.0});
    }
    return out;
  };
  double worst = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const Eigen::Index d = 1 + rep % 3;
    const std::size_t r = 1 + rng() % 12;
    const auto recent = window(r, d);
    const auto older = window(r, d);
    const double grid = testing::grid_sup_abs(
                            [&](const testing::Point3& w) {
                              double s = 0.0;
                              auto loss = [&](const RegressionPoint& q) {
                                double pred = 0.0;
                                for (Eigen::Index i = 0; i < d; ++i) pred += q.x(i) * w[static_cast<std::size_t>(i)];
                                return (q.y - pred) * (q.y - pred);
                              };
                              for (const auto& q : recent) s += loss(q);
                              for (const auto& q : older) s -= loss(q);
                              return s;
                            },
                            static_cast<int>(d)) /
                        (2.0 * static_cast<double>(r));
    worst = std::max(worst, std::abs(discrepancy_linear(recent, older) - grid));
  }
  return {worst <= kLinearGridTol, fmt("max |oracle - grid| = %.2e", worst)};
}

ExperimentConfig binary_config(ScenarioParams params, std::size_t horizon, std::uint64_t seed, AlgoConfig algo) {
  ExperimentConfig cfg;
  cfg.scenario = ScenarioSpec{horizon, seed, params};
  cfg.algo = algo;
  cfg.trials = 100;
  return cfg;
}

// 4
Outcome iid_adaptivity() {
  const Experiment exp(binary_config(IidParams{0.5, 0.1}, 1024, 4, kDefaults));
  std::size_t full = 0;
  for (const auto& row : exp.run_all()) full += !row.failed && row.selected_r == 1024;
  return {full >= 90, fmt("%zu/100 trials selected r=1024", full)};
}

// 5
Outcome drift_detection() {
  const Experiment exp(binary_config(AlternatingParams{0.4, 0.1, 0.6}, 4096, 5, AlgoConfig{0.05, 0.05, 0.1, 1.0}));
  std::size_t hits = 0;
  std::size_t detected = 0;
  std::map<std::size_t, std::size_t> hist;
  for (const auto& row : exp.run_all()) {
    if (row.failed) continue;
    ++hist[row.selected_r];
    if (row.stop_reason == StopReason::DriftDetected) {
      ++detected;
      hits += row.selected_r <= 256;
    }
  }
  std::string h;
  for (const auto& [r, c] : hist) h += fmt(" %zu:%zu", r, c);
  return {hits >= 90, fmt("%zu/100 detected with r<=256 (%zu detected overall; selected_r histogram", hits, detected) + h + ")"};
}

// 6
Outcome ratio_bound() {
  struct Case {
    const char* name;
    ScenarioParams params;
    std::size_t horizon;
  };
  const std::vector<Case> cases{{"MovingBoundary", MovingBoundaryParams{0.5, 0.01, 0.0}, 1024},
                                {"IID", IidParams{0.5, 0.1}, 1024},
                                {"AlternatingIntervals", AlternatingParams{0.4, 0.1, 0.6}, 1024}};
  bool pass = true;
  std::string detail;
  std::uint64_t seed = 60;
  for (const auto& c : cases) {
    const Experiment exp(binary_config(c.params, c.horizon, seed++, kDefaults));
    std::size_t within = 0;
    double worst = 0.0;
    for (const auto& row : exp.run_all()) {
      if (row.failed) continue;
      within += row.ratio <= kRatioBound;
      worst = std::max(worst, row.ratio);
    }
    pass = pass && within >= 90;
    detail += fmt("%s %zu/100 (max ratio %.3g); ", c.name, within, worst);
  }
  return {pass, detail};
}

// 7
Outcome proof_inequality() {
  std::size_t failures = 0;
  for (double c1 : {0.05, 1.0, 10.0})
    for (double c2 : {0.05, 1.0, 10.0})
      for (double delta : {0.01, 0.1, 0.5}) failures += !proof_inequality_check(60, AlgoConfig{c1, c2, delta, 1.0});
  return {failures == 0, fmt("%zu/27 grid points violate the inequality", failures)};
}

// 8
Outcome delta_budget() {
  bool pass = true;
  std::string detail;
  for (double delta : {0.01, 0.1, 0.5}) {
    double sum = 0.0;
    for (std::size_t i = 0; i <= 1'000'000; ++i) sum += delta_schedule(i, delta);
    pass = pass && sum <= delta;
    detail += fmt("delta=%g sum=%.9g; ", delta, sum);
  }
  return {pass, detail};
}

// 9
Outcome assouad_family() {
  std::mt19937_64 rng(909);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t built = 0;
  std::size_t bad_prob = 0;
  std::size_t bad_drift = 0;
  std::size_t bad_phi = 0;
  while (built < 50) {
    const std::size_t nu = 1 + rng() % 8;
    const std::size_t horizon = 64 + rng() % 1000;
    std::vector<double> seq(horizon, 0.0);
    const double rate = std::pow(10.0, -5.0 + 3.0 * u(rng));
    for (std::size_t r = 2; r <= horizon; ++r) seq[r - 1] = seq[r - 2] + rate * u(rng) * (u(rng) < 0.05 ? 30.0 : 1.0);
    if (!(assouad_phi_star(seq, nu) < 1.0 / 3.0)) continue;
    std::vector<int> tau(nu);
    for (auto& t : tau) t = rng() % 2 ? 1 : -1;
    const AssouadScenario s = gen_assouad({nu, seq, tau}, horizon);
    ++built;
    double running = 0.0;
    for (std::size_t r = 1; r <= horizon; ++r) {
      for (std::size_t i = 0; i < nu; ++i) {
        const double p = s.label_prob(r, i);
        bad_prob += p < 0.25 || p > 0.75;
      }
      if (r > 1) running = std::max(running, s.drift(r - 1));
      bad_drift += running > seq[r - 1] + 1e-15;
    }
    bad_phi += !(assouad_phi(seq, nu, s.r_tilde()) <= 3.0 * s.phi_star());
  }
  return {bad_prob == 0 && bad_drift == 0 && bad_phi == 0,
          fmt("%zu instances; probability violations %zu, drift violations %zu, Phi violations %zu", built, bad_prob,
              bad_drift, bad_phi)};
}

// 10
Outcome approx_selection() {
  std::mt19937_64 rng(1010);
  std::uniform_real_distribution<double> scale(0.0, 5.0);
  std::size_t mismatches = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t horizon = 1 + rng() % 5000;
    std::vector<double> tape(16);
    for (auto& v : tape) v = scale(rng);
    auto oracle = [&](std::size_t r) { return tape[static_cast<std::size_t>(std::countr_zero(r))] * stat_bound(r, kDefaults); };
    mismatches += !(select_window(horizon, oracle, kDefaults) == select_window_approx(horizon, oracle, kDefaults));
  }
  // alpha = 2: the exact discrepancy is 6 S(r), so admissible answers lie in [3S, 6S]
  const AlgoConfig alpha2{1.0, 1.0, 0.1, 2.0};
  const auto low = select_window_approx(16, [&](std::size_t r) { return 3.0 * stat_bound(r, alpha2); }, alpha2);
  const auto high = select_window_approx(16, [&](std::size_t r) { return 5.0 * stat_bound(r, alpha2); }, alpha2);
  const bool hand = low.selected_r == 16 && low.stop_reason == StopReason::StreamExhausted && low.steps.size() == 4 &&
                    high.selected_r == 1 && high.stop_reason == StopReason::DriftDetected && high.steps.size() == 1;
  return {mismatches == 0 && hand, fmt("%zu/100 tape mismatches, hand traces %s", mismatches, hand ? "ok" : "wrong")};
}

// 11
Outcome eigendecomposition() {
  std::mt19937_64 rng(1111);
  std::normal_distribution<double> g;
  double worst_rec = 0.0;
  double worst_orth = 0.0;
  for (int rep = 0; rep < 500; ++rep) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 8);
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i; j < n; ++j) a(i, j) = a(j, i) = g(rng);
    const auto e = symmetric_eig(a);
    const double scale = 1.0 + a.norm();
    worst_rec = std::max(worst_rec, (e.q * e.lambdas.asDiagonal() * e.q.transpose() - a).norm() / scale);
    worst_orth = std::max(worst_orth, (e.q.transpose() * e.q - Eigen::MatrixXd::Identity(n, n)).norm());
  }
  return {worst_rec <= kEigTol && worst_orth <= kEigTol,
          fmt("max relative reconstruction error %.2e, max orthogonality error %.2e", worst_rec, worst_orth)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "binary discrepancy exactness", 10, binary_exactness},
      {2, "trust-region correctness", 30, trust_region},
      {3, "linear discrepancy oracle", 60, linear_oracle},
      {4, "iid adaptivity", 60, iid_adaptivity},
      {5, "drift detection", 120, drift_detection},
      {6, "ratio bound", 180, ratio_bound},
      {7, "proof-constant inequality", 1, proof_inequality},
      {8, "delta-schedule budget", 1, delta_budget},
      {9, "assouad family well-formedness", 10, assouad_family},
      {10, "approximate selection", 5, approx_selection},
      {11, "eigendecomposition", 10, eigendecomposition},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.limit_s;
    const bool pass = out.pass && in_time;
    failed += !pass;
    std::printf("%s criterion %d (%s): %s [%.2fs / %.0fs%s]\n", pass ? "PASS" : "FAIL", c.id, c.name, out.detail.c_str(),
                secs, c.limit_s, in_time ? "" : " too slow");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
