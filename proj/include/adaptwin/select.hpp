#pragma once

#include <concepts>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "adaptwin/config.hpp"

namespace adaptwin {

/// Iteration i of the doubling schedule and its window size r = 2^i.
struct WindowIndex {
  std::size_t i = 0;

  [[nodiscard]] std::size_t r() const { return std::size_t{1} << i; }
  [[nodiscard]] WindowIndex next() const { return WindowIndex{i + 1}; }
};

enum class StopReason { DriftDetected, StreamExhausted };

inline std::string_view to_string(StopReason s) {
  return s == StopReason::DriftDetected ? "DriftDetected" : "StreamExhausted";
}

/// One adjacent-window check: compares windows of size r and 2r.
struct TraceStep {
  std::size_t i = 0;
  std::size_t r = 1;
  double empirical_discrepancy = 0.0;
  double threshold = 0.0;
  bool passed = true;

  friend bool operator==(const TraceStep&, const TraceStep&) = default;
};

/// Full audit record of a selection run.
struct SelectionTrace {
  std::vector<TraceStep> steps;
  StopReason stop_reason = StopReason::StreamExhausted;
  std::size_t selected_r = 1;

  friend bool operator==(const SelectionTrace&, const SelectionTrace&) = default;
};

/// A discrepancy oracle maps a window size r (with 2r <= T) to the empirical
/// discrepancy between the newest r samples and the newest 2r samples.
template <typename F>
concept DiscrepancyOracle = std::invocable<F&, std::size_t> &&
                            std::convertible_to<std::invoke_result_t<F&, std::size_t>, double>;

/// Type-erased oracle for callers that pick the instantiation at runtime.
using AnyDiscrepancyOracle = std::function<double(std::size_t)>;

namespace detail {

template <DiscrepancyOracle Oracle>
SelectionTrace run_doubling(std::size_t stream_length, Oracle& oracle, const AlgoConfig& cfg) {
  if (stream_length == 0) throw std::domain_error("select_window: stream length must be >= 1");
  cfg.validate();

  SelectionTrace trace;
  WindowIndex idx{};
  // 2r <= T in exact integer arithmetic: the older half of the 2r window must exist.
  while (2 * idx.r() <= stream_length) {
    const std::size_t r = idx.r();
    const double value = static_cast<double>(oracle(r));
    if (!(value >= 0.0)) throw std::domain_error("select_window: oracle returned a negative or NaN value");
    const double threshold = stopping_threshold(r, cfg);
    const bool passed = value <= threshold;
    trace.steps.push_back(TraceStep{idx.i, r, value, threshold, passed});
    if (!passed) {
      trace.stop_reason = StopReason::DriftDetected;
      trace.selected_r = r;
      return trace;
    }
    idx = idx.next();
  }
  trace.stop_reason = StopReason::StreamExhausted;
  trace.selected_r = idx.r();
  return trace;
}

}  // namespace detail

/// Adaptive window selection with an exact discrepancy oracle.
///
/// Starting from r = 1 the window doubles while the discrepancy between the
/// newest r and newest 2r samples stays within 4 S(r, delta). Returns the
/// window in force when a check fails, or the largest window considered when
/// the stream runs out.
template <DiscrepancyOracle Oracle>
SelectionTrace select_window(std::size_t stream_length, Oracle&& oracle, const AlgoConfig& cfg) {
  return detail::run_doubling(stream_length, oracle, cfg);
}

/// Same control flow as select_window, fed by an approximate oracle A with
/// 1 <= exact / A <= cfg.alpha. The guard is unchanged (4 S(r, delta)); alpha
/// only enters the guarantee, so with alpha = 1 this is select_window.
template <DiscrepancyOracle Oracle>
SelectionTrace select_window_approx(std::size_t stream_length, Oracle&& approx_oracle, const AlgoConfig& cfg) {
  return detail::run_doubling(stream_length, approx_oracle, cfg);
}

}  // namespace adaptwin
