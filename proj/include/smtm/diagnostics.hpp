#pragma once

// Streaming chain diagnostics. A ChainTrace sees every transition; running
// statistics (acceptance, ESJD, recorded alphas) cover all steps after
// burn-in, while states are retained every `thinning` iterations (including
// the starting state at iteration 0).

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "smtm/kernels.hpp"

namespace smtm {

enum class Retention {
  Full,     ///< every coordinate of retained states
  Summary,  ///< first coordinate and norm only
};

/// Mean squared jump, rejections included as zeros. Merging is associative.
class EsjdAccumulator {
 public:
  void add(double sq_jump) noexcept {
    ++count_;
    sum_ += sq_jump;
  }
  void merge(const EsjdAccumulator& other) noexcept {
    count_ += other.count_;
    sum_ += other.sum_;
  }
  std::uint64_t count() const noexcept { return count_; }
  double sum() const noexcept { return sum_; }
  /// Throws EmptyTrace when nothing was added.
  double mean() const;

 private:
  std::uint64_t count_ = 0;
  double sum_ = 0.0;
};

struct TraceRecord {
  std::uint64_t iter = 0;
  bool accepted = false;
  double alpha = 0.0;
  /// One-based chosen candidate, 0 when none was selectable or at iteration 0.
  int chosen = 0;
  double x1 = 0.0;
  double norm = 0.0;
  /// Full retention only.
  Vector x;
};

class ChainTrace {
 public:
  ChainTrace(int d, Retention retention, std::uint64_t burn_in = 0, std::uint64_t thinning = 1);

  /// Starting state (iteration 0). Must precede the first record().
  void start(std::span<const double> x0);
  /// Transition number `iter` (1, 2, ...) from `prev` to step.next.
  void record(std::uint64_t iter, std::span<const double> prev, const StepResult& step);

  int dim() const noexcept { return d_; }
  Retention retention() const noexcept { return retention_; }
  std::uint64_t burn_in() const noexcept { return burn_in_; }
  std::uint64_t thinning() const noexcept { return thinning_; }

  const std::vector<TraceRecord>& records() const noexcept { return records_; }
  /// Retained records with iter > burn_in.
  std::span<const TraceRecord> stationary_records() const noexcept;

  /// Post-burn-in counters.
  std::uint64_t steps() const noexcept { return steps_; }
  std::uint64_t accepted() const noexcept { return accepted_; }
  const EsjdAccumulator& jumps() const noexcept { return jumps_; }
  double alpha_sum() const noexcept { return alpha_sum_; }
  /// Sum and sum of squares of (accepted - alpha), a martingale difference.
  double alpha_gap_sum() const noexcept { return gap_sum_; }
  double alpha_gap_sum_sq() const noexcept { return gap_sum_sq_; }
  /// Mean of StepResult::first_candidate_alpha over steps where it was recorded.
  std::optional<double> mean_first_candidate_alpha() const noexcept;
  /// Mean of StepResult::first_candidate_weighted_jump over the same steps.
  std::optional<double> mean_first_candidate_weighted_jump() const noexcept;

 private:
  int d_;
  Retention retention_;
  std::uint64_t burn_in_;
  std::uint64_t thinning_;
  std::uint64_t last_iter_ = 0;
  bool started_ = false;
  std::vector<TraceRecord> records_;
  std::uint64_t steps_ = 0;
  std::uint64_t accepted_ = 0;
  EsjdAccumulator jumps_;
  double alpha_sum_ = 0.0;
  double gap_sum_ = 0.0;
  double gap_sum_sq_ = 0.0;
  double first_alpha_sum_ = 0.0;
  double first_jump_sum_ = 0.0;
  std::uint64_t first_alpha_count_ = 0;
};

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;

/// Post-burn-in ESJD. Throws EmptyTrace.
double esjd(const ChainTrace& trace);
/// ESJD recomputed from retained states (needs full retention, thinning 1).
double esjd_from_states(const ChainTrace& trace);
/// Post-burn-in fraction of accepted steps. Throws EmptyTrace.
double acceptance_rate(const ChainTrace& trace);

inline constexpr double kLogDistanceFloor = -12.0;

struct CurvePoint {
  std::uint64_t iter;
  double value;
};

/// log10 |X(t) - reference| for every retained state, floored at -12.
/// Throws RetentionTooCoarse unless states are fully retained.
std::vector<CurvePoint> burnin_curve(const ChainTrace& trace, std::span<const double> reference);

/// First iteration whose value is <= threshold, if any.
std::optional<std::uint64_t> first_crossing(std::span<const CurvePoint> curve, double threshold);

/// sup_t |F_n(t) - cdf(t)|. Throws TooFewSamples below 100 samples.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Standard error of the mean from non-overlapping batch means.
double batch_means_stderr(std::span<const double> values, int batches = 100);

using PairFunction = std::function<double(std::span<const double>, std::span<const double>)>;

struct ReversibilityStat {
  double statistic = 0.0;
  double std_error = 0.0;
  std::size_t pairs = 0;
};

/// Mean of g(X_t, X_s) - g(X_s, X_t) over consecutive retained post-burn-in
/// states (s = t + thinning; a thinned reversible chain is still reversible),
/// with a 100-batch-means standard error. Throws TooFewSamples below 1e4 pairs.
ReversibilityStat reversibility_stat(const ChainTrace& trace, const PairFunction& g);

/// Writes `iter,accepted,alpha,chosen,x1,norm[,x2..]` rows for retained states.
void write_trace_csv(std::ostream& out, const ChainTrace& trace);

/// Shortest round-trip decimal rendering used by every CSV writer.
std::string format_double(double v);

}  // namespace smtm
