#include "smtm/diagnostics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

#include "smtm/error.hpp"

namespace smtm {

double EsjdAccumulator::mean() const {
  if (count_ == 0) throw Error(ErrorCode::EmptyTrace, "no post-burn-in steps recorded");
  return sum_ / static_cast<double>(count_);
}

ChainTrace::ChainTrace(int d, Retention retention, std::uint64_t burn_in, std::uint64_t thinning)
    : d_(d), retention_(retention), burn_in_(burn_in), thinning_(thinning) {
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "trace dimension must be positive");
  if (thinning < 1) throw Error(ErrorCode::InvalidArgument, "thinning must be >= 1");
}

namespace {

TraceRecord make_record(std::uint64_t iter, std::span<const double> x, Retention retention) {
  TraceRecord r;
  r.iter = iter;
  r.x1 = x[0];
  double n2 = 0.0;
  for (double v : x) n2 += v * v;
  r.norm = std::sqrt(n2);
  if (retention == Retention::Full) r.x.assign(x.begin(), x.end());
  return r;
}

}  // namespace

void ChainTrace::start(std::span<const double> x0) {
  if (started_) throw Error(ErrorCode::InvalidArgument, "trace already started");
  if (x0.size() != static_cast<std::size_t>(d_)) throw Error(ErrorCode::DimensionMismatch, "start state length");
  records_.push_back(make_record(0, x0, retention_));
  started_ = true;
}

void ChainTrace::record(std::uint64_t iter, std::span<const double> prev, const StepResult& step) {
  if (!started_) throw Error(ErrorCode::InvalidArgument, "trace not started");
  if (iter <= last_iter_) throw Error(ErrorCode::InvalidArgument, "trace iterations must increase");
  if (step.next.x.size() != static_cast<std::size_t>(d_))
    throw Error(ErrorCode::DimensionMismatch, "state length");
  last_iter_ = iter;

  if (iter > burn_in_) {
    ++steps_;
    if (step.accepted) ++accepted_;
    jumps_.add(step.accepted ? squared_distance(step.next.x, prev) : 0.0);
    alpha_sum_ += step.alpha;
    const double gap = (step.accepted ? 1.0 : 0.0) - step.alpha;
    gap_sum_ += gap;
    gap_sum_sq_ += gap * gap;
    if (!std::isnan(step.first_candidate_alpha)) {
      first_alpha_sum_ += step.first_candidate_alpha;
      first_jump_sum_ += step.first_candidate_weighted_jump;
      ++first_alpha_count_;
    }
  }
  if (iter % thinning_ == 0) {
    TraceRecord r = make_record(iter, step.next.x, retention_);
    r.accepted = step.accepted;
    r.alpha = step.alpha;
    r.chosen = step.chosen_index.value_or(0);
    records_.push_back(std::move(r));
  }
}

std::span<const TraceRecord> ChainTrace::stationary_records() const noexcept {
  const auto it = std::find_if(records_.begin(), records_.end(),
                               [&](const TraceRecord& r) { return r.iter > burn_in_; });
  return {it, records_.end()};
}

std::optional<double> ChainTrace::mean_first_candidate_alpha() const noexcept {
  if (first_alpha_count_ == 0) return std::nullopt;
  return first_alpha_sum_ / static_cast<double>(first_alpha_count_);
}

std::optional<double> ChainTrace::mean_first_candidate_weighted_jump() const noexcept {
  if (first_alpha_count_ == 0) return std::nullopt;
  return first_jump_sum_ / static_cast<double>(first_alpha_count_);
}

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double u = a[i] - b[i];
    s += u * u;
  }
  return s;
}

double esjd(const ChainTrace& trace) { return trace.jumps().mean(); }

double esjd_from_states(const ChainTrace& trace) {
  if (trace.retention() != Retention::Full || trace.thinning() != 1)
    throw Error(ErrorCode::RetentionTooCoarse, "recomputing ESJD needs every state");
  const auto& recs = trace.records();
  EsjdAccumulator acc;
  for (std::size_t k = 1; k < recs.size(); ++k)
    if (recs[k].iter > trace.burn_in())
      acc.add(recs[k].accepted ? squared_distance(recs[k].x, recs[k - 1].x) : 0.0);
  return acc.mean();
}

double acceptance_rate(const ChainTrace& trace) {
  if (trace.steps() == 0) throw Error(ErrorCode::EmptyTrace, "no post-burn-in steps recorded");
  return static_cast<double>(trace.accepted()) / static_cast<double>(trace.steps());
}

std::vector<CurvePoint> burnin_curve(const ChainTrace& trace, std::span<const double> reference) {
  if (trace.retention() != Retention::Full)
    throw Error(ErrorCode::RetentionTooCoarse, "burn-in curves need fully retained states");
  if (reference.size() != static_cast<std::size_t>(trace.dim()))
    throw Error(ErrorCode::DimensionMismatch, "reference length");
  std::vector<CurvePoint> out;
  out.reserve(trace.records().size());
  for (const auto& r : trace.records()) {
    const double dist = std::sqrt(squared_distance(r.x, reference));
    out.push_back({r.iter, dist > 0.0 ? std::max(kLogDistanceFloor, std::log10(dist)) : kLogDistanceFloor});
  }
  return out;
}

std::optional<std::uint64_t> first_crossing(std::span<const CurvePoint> curve, double threshold) {
  for (const auto& p : curve)
    if (p.value <= threshold) return p.iter;
  return std::nullopt;
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.size() < 100) throw Error(ErrorCode::TooFewSamples, "KS distance needs at least 100 samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < samples.size()) {
    // Ties form a single jump of the empirical CDF.
    std::size_t k = i;
    while (k < samples.size() && samples[k] == samples[i]) ++k;
    const double f = cdf(samples[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(k) / n - f});
    i = k;
  }
  return d;
}

double batch_means_stderr(std::span<const double> values, int batches) {
  if (batches < 2) throw Error(ErrorCode::InvalidArgument, "batch means need at least two batches");
  const auto b = static_cast<std::size_t>(batches);
  const std::size_t size = values.size() / b;
  if (size == 0) throw Error(ErrorCode::TooFewSamples, "fewer values than batches");
  std::vector<double> means(b);
  for (std::size_t k = 0; k < b; ++k) {
    double s = 0.0;
    for (std::size_t i = k * size; i < (k + 1) * size; ++i) s += values[i];
    means[k] = s / static_cast<double>(size);
  }
  double grand = 0.0;
  for (double m : means) grand += m;
  grand /= static_cast<double>(b);
  double ss = 0.0;
  for (double m : means) ss += (m - grand) * (m - grand);
  return std::sqrt(ss / (static_cast<double>(b) - 1.0) / static_cast<double>(b));
}

ReversibilityStat reversibility_stat(const ChainTrace& trace, const PairFunction& g) {
  if (trace.retention() != Retention::Full)
    throw Error(ErrorCode::RetentionTooCoarse, "reversibility needs fully retained states");
  const auto recs = trace.stationary_records();
  if (recs.size() < 10001) throw Error(ErrorCode::TooFewSamples, "reversibility needs at least 1e4 pairs");
  std::vector<double> diffs(recs.size() - 1);
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < recs.size(); ++k) {
    diffs[k] = g(recs[k].x, recs[k + 1].x) - g(recs[k + 1].x, recs[k].x);
    sum += diffs[k];
  }
  return {sum / static_cast<double>(diffs.size()), batch_means_stderr(diffs, 100), diffs.size()};
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream& out, const ChainTrace& trace) {
  const bool full = trace.retention() == Retention::Full;
  out << "iter,accepted,alpha,chosen,x1,norm";
  if (full)
    for (int i = 2; i <= trace.dim(); ++i) out << ",x" << i;
  out << '\n';
  for (const auto& r : trace.records()) {
    out << r.iter << ',' << (r.accepted ? 1 : 0) << ',' << format_double(r.alpha) << ',' << r.chosen << ','
        << format_double(r.x1) << ',' << format_double(r.norm);
    if (full)
      for (std::size_t i = 1; i < r.x.size(); ++i) out << ',' << format_double(r.x[i]);
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::IOFailure, "failed writing trace CSV");
}

}  // namespace smtm
