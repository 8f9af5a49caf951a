#pragma once

// Config-driven experiments. Two experiment types:
//   chains — independent chains per (kernel, seed): per-chain trace CSVs, a
//            per-chain summary, a per-kernel summary, and a burn-in figure
//            (median over seeds of log10 distance to the target mean);
//   curves — limit-functional ESJD vs acceptance curves over an ell grid,
//            optionally varied over m, lambda or N, with per-series optima
//            and a pairwise curve-dominance report.
// Every run writes manifest.json with the resolved config, seeds, code
// version and an FNV-1a hash of every other file it wrote. Outputs are a pure
// function of the config.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "smtm/config.hpp"
#include "smtm/kernels.hpp"

namespace smtm {

/// `[GB-|LB-]KIND[:N][@STEP]` with KIND one of RWM, MTM, SRWM, SMTM, IDEAL.
/// The weight prefix defaults to GB and is rejected for RWM/SRWM; for IDEAL
/// the count is the inner Monte Carlo size M.
struct KernelSpec {
  KernelKind kind = KernelKind::RWM;
  WeightKind weight = WeightKind::GloballyBalanced;
  std::optional<int> n;
  std::optional<double> step;

  /// Display name with `n_value` candidates, e.g. "GB-SMTM N=5", "SRWM".
  std::string label(int n_value) const;
  /// Lower-case file-name form, e.g. "gb-smtm-n5".
  std::string slug(int n_value) const;
};

/// Throws ConfigError.
KernelSpec parse_kernel_spec(std::string_view text);

inline constexpr std::string_view kBurninMetric = "log10 Euclidean distance to the target mean";

struct ArtifactFile {
  std::string path;  ///< relative to the output directory, '/'-separated
  std::uint64_t fnv1a = 0;
  std::size_t bytes = 0;
};

struct RunResult {
  Json manifest;
  std::vector<ArtifactFile> files;  ///< sorted by path; excludes manifest.json
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// Runs a resolved config (no `extends`). `source` is recorded in the manifest.
/// Throws ConfigError for invalid configs and IOFailure for unwritable output.
RunResult run_experiment(const Json& config, const std::filesystem::path& out_dir, std::string_view source);

/// Loads a preset or config path, applies `key=value` overrides, then runs it.
RunResult run_preset(std::string_view name, const std::vector<std::string>& overrides,
                     const std::filesystem::path& out_dir);

/// Curve-dominance verdict for two ESJD vs acceptance curves.
struct Dominance {
  double overlap_lo = 0.0;
  double overlap_hi = 0.0;
  /// min over the common acceptance range of (esjd_a - esjd_b) / max peak.
  double min_relative_gap = 0.0;
  double peak_a = 0.0;
  double peak_b = 0.0;
  /// a is never more than 1% of the larger peak below b on the common range
  /// and a's peak is higher.
  bool dominates = false;
};

struct CurveSample {
  double acceptance;
  double esjd;
};

Dominance curve_dominance(std::vector<CurveSample> a, std::vector<CurveSample> b);

}  // namespace smtm
