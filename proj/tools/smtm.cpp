// smtm: experiment runner, limit-functional calculator and acceptance suite.
//
//   smtm run <preset|config> [--seed S] [--out DIR] [--set key=value ...]
//   smtm scaling [--weight gb|lb] [--n N] [--lambda L] [--samples M] ...
//   smtm selftest [--criterion K]
//
// Exit codes: 0 ok, 1 a selftest criterion failed, 2 config error,
// 3 runtime failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "smtm/config.hpp"
#include "smtm/diagnostics.hpp"
#include "smtm/error.hpp"
#include "smtm/experiments.hpp"
#include "smtm/kernels.hpp"
#include "smtm/parallel.hpp"
#include "smtm/scaling.hpp"
#include "smtm/selftest.hpp"

namespace {

constexpr int kExitFailedCheck = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

// Lines of dominance.csv where the first configured series is compared with the others.
void print_dominance(const std::filesystem::path& out) {
  std::istringstream in(read_file(out / "dominance.csv"));
  std::string line;
  std::getline(in, line);
  std::string first;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
    if (f.size() < 9) continue;
    if (first.empty()) first = f[1];
    if (f[1] != first) continue;
    std::cout << "  [" << f[0] << "] " << f[1] << (f[8] == "1" ? " dominates " : " does not dominate ") << f[2]
              << " (peak " << f[6] << " vs " << f[7] << ", worst relative gap " << f[5] << ")\n";
  }
}

int cmd_run(const std::string& what, const std::optional<std::uint64_t>& seed, std::string out,
            const std::vector<std::string>& sets) {
  std::vector<std::string> overrides;
  if (seed) overrides.push_back("seeds=[" + std::to_string(*seed) + "]");
  overrides.insert(overrides.end(), sets.begin(), sets.end());
  if (out.empty()) out = "runs/" + std::filesystem::path(what).stem().string();
  const auto result = smtm::run_preset(what, overrides, out);
  std::cout << "wrote " << result.files.size() + 1 << " files to " << out << "\n";
  const std::string type = result.manifest.at("type").get<std::string>();
  if (type == "chains") {
    std::cout << read_file(std::filesystem::path(out) / "summary_by_kernel.csv");
  } else {
    std::cout << read_file(std::filesystem::path(out) / "summary.csv");
    const auto& cfg = result.manifest.at("config");
    if (cfg.value("panels", std::string("vary")) == "vary") print_dominance(out);
  }
  return 0;
}

int cmd_scaling(const std::string& weight, int n, double lambda, double m, std::size_t samples,
                std::optional<double> ell, bool euclidean, double ell_min, double ell_max, int points,
                std::uint64_t seed) {
  smtm::ScalingParams p;
  p.n = n;
  p.lambda = lambda;
  p.weight = smtm::parse_weight(weight);
  p.euclidean = euclidean;
  if (!(m >= 0 && m < 1)) throw smtm::Error(smtm::ErrorCode::ConfigError, "--m must lie in [0, 1)");
  p.fisher = 1.0 / (1.0 - m * m);
  p.validate();
  using smtm::format_double;
  if (ell) {
    const std::vector<double> ells{*ell};
    const auto c = smtm::limit_curve(p, ells, samples, seed).front();
    std::cout << "ell,acceptance,acceptance_se,esjd,esjd_se,alpha1\n"
              << format_double(c.ell) << "," << format_double(c.acceptance.mean) << ","
              << format_double(c.acceptance.std_error) << "," << format_double(c.esjd.mean) << ","
              << format_double(c.esjd.std_error) << "," << format_double(c.alpha1.mean) << "\n";
    return 0;
  }
  const auto r = smtm::optimize_ell(p, smtm::EllGrid{ell_min, ell_max, points}, samples, seed);
  std::cout << "ell,acceptance,esjd\n";
  for (const auto& c : r.curve)
    std::cout << format_double(c.ell) << "," << format_double(c.acceptance.mean) << "," << format_double(c.esjd.mean)
              << "\n";
  std::printf("# optimum: ell %.4f, acceptance %.4f +- %.4f, esjd %.4f +- %.4f\n", r.ell, r.acceptance.mean,
              r.acceptance.std_error, r.esjd.mean, r.esjd.std_error);
  return 0;
}

int cmd_selftest(const std::vector<int>& which) {
  std::vector<int> ids = which;
  if (ids.empty())
    for (int k = 1; k <= smtm::kCriterionCount; ++k) ids.push_back(k);
  bool all = true;
  for (int k : ids) {
    const auto r = smtm::run_criterion(k);
    std::cout << smtm::format_result(r) << std::endl;
    all = all && r.pass;
  }
  return all ? 0 : kExitFailedCheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stereographic multiple-try Metropolis: experiments, scaling limits, self-test"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a preset or a JSON config");
  std::string what;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> sets;
  run->add_option("preset", what, "Preset name or path to a config file")->required();
  run->add_option("--seed", seed, "Single seed (replaces the config's seeds)");
  run->add_option("--out", out, "Output directory (default runs/<name>)");
  run->add_option("--set", sets, "Override a config key: key=value (value parsed as JSON)");

  auto* scaling = app.add_subcommand("scaling", "Limit functionals: optimize ell or evaluate one ell");
  std::string weight = "gb";
  int n = 1;
  double lambda = 1.0, m = 0.5, ell_min = 0.1, ell_max = 8.0;
  int points = 50;
  std::size_t samples = 100000;
  std::optional<double> ell;
  bool euclidean = false;
  std::uint64_t scaling_seed = 1;
  scaling->add_option("--weight", weight, "gb or lb")->capture_default_str();
  scaling->add_option("--n", n, "Number of tries N")->capture_default_str();
  scaling->add_option("--lambda", lambda, "R^2 / d")->capture_default_str();
  scaling->add_option("--samples", samples, "Monte Carlo samples")->capture_default_str();
  scaling->add_option("--m", m, "Target f = N(m, 1 - m^2)")->capture_default_str();
  scaling->add_option("--ell", ell, "Evaluate at this ell instead of optimizing");
  scaling->add_option("--ell-min", ell_min)->capture_default_str();
  scaling->add_option("--ell-max", ell_max)->capture_default_str();
  scaling->add_option("--points", points, "Grid points")->capture_default_str();
  scaling->add_option("--seed", scaling_seed)->capture_default_str();
  scaling->add_flag("--euclidean", euclidean, "Euclidean MTM/RWM limit (no curvature term)");

  auto* selftest = app.add_subcommand("selftest", "Run the acceptance criteria");
  std::vector<int> criteria;
  selftest->add_option("--criterion", criteria, "Only these criteria (1-10)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  smtm::configure_workers();
  try {
    if (*run) return cmd_run(what, seed, out, sets);
    if (*scaling) return cmd_scaling(weight, n, lambda, m, samples, ell, euclidean, ell_min, ell_max, points, scaling_seed);
    if (*selftest) return cmd_selftest(criteria);
  } catch (const smtm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case smtm::ErrorCode::ConfigError:
      case smtm::ErrorCode::UnknownPreset:
      case smtm::ErrorCode::InvalidArgument:
      case smtm::ErrorCode::OutOfRange:
      case smtm::ErrorCode::NegativeVariance:
        return kExitConfig;
      default:
        return kExitRuntime;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
