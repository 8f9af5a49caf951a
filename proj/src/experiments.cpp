#include "smtm/experiments.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "smtm/chain.hpp"
#include "smtm/diagnostics.hpp"
#include "smtm/error.hpp"
#include "smtm/parallel.hpp"
#include "smtm/scaling.hpp"
#include "smtm/svg.hpp"

#ifndef SMTM_CODE_VERSION
#define SMTM_CODE_VERSION "unknown"
#endif

namespace smtm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

// Typed access to a flat config object; keys never read are reported as unknown.
class Reader {
 public:
  explicit Reader(const Json& j) : j_(j) {
    if (!j.is_object()) config_error("config must be a JSON object");
  }

  const Json* find(const std::string& key) {
    used_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    const Json* v = find(key);
    if (!v) {
      if (fallback) return *fallback;
      config_error("missing key '" + key + "'");
    }
    if (!v->is_number()) config_error("'" + key + "' must be a number");
    return v->get<double>();
  }

  std::int64_t integer(const std::string& key, std::optional<std::int64_t> fallback = std::nullopt) {
    const Json* v = find(key);
    if (!v) {
      if (fallback) return *fallback;
      config_error("missing key '" + key + "'");
    }
    if (!v->is_number_integer()) config_error("'" + key + "' must be an integer");
    return v->get<std::int64_t>();
  }

  std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
    const Json* v = find(key);
    if (!v) {
      if (fallback) return *fallback;
      config_error("missing key '" + key + "'");
    }
    if (!v->is_string()) config_error("'" + key + "' must be a string");
    return v->get<std::string>();
  }

  std::vector<std::string> strings(const std::string& key) {
    const Json* v = find(key);
    if (!v || !v->is_array() || v->empty()) config_error("'" + key + "' must be a non-empty list of strings");
    std::vector<std::string> out;
    for (const auto& e : *v) {
      if (!e.is_string()) config_error("'" + key + "' must be a non-empty list of strings");
      out.push_back(e.get<std::string>());
    }
    return out;
  }

  std::vector<double> numbers(const std::string& key) {
    const Json* v = find(key);
    if (!v || !v->is_array() || v->empty()) config_error("'" + key + "' must be a non-empty list of numbers");
    std::vector<double> out;
    for (const auto& e : *v) {
      if (!e.is_number()) config_error("'" + key + "' must be a non-empty list of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  /// A number broadcast to length d, or a list of exactly d numbers.
  Vector point(const std::string& key, int d, double fallback) {
    const Json* v = find(key);
    if (!v) return Vector(static_cast<std::size_t>(d), fallback);
    if (v->is_number()) return Vector(static_cast<std::size_t>(d), v->get<double>());
    if (!v->is_array() || v->size() != static_cast<std::size_t>(d))
      config_error("'" + key + "' must be a number or a list of " + std::to_string(d) + " numbers");
    Vector out;
    for (const auto& e : *v) {
      if (!e.is_number()) config_error("'" + key + "' entries must be numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::vector<std::uint64_t> seeds() {
    const Json* v = find("seeds");
    if (!v || !v->is_array() || v->empty()) config_error("'seeds' must be a non-empty list of non-negative integers");
    std::vector<std::uint64_t> out;
    for (const auto& e : *v) {
      if (!e.is_number_unsigned()) config_error("'seeds' must be a non-empty list of non-negative integers");
      out.push_back(e.get<std::uint64_t>());
    }
    if (std::set<std::uint64_t>(out.begin(), out.end()).size() != out.size()) config_error("'seeds' has duplicates");
    return out;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.contains(it.key())) config_error("unknown key '" + it.key() + "'");
  }

 private:
  const Json& j_;
  std::set<std::string> used_;
};

// Output files of one run, hashed as they are written.
class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path root) : root_(std::move(root)) {}

  void write(const std::string& rel, const std::string& content) {
    const std::filesystem::path p = root_ / rel;
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
    if (ec) throw Error(ErrorCode::IOFailure, "cannot create " + p.parent_path().string() + ": " + ec.message());
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::IOFailure, "cannot open " + p.string());
    f << content;
    f.close();
    if (!f) throw Error(ErrorCode::IOFailure, "failed writing " + p.string());
    if (rel != "manifest.json") files_.push_back({rel, fnv1a64(content), content.size()});
  }

  std::vector<ArtifactFile> sorted() const {
    auto out = files_;
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
    return out;
  }

 private:
  std::filesystem::path root_;
  std::vector<ArtifactFile> files_;
};

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n == 0) return std::numeric_limits<double>::quiet_NaN();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string num_label(double v) {
  std::string s = format_double(v);
  return s;
}

std::string series_csv(const std::vector<SeriesPoint>& pts) {
  std::string out = "series,x,y\n";
  for (const auto& p : pts) out += p.series + "," + format_double(p.x) + "," + format_double(p.y) + "\n";
  return out;
}

bool is_euclidean(KernelKind k) { return k == KernelKind::RWM || k == KernelKind::MTM; }
bool is_single_proposal(KernelKind k) { return k == KernelKind::RWM || k == KernelKind::SRWM; }

Json base_manifest(const Json& config, std::string_view source, const std::vector<std::uint64_t>& seeds) {
  Json m;
  m["code_version"] = SMTM_CODE_VERSION;
  m["source"] = std::string(source);
  m["config"] = config;
  m["seeds"] = seeds;
  return m;
}

RunResult finish_manifest(Json manifest, OutputSet& out) {
  RunResult r;
  r.files = out.sorted();
  Json files = Json::array();
  for (const auto& f : r.files) files.push_back({{"path", f.path}, {"fnv1a64", hex64(f.fnv1a)}, {"bytes", f.bytes}});
  manifest["files"] = files;
  out.write("manifest.json", manifest.dump(2) + "\n");
  r.manifest = std::move(manifest);
  return r;
}

// ---------------------------------------------------------------- chains

struct ChainJobResult {
  std::string csv;
  double acceptance = 0.0;
  double esjd = 0.0;
  std::optional<std::uint64_t> crossing;
  double final_log_distance = std::numeric_limits<double>::quiet_NaN();
  std::vector<CurvePoint> curve;
};

RunResult run_chains(const Json& config, const std::filesystem::path& out_dir, std::string_view source) {
  Reader r(config);
  r.find("type");
  const std::string description = r.string("description", "");
  const std::string target_spec = r.string("target");
  Target target = [&] {
    try {
      return parse_target_spec(target_spec);
    } catch (const Error& e) {
      config_error("target: " + std::string(e.what()));
    }
  }();
  const int d = target.dim();
  const Vector x0 = r.point("x0", d, 0.0);
  const Vector center = r.point("center", d, 0.0);
  const Json* radius_key = r.find("radius");
  const Json* lambda_key = r.find("lambda");
  if (radius_key && lambda_key) config_error("give at most one of 'radius' and 'lambda'");
  double radius = std::sqrt(static_cast<double>(d));
  if (radius_key) {
    if (!radius_key->is_number() || radius_key->get<double>() <= 0) config_error("'radius' must be positive");
    radius = radius_key->get<double>();
  } else if (lambda_key) {
    if (!lambda_key->is_number() || lambda_key->get<double>() <= 0) config_error("'lambda' must be positive");
    radius = std::sqrt(lambda_key->get<double>() * d);
  }
  const double ell = r.number("ell", 2.38);
  if (!(ell > 0)) config_error("'ell' must be positive");
  const auto kernel_texts = r.strings("kernels");
  const auto seeds = r.seeds();
  const std::int64_t iterations = r.integer("iterations");
  const std::int64_t burn_in = r.integer("burn_in", 0);
  const std::int64_t thinning = r.integer("thinning", 1);
  if (iterations < 1 || burn_in < 0 || iterations <= burn_in) config_error("need iterations > burn_in >= 0");
  if (thinning < 1) config_error("'thinning' must be >= 1");
  const std::string retention_text = r.string("retention", "full");
  if (retention_text != "full" && retention_text != "summary") config_error("'retention' must be full or summary");
  const Retention retention = retention_text == "full" ? Retention::Full : Retention::Summary;
  const double threshold = r.number("crossing_threshold", 0.5);
  const auto parallel_threshold = r.integer("candidate_parallel_threshold", 64);
  const auto default_m = r.integer("ideal_inner_m", 256);
  r.finish();

  const StereoChart chart(radius, center);
  const double lambda = radius * radius / d;
  std::vector<KernelConfig> kernels;
  std::vector<std::string> labels, slugs;
  for (const auto& text : kernel_texts) {
    const KernelSpec spec = parse_kernel_spec(text);
    KernelConfig k;
    k.kind = spec.kind;
    k.weight = spec.weight;
    k.parallel_threshold = static_cast<int>(parallel_threshold);
    if (spec.kind == KernelKind::Ideal) {
      k.ideal_inner_m = spec.n ? *spec.n : static_cast<int>(default_m);
      k.n_candidates = 1;
    } else {
      k.n_candidates = spec.n.value_or(1);
    }
    if (spec.step) {
      k.step = *spec.step;
    } else if (is_euclidean(spec.kind)) {
      k.step = ell / std::sqrt(static_cast<double>(d));
    } else {
      try {
        k.step = ell_to_h(d, lambda, ell);
      } catch (const Error& e) {
        config_error(text + ": " + e.what());
      }
    }
    if (is_sphere_kernel(spec.kind)) k.chart = chart;
    try {
      k.validate(d);
    } catch (const Error& e) {
      config_error(text + ": " + e.what());
    }
    const int n_label = spec.kind == KernelKind::Ideal ? k.ideal_inner_m : k.n_candidates;
    labels.push_back(spec.label(n_label));
    slugs.push_back(spec.slug(n_label));
    kernels.push_back(std::move(k));
  }
  if (std::set<std::string>(slugs.begin(), slugs.end()).size() != slugs.size()) config_error("duplicate kernels");

  const Vector reference = target.mean();
  const std::size_t n_seeds = seeds.size();
  std::vector<ChainJobResult> results(kernels.size() * n_seeds);
  parallel_for_dynamic(true, results.size(), [&](std::size_t job) {
    const std::size_t k = job / n_seeds;
    ChainSpec spec;
    spec.kernel = kernels[k];
    spec.x0 = x0;
    spec.iterations = static_cast<std::uint64_t>(iterations);
    spec.burn_in = static_cast<std::uint64_t>(burn_in);
    spec.thinning = static_cast<std::uint64_t>(thinning);
    spec.retention = retention;
    spec.seed = seeds[job % n_seeds];
    spec.chain_id = k;
    const ChainTrace trace = run_chain(target, spec);
    ChainJobResult& out = results[job];
    std::ostringstream csv;
    write_trace_csv(csv, trace);
    out.csv = csv.str();
    out.acceptance = acceptance_rate(trace);
    out.esjd = esjd(trace);
    if (retention == Retention::Full) {
      out.curve = burnin_curve(trace, reference);
      out.crossing = first_crossing(out.curve, threshold);
      out.final_log_distance = out.curve.back().value;
    }
  });

  OutputSet files(out_dir);
  std::string summary = "kernel,seed,acceptance,esjd,crossing_iter,final_log_distance\n";
  std::string by_kernel = "kernel,chains,crossed,median_crossing_iter,mean_acceptance,mean_esjd\n";
  std::vector<SeriesPoint> burnin;
  for (std::size_t k = 0; k < kernels.size(); ++k) {
    std::vector<double> crossings;
    double acc = 0.0, jump = 0.0;
    std::size_t crossed = 0;
    for (std::size_t s = 0; s < n_seeds; ++s) {
      const ChainJobResult& res = results[k * n_seeds + s];
      files.write("chains/" + slugs[k] + "_seed" + std::to_string(seeds[s]) + ".csv", res.csv);
      summary += labels[k] + "," + std::to_string(seeds[s]) + "," + format_double(res.acceptance) + "," +
                 format_double(res.esjd) + "," + (res.crossing ? std::to_string(*res.crossing) : "") + "," +
                 (retention == Retention::Full ? format_double(res.final_log_distance) : "") + "\n";
      crossings.push_back(res.crossing ? static_cast<double>(*res.crossing) : kInf);
      crossed += res.crossing.has_value();
      acc += res.acceptance;
      jump += res.esjd;
    }
    by_kernel += labels[k] + "," + std::to_string(n_seeds) + "," + std::to_string(crossed) + "," +
                 (retention == Retention::Full ? format_double(median(crossings)) : "") + "," +
                 format_double(acc / n_seeds) + "," + format_double(jump / n_seeds) + "\n";
    if (retention == Retention::Full) {
      const auto& first = results[k * n_seeds].curve;
      for (std::size_t i = 0; i < first.size(); ++i) {
        std::vector<double> vals;
        for (std::size_t s = 0; s < n_seeds; ++s) vals.push_back(results[k * n_seeds + s].curve[i].value);
        burnin.push_back({labels[k], static_cast<double>(first[i].iter), median(vals)});
      }
    }
  }
  files.write("summary.csv", summary);
  files.write("summary_by_kernel.csv", by_kernel);
  if (retention == Retention::Full) {
    const std::string csv = series_csv(burnin);
    files.write("burnin.csv", csv);
    PlotSpec plot;
    plot.title = description.empty() ? "Burn-in" : description;
    plot.x_label = "iteration";
    plot.y_label = "median " + std::string(kBurninMetric);
    plot.series_order = labels;
    plot.width = 900;
    files.write("burnin.svg", render_svg(csv, plot));
  }

  Json manifest = base_manifest(config, source, seeds);
  manifest["type"] = "chains";
  manifest["burnin_metric"] = kBurninMetric;
  manifest["radius"] = radius;
  Json steps = Json::object();
  for (std::size_t k = 0; k < kernels.size(); ++k) steps[labels[k]] = kernels[k].step;
  manifest["steps"] = steps;
  return finish_manifest(std::move(manifest), files);
}

// ---------------------------------------------------------------- curves

RunResult run_curves(const Json& config, const std::filesystem::path& out_dir, std::string_view source) {
  Reader r(config);
  r.find("type");
  const std::string description = r.string("description", "");
  const auto kernel_texts = r.strings("kernels");
  const double m = r.number("m", 0.5);
  const double lambda = r.number("lambda", 1.0);
  const auto d = r.integer("d", 1000);
  const std::string vary = r.string("vary", "none");
  if (vary != "none" && vary != "m" && vary != "lambda" && vary != "n")
    config_error("'vary' must be one of none, m, lambda, n");
  std::vector<double> values{std::numeric_limits<double>::quiet_NaN()};
  if (vary != "none") values = r.numbers("values");
  else r.find("values");
  const std::string panels = r.string("panels", "vary");
  if (panels != "vary" && panels != "single") config_error("'panels' must be vary or single");
  const EllGrid grid{r.number("ell_min", 0.1), r.number("ell_max", 5.0),
                     static_cast<int>(r.integer("ell_points", 50))};
  if (!(grid.lo > 0 && grid.hi > grid.lo && grid.points >= 2)) config_error("need 0 < ell_min < ell_max, ell_points >= 2");
  const auto samples = r.integer("samples", 100000);
  if (samples < static_cast<std::int64_t>(kMinLimitSamples))
    config_error("'samples' must be at least " + std::to_string(kMinLimitSamples));
  const auto seeds = r.seeds();
  if (seeds.size() != 1) config_error("curve experiments take exactly one seed");
  r.finish();
  if (d < 2) config_error("'d' must be >= 2");

  std::vector<KernelSpec> specs;
  for (const auto& text : kernel_texts) {
    KernelSpec s = parse_kernel_spec(text);
    if (s.kind == KernelKind::Ideal) config_error(text + ": the ideal scheme has no limit curve");
    if (s.step) config_error(text + ": curve kernels take no step");
    if (vary == "n" && s.n) config_error(text + ": N comes from 'values' when vary = n");
    if (vary == "n" && is_single_proposal(s.kind)) config_error(text + ": single-proposal kernel with vary = n");
    specs.push_back(s);
  }

  struct Series {
    std::string panel;
    std::string label;
    std::string base_label;
    double value;
    std::vector<LimitCurvePoint> curve;
  };
  std::vector<Series> all;
  const std::vector<double> ells = grid.values();
  for (double v : values) {
    const std::string panel = vary == "none" ? "all" : vary + "=" + num_label(v);
    for (const auto& s : specs) {
      ScalingParams p;
      p.d = static_cast<int>(d);
      p.lambda = vary == "lambda" ? v : lambda;
      const double mm = vary == "m" ? v : m;
      if (!(mm >= 0 && mm < 1)) config_error("'m' must lie in [0, 1)");
      p.fisher = 1.0 / (1.0 - mm * mm);
      p.weight = s.weight;
      p.euclidean = is_euclidean(s.kind);
      if (vary == "n") {
        if (v < 1 || v != std::floor(v)) config_error("'values' must be positive integers when vary = n");
        p.n = static_cast<int>(v);
      } else {
        p.n = s.n.value_or(1);
      }
      if (is_single_proposal(s.kind) && p.n != 1) config_error("RWM/SRWM take N = 1");
      try {
        p.validate();
      } catch (const Error& e) {
        config_error(std::string(e.what()));
      }
      Series series;
      series.panel = panel;
      series.base_label = s.label(p.n);
      series.label = series.base_label;
      if (panels == "single" && vary != "none" && vary != "n") series.label += " " + panel;
      series.value = v;
      series.curve = limit_curve(p, ells, static_cast<std::size_t>(samples), seeds[0]);
      all.push_back(std::move(series));
    }
  }

  OutputSet files(out_dir);
  std::string curves = "panel,series,ell,acceptance,acceptance_se,esjd,esjd_se\n";
  std::string summary = "panel,series,ell_opt,acceptance_opt,acceptance_opt_se,esjd_opt,esjd_opt_se\n";
  std::vector<SeriesPoint> optimum_pts;
  for (const auto& s : all) {
    std::size_t best = 0;
    for (std::size_t i = 0; i < s.curve.size(); ++i) {
      const auto& c = s.curve[i];
      curves += s.panel + "," + s.label + "," + format_double(c.ell) + "," + format_double(c.acceptance.mean) + "," +
                format_double(c.acceptance.std_error) + "," + format_double(c.esjd.mean) + "," +
                format_double(c.esjd.std_error) + "\n";
      if (c.esjd.mean > s.curve[best].esjd.mean) best = i;
    }
    const auto& b = s.curve[best];
    summary += s.panel + "," + s.label + "," + format_double(b.ell) + "," + format_double(b.acceptance.mean) + "," +
               format_double(b.acceptance.std_error) + "," + format_double(b.esjd.mean) + "," +
               format_double(b.esjd.std_error) + "\n";
    if (vary != "none") {
      std::string key = s.base_label;
      if (vary == "n") key = key.substr(0, key.find(" N="));
      optimum_pts.push_back({key, s.value, b.acceptance.mean});
    }
  }
  files.write("curves.csv", curves);
  files.write("summary.csv", summary);

  // One figure per panel (or one overall), ESJD against total acceptance.
  std::map<std::string, std::vector<const Series*>> figures;
  std::vector<std::string> figure_order;
  for (const auto& s : all) {
    const std::string fig = panels == "single" ? "all" : s.panel;
    if (!figures.contains(fig)) figure_order.push_back(fig);
    figures[fig].push_back(&s);
  }
  std::string dominance = "panel,series,other,overlap_lo,overlap_hi,min_relative_gap,peak,other_peak,dominates\n";
  for (const auto& fig : figure_order) {
    const auto& members = figures[fig];
    std::vector<SeriesPoint> pts;
    std::vector<std::string> order;
    std::vector<std::vector<CurveSample>> samples_of;
    for (const Series* s : members) {
      order.push_back(s->label);
      std::vector<CurveSample> cs;
      for (const auto& c : s->curve) {
        pts.push_back({s->label, c.acceptance.mean, c.esjd.mean});
        cs.push_back({c.acceptance.mean, c.esjd.mean});
      }
      samples_of.push_back(std::move(cs));
    }
    for (std::size_t a = 0; a < members.size(); ++a)
      for (std::size_t b = 0; b < members.size(); ++b) {
        if (a == b) continue;
        const Dominance dm = curve_dominance(samples_of[a], samples_of[b]);
        dominance += fig + "," + members[a]->label + "," + members[b]->label + "," + format_double(dm.overlap_lo) + "," +
                     format_double(dm.overlap_hi) + "," + format_double(dm.min_relative_gap) + "," +
                     format_double(dm.peak_a) + "," + format_double(dm.peak_b) + "," +
                     (dm.dominates ? "1" : "0") + "\n";
      }
    PlotSpec plot;
    plot.title = (description.empty() ? std::string("Limit curves") : description) + (fig == "all" ? "" : " (" + fig + ")");
    plot.x_label = "total acceptance rate";
    plot.y_label = "ESJD";
    plot.series_order = order;
    plot.width = 900;
    const std::string name = fig == "all" ? "curves" : "curves_" + vary + "_" + fig.substr(fig.find('=') + 1);
    files.write(name + ".svg", render_svg(pts, plot));
  }
  files.write("dominance.csv", dominance);
  if (!optimum_pts.empty()) {
    const std::string csv = series_csv(optimum_pts);
    files.write("optimum.csv", csv);
    PlotSpec plot;
    plot.title = "Total acceptance at the ESJD-optimal ell";
    plot.x_label = vary == "n" ? "N" : vary;
    plot.y_label = "acceptance at optimum";
    files.write("optimum.svg", render_svg(csv, plot));
  }

  Json manifest = base_manifest(config, source, seeds);
  manifest["type"] = "curves";
  manifest["limit_esjd"] = "N * ell^2 * E[phi_1^1]";
  manifest["limit_acceptance"] = "sum_j E[phi_2^j]";
  return finish_manifest(std::move(manifest), files);
}

double interpolate(const std::vector<CurveSample>& c, double a) {
  const auto it = std::lower_bound(c.begin(), c.end(), a,
                                   [](const CurveSample& s, double v) { return s.acceptance < v; });
  if (it == c.begin()) return it->esjd;
  if (it == c.end()) return c.back().esjd;
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  if (hi.acceptance == lo.acceptance) return std::max(hi.esjd, lo.esjd);
  const double t = (a - lo.acceptance) / (hi.acceptance - lo.acceptance);
  return lo.esjd + t * (hi.esjd - lo.esjd);
}

}  // namespace

std::string KernelSpec::label(int n_value) const {
  switch (kind) {
    case KernelKind::RWM: return "RWM";
    case KernelKind::SRWM: return "SRWM";
    case KernelKind::MTM:
    case KernelKind::SMTM:
      return std::string(weight == WeightKind::GloballyBalanced ? "GB-" : "LB-") +
             (kind == KernelKind::MTM ? "MTM" : "SMTM") + " N=" + std::to_string(n_value);
    case KernelKind::Ideal:
      return std::string(weight == WeightKind::GloballyBalanced ? "GB-" : "LB-") + "Ideal M=" + std::to_string(n_value);
  }
  return "?";
}

std::string KernelSpec::slug(int n_value) const {
  std::string s;
  for (char c : label(n_value)) {
    if (std::isalnum(static_cast<unsigned char>(c))) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    else if (c == ' ' || c == '-') s += '-';
  }
  return s;
}

KernelSpec parse_kernel_spec(std::string_view text) {
  const std::string t = upper(text);
  std::string_view rest(t);
  KernelSpec spec;
  bool weighted = false;
  if (rest.starts_with("GB-") || rest.starts_with("LB-")) {
    spec.weight = rest.starts_with("GB-") ? WeightKind::GloballyBalanced : WeightKind::LocallyBalanced;
    weighted = true;
    rest.remove_prefix(3);
  }
  const std::size_t at = rest.find('@');
  if (at != std::string_view::npos) {
    const std::string_view s = rest.substr(at + 1);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !(v > 0))
      config_error("kernel '" + std::string(text) + "': step must be a positive number");
    spec.step = v;
    rest = rest.substr(0, at);
  }
  const std::size_t colon = rest.find(':');
  if (colon != std::string_view::npos) {
    const std::string_view s = rest.substr(colon + 1);
    int v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || v < 1)
      config_error("kernel '" + std::string(text) + "': count must be a positive integer");
    spec.n = v;
    rest = rest.substr(0, colon);
  }
  try {
    spec.kind = parse_kernel_kind(rest);
  } catch (const Error&) {
    config_error("unknown kernel '" + std::string(text) + "'");
  }
  if (is_single_proposal(spec.kind)) {
    if (weighted) config_error("kernel '" + std::string(text) + "': RWM/SRWM take no weight prefix");
    if (spec.n && *spec.n != 1) config_error("kernel '" + std::string(text) + "': RWM/SRWM take N = 1");
  }
  return spec;
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

Dominance curve_dominance(std::vector<CurveSample> a, std::vector<CurveSample> b) {
  auto by_acc = [](const CurveSample& x, const CurveSample& y) { return x.acceptance < y.acceptance; };
  std::sort(a.begin(), a.end(), by_acc);
  std::sort(b.begin(), b.end(), by_acc);
  Dominance d;
  if (a.empty() || b.empty()) return d;
  for (const auto& s : a) d.peak_a = std::max(d.peak_a, s.esjd);
  for (const auto& s : b) d.peak_b = std::max(d.peak_b, s.esjd);
  d.overlap_lo = std::max(a.front().acceptance, b.front().acceptance);
  d.overlap_hi = std::min(a.back().acceptance, b.back().acceptance);
  if (!(d.overlap_hi > d.overlap_lo)) {
    d.min_relative_gap = std::numeric_limits<double>::quiet_NaN();
    return d;
  }
  const double scale = std::max(d.peak_a, d.peak_b);
  constexpr int kLevels = 201;
  double worst = kInf;
  for (int i = 0; i < kLevels; ++i) {
    const double acc = d.overlap_lo + (d.overlap_hi - d.overlap_lo) * i / (kLevels - 1);
    worst = std::min(worst, (interpolate(a, acc) - interpolate(b, acc)) / scale);
  }
  d.min_relative_gap = worst;
  d.dominates = worst >= -0.01 && d.peak_a > d.peak_b;
  return d;
}

RunResult run_experiment(const Json& config, const std::filesystem::path& out_dir, std::string_view source) {
  if (!config.is_object()) config_error("config must be a JSON object");
  if (config.contains("extends")) config_error("config must be resolved before running");
  const auto it = config.find("type");
  if (it == config.end() || !it->is_string()) config_error("missing string key 'type'");
  const std::string type = it->get<std::string>();
  if (type == "chains") return run_chains(config, out_dir, source);
  if (type == "curves") return run_curves(config, out_dir, source);
  config_error("'type' must be chains or curves");
}

RunResult run_preset(std::string_view name, const std::vector<std::string>& overrides,
                     const std::filesystem::path& out_dir) {
  Json config = load_config(name);
  for (const auto& o : overrides) apply_override(config, o);
  return run_experiment(config, out_dir, name);
}

}  // namespace smtm
