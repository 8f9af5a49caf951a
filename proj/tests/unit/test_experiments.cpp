#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

#include "doctest.h"
#include "smtm/config.hpp"
#include "smtm/error.hpp"
#include "smtm/experiments.hpp"
#include "smtm/svg.hpp"

using namespace smtm;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("smtm-test-" + tag + "-" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& s) {
  std::ofstream f(p, std::ios::binary);
  f << s;
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an smtm::Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("kernel spec grammar") {
  const auto a = parse_kernel_spec("LB-SMTM:5");
  CHECK(a.kind == KernelKind::SMTM);
  CHECK(a.weight == WeightKind::LocallyBalanced);
  CHECK(a.n == 5);
  CHECK(a.label(5) == "LB-SMTM N=5");
  CHECK(a.slug(5) == "lb-smtm-n5");
  const auto b = parse_kernel_spec("gb-mtm:3@0.25");
  CHECK(b.kind == KernelKind::MTM);
  CHECK(b.step == 0.25);
  CHECK(parse_kernel_spec("SRWM").label(1) == "SRWM");
  CHECK(parse_kernel_spec("sps").kind == KernelKind::SRWM);
  CHECK(parse_kernel_spec("GB-IDEAL:64").label(64) == "GB-Ideal M=64");
  for (const char* bad : {"GB-RWM", "SRWM:2", "MTM:0", "SMTM:x", "SMTM@-1", "HMC", ""})
    CHECK(code_of([&] { parse_kernel_spec(bad); }) == ErrorCode::ConfigError);
}

TEST_CASE("FNV-1a reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("presets resolve") {
  CHECK(preset_names().size() == 8);
  for (const auto& name : preset_names()) {
    const Json c = load_config(name);
    CHECK_FALSE(c.contains("extends"));
    CHECK(c.contains("type"));
    CHECK(c.contains("seeds"));
  }
  const Json heavy = load_config("burnin-heavy");
  CHECK(heavy["target"] == "student_t(11,0,1)^10");
  CHECK(heavy["x0"] == 10);
  CHECK(heavy["kernels"].size() == 6);
  CHECK(load_config("robust-radius")["vary"] == "lambda");
  CHECK(code_of([] { load_config("no-such-preset"); }) == ErrorCode::UnknownPreset);
  CHECK(code_of([] { preset_config("no-such-preset"); }) == ErrorCode::UnknownPreset);
}

TEST_CASE("extends chains through files and presets") {
  TempDir dir("extends");
  write(dir.path / "base.json", R"({"extends": "burnin-light", "iterations": 300, "burn_in": 100})");
  fs::create_directories(dir.path / "sub");
  write(dir.path / "sub" / "child.json", R"({"extends": "../base.json", "seeds": [4]})");
  const Json c = load_config((dir.path / "sub" / "child.json").string());
  CHECK(c["iterations"] == 300);
  CHECK(c["seeds"] == Json::array({4}));
  CHECK(c["target"] == "gaussian(0,1)^10");

  write(dir.path / "a.json", R"({"extends": "b.json"})");
  write(dir.path / "b.json", R"({"extends": "a.json"})");
  CHECK(code_of([&] { load_config((dir.path / "a.json").string()); }) == ErrorCode::ConfigError);
  write(dir.path / "bad.json", "{not json");
  CHECK(code_of([&] { load_config((dir.path / "bad.json").string()); }) == ErrorCode::ConfigError);
  write(dir.path / "list.json", "[1, 2]");
  CHECK(code_of([&] { load_config((dir.path / "list.json").string()); }) == ErrorCode::ConfigError);
}

TEST_CASE("overrides") {
  Json c = load_config("burnin-light");
  apply_override(c, "iterations=50");
  apply_override(c, "seeds=[3,4]");
  apply_override(c, "target=gaussian(0,2)^3");
  apply_override(c, "x0=[1,2,3]");
  CHECK(c["iterations"] == 50);
  CHECK(c["seeds"] == Json::array({3, 4}));
  CHECK(c["target"] == "gaussian(0,2)^3");
  CHECK(c["x0"].size() == 3);
  CHECK(code_of([&] { apply_override(c, "iterations"); }) == ErrorCode::ConfigError);
  CHECK(code_of([&] { apply_override(c, "=3"); }) == ErrorCode::ConfigError);
}

TEST_CASE("invalid experiment configs") {
  TempDir dir("invalid");
  auto run_with = [&](const std::vector<std::string>& extra) {
    std::vector<std::string> sets{"iterations=20", "burn_in=10", "seeds=[1]"};
    sets.insert(sets.end(), extra.begin(), extra.end());
    run_preset("burnin-light", sets, dir.path);
  };
  CHECK(code_of([&] { run_with({"burn_in=30"}); }) == ErrorCode::ConfigError);
  CHECK(code_of([&] { run_with({"seeds=[]"}); }) == ErrorCode::ConfigError);
  CHECK(code_of([&] { run_with({"seeds=[1,1]"}); }) == ErrorCode::ConfigError);
  CHECK(code_of([&] { run_with({"itarations=5"}); }) == ErrorCode::ConfigError);
  CHECK(code_of([&] { run_with({"target=cauchy^3"}); }) == ErrorCode::ConfigError);
  CHECK(code_of([&] { run_with({"x0=[1,2]"}); }) == ErrorCode::ConfigError);
  CHECK(code_of([&] { run_with({"radius=2"}); }) == ErrorCode::ConfigError);  // lambda is also set
  CHECK(code_of([&] { run_with({"kernels=[\"RWM\",\"RWM\"]"}); }) == ErrorCode::ConfigError);
  CHECK(code_of([&] { run_with({"type=other"}); }) == ErrorCode::ConfigError);
  CHECK(code_of([&] { run_preset("robust-center", {"seeds=[1,2]"}, dir.path); }) == ErrorCode::ConfigError);
  CHECK(code_of([&] { run_preset("large-n", {"kernels=[\"SRWM\"]"}, dir.path); }) == ErrorCode::ConfigError);
  CHECK(code_of([&] { run_preset("robust-center", {"samples=10"}, dir.path); }) == ErrorCode::ConfigError);
}

TEST_CASE("render_svg") {
  SUBCASE("empty series") {
    const std::string svg = render_svg(std::string_view("series,x,y\n"), PlotSpec{"t"});
    CHECK(svg.find("no data") != std::string::npos);
    CHECK(count(svg, "<line") >= 2);
    CHECK(count(svg, "<polyline") == 0);
  }
  SUBCASE("single series") {
    const std::string svg = render_svg(std::string_view("series,x,y\nA,0,0\nA,1,1\n"), PlotSpec{"t"});
    CHECK(count(svg, "<polyline") == 1);
    const auto p = svg.find("points=\"");
    const auto e = svg.find('"', p + 8);
    CHECK(count(svg.substr(p + 8, e - p - 8), ",") == 2);
    CHECK(svg.find("no data") == std::string::npos);
  }
  SUBCASE("legend follows the given order") {
    PlotSpec spec{"t"};
    spec.series_order = {"second", "first"};
    const std::string svg = render_svg(std::string_view("series,x,y\nfirst,0,1\nsecond,0,2\nfirst,1,1\n"), spec);
    CHECK(svg.find(">second</text>") < svg.find(">first</text>"));
  }
  SUBCASE("schema mismatch") {
    CHECK(code_of([] { render_svg(std::string_view("a,b\n1,2\n"), PlotSpec{}); }) == ErrorCode::SchemaMismatch);
    CHECK(code_of([] { render_svg(std::string_view("series,x,y\nA,zero,1\n"), PlotSpec{}); }) ==
          ErrorCode::SchemaMismatch);
    CHECK(code_of([] { render_svg(std::string_view("series,x,y\nA,1\n"), PlotSpec{}); }) == ErrorCode::SchemaMismatch);
    CHECK(code_of([] { render_svg(std::string_view(""), PlotSpec{}); }) == ErrorCode::SchemaMismatch);
  }
  SUBCASE("escaping") {
    const std::string svg = render_svg(std::string_view("series,x,y\na<b,0,0\n"), PlotSpec{"x & y"});
    CHECK(svg.find("a&lt;b") != std::string::npos);
    CHECK(svg.find("x &amp; y") != std::string::npos);
  }
}

TEST_CASE("burnin-heavy artifact counts") {
  TempDir dir("heavy");
  const auto r = run_preset("burnin-heavy", {"iterations=200", "burn_in=100", "seeds=[1,2,3,4,5,6,7,8,9,10]"}, dir.path);
  std::size_t chain_csvs = 0, svgs = 0;
  for (const auto& f : r.files) {
    chain_csvs += f.path.starts_with("chains/") && f.path.ends_with(".csv");
    svgs += f.path.ends_with(".svg");
  }
  CHECK(chain_csvs == 60);
  CHECK(svgs == 1);
  CHECK(fs::exists(dir.path / "manifest.json"));
  const Json m = Json::parse(slurp(dir.path / "manifest.json"));
  CHECK(m["seeds"].size() == 10);
  CHECK(m["config"]["target"] == "student_t(11,0,1)^10");
  CHECK(m.contains("code_version"));
  CHECK(m["files"].size() == r.files.size());
  for (const auto& f : r.files) CHECK(fnv1a64(slurp(dir.path / f.path)) == f.fnv1a);

  const std::string head = slurp(dir.path / "chains" / "gb-smtm-n5_seed3.csv").substr(0, 100);
  CHECK(head.starts_with("iter,accepted,alpha,chosen,x1,norm,x2,x3,x4,x5,x6,x7,x8,x9,x10\n0,0,0,0,10,"));
  // One curve per kernel, legend in config order.
  const std::string svg = slurp(dir.path / "burnin.svg");
  CHECK(count(svg, "<polyline") == 6);
  std::size_t last = 0;
  for (const char* label : {">RWM<", ">GB-MTM N=5<", ">LB-MTM N=5<", ">SRWM<", ">GB-SMTM N=5<", ">LB-SMTM N=5<"}) {
    const auto pos = svg.find(label);
    REQUIRE(pos != std::string::npos);
    CHECK(pos > last);
    last = pos;
  }
}

TEST_CASE("burn-in figure snapshot") {
  // Golden file written on the first run, compared byte for byte afterwards.
  TempDir dir("golden");
  run_preset("burnin-light", {"iterations=300", "burn_in=100", "seeds=[1,2,3]"}, dir.path);
  const std::string svg = slurp(dir.path / "burnin.svg");
  const fs::path golden = fs::path(SMTM_GOLDEN_DIR) / "burnin_light_small.svg";
  if (!fs::exists(golden)) {
    fs::create_directories(golden.parent_path());
    write(golden, svg);
    MESSAGE("created golden snapshot " << golden.string());
  }
  CHECK(svg == slurp(golden));
}

TEST_CASE("reruns are byte-identical") {
  TempDir dir("determinism");
  for (const char* preset : {"pathological", "robust-radius"}) {
    const std::vector<std::string> small = std::string(preset) == "pathological"
                                               ? std::vector<std::string>{"iterations=150", "burn_in=50", "seeds=[1,2,3]"}
                                               : std::vector<std::string>{"samples=2000", "ell_points=8"};
    const auto a = run_preset(preset, small, dir.path / "a");
    const auto b = run_preset(preset, small, dir.path / "b");
    REQUIRE(a.files.size() == b.files.size());
    CHECK(slurp(dir.path / "a" / "manifest.json") == slurp(dir.path / "b" / "manifest.json"));
    for (std::size_t i = 0; i < a.files.size(); ++i) {
      CHECK(a.files[i].path == b.files[i].path);
      CHECK(slurp(dir.path / "a" / a.files[i].path) == slurp(dir.path / "b" / b.files[i].path));
    }
  }
}

TEST_CASE("curve dominance") {
  std::vector<CurveSample> base, twice, crossing;
  for (int i = 0; i <= 20; ++i) {
    const double a = i / 20.0;
    base.push_back({a, a * (1 - a)});
    twice.push_back({a, 2 * a * (1 - a)});
    crossing.push_back({a, a < 0.5 ? 3 * a * (1 - a) : 0.1 * a * (1 - a)});
  }
  const Dominance d = curve_dominance(twice, base);
  CHECK(d.dominates);
  CHECK(d.overlap_lo == 0.0);
  CHECK(d.overlap_hi == 1.0);
  CHECK(d.min_relative_gap == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_FALSE(curve_dominance(base, twice).dominates);
  CHECK_FALSE(curve_dominance(crossing, base).dominates);
  std::vector<CurveSample> disjoint{{2.0, 1.0}, {3.0, 1.0}};
  CHECK_FALSE(curve_dominance(disjoint, base).dominates);
}

TEST_CASE("robust-center: LB-SMTM dominates the other three kernels") {
  TempDir dir("robust");
  run_preset("robust-center", {"samples=20000"}, dir.path);
  std::istringstream in(slurp(dir.path / "dominance.csv"));
  std::string line;
  std::getline(in, line);
  CHECK(line == "panel,series,other,overlap_lo,overlap_hi,min_relative_gap,peak,other_peak,dominates");
  int checked = 0;
  while (std::getline(in, line)) {
    if (!line.starts_with("m=0.2,LB-SMTM N=3,") && !line.starts_with("m=0.5,LB-SMTM N=3,") &&
        !line.starts_with("m=0.8,LB-SMTM N=3,"))
      continue;
    CAPTURE(line);
    CHECK(line.ends_with(",1"));
    ++checked;
  }
  CHECK(checked == 9);
  for (const char* f : {"curves_m_0.2.svg", "curves_m_0.5.svg", "curves_m_0.8.svg", "optimum.svg", "curves.csv"})
    CHECK(fs::exists(dir.path / f));
}

}  // TEST_SUITE
