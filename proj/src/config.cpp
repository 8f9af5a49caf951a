#include "smtm/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "smtm/error.hpp"

namespace smtm {

namespace {

// Shared settings of the burn-in figures: d = 10 started at 10 * 1.
const char* const kBurninLight = R"json({
  "type": "chains",
  "description": "Burn-in from x0 = 10*1 for a standard Gaussian target, d = 10",
  "target": "gaussian(0,1)^10",
  "x0": 10,
  "lambda": 1,
  "ell": 2.38,
  "kernels": ["RWM", "GB-MTM:5", "LB-MTM:5", "SRWM", "GB-SMTM:5", "LB-SMTM:5"],
  "seeds": [1, 2, 3, 4, 5, 6, 7, 8, 9, 10],
  "iterations": 10000,
  "burn_in": 5000,
  "thinning": 5,
  "retention": "full",
  "crossing_threshold": 0.5
})json";

const char* const kBurninHeavy = R"json({
  "extends": "burnin-light",
  "description": "Burn-in from x0 = 10*1 for a product Student-t(11) target, d = 10",
  "target": "student_t(11,0,1)^10"
})json";

// R = sqrt((s^2 + m^2) d) with the sphere centered at the origin.
const char* const kMislocated = R"json({
  "extends": "burnin-light",
  "description": "Mislocated sphere: product Student-t(21, m = 10, s = 1), d = 20, started at 0",
  "target": "student_t(21,10,1)^20",
  "x0": 0,
  "lambda": null,
  "radius": 44.94441010848846,
  "kernels": ["SRWM", "GB-SMTM:2", "GB-SMTM:5", "GB-SMTM:10", "LB-SMTM:2", "LB-SMTM:5", "LB-SMTM:10"],
  "crossing_threshold": 0.8
})json";

const char* const kPathological = R"json({
  "extends": "burnin-light",
  "description": "Globally balanced MTM vs SMTM from x0 = 10*1 as N grows, Gaussian d = 10, R = sqrt(10)",
  "kernels": ["GB-MTM:10", "GB-MTM:50", "GB-MTM:100", "GB-SMTM:10", "GB-SMTM:50", "GB-SMTM:100"],
  "iterations": 2000,
  "burn_in": 1000,
  "thinning": 2,
  "crossing_threshold": 0.69897000433601886
})json";

// Limit-functional curves, f = N(m, 1 - m^2).
const char* const kRobustCenter = R"json({
  "type": "curves",
  "description": "ESJD vs acceptance limit curves for N = 3 as the target mean m moves away from the sphere center",
  "kernels": ["LB-SMTM:3", "LB-MTM:3", "SRWM", "RWM"],
  "m": 0.5,
  "lambda": 1,
  "d": 1000,
  "vary": "m",
  "values": [0.2, 0.5, 0.8],
  "panels": "vary",
  "ell_min": 0.1,
  "ell_max": 15,
  "ell_points": 60,
  "samples": 100000,
  "seeds": [1]
})json";

const char* const kRobustRadius = R"json({
  "extends": "robust-center",
  "description": "ESJD vs acceptance limit curves for N = 3 across sphere radii R = sqrt(lambda d), m = 0.5",
  "vary": "lambda",
  "values": [0.1, 1, 10]
})json";

const char* const kLargeN = R"json({
  "extends": "robust-center",
  "description": "ESJD vs acceptance limit curves across the number of tries, m = 0.5",
  "kernels": ["GB-SMTM", "LB-SMTM", "GB-MTM", "LB-MTM"],
  "vary": "n",
  "values": [1, 2, 5, 10, 20, 50],
  "ell_max": 10,
  "ell_points": 50,
  "samples": 50000
})json";

const char* const kScalingCurves = R"json({
  "extends": "robust-center",
  "description": "Optimal-scaling frontier of globally and locally balanced SMTM, m = 0.5",
  "kernels": ["GB-SMTM", "LB-SMTM"],
  "vary": "n",
  "values": [1, 2, 3, 5, 10, 20],
  "panels": "single",
  "ell_min": 0.1,
  "ell_max": 10,
  "ell_points": 50
})json";

const std::map<std::string, const char*, std::less<>>& preset_table() {
  static const std::map<std::string, const char*, std::less<>> table{
      {"burnin-light", kBurninLight},   {"burnin-heavy", kBurninHeavy},   {"mislocated", kMislocated},
      {"robust-center", kRobustCenter}, {"robust-radius", kRobustRadius}, {"pathological", kPathological},
      {"large-n", kLargeN},             {"scaling-curves", kScalingCurves},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"burnin-light",  "burnin-heavy", "mislocated", "robust-center",
                                              "robust-radius", "pathological", "large-n",    "scaling-curves"};
  return names;
}

bool is_preset(std::string_view name) { return preset_table().contains(name); }

Json preset_config(std::string_view name) {
  const auto& table = preset_table();
  const auto it = table.find(name);
  if (it == table.end()) throw Error(ErrorCode::UnknownPreset, std::string(name));
  return Json::parse(it->second);
}

Json read_config_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IOFailure, "cannot read " + path.string());
  std::stringstream buf;
  buf << f.rdbuf();
  Json j;
  try {
    j = Json::parse(buf.str());
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, path.string() + ": top level must be an object");
  return j;
}

namespace {

Json resolve(const Json& config, const std::filesystem::path& base_dir, std::set<std::string>& seen) {
  if (!config.is_object()) throw Error(ErrorCode::ConfigError, "config must be a JSON object");
  Json child = config;
  const auto ext = child.find("extends");
  if (ext == child.end()) return child;
  if (!ext->is_string()) throw Error(ErrorCode::ConfigError, "'extends' must be a string");
  const std::string parent_name = ext->get<std::string>();
  child.erase("extends");

  Json parent;
  std::filesystem::path parent_dir = base_dir;
  std::string key;
  if (is_preset(parent_name)) {
    key = "preset:" + parent_name;
    parent = preset_config(parent_name);
  } else {
    const std::filesystem::path p = base_dir / parent_name;
    if (!std::filesystem::exists(p)) throw Error(ErrorCode::UnknownPreset, parent_name);
    key = "file:" + std::filesystem::weakly_canonical(p).string();
    parent = read_config_file(p);
    parent_dir = p.parent_path();
  }
  if (!seen.insert(key).second) throw Error(ErrorCode::ConfigError, "'extends' cycle through " + parent_name);
  Json merged = resolve(parent, parent_dir, seen);
  for (auto it = child.begin(); it != child.end(); ++it) merged[it.key()] = it.value();
  return merged;
}

}  // namespace

Json resolve_config(const Json& config, const std::filesystem::path& base_dir) {
  std::set<std::string> seen;
  return resolve(config, base_dir, seen);
}

Json load_config(std::string_view preset_or_path) {
  if (is_preset(preset_or_path)) {
    std::set<std::string> seen{"preset:" + std::string(preset_or_path)};
    return resolve(preset_config(preset_or_path), {}, seen);
  }
  const std::filesystem::path p(preset_or_path);
  if (!std::filesystem::exists(p)) throw Error(ErrorCode::UnknownPreset, std::string(preset_or_path));
  std::set<std::string> seen{"file:" + std::filesystem::weakly_canonical(p).string()};
  return resolve(read_config_file(p), p.parent_path(), seen);
}

void apply_override(Json& config, std::string_view assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0)
    throw Error(ErrorCode::ConfigError, "override must look like key=value: '" + std::string(assignment) + "'");
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  Json value = Json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  config[key] = std::move(value);
}

}  // namespace smtm
