#pragma once

// Flat JSON experiment configs. A config may name a parent in `extends`
// (a preset name or a path relative to the extending file); keys in the
// child replace keys of the parent. Resolved configs carry no `extends`.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace smtm {

using Json = nlohmann::json;

const std::vector<std::string>& preset_names();
bool is_preset(std::string_view name);

/// Raw preset object (may itself use `extends`). Throws UnknownPreset.
Json preset_config(std::string_view name);

/// Reads a JSON object from disk. Throws IOFailure or ConfigError.
Json read_config_file(const std::filesystem::path& path);

/// Follows the `extends` chain of `config`; `base_dir` anchors relative paths.
/// Throws ConfigError on cycles or non-object configs, UnknownPreset, IOFailure.
Json resolve_config(const Json& config, const std::filesystem::path& base_dir = {});

/// Preset name or path to a config file, fully resolved.
Json load_config(std::string_view preset_or_path);

/// Applies `key=value`; the value is parsed as JSON when possible and kept
/// as a string otherwise. Throws ConfigError on a missing '=' or empty key.
void apply_override(Json& config, std::string_view assignment);

}  // namespace smtm
