#pragma once

#include "kad/controller.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace kad {

/// Canonical, line-based, tab-separated KB file (header `#kadkb v1`).
std::string save_kb(const KbSnapshot &snapshot);
/// Inverse of save_kb. Throws ParseError on malformed records, a missing
/// header or dangling entity ids.
KbSnapshot load_kb(std::string_view text);

struct ConfigSources {
    std::string rules;
    std::string relations;
    std::string schemas;
    std::string gazetteer;
    std::string inference;
    std::string lexicon;
};

struct ConfigPaths {
    std::filesystem::path rules;
    std::filesystem::path relations;
    std::filesystem::path schemas;
    std::filesystem::path gazetteer;
    std::filesystem::path inference;
    std::filesystem::path lexicon;
};

/// Parses every file and cross-validates them. All problems are collected
/// into one ConfigError, one `<file>:<line>: <message>` per line.
EngineConfig load_config(const ConfigSources &sources);
EngineConfig load_config(const ConfigPaths &paths);
/// Paths for the conventional file names inside a bundle directory.
ConfigPaths bundle_paths(const std::filesystem::path &dir);

std::string read_file(const std::filesystem::path &path);
void write_file(const std::filesystem::path &path, std::string_view contents);

} // namespace kad
