#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "config.hpp"

namespace ruinvest::tool {

// FNV-1a over the file's bytes. Returns the 64-bit digest as 16 hex chars.
std::uint64_t fnv1a64_file(const std::string& path);
std::string to_hex(std::uint64_t value);

// Writes <out_dir>/manifest.json recording the tool version, the command,
// the fully resolved configuration, and a digest per data file. A directory
// holds exactly one manifest; rerunning a command rewrites it.
void write_manifest(const std::string& out_dir, const std::string& command,
                    const RunConfig& cfg, double wall_clock_seconds,
                    const std::vector<std::string>& output_files);

}  // namespace ruinvest::tool
