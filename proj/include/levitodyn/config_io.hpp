#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "levitodyn/types.hpp"

// Configuration files and tabular/manifest output.
//
// Config format: JSON with top-level sections `particle`, `beam`, `gas`,
// `cavity`; every numeric field is SI. Unknown keys are rejected so typos
// fail loudly; keys starting with `_` are ignored everywhere and serve as
// in-file comments.
//
// CSV output: RFC 4180 (CRLF line endings), mandatory header row, `.`
// decimal separator, scientific notation with 10 significant digits.

namespace levitodyn::config {

struct Config {
  Particle particle;
  TrapBeam beam;
  GasEnvironment gas;
  std::optional<Cavity> cavity;
};

/// Parse a config from JSON text. Throws std::invalid_argument describing
/// the offending section/key on unknown keys, missing required fields, or
/// non-numeric values.
Config parse_config(const std::string& json_text);

/// Load and parse a config file. Throws std::runtime_error when the file
/// cannot be read.
Config load_config(const std::string& path);

/// Config back to canonical JSON text (used for manifest snapshots).
std::string config_to_json(const Config& config);

/// One value formatted for CSV: scientific, 10 significant digits.
std::string format_sci(double value);

/// Write an RFC-4180 CSV file (CRLF, header + numeric rows).
/// Throws std::runtime_error when the file cannot be written.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// FNV-1a 64-bit digest, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

/// Digest of a file's contents.
std::string fnv1a_file_hex(const std::string& path);

/// Everything needed to reproduce a run: inputs, seed, and digests of the
/// files the run wrote.
struct RunManifest {
  std::string tool_version;
  std::string command_line;
  std::uint64_t seed = 0;
  std::string config_json; ///< snapshot of the resolved configuration
  struct Output {
    std::string path;
    std::string fnv1a;
    std::uint64_t bytes = 0;
  };
  std::vector<Output> outputs;
};

/// Serialize the manifest as JSON to `path`.
void write_manifest(const std::string& path, const RunManifest& manifest);

} // namespace levitodyn::config
