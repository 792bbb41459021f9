#include "levitodyn/config_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "levitodyn/version.hpp"

namespace levitodyn::config {

namespace {

using nlohmann::json;

/// Reject keys outside `known` (keys starting with '_' are comments).
void check_keys(const json& obj, const char* section,
                std::initializer_list<const char*> known) {
  for (const auto& [key, value] : obj.items()) {
    if (!key.empty() && key[0] == '_') continue;
    bool ok = false;
    for (const char* k : known)
      if (key == k) ok = true;
    if (!ok)
      throw std::invalid_argument("config: unknown key \"" + key +
                                  "\" in section \"" + section + "\"");
  }
}

double need_number(const json& obj, const char* section, const char* key) {
  if (!obj.contains(key))
    throw std::invalid_argument("config: section \"" + std::string(section) +
                                "\" is missing required key \"" + key + "\"");
  const auto& v = obj.at(key);
  if (!v.is_number())
    throw std::invalid_argument("config: key \"" + std::string(section) +
                                "." + key + "\" must be a number");
  return v.get<double>();
}

double number_or(const json& obj, const char* section, const char* key,
                 double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number())
    throw std::invalid_argument("config: key \"" + std::string(section) +
                                "." + key + "\" must be a number");
  return v.get<double>();
}

} // namespace

Config parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: JSON parse error: ") +
                                e.what());
  }
  if (!root.is_object())
    throw std::invalid_argument("config: top level must be an object");
  check_keys(root, "(top level)", {"particle", "beam", "gas", "cavity"});

  Config cfg;
  if (!root.contains("particle") || !root.contains("beam"))
    throw std::invalid_argument(
        "config: sections \"particle\" and \"beam\" are required");

  {
    const auto& p = root.at("particle");
    check_keys(p, "particle", {"rx", "ry", "rz", "density", "eps_r"});
    cfg.particle.rx = need_number(p, "particle", "rx");
    cfg.particle.ry = need_number(p, "particle", "ry");
    cfg.particle.rz = number_or(p, "particle", "rz", cfg.particle.ry);
    cfg.particle.density = need_number(p, "particle", "density");
    cfg.particle.eps_r = need_number(p, "particle", "eps_r");
  }
  {
    const auto& b = root.at("beam");
    check_keys(b, "beam", {"power", "waist", "wavelength"});
    cfg.beam.power = need_number(b, "beam", "power");
    cfg.beam.waist = need_number(b, "beam", "waist");
    cfg.beam.wavelength = need_number(b, "beam", "wavelength");
  }
  if (root.contains("gas")) {
    const auto& g = root.at("gas");
    check_keys(g, "gas",
               {"pressure", "temperature", "molecular_mass", "accommodation"});
    cfg.gas.pressure = need_number(g, "gas", "pressure");
    cfg.gas.temperature = number_or(g, "gas", "temperature", 300.0);
    cfg.gas.molecular_mass = number_or(g, "gas", "molecular_mass",
                                       constants::air_molecular_mass);
    cfg.gas.accommodation = number_or(g, "gas", "accommodation", 0.9);
  } else {
    cfg.gas = GasEnvironment::air(0.0, 300.0);
  }
  if (root.contains("cavity")) {
    const auto& c = root.at("cavity");
    check_keys(c, "cavity", {"length", "finesse", "wavelength"});
    Cavity cavity;
    cavity.length = need_number(c, "cavity", "length");
    cavity.finesse = need_number(c, "cavity", "finesse");
    cavity.wavelength = need_number(c, "cavity", "wavelength");
    cfg.cavity = cavity;
  }
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("config: cannot read \"" + path + "\"");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const Config& cfg) {
  json root;
  root["particle"] = {{"rx", cfg.particle.rx},
                      {"ry", cfg.particle.ry},
                      {"rz", cfg.particle.rz},
                      {"density", cfg.particle.density},
                      {"eps_r", cfg.particle.eps_r}};
  root["beam"] = {{"power", cfg.beam.power},
                  {"waist", cfg.beam.waist},
                  {"wavelength", cfg.beam.wavelength}};
  root["gas"] = {{"pressure", cfg.gas.pressure},
                 {"temperature", cfg.gas.temperature},
                 {"molecular_mass", cfg.gas.molecular_mass},
                 {"accommodation", cfg.gas.accommodation}};
  if (cfg.cavity)
    root["cavity"] = {{"length", cfg.cavity->length},
                      {"finesse", cfg.cavity->finesse},
                      {"wavelength", cfg.cavity->wavelength}};
  return root.dump(2);
}

std::string format_sci(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9e", value);
  return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  if (header.empty())
    throw std::invalid_argument("csv: header row is mandatory");
  for (const auto& row : rows)
    if (row.size() != header.size())
      throw std::invalid_argument(
          "csv: every row must match the header column count");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("csv: cannot write \"" + path + "\"");
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out << ',';
    out << header[i];
  }
  out << "\r\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << format_sci(row[i]);
    }
    out << "\r\n";
  }
  if (!out) throw std::runtime_error("csv: write failed for \"" + path + "\"");
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char b : bytes) {
    hash ^= b;
    hash *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

std::string fnv1a_file_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("digest: cannot read \"" + path + "\"");
  std::ostringstream ss;
  ss << in.rdbuf();
  return fnv1a_hex(ss.str());
}

void write_manifest(const std::string& path, const RunManifest& manifest) {
  json root;
  root["tool_version"] = manifest.tool_version.empty() ? levitodyn::version
                                                       : manifest.tool_version;
  root["command_line"] = manifest.command_line;
  root["seed"] = manifest.seed;
  root["config"] =
      manifest.config_json.empty() ? json(nullptr)
                                   : json::parse(manifest.config_json);
  json outs = json::array();
  for (const auto& o : manifest.outputs)
    outs.push_back({{"path", o.path}, {"fnv1a", o.fnv1a}, {"bytes", o.bytes}});
  root["outputs"] = outs;

  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("manifest: cannot write \"" + path + "\"");
  out << root.dump(2) << "\n";
}

} // namespace levitodyn::config
