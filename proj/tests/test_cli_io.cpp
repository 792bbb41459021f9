#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "levitodyn/config_io.hpp"
#include "levitodyn/constants.hpp"
#include "levitodyn/types.hpp"

using namespace levitodyn;
using nlohmann::json;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() /
         ("levitodyn_test_" + name);
}

const char* kFullConfig = R"json({
  "_comment": "reference setup",
  "particle": {
    "_note": "prolate spheroid",
    "rx": 50e-9, "ry": 40e-9, "rz": 40e-9,
    "density": 3500.0, "eps_r": 5.71
  },
  "beam": {"power": 0.1, "waist": 600e-9, "wavelength": 1550e-9},
  "gas": {"pressure": 1.333e-6, "temperature": 300.0,
          "molecular_mass": 4.81e-26, "accommodation": 0.9},
  "cavity": {"length": 0.5e-3, "finesse": 1e5, "wavelength": 1540e-9}
})json";

} // namespace

TEST_CASE("full configuration parses with every section") {
  const auto cfg = config::parse_config(kFullConfig);
  CHECK(cfg.particle.rx == doctest::Approx(50e-9));
  CHECK(cfg.particle.ry == doctest::Approx(40e-9));
  CHECK(cfg.particle.density == doctest::Approx(3500.0));
  CHECK(cfg.beam.waist == doctest::Approx(600e-9));
  CHECK(cfg.gas.accommodation == doctest::Approx(0.9));
  REQUIRE(cfg.cavity.has_value());
  CHECK(cfg.cavity->finesse == doctest::Approx(1e5));
}

TEST_CASE("optional sections and fields take defaults") {
  const auto cfg = config::parse_config(R"({
    "particle": {"rx": 50e-9, "ry": 25e-9, "density": 3500.0,
                 "eps_r": 5.71},
    "beam": {"power": 0.05, "waist": 600e-9, "wavelength": 1550e-9}
  })");
  CHECK(cfg.particle.rz == doctest::Approx(25e-9)); // rz defaults to ry
  CHECK_FALSE(cfg.cavity.has_value());
  // Missing gas section: air at rest, zero pressure.
  CHECK(cfg.gas.pressure == 0.0);
  CHECK(cfg.gas.temperature == doctest::Approx(300.0));
  CHECK(cfg.gas.molecular_mass ==
        doctest::Approx(constants::air_molecular_mass));

  const auto cfg2 = config::parse_config(R"({
    "particle": {"rx": 50e-9, "ry": 25e-9, "density": 3500.0,
                 "eps_r": 5.71},
    "beam": {"power": 0.05, "waist": 600e-9, "wavelength": 1550e-9},
    "gas": {"pressure": 133.0}
  })");
  CHECK(cfg2.gas.pressure == doctest::Approx(133.0));
  CHECK(cfg2.gas.accommodation == doctest::Approx(0.9));
}

TEST_CASE("unknown keys are rejected by name, comment keys are ignored") {
  const std::string bad = R"({
    "particle": {"rx": 50e-9, "ry": 40e-9, "density": 3500.0,
                 "eps_r": 5.71, "colour": "blue"},
    "beam": {"power": 0.1, "waist": 600e-9, "wavelength": 1550e-9}
  })";
  CHECK_THROWS_WITH_AS(config::parse_config(bad),
                       doctest::Contains("colour"), std::invalid_argument);

  const std::string bad_top = R"({
    "particle": {"rx": 50e-9, "ry": 40e-9, "density": 3500.0,
                 "eps_r": 5.71},
    "beam": {"power": 0.1, "waist": 600e-9, "wavelength": 1550e-9},
    "lazer": {}
  })";
  CHECK_THROWS_WITH_AS(config::parse_config(bad_top),
                       doctest::Contains("lazer"), std::invalid_argument);

  // Underscore-prefixed keys are comments at any level.
  CHECK_NOTHROW(config::parse_config(kFullConfig));
}

TEST_CASE("missing required fields and malformed JSON are reported") {
  CHECK_THROWS_AS(config::parse_config(R"({
    "particle": {"rx": 50e-9, "density": 3500.0, "eps_r": 5.71},
    "beam": {"power": 0.1, "waist": 600e-9, "wavelength": 1550e-9}
  })"),
                  std::invalid_argument); // ry missing
  CHECK_THROWS_AS(config::parse_config(R"({
    "beam": {"power": 0.1, "waist": 600e-9, "wavelength": 1550e-9}
  })"),
                  std::invalid_argument); // particle missing
  CHECK_THROWS_AS(config::parse_config(R"({
    "particle": {"rx": 50e-9, "ry": 40e-9, "density": 3500.0,
                 "eps_r": 5.71},
    "beam": {"power": "high", "waist": 600e-9, "wavelength": 1550e-9}
  })"),
                  std::invalid_argument); // wrong type
  CHECK_THROWS(config::parse_config("{ not json"));
  CHECK_THROWS_AS(config::parse_config(R"({
    "particle": {"rx": 50e-9, "ry": 40e-9, "density": 3500.0,
                 "eps_r": 5.71},
    "beam": {"power": 0.1, "waist": 600e-9, "wavelength": 1550e-9},
    "cavity": {"length": 0.5e-3}
  })"),
                  std::invalid_argument); // cavity section incomplete
}

TEST_CASE("configuration snapshot round-trips through JSON") {
  const auto cfg = config::parse_config(kFullConfig);
  const auto cfg2 = config::parse_config(config::config_to_json(cfg));
  CHECK(cfg2.particle.rx == cfg.particle.rx);
  CHECK(cfg2.particle.eps_r == cfg.particle.eps_r);
  CHECK(cfg2.beam.power == cfg.beam.power);
  CHECK(cfg2.gas.pressure == cfg.gas.pressure);
  REQUIRE(cfg2.cavity.has_value());
  CHECK(cfg2.cavity->length == cfg.cavity->length);
}

TEST_CASE("load_config reads files and reports missing ones") {
  const auto path = temp_file("config.json");
  {
    std::ofstream out(path);
    out << kFullConfig;
  }
  const auto cfg = config::load_config(path.string());
  CHECK(cfg.particle.rx == doctest::Approx(50e-9));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(config::load_config(path.string()), std::runtime_error);
}

TEST_CASE("scientific formatting keeps ten significant digits") {
  CHECK(config::format_sci(0.0) == "0.000000000e+00");
  CHECK(config::format_sci(1.0) == "1.000000000e+00");
  CHECK(config::format_sci(-2.99792458e8) == "-2.997924580e+08");
  CHECK(config::format_sci(1.26361912345e6) == "1.263619123e+06");
}

TEST_CASE("CSV files are CRLF RFC-4180 with lossless-enough values") {
  const auto path = temp_file("table.csv");
  config::write_csv(path.string(), {"a", "b"},
                    {{1.5, -2.25e-9}, {3.0, 4.0e22}});

  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  CHECK(text.find("a,b\r\n") == 0);
  CHECK(text.find("1.500000000e+00,-2.250000000e-09\r\n") !=
        std::string::npos);
  CHECK(text.back() == '\n');
  CHECK(text[text.size() - 2] == '\r');
  std::filesystem::remove(path);

  CHECK_THROWS_AS(config::write_csv("/nonexistent-dir/x.csv", {"a"}, {{1.0}}),
                  std::runtime_error);
  CHECK_THROWS_AS(config::write_csv(path.string(), {"a"}, {{1.0, 2.0}}),
                  std::invalid_argument); // ragged row
}

TEST_CASE("FNV-1a digests match the published test vectors") {
  CHECK(config::fnv1a_hex("") == "cbf29ce484222325");
  CHECK(config::fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(config::fnv1a_hex("foobar") == "85944171f73967e8");

  const auto path = temp_file("digest.bin");
  {
    std::ofstream out(path, std::ios::binary);
    out << "foobar";
  }
  CHECK(config::fnv1a_file_hex(path.string()) == "85944171f73967e8");
  std::filesystem::remove(path);
}

TEST_CASE("run manifests serialize every reproducibility field") {
  config::RunManifest manifest;
  manifest.tool_version = "0.1.0";
  manifest.command_line = "levitodyn freqs --out x.csv";
  manifest.seed = 42;
  manifest.config_json = R"({"beam":{}})";
  manifest.outputs.push_back({"x.csv", "85944171f73967e8", 123});

  const auto path = temp_file("manifest.json");
  config::write_manifest(path.string(), manifest);
  std::ifstream in(path);
  const auto doc = json::parse(in);
  CHECK(doc["tool_version"] == "0.1.0");
  CHECK(doc["command_line"] == "levitodyn freqs --out x.csv");
  CHECK(doc["seed"] == 42);
  CHECK(doc["outputs"][0]["path"] == "x.csv");
  CHECK(doc["outputs"][0]["fnv1a"] == "85944171f73967e8");
  CHECK(doc["outputs"][0]["bytes"] == 123);
  CHECK(doc.contains("config"));
  std::filesystem::remove(path);
}
