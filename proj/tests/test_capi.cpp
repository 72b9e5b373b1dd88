#include <catch2/catch_amalgamated.hpp>

#include <cctype>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "socsim.h"

namespace fs = std::filesystem;

namespace {

const char* kGoodConfig =
    "n = 49\n"
    "dt = 1e-4\n"
    "t_end = 0.005\n"
    "record_stride = 5\n"
    "paths = 2\n"
    "seed = 7\n"
    "[noise]\n"
    "mu = 0.4, 0.2\n"
    "modes = 1, 2\n";

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

// Owning wrapper so failed REQUIREs don't leak handles.
struct Config {
  socsim_config* h = nullptr;
  ~Config() { socsim_config_free(h); }
};

struct CStr {
  char* s = nullptr;
  ~CStr() { socsim_string_free(s); }
};

}  // namespace

TEST_CASE("status codes are part of the binary interface") {
  CHECK(SOCSIM_OK == 0);
  CHECK(SOCSIM_ERR_CONFIG == 1);
  CHECK(SOCSIM_ERR_NUMERICAL == 2);
  CHECK(SOCSIM_ERR_IO == 3);
  CHECK(SOCSIM_ERR_INVALID == 4);
}

TEST_CASE("version string is available") {
  const char* v = socsim_version();
  REQUIRE(v != nullptr);
  CHECK(std::strcmp(v, "0.1.0") == 0);
}

TEST_CASE("parse accepts valid text and round-trips through serialize") {
  Config cfg;
  char err[256] = "untouched";
  REQUIRE(socsim_config_parse(kGoodConfig, &cfg.h, err, sizeof err) ==
          SOCSIM_OK);
  REQUIRE(cfg.h != nullptr);
  CHECK(socsim_config_validate(cfg.h, err, sizeof err) == SOCSIM_OK);

  CStr text{socsim_config_serialize(cfg.h)};
  REQUIRE(text.s != nullptr);
  CStr hash1{socsim_config_hash(cfg.h)};
  REQUIRE(hash1.s != nullptr);
  CHECK(std::strlen(hash1.s) == 16);
  for (const char* p = hash1.s; *p; ++p) CHECK(std::isxdigit(*p));

  Config again;
  REQUIRE(socsim_config_parse(text.s, &again.h, err, sizeof err) == SOCSIM_OK);
  CStr hash2{socsim_config_hash(again.h)};
  REQUIRE(hash2.s != nullptr);
  CHECK(std::strcmp(hash1.s, hash2.s) == 0);
}

TEST_CASE("parse failures report the violation and leave no handle") {
  Config cfg;
  char err[256] = {0};
  CHECK(socsim_config_parse("dt = -1\n", &cfg.h, err, sizeof err) ==
        SOCSIM_ERR_CONFIG);
  CHECK(cfg.h == nullptr);
  CHECK(std::string(err).find("dt") != std::string::npos);
}

TEST_CASE("error text is truncated to the buffer, NUL-terminated") {
  Config cfg;
  char err[8];
  std::memset(err, 'X', sizeof err);
  CHECK(socsim_config_parse("dt = -1\n", &cfg.h, err, sizeof err) ==
        SOCSIM_ERR_CONFIG);
  CHECK(err[7] == '\0');
  CHECK(std::strlen(err) == 7);
}

TEST_CASE("NULL arguments are rejected without crashing") {
  Config cfg;
  char err[128] = {0};
  CHECK(socsim_config_parse(nullptr, &cfg.h, err, sizeof err) ==
        SOCSIM_ERR_INVALID);
  CHECK(socsim_config_parse(kGoodConfig, nullptr, err, sizeof err) ==
        SOCSIM_ERR_INVALID);
  CHECK(socsim_config_load(nullptr, &cfg.h, err, sizeof err) ==
        SOCSIM_ERR_INVALID);
  CHECK(socsim_config_validate(nullptr, err, sizeof err) == SOCSIM_ERR_INVALID);
  CHECK(socsim_config_set(nullptr, "dt", "1e-4", err, sizeof err) ==
        SOCSIM_ERR_INVALID);
  CHECK(socsim_ensemble_run(nullptr, nullptr, nullptr, err, sizeof err) ==
        SOCSIM_ERR_INVALID);
  CHECK(socsim_report(nullptr, nullptr, err, sizeof err) == SOCSIM_ERR_INVALID);
  CHECK(socsim_config_serialize(nullptr) == nullptr);
  CHECK(socsim_config_hash(nullptr) == nullptr);
  socsim_config_free(nullptr);
  socsim_string_free(nullptr);
  // Errors must also be reportable with no buffer at all.
  CHECK(socsim_config_parse("dt = -1\n", &cfg.h, nullptr, 0) ==
        SOCSIM_ERR_CONFIG);
}

TEST_CASE("load reads a configuration file or reports an io error") {
  TempDir dir("socsim_capi_load");
  fs::create_directories(dir.path);
  const fs::path file = dir.path / "run.cfg";
  {
    std::ofstream f(file, std::ios::binary);
    f << kGoodConfig;
  }
  Config cfg;
  char err[256] = {0};
  REQUIRE(socsim_config_load(file.string().c_str(), &cfg.h, err, sizeof err) ==
          SOCSIM_OK);
  REQUIRE(cfg.h != nullptr);

  Config missing;
  CHECK(socsim_config_load((dir.path / "nope.cfg").string().c_str(),
                           &missing.h, err, sizeof err) == SOCSIM_ERR_IO);
  CHECK(missing.h == nullptr);
  CHECK(std::string(err).find("nope.cfg") != std::string::npos);
}

TEST_CASE("set overrides a key transactionally") {
  Config cfg;
  char err[256] = {0};
  REQUIRE(socsim_config_parse(kGoodConfig, &cfg.h, err, sizeof err) ==
          SOCSIM_OK);
  CStr before{socsim_config_hash(cfg.h)};

  REQUIRE(socsim_config_set(cfg.h, "seed", "99", err, sizeof err) == SOCSIM_OK);
  CStr text{socsim_config_serialize(cfg.h)};
  CHECK(std::string(text.s).find("seed = 99") != std::string::npos);
  REQUIRE(socsim_config_set(cfg.h, "dt", "5e-5", err, sizeof err) == SOCSIM_OK);

  // A rejected override must leave the configuration untouched.
  CStr mid{socsim_config_hash(cfg.h)};
  CHECK(socsim_config_set(cfg.h, "dt", "-1", err, sizeof err) ==
        SOCSIM_ERR_CONFIG);
  CHECK(std::string(err).find("dt") != std::string::npos);
  CHECK(socsim_config_set(cfg.h, "no_such_key", "1", err, sizeof err) ==
        SOCSIM_ERR_CONFIG);
  CHECK(std::string(err).find("no_such_key") != std::string::npos);
  CStr after{socsim_config_hash(cfg.h)};
  CHECK(std::strcmp(mid.s, after.s) == 0);
  CHECK(std::strcmp(before.s, after.s) != 0);

  REQUIRE(socsim_config_set(cfg.h, "noise.mu", "0.1", err, sizeof err) ==
          SOCSIM_ERR_CONFIG);  // mu and modes lengths must agree
  REQUIRE(socsim_config_set(cfg.h, "noise.modes", "3", err, sizeof err) ==
          SOCSIM_ERR_CONFIG);
}

TEST_CASE("ensemble run writes artifacts and report summarizes them") {
  TempDir dir("socsim_capi_run");
  Config cfg;
  char err[256] = {0};
  REQUIRE(socsim_config_parse(kGoodConfig, &cfg.h, err, sizeof err) ==
          SOCSIM_OK);

  CStr manifest;
  REQUIRE(socsim_ensemble_run(cfg.h, dir.path.string().c_str(), &manifest.s,
                              err, sizeof err) == SOCSIM_OK);
  REQUIRE(manifest.s != nullptr);
  CHECK(fs::exists(manifest.s));
  CHECK(fs::path(manifest.s).parent_path() == dir.path);

  CStr table;
  REQUIRE(socsim_report(manifest.s, &table.s, err, sizeof err) == SOCSIM_OK);
  REQUIRE(table.s != nullptr);
  CHECK(std::string(table.s).find("ensemble report") != std::string::npos);
  CHECK(fs::exists(dir.path / "summary.jsonl"));
  CHECK(fs::exists(dir.path / "summary.txt"));

  // table_out is optional.
  CHECK(socsim_report(manifest.s, nullptr, err, sizeof err) == SOCSIM_OK);
}

TEST_CASE("a failing path surfaces as a numerical error, artifacts intact") {
  TempDir dir("socsim_capi_poison");
  Config cfg;
  char err[256] = {0};
  std::string poisoned(kGoodConfig);
  poisoned.insert(poisoned.find("[noise]"), "debug_inject_nan_path = 1\n");
  REQUIRE(socsim_config_parse(poisoned.c_str(), &cfg.h, err, sizeof err) ==
          SOCSIM_OK);

  CStr manifest;
  CHECK(socsim_ensemble_run(cfg.h, dir.path.string().c_str(), &manifest.s, err,
                            sizeof err) == SOCSIM_ERR_NUMERICAL);
  const std::string msg(err);
  CHECK(msg.find("1 of 2 paths failed") != std::string::npos);
  CHECK(msg.find("path 1") != std::string::npos);
  // The manifest still exists and records the healthy path.
  REQUIRE(manifest.s != nullptr);
  CHECK(fs::exists(manifest.s));
  CStr table;
  CHECK(socsim_report(manifest.s, &table.s, err, sizeof err) == SOCSIM_OK);
  CHECK(std::string(table.s).find("(ok 1, failed 1)") != std::string::npos);
}

TEST_CASE("report on a missing manifest is an io error") {
  char err[256] = {0};
  CStr table;
  CHECK(socsim_report("/no/such/dir/manifest.json", &table.s, err,
                      sizeof err) == SOCSIM_ERR_IO);
  CHECK(table.s == nullptr);
}
