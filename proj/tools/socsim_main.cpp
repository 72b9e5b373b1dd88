// Command-line front end. Talks to the simulator exclusively through the
// public C interface, exactly like an external client would.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "socsim.h"

namespace {

constexpr size_t kErrLen = 4096;

// 0 success, 1 configuration/usage error, 2 numerical failure, 3 I/O error.
int status_to_exit(socsim_status s) {
  switch (s) {
    case SOCSIM_OK:
      return 0;
    case SOCSIM_ERR_CONFIG:
      return 1;
    case SOCSIM_ERR_NUMERICAL:
      return 2;
    case SOCSIM_ERR_IO:
      return 3;
    default:
      return 1;
  }
}

struct ConfigHandle {
  socsim_config* h = nullptr;
  ~ConfigHandle() { socsim_config_free(h); }
};

struct OwnedStr {
  char* s = nullptr;
  ~OwnedStr() { socsim_string_free(s); }
};

int fail(socsim_status st, const char* err) {
  std::cerr << "error: " << err << "\n";
  return status_to_exit(st);
}

// Loads the config file and applies key=value overrides in order.
// Returns 0 and fills cfg on success, otherwise the process exit code.
int load_config(const std::string& file, const std::vector<std::string>& sets,
                ConfigHandle& cfg) {
  char err[kErrLen];
  socsim_status st = socsim_config_load(file.c_str(), &cfg.h, err, sizeof err);
  if (st != SOCSIM_OK) return fail(st, err);
  for (const std::string& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::cerr << "error: --set expects key=value, got '" << kv << "'\n";
      return 1;
    }
    st = socsim_config_set(cfg.h, kv.substr(0, eq).c_str(),
                           kv.substr(eq + 1).c_str(), err, sizeof err);
    if (st != SOCSIM_OK) return fail(st, err);
  }
  return 0;
}

// Applies one dedicated flag (wins over --set and the file).
int apply_flag(ConfigHandle& cfg, const char* key, const std::string& value) {
  char err[kErrLen];
  const socsim_status st =
      socsim_config_set(cfg.h, key, value.c_str(), err, sizeof err);
  return st == SOCSIM_OK ? 0 : fail(st, err);
}

int run_paths(const std::string& config_file,
              const std::vector<std::string>& sets, const std::string& seed,
              const std::string& paths, const std::string& out,
              bool single_path) {
  ConfigHandle cfg;
  int rc = load_config(config_file, sets, cfg);
  if (rc != 0) return rc;
  if (!seed.empty() && (rc = apply_flag(cfg, "seed", seed)) != 0) return rc;
  if (!paths.empty() && (rc = apply_flag(cfg, "paths", paths)) != 0) return rc;
  if (single_path && (rc = apply_flag(cfg, "paths", "1")) != 0) return rc;
  if (!out.empty() && (rc = apply_flag(cfg, "out_dir", out)) != 0) return rc;

  char err[kErrLen];
  OwnedStr manifest;
  const socsim_status st =
      socsim_ensemble_run(cfg.h, nullptr, &manifest.s, err, sizeof err);
  if (manifest.s) std::cout << "manifest: " << manifest.s << "\n";
  if (st != SOCSIM_OK) return fail(st, err);
  return 0;
}

int run_check(const std::string& config_file,
              const std::vector<std::string>& sets) {
  ConfigHandle cfg;
  const int rc = load_config(config_file, sets, cfg);
  if (rc != 0) return rc;
  char err[kErrLen];
  const socsim_status st = socsim_config_validate(cfg.h, err, sizeof err);
  if (st != SOCSIM_OK) return fail(st, err);
  OwnedStr hash{socsim_config_hash(cfg.h)};
  std::cout << "config ok (hash " << (hash.s ? hash.s : "?") << ")\n";
  return 0;
}

int run_report(const std::string& manifest_file) {
  char err[kErrLen];
  OwnedStr table;
  const socsim_status st =
      socsim_report(manifest_file.c_str(), &table.s, err, sizeof err);
  if (st != SOCSIM_OK) return fail(st, err);
  if (table.s) std::cout << table.s;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("socsim ") + socsim_version() +
               " - stochastic porous-media simulator"};
  app.require_subcommand(1);

  std::string config_file, manifest_file, seed, paths, out;
  std::vector<std::string> sets;

  const auto add_config_opts = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_file, "configuration file")
        ->required();
    cmd->add_option("--set", sets,
                    "override a config key, key=value (repeatable; dotted "
                    "names for sections, e.g. noise.mu)");
  };

  CLI::App* sim =
      app.add_subcommand("simulate", "run a single trajectory");
  add_config_opts(sim);
  sim->add_option("--seed", seed, "master seed override");
  sim->add_option("--out", out, "output directory override");

  CLI::App* ens =
      app.add_subcommand("ensemble", "run independent trajectories");
  add_config_opts(ens);
  ens->add_option("--seed", seed, "master seed override");
  ens->add_option("--paths", paths, "ensemble size override");
  ens->add_option("--out", out, "output directory override");

  CLI::App* rep =
      app.add_subcommand("report", "summarize a completed ensemble");
  rep->add_option("--manifest", manifest_file, "manifest.json of the run")
      ->required();

  CLI::App* chk =
      app.add_subcommand("check", "validate a configuration and exit");
  add_config_opts(chk);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // parse failures are usage errors
  }

  if (app.got_subcommand(sim))
    return run_paths(config_file, sets, seed, paths, out, true);
  if (app.got_subcommand(ens))
    return run_paths(config_file, sets, seed, paths, out, false);
  if (app.got_subcommand(rep)) return run_report(manifest_file);
  if (app.got_subcommand(chk)) return run_check(config_file, sets);
  return 1;
}
