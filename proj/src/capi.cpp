#include "socsim.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "config.hpp"
#include "ensemble.hpp"
#include "errors.hpp"

struct socsim_config {
  socsim::RunConfig cfg;
};

namespace {

void fill_err(char* errbuf, size_t errbuf_len, const std::string& msg) {
  if (!errbuf || errbuf_len == 0) return;
  const size_t n = std::min(msg.size(), errbuf_len - 1);
  std::memcpy(errbuf, msg.data(), n);
  errbuf[n] = '\0';
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) return nullptr;
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

/* Runs fn, translating the library's exception taxonomy to status codes. */
template <typename Fn>
socsim_status guarded(char* errbuf, size_t errbuf_len, Fn&& fn) {
  try {
    return fn();
  } catch (const socsim::ConfigError& e) {
    fill_err(errbuf, errbuf_len, e.what());
    return SOCSIM_ERR_CONFIG;
  } catch (const socsim::NumericalError& e) {
    fill_err(errbuf, errbuf_len, e.what());
    return SOCSIM_ERR_NUMERICAL;
  } catch (const socsim::IoError& e) {
    fill_err(errbuf, errbuf_len, e.what());
    return SOCSIM_ERR_IO;
  } catch (const std::bad_alloc&) {
    fill_err(errbuf, errbuf_len, "out of memory");
    return SOCSIM_ERR_INVALID;
  } catch (const std::exception& e) {
    fill_err(errbuf, errbuf_len, e.what());
    return SOCSIM_ERR_INVALID;
  }
}

}  // namespace

extern "C" {

const char* socsim_version(void) { return "0.1.0"; }

socsim_status socsim_config_parse(const char* text, socsim_config** out,
                                  char* errbuf, size_t errbuf_len) {
  if (!text || !out) {
    fill_err(errbuf, errbuf_len, "text and out must be non-NULL");
    return SOCSIM_ERR_INVALID;
  }
  *out = nullptr;
  return guarded(errbuf, errbuf_len, [&] {
    auto cfg = socsim::parse_config(text);
    *out = new socsim_config{std::move(cfg)};
    return SOCSIM_OK;
  });
}

socsim_status socsim_config_load(const char* path, socsim_config** out,
                                 char* errbuf, size_t errbuf_len) {
  if (!path || !out) {
    fill_err(errbuf, errbuf_len, "path and out must be non-NULL");
    return SOCSIM_ERR_INVALID;
  }
  *out = nullptr;
  return guarded(errbuf, errbuf_len, [&] {
    auto cfg = socsim::load_config(path);
    *out = new socsim_config{std::move(cfg)};
    return SOCSIM_OK;
  });
}

socsim_status socsim_config_set(socsim_config* cfg, const char* key,
                                const char* value, char* errbuf,
                                size_t errbuf_len) {
  if (!cfg || !key || !value) {
    fill_err(errbuf, errbuf_len, "cfg, key and value must be non-NULL");
    return SOCSIM_ERR_INVALID;
  }
  return guarded(errbuf, errbuf_len, [&] {
    socsim::RunConfig next = cfg->cfg;
    socsim::apply_override(next, key, value);
    socsim::validate_config(next);
    cfg->cfg = std::move(next);
    return SOCSIM_OK;
  });
}

socsim_status socsim_config_validate(const socsim_config* cfg, char* errbuf,
                                     size_t errbuf_len) {
  if (!cfg) {
    fill_err(errbuf, errbuf_len, "cfg must be non-NULL");
    return SOCSIM_ERR_INVALID;
  }
  return guarded(errbuf, errbuf_len, [&] {
    socsim::validate_config(cfg->cfg);
    return SOCSIM_OK;
  });
}

char* socsim_config_serialize(const socsim_config* cfg) {
  if (!cfg) return nullptr;
  try {
    return dup_string(socsim::serialize_config(cfg->cfg));
  } catch (...) {
    return nullptr;
  }
}

char* socsim_config_hash(const socsim_config* cfg) {
  if (!cfg) return nullptr;
  try {
    return dup_string(socsim::config_hash(cfg->cfg));
  } catch (...) {
    return nullptr;
  }
}

void socsim_config_free(socsim_config* cfg) { delete cfg; }

socsim_status socsim_ensemble_run(const socsim_config* cfg,
                                  const char* out_dir, char** manifest_out,
                                  char* errbuf, size_t errbuf_len) {
  if (manifest_out) *manifest_out = nullptr;
  if (!cfg) {
    fill_err(errbuf, errbuf_len, "cfg must be non-NULL");
    return SOCSIM_ERR_INVALID;
  }
  return guarded(errbuf, errbuf_len, [&] {
    socsim::validate_config(cfg->cfg);
    const std::string dir = out_dir ? out_dir : cfg->cfg.out_dir;
    socsim::EnsembleResult res = socsim::run_ensemble(cfg->cfg, dir);
    if (manifest_out) *manifest_out = dup_string(res.manifest_file);
    if (res.n_failed > 0) {
      std::string first;
      for (const auto& p : res.paths)
        if (p.status != "ok") {
          first = "path " + std::to_string(p.index) + ": " + p.error;
          break;
        }
      fill_err(errbuf, errbuf_len,
               std::to_string(res.n_failed) + " of " +
                   std::to_string(res.paths.size()) +
                   " paths failed; first failure: " + first);
      return SOCSIM_ERR_NUMERICAL;
    }
    return SOCSIM_OK;
  });
}

socsim_status socsim_report(const char* manifest_file, char** table_out,
                            char* errbuf, size_t errbuf_len) {
  if (table_out) *table_out = nullptr;
  if (!manifest_file) {
    fill_err(errbuf, errbuf_len, "manifest_file must be non-NULL");
    return SOCSIM_ERR_INVALID;
  }
  return guarded(errbuf, errbuf_len, [&] {
    socsim::ReportSummary s = socsim::write_report(manifest_file);
    if (table_out) *table_out = dup_string(socsim::render_report_table(s));
    return SOCSIM_OK;
  });
}

void socsim_string_free(char* s) { std::free(s); }

}  // extern "C"
