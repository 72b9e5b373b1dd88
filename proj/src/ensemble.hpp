#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "config.hpp"
#include "solver.hpp"

namespace socsim {

inline constexpr int kArtifactVersion = 1;

struct PathEntry {
  int index = 0;
  std::uint64_t seed = 0;
  std::string status;  // "ok" | "numerical-error" | "error"
  std::string error;   // empty when ok
  std::string file;    // trajectory file name relative to the out dir
  PathDiagnostics diag;
};

struct EnsembleResult {
  std::string out_dir;
  std::string manifest_file;  // absolute/relative path of manifest.json
  std::vector<PathEntry> paths;
  int n_failed = 0;
  double wall_ms = 0.0;
};

// Number of concurrent path workers: the SOCSIM_WORKERS environment variable
// when set (clamped to >= 1), otherwise the hardware concurrency.
int worker_count();

// Runs cfg.paths independent trajectories (seed_i = mix_seed(cfg.seed, i)),
// writes one CSV per path plus manifest.json into out_dir (created if
// absent). Path failures are recorded in the manifest without aborting the
// rest. Throws IoError if the directory or a file cannot be written.
EnsembleResult run_ensemble(const RunConfig& cfg, const std::string& out_dir);

// Aggregated statistics over the completed paths of an ensemble; every
// number is recomputed from the trajectory files, so a report is a pure
// function of the on-disk artifacts.
struct CompactSummary {
  double c_k = 0.0;
  double c_k_half = 0.0;
  double median_fitted_rho = 0.0;
  int fits = 0;                 // paths with enough positive records to fit
  long long bound_violations = 0;  // records with mass_K > 1.05 * bound_rhs
};

struct ReportSummary {
  int n_paths = 0;
  int n_ok = 0;
  int n_failed = 0;
  double t_end = 0.0;
  double z0 = 0.0;
  // Quantiles of Z(t_end) over completed paths: 0.10, 0.25, 0.50, 0.75, 0.90.
  std::vector<double> z_final_quantiles;
  double extinction_fraction = 0.0;   // extinction_time != none
  double median_extinction_time = 0.0;  // over paths with extinction, else -1
  double median_m_noncrit_final = 0.0;
  double domain_measure = 0.0;
  double saturation_ratio = 0.0;  // median I(t_end) / I(t_end/2)
  // Record indices where the ensemble mean of Z increases by more than two
  // standard errors of the increment, out of record_steps checked.
  int mean_mass_increase_violations = 0;
  int record_steps = 0;
  std::vector<CompactSummary> compacts;
};

// Loads manifest.json + the per-path CSVs and aggregates. Throws IoError on
// missing/corrupt files and ConfigError if no path completed.
ReportSummary build_report(const std::string& manifest_file);

std::string render_report_table(const ReportSummary& s);
std::string render_report_jsonl(const ReportSummary& s);

// Convenience: build_report + write summary.jsonl and summary.txt next to
// the manifest; returns the summary.
ReportSummary write_report(const std::string& manifest_file);

}  // namespace socsim
