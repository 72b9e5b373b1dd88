#include "ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "errors.hpp"
#include "observables.hpp"
#include "trajectory.hpp"

namespace socsim {

namespace {

using nlohmann::json;

std::string path_file_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "traj_%05d.csv", index);
  return buf;
}

json diagnostics_json(const PathDiagnostics& d) {
  return json{{"pre_clamp_min", d.pre_clamp_min},
              {"clamped_mass", d.clamped_mass},
              {"max_newton_iters", d.max_newton_iters},
              {"total_cg_iters", d.total_cg_iters},
              {"x0_linf", d.x0_linf},
              {"x0_l2", d.x0_l2},
              {"final_scheme_gap", d.final_scheme_gap},
              {"wall_ms", d.wall_ms}};
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const size_t lo = static_cast<size_t>(pos);
  if (lo + 1 >= v.size()) return v.back();
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + (v[lo + 1] - v[lo]) * frac;
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

}  // namespace

int worker_count() {
  if (const char* env = std::getenv("SOCSIM_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

EnsembleResult run_ensemble(const RunConfig& cfg, const std::string& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + out_dir + "': " +
                        ec.message());

  EnsembleResult result;
  result.out_dir = out_dir;
  result.paths.resize(cfg.paths);

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= cfg.paths) return;
      PathEntry& entry = result.paths[i];
      entry.index = i;
      entry.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(i));
      entry.file = path_file_name(i);
      try {
        RunOutput out = run_path(cfg, entry.seed, i);
        write_trajectory_csv(out_dir + "/" + entry.file, out.records);
        entry.diag = out.diag;
        entry.status = "ok";
      } catch (const NumericalError& e) {
        entry.status = "numerical-error";
        entry.error = e.what();
      } catch (const std::exception& e) {
        entry.status = "error";
        entry.error = e.what();
      }
    }
  };

  const int n_workers = std::min(worker_count(), std::max(cfg.paths, 1));
  std::vector<std::thread> threads;
  threads.reserve(n_workers);
  for (int w = 0; w < n_workers; ++w) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  for (const auto& p : result.paths)
    if (p.status != "ok") ++result.n_failed;
  result.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();

  json manifest;
  manifest["version"] = kArtifactVersion;
  manifest["config_hash"] = config_hash(cfg);
  manifest["config_text"] = serialize_config(cfg);
  manifest["master_seed"] = cfg.seed;
  manifest["n_paths"] = cfg.paths;
  manifest["n_failed"] = result.n_failed;
  manifest["wall_ms"] = result.wall_ms;
  json paths = json::array();
  for (const auto& p : result.paths) {
    json e{{"index", p.index}, {"seed", p.seed},   {"status", p.status},
           {"error", p.error}, {"file", p.file}};
    e["diagnostics"] = p.status == "ok" ? diagnostics_json(p.diag) : json();
    paths.push_back(std::move(e));
  }
  manifest["paths"] = std::move(paths);

  result.manifest_file = out_dir + "/manifest.json";
  std::ofstream f(result.manifest_file, std::ios::binary);
  if (!f) throw IoError("cannot open '" + result.manifest_file + "' for writing");
  const std::string text = manifest.dump(2) + "\n";
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  f.flush();
  if (!f) throw IoError("write failed for '" + result.manifest_file + "'");
  return result;
}

ReportSummary build_report(const std::string& manifest_file) {
  std::ifstream f(manifest_file, std::ios::binary);
  if (!f) throw IoError("cannot open '" + manifest_file + "' for reading");
  json manifest;
  try {
    manifest = json::parse(f);
  } catch (const json::exception& e) {
    throw IoError("malformed manifest '" + manifest_file + "': " + e.what());
  }

  const std::string dir =
      std::filesystem::path(manifest_file).parent_path().string();
  const RunConfig cfg = parse_config(manifest.at("config_text").get<std::string>());
  const Problem problem = build_problem(cfg);

  ReportSummary s;
  s.t_end = cfg.t_end;
  s.domain_measure = problem.grid.domain_measure();
  s.compacts.resize(problem.compacts.size());
  for (size_t k = 0; k < problem.compacts.size(); ++k) {
    s.compacts[k].c_k = problem.compacts[k].c_k;
    s.compacts[k].c_k_half = 0.5 * problem.compacts[k].c_k;
  }

  std::vector<std::vector<ObservableRecord>> runs;
  for (const auto& p : manifest.at("paths")) {
    ++s.n_paths;
    if (p.at("status").get<std::string>() != "ok") {
      ++s.n_failed;
      continue;
    }
    ++s.n_ok;
    runs.push_back(read_trajectory_csv(
        dir.empty() ? p.at("file").get<std::string>()
                    : dir + "/" + p.at("file").get<std::string>()));
  }
  if (s.n_ok == 0)
    throw ConfigError({"report: no completed path in '" + manifest_file + "'"});

  const size_t n_records = runs.front().size();
  for (const auto& r : runs)
    if (r.size() != n_records || r.empty())
      throw IoError("report: trajectory record counts disagree");

  s.z0 = runs.front().front().Z;
  std::vector<double> z_final, mnc_final, sat, ext_times;
  int n_ext = 0;
  for (const auto& recs : runs) {
    z_final.push_back(recs.back().Z);
    mnc_final.push_back(recs.back().m_noncrit);
    if (auto t = extinction_time(recs, cfg.delta_crit)) {
      ++n_ext;
      ext_times.push_back(*t);
    }
    const double half = integrated_noncritical(recs, 0.5 * cfg.t_end);
    const double full = integrated_noncritical(recs, cfg.t_end);
    sat.push_back(half > 0.0 ? full / half : (full > 0.0 ? HUGE_VAL : 1.0));
  }
  for (double q : {0.10, 0.25, 0.50, 0.75, 0.90})
    s.z_final_quantiles.push_back(quantile(z_final, q));
  s.extinction_fraction = static_cast<double>(n_ext) / s.n_ok;
  s.median_extinction_time = n_ext > 0 ? median(ext_times) : -1.0;
  s.median_m_noncrit_final = median(mnc_final);
  s.saturation_ratio = median(sat);

  for (size_t k = 0; k < s.compacts.size(); ++k) {
    CompactSummary& ck = s.compacts[k];
    std::vector<double> rhos;
    for (const auto& recs : runs) {
      for (const auto& r : recs)
        if (r.mass_K.at(k) > 1.05 * r.bound_rhs.at(k)) ++ck.bound_violations;
      try {
        rhos.push_back(
            fit_decay_rate(recs, static_cast<int>(k), 0.0, cfg.t_end));
      } catch (const NumericalError&) {
        // Not enough positive localized mass to fit on this path.
      }
    }
    ck.fits = static_cast<int>(rhos.size());
    ck.median_fitted_rho = rhos.empty() ? 0.0 : median(rhos);
  }

  // Mean-mass monotonicity: flag record steps where the ensemble-mean mass
  // increases beyond twice the standard error of the increment.
  const int P = s.n_ok;
  s.record_steps = static_cast<int>(n_records) - 1;
  for (size_t i = 1; i < n_records; ++i) {
    double sum = 0.0, sumsq = 0.0;
    for (const auto& recs : runs) {
      const double d = recs[i].Z - recs[i - 1].Z;
      sum += d;
      sumsq += d * d;
    }
    const double mean = sum / P;
    double se = 0.0;
    if (P > 1) {
      const double var = std::max(0.0, (sumsq - sum * sum / P) / (P - 1));
      se = std::sqrt(var / P);
    }
    if (mean > 2.0 * se) ++s.mean_mass_increase_violations;
  }
  return s;
}

std::string render_report_table(const ReportSummary& s) {
  std::ostringstream out;
  out.precision(6);
  out << "ensemble report\n";
  out << "  paths:                  " << s.n_paths << " (ok " << s.n_ok
      << ", failed " << s.n_failed << ")\n";
  out << "  Z(0):                   " << s.z0 << "\n";
  out << "  Z(t_end) quantiles:     q10=" << s.z_final_quantiles[0]
      << " q25=" << s.z_final_quantiles[1] << " q50=" << s.z_final_quantiles[2]
      << " q75=" << s.z_final_quantiles[3] << " q90=" << s.z_final_quantiles[4]
      << "\n";
  out << "  extinction fraction:    " << s.extinction_fraction;
  if (s.median_extinction_time >= 0.0)
    out << " (median time " << s.median_extinction_time << ")";
  out << "\n";
  out << "  median m_noncrit(T):    " << s.median_m_noncrit_final
      << " of domain " << s.domain_measure << "\n";
  out << "  saturation I(T)/I(T/2): " << s.saturation_ratio << "\n";
  out << "  mean-mass increases:    " << s.mean_mass_increase_violations
      << " of " << s.record_steps << " record steps\n";
  for (size_t k = 0; k < s.compacts.size(); ++k) {
    const auto& c = s.compacts[k];
    out << "  compact K" << k << ": c_K=" << c.c_k << " c_K/2=" << c.c_k_half
        << " median fitted rho=" << c.median_fitted_rho << " (fits " << c.fits
        << ") bound violations=" << c.bound_violations << "\n";
  }
  return out.str();
}

std::string render_report_jsonl(const ReportSummary& s) {
  json summary{{"kind", "summary"},
               {"n_paths", s.n_paths},
               {"n_ok", s.n_ok},
               {"n_failed", s.n_failed},
               {"t_end", s.t_end},
               {"z0", s.z0},
               {"z_final_q10", s.z_final_quantiles[0]},
               {"z_final_q25", s.z_final_quantiles[1]},
               {"z_final_q50", s.z_final_quantiles[2]},
               {"z_final_q75", s.z_final_quantiles[3]},
               {"z_final_q90", s.z_final_quantiles[4]},
               {"extinction_fraction", s.extinction_fraction},
               {"median_extinction_time", s.median_extinction_time},
               {"median_m_noncrit_final", s.median_m_noncrit_final},
               {"domain_measure", s.domain_measure},
               {"saturation_ratio", s.saturation_ratio},
               {"mean_mass_increase_violations",
                s.mean_mass_increase_violations},
               {"record_steps", s.record_steps}};
  std::string out = summary.dump() + "\n";
  for (size_t k = 0; k < s.compacts.size(); ++k) {
    const auto& c = s.compacts[k];
    json line{{"kind", "compact"},
              {"index", k},
              {"c_k", c.c_k},
              {"c_k_half", c.c_k_half},
              {"median_fitted_rho", c.median_fitted_rho},
              {"fits", c.fits},
              {"bound_violations", c.bound_violations}};
    out += line.dump() + "\n";
  }
  return out;
}

ReportSummary write_report(const std::string& manifest_file) {
  ReportSummary s = build_report(manifest_file);
  const std::string dir =
      std::filesystem::path(manifest_file).parent_path().string();
  const std::string base = dir.empty() ? std::string() : dir + "/";
  for (const auto& [name, body] :
       {std::pair<std::string, std::string>{"summary.jsonl",
                                            render_report_jsonl(s)},
        {"summary.txt", render_report_table(s)}}) {
    std::ofstream f(base + name, std::ios::binary);
    if (!f) throw IoError("cannot open '" + base + name + "' for writing");
    f.write(body.data(), static_cast<std::streamsize>(body.size()));
    f.flush();
    if (!f) throw IoError("write failed for '" + base + name + "'");
  }
  return s;
}

}  // namespace socsim
