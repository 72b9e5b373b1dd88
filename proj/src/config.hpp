#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "profiles.hpp"

namespace socsim {

enum class Scheme { direct, transformed, both };

std::string scheme_name(Scheme s);
bool parse_scheme(const std::string& name, Scheme& out);

// Noise specification as configured (shapes are materialized later, against
// the grid). `uniform = true` selects the flat profile used by the
// global-decay mode; otherwise `modes` lists eigenmode indices (second entry
// ignored in 1-D).
struct NoiseSpec {
  bool uniform = false;
  std::vector<double> mu;
  std::vector<std::array<int, 2>> modes;

  bool operator==(const NoiseSpec&) const = default;
};

// Index boxes for the localized-decay diagnostics, as boundary insets in
// fractions of the extent. inner >= outer so the inner box is contained in
// the outer one.
struct CompactInsets {
  double inner = 0.25;
  double outer = 0.15;

  bool operator==(const CompactInsets&) const = default;
};

struct RunConfig {
  int dim = 1;
  std::array<int, 2> n{199, 1};
  std::array<double, 2> extent{1.0, 1.0};
  double lambda = 1e-3;
  double dt = 1e-4;
  double t_end = 1.0;
  int record_stride = 10;
  Scheme scheme = Scheme::direct;
  NoiseSpec noise;
  ProfileSpec x0{ProfileSpec::Kind::bump, 1.0, 0.25, 0.75, 0.1, {}};
  ProfileSpec xc{ProfileSpec::Kind::constant, 0.0, 0.25, 0.75, 0.1, {}};
  double delta_crit = 1e-6;  // threshold relative to the peak of x0 - xc
  std::vector<CompactInsets> compacts{{0.25, 0.15}};
  std::uint64_t seed = 1;
  int paths = 1;
  std::string out_dir = "out";
  int debug_inject_nan_path = -1;  // test hook: poison this path index

  bool operator==(const RunConfig&) const = default;
};

// Parses the key/value text (see README for the grammar), fills defaults,
// and validates every invariant. All violations are collected and thrown
// together as a ConfigError, each message carrying the source line where one
// applies.
RunConfig parse_config(const std::string& text);

// Reads the file then parses. Throws IoError if unreadable.
RunConfig load_config(const std::string& path);

// Canonical full-precision serialization; parse(serialize(c)) == c.
std::string serialize_config(const RunConfig& c);

// Applies a single key override, using dotted names for sectioned keys
// (e.g. "seed", "noise.mu", "x0.amplitude"). Re-validates the result.
void apply_override(RunConfig& c, const std::string& key,
                    const std::string& value);

// Re-runs semantic validation on an in-memory config (used after overrides).
void validate_config(const RunConfig& c);

// FNV-1a 64 over the canonical serialization, rendered as 16 hex digits.
std::string config_hash(const RunConfig& c);

}  // namespace socsim
