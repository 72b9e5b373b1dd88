#pragma once

#include <string>
#include <vector>

#include "grid.hpp"

namespace socsim {

// Named spatial profiles used for initial data and for the critical state.
//
//   scaled_e1  amplitude * first eigenmode (unit discrete L2 norm)
//   bump       amplitude * tensor product of 1-D plateaus with cosine ramps:
//              0 outside [lo,hi] (fractions of the extent), 1 on
//              [lo+ramp, hi-ramp], smooth half-cosine in between
//   constant   amplitude everywhere
//   custom     explicit per-point table (row-major, interior points)
struct ProfileSpec {
  enum class Kind { scaled_e1, bump, constant, custom };
  Kind kind = Kind::constant;
  double amplitude = 0.0;
  double lo = 0.25;
  double hi = 0.75;
  double ramp = 0.1;
  std::vector<double> table;

  bool operator==(const ProfileSpec&) const = default;
};

std::string profile_kind_name(ProfileSpec::Kind k);
bool parse_profile_kind(const std::string& name, ProfileSpec::Kind& out);

// Validates the profile parameters against the grid (bump geometry, table
// length) and samples it. Throws std::invalid_argument on malformed input.
Field build_profile(const Grid& g, const ProfileSpec& spec);

}  // namespace socsim
