#include "profiles.hpp"

#include <cmath>
#include <stdexcept>

namespace socsim {

std::string profile_kind_name(ProfileSpec::Kind k) {
  switch (k) {
    case ProfileSpec::Kind::scaled_e1: return "scaled_e1";
    case ProfileSpec::Kind::bump: return "bump";
    case ProfileSpec::Kind::constant: return "constant";
    case ProfileSpec::Kind::custom: return "custom";
  }
  return "?";
}

bool parse_profile_kind(const std::string& name, ProfileSpec::Kind& out) {
  if (name == "scaled_e1") out = ProfileSpec::Kind::scaled_e1;
  else if (name == "bump") out = ProfileSpec::Kind::bump;
  else if (name == "constant") out = ProfileSpec::Kind::constant;
  else if (name == "custom") out = ProfileSpec::Kind::custom;
  else return false;
  return true;
}

namespace {

// 1-D plateau shape in the fractional coordinate s in (0,1).
double bump_shape(double s, double lo, double hi, double ramp) {
  if (s <= lo || s >= hi) return 0.0;
  if (s < lo + ramp) return 0.5 * (1.0 - std::cos(M_PI * (s - lo) / ramp));
  if (s > hi - ramp) return 0.5 * (1.0 - std::cos(M_PI * (hi - s) / ramp));
  return 1.0;
}

}  // namespace

Field build_profile(const Grid& g, const ProfileSpec& spec) {
  switch (spec.kind) {
    case ProfileSpec::Kind::scaled_e1: {
      const int k[2] = {1, 1};
      EigenMode m = eigenmode(g, std::span<const int>(k, g.dim));
      for (double& v : m.values) v *= spec.amplitude;
      return std::move(m.values);
    }
    case ProfileSpec::Kind::bump: {
      if (!(spec.lo >= 0.0) || !(spec.hi <= 1.0) || !(spec.lo < spec.hi))
        throw std::invalid_argument(
            "bump profile: need 0 <= lo < hi <= 1 (fractions of the extent)");
      if (!(spec.ramp > 0.0) || 2.0 * spec.ramp > spec.hi - spec.lo)
        throw std::invalid_argument(
            "bump profile: ramp must be positive with 2*ramp <= hi - lo");
      Field f(g.size());
      if (g.dim == 1) {
        for (int i = 0; i < g.n[0]; ++i)
          f[i] = spec.amplitude * bump_shape(g.coord(0, i) / g.extent[0],
                                             spec.lo, spec.hi, spec.ramp);
      } else {
        for (int j = 0; j < g.n[1]; ++j) {
          const double by = bump_shape(g.coord(1, j) / g.extent[1], spec.lo,
                                       spec.hi, spec.ramp);
          for (int i = 0; i < g.n[0]; ++i)
            f[j * g.n[0] + i] =
                spec.amplitude * by *
                bump_shape(g.coord(0, i) / g.extent[0], spec.lo, spec.hi,
                           spec.ramp);
        }
      }
      return f;
    }
    case ProfileSpec::Kind::constant:
      return Field(g.size(), spec.amplitude);
    case ProfileSpec::Kind::custom:
      if (static_cast<int>(spec.table.size()) != g.size())
        throw std::invalid_argument(
            "custom profile: table has " + std::to_string(spec.table.size()) +
            " entries, grid has " + std::to_string(g.size()) + " points");
      return spec.table;
  }
  throw std::invalid_argument("unknown profile kind");
}

}  // namespace socsim
