#include "config.hpp"

#include <cctype>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "errors.hpp"
#include "grid.hpp"

namespace socsim {

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::direct: return "direct";
    case Scheme::transformed: return "transformed";
    case Scheme::both: return "both";
  }
  return "?";
}

bool parse_scheme(const std::string& name, Scheme& out) {
  if (name == "direct") out = Scheme::direct;
  else if (name == "transformed") out = Scheme::transformed;
  else if (name == "both") out = Scheme::both;
  else return false;
  return true;
}

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

bool parse_double_strict(const std::string& s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  char* end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size() && std::isfinite(out);
}

bool parse_int_strict(const std::string& s, long long& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  char* end = nullptr;
  out = std::strtoll(t.c_str(), &end, 10);
  return end == t.c_str() + t.size();
}

bool parse_u64_strict(const std::string& s, std::uint64_t& out) {
  const std::string t = trim(s);
  if (t.empty() || t[0] == '-') return false;
  char* end = nullptr;
  out = std::strtoull(t.c_str(), &end, 10);
  return end == t.c_str() + t.size();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Accumulates violations; each entry optionally prefixed with its source line.
struct Diag {
  std::vector<std::string> items;
  void add(int line, const std::string& msg) {
    items.push_back(line > 0 ? "line " + std::to_string(line) + ": " + msg
                             : msg);
  }
  bool empty() const { return items.empty(); }
};

struct KeyContext {
  RunConfig* c;
  Diag* diag;
  bool n_set = false;
  bool extent_set = false;
};

// Applies one key in the given section. Returns false on unknown key.
bool apply_key(KeyContext& ctx, const std::string& section,
               const std::string& key, const std::string& value, int line) {
  RunConfig& c = *ctx.c;
  Diag& d = *ctx.diag;

  auto want_double = [&](double& slot) {
    double v;
    if (parse_double_strict(value, v)) slot = v;
    else d.add(line, "key '" + key + "': expected a number, got '" + value + "'");
  };
  auto want_int = [&](int& slot) {
    long long v;
    if (parse_int_strict(value, v)) slot = static_cast<int>(v);
    else d.add(line, "key '" + key + "': expected an integer, got '" + value + "'");
  };
  auto want_double_list = [&](std::vector<double>& slot) {
    slot.clear();
    for (const std::string& part : split(value, ',')) {
      double v;
      if (parse_double_strict(part, v)) slot.push_back(v);
      else d.add(line, "key '" + key + "': expected numbers, got '" + part + "'");
    }
  };

  if (section.empty()) {
    if (key == "dim") { want_int(c.dim); return true; }
    if (key == "n") {
      const auto parts = split(value, ',');
      for (size_t i = 0; i < parts.size() && i < 2; ++i) {
        long long v;
        if (parse_int_strict(parts[i], v)) c.n[i] = static_cast<int>(v);
        else d.add(line, "key 'n': expected integers, got '" + parts[i] + "'");
      }
      if (parts.size() > 2) d.add(line, "key 'n': at most two axes");
      ctx.n_set = true;
      return true;
    }
    if (key == "extent") {
      const auto parts = split(value, ',');
      for (size_t i = 0; i < parts.size() && i < 2; ++i) {
        double v;
        if (parse_double_strict(parts[i], v)) c.extent[i] = v;
        else d.add(line, "key 'extent': expected numbers, got '" + parts[i] + "'");
      }
      if (parts.size() > 2) d.add(line, "key 'extent': at most two axes");
      ctx.extent_set = true;
      return true;
    }
    if (key == "lambda") { want_double(c.lambda); return true; }
    if (key == "dt") { want_double(c.dt); return true; }
    if (key == "t_end") { want_double(c.t_end); return true; }
    if (key == "record_stride") { want_int(c.record_stride); return true; }
    if (key == "scheme") {
      if (!parse_scheme(value, c.scheme))
        d.add(line, "scheme must be direct, transformed, or both; got '" +
                        value + "'");
      return true;
    }
    if (key == "delta_crit") { want_double(c.delta_crit); return true; }
    if (key == "seed") {
      std::uint64_t v;
      if (parse_u64_strict(value, v)) c.seed = v;
      else d.add(line, "key 'seed': expected a nonnegative integer");
      return true;
    }
    if (key == "paths") { want_int(c.paths); return true; }
    if (key == "out_dir") { c.out_dir = value; return true; }
    if (key == "debug_inject_nan_path") { want_int(c.debug_inject_nan_path); return true; }
    return false;
  }

  if (section == "noise") {
    if (key == "profile") {
      if (value == "eigen") c.noise.uniform = false;
      else if (value == "uniform") c.noise.uniform = true;
      else d.add(line, "noise profile must be eigen or uniform; got '" + value + "'");
      return true;
    }
    if (key == "mu") { want_double_list(c.noise.mu); return true; }
    if (key == "modes") {
      c.noise.modes.clear();
      for (const std::string& part : split(value, ',')) {
        std::array<int, 2> idx{1, 1};
        std::istringstream iss(part);
        int a = 0, b = 0;
        if (iss >> a) {
          idx[0] = a;
          if (iss >> b) idx[1] = b;
          std::string rest;
          if (iss >> rest) {
            d.add(line, "key 'modes': at most two indices per mode, got '" + part + "'");
            continue;
          }
          c.noise.modes.push_back(idx);
        } else {
          d.add(line, "key 'modes': expected indices, got '" + part + "'");
        }
      }
      return true;
    }
    return false;
  }

  if (section == "x0" || section == "xc") {
    ProfileSpec& p = (section == "x0") ? c.x0 : c.xc;
    if (key == "kind") {
      if (!parse_profile_kind(value, p.kind))
        d.add(line, "profile kind must be scaled_e1, bump, constant, or custom; got '" +
                        value + "'");
      return true;
    }
    if (key == "amplitude") { want_double(p.amplitude); return true; }
    if (key == "support") {
      const auto parts = split(value, ',');
      if (parts.size() != 2) {
        d.add(line, "key 'support': expected 'lo, hi'");
        return true;
      }
      double lo, hi;
      if (parse_double_strict(parts[0], lo) && parse_double_strict(parts[1], hi)) {
        p.lo = lo;
        p.hi = hi;
      } else {
        d.add(line, "key 'support': expected numbers");
      }
      return true;
    }
    if (key == "ramp") { want_double(p.ramp); return true; }
    if (key == "table") { want_double_list(p.table); return true; }
    return false;
  }

  if (section == "compacts") {
    if (key == "insets") {
      c.compacts.clear();
      for (const std::string& part : split(value, ',')) {
        const auto pair = split(part, ':');
        double inner, outer;
        if (pair.size() == 2 && parse_double_strict(pair[0], inner) &&
            parse_double_strict(pair[1], outer)) {
          c.compacts.push_back({inner, outer});
        } else {
          d.add(line, "key 'insets': expected 'inner:outer' pairs, got '" + part + "'");
        }
      }
      return true;
    }
    return false;
  }

  return false;
}

// Count of interior indices along one axis whose coordinate lies inside the
// inset box [inset*L, (1-inset)*L].
int axis_box_count(int n, double inset) {
  int count = 0;
  for (int i = 0; i < n; ++i) {
    const double s = static_cast<double>(i + 1) / (n + 1);
    if (s >= inset - 1e-12 && s <= 1.0 - inset + 1e-12) ++count;
  }
  return count;
}

void validate_semantics(const RunConfig& c, Diag& d) {
  if (c.dim != 1 && c.dim != 2) d.add(0, "dim must be 1 or 2");
  const int axes = (c.dim == 2) ? 2 : 1;
  for (int a = 0; a < axes && (c.dim == 1 || c.dim == 2); ++a) {
    if (c.n[a] < 3)
      d.add(0, "n must be >= 3 on every axis (axis " + std::to_string(a) + ")");
    if (!(c.extent[a] > 0.0))
      d.add(0, "extent must be > 0 on every axis (axis " + std::to_string(a) + ")");
  }
  if (!(c.lambda > 0.0 && c.lambda < 1.0)) d.add(0, "lambda out of (0,1)");
  if (!(c.dt > 0.0)) d.add(0, "dt must be > 0");
  if (!(c.t_end >= 0.0)) d.add(0, "t_end must be >= 0");
  if (c.record_stride < 1) d.add(0, "record_stride must be >= 1");
  if (!(c.delta_crit > 0.0)) d.add(0, "delta_crit must be > 0");
  if (c.paths < 1) d.add(0, "paths must be >= 1");
  if (c.out_dir.empty()) d.add(0, "out_dir must not be empty");

  if (!c.noise.uniform && c.noise.mu.size() != c.noise.modes.size())
    d.add(0, "noise: need one mode index entry per mu coefficient (got " +
                 std::to_string(c.noise.mu.size()) + " mu, " +
                 std::to_string(c.noise.modes.size()) + " modes)");
  for (const auto& m : c.noise.modes) {
    const int used = (c.dim == 2) ? 2 : 1;
    for (int a = 0; a < used; ++a)
      if (m[a] < 1) {
        d.add(0, "noise: mode indices must be >= 1");
        break;
      }
  }
  for (double mu : c.noise.mu)
    if (!std::isfinite(mu)) d.add(0, "noise: mu coefficients must be finite");

  if (c.compacts.empty()) d.add(0, "compacts: need at least one inset pair");
  for (const auto& ci : c.compacts) {
    if (!(ci.outer >= 0.0 && ci.inner >= ci.outer && ci.inner < 0.5)) {
      d.add(0, "compacts: insets must satisfy 0 <= outer <= inner < 0.5 (got " +
                   fmt(ci.inner) + ":" + fmt(ci.outer) + ")");
      continue;
    }
    if (c.dim == 1 || c.dim == 2) {
      const int axes2 = (c.dim == 2) ? 2 : 1;
      for (int a = 0; a < axes2; ++a)
        if (c.n[a] >= 3 && axis_box_count(c.n[a], ci.inner) == 0)
          d.add(0, "compacts: inner box is empty at inset " + fmt(ci.inner));
    }
  }

  // Grid-dependent checks (profiles and the ordering x0 >= xc) only make
  // sense once the shape parameters themselves are usable.
  if ((c.dim == 1 || c.dim == 2) && c.n[0] >= 3 && (c.dim == 1 || c.n[1] >= 3) &&
      c.extent[0] > 0.0 && (c.dim == 1 || c.extent[1] > 0.0)) {
    try {
      const Grid g = build_grid(c.dim, c.extent, c.n);
      Field x0, xc;
      bool shapes_ok = true;
      try {
        x0 = build_profile(g, c.x0);
      } catch (const std::invalid_argument& e) {
        d.add(0, std::string("x0: ") + e.what());
        shapes_ok = false;
      }
      try {
        xc = build_profile(g, c.xc);
      } catch (const std::invalid_argument& e) {
        d.add(0, std::string("xc: ") + e.what());
        shapes_ok = false;
      }
      if (shapes_ok) {
        for (int i = 0; i < g.size(); ++i)
          if (x0[i] < xc[i]) {
            d.add(0, "x0 below xc at grid index " + std::to_string(i) +
                         " (x0 = " + fmt(x0[i]) + ", xc = " + fmt(xc[i]) + ")");
            break;
          }
      }
    } catch (const std::invalid_argument& e) {
      d.add(0, e.what());
    }
  }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  Diag d;
  KeyContext ctx{&c, &d};

  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const size_t cut = raw.find_first_of("#;");
    std::string s = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') {
        d.add(line, "malformed section header '" + s + "'");
        continue;
      }
      section = trim(s.substr(1, s.size() - 2));
      if (section != "noise" && section != "x0" && section != "xc" &&
          section != "compacts")
        d.add(line, "unknown section '[" + section + "]'");
      continue;
    }
    const size_t eq = s.find('=');
    if (eq == std::string::npos) {
      d.add(line, "expected 'key = value', got '" + s + "'");
      continue;
    }
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) {
      d.add(line, "missing key before '='");
      continue;
    }
    if (section != "noise" && section != "x0" && section != "xc" &&
        section != "compacts" && !section.empty())
      continue;  // already reported the unknown section
    if (!apply_key(ctx, section, key, value, line))
      d.add(line, "unknown key '" + key + "'" +
                      (section.empty() ? "" : " in section [" + section + "]"));
  }

  // Per-dimension default resolution: 199 interior points in 1-D, 99x99 in 2-D.
  if (!ctx.n_set && c.dim == 2) c.n = {99, 99};
  if (c.dim == 1) {
    c.n[1] = 1;
    c.extent[1] = 1.0;
  }

  validate_semantics(c, d);
  if (!d.empty()) throw ConfigError(d.items);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream o;
  o << "dim = " << c.dim << "\n";
  o << "n = " << c.n[0];
  if (c.dim == 2) o << ", " << c.n[1];
  o << "\n";
  o << "extent = " << fmt(c.extent[0]);
  if (c.dim == 2) o << ", " << fmt(c.extent[1]);
  o << "\n";
  o << "lambda = " << fmt(c.lambda) << "\n";
  o << "dt = " << fmt(c.dt) << "\n";
  o << "t_end = " << fmt(c.t_end) << "\n";
  o << "record_stride = " << c.record_stride << "\n";
  o << "scheme = " << scheme_name(c.scheme) << "\n";
  o << "delta_crit = " << fmt(c.delta_crit) << "\n";
  o << "seed = " << c.seed << "\n";
  o << "paths = " << c.paths << "\n";
  o << "out_dir = " << c.out_dir << "\n";
  if (c.debug_inject_nan_path >= 0)
    o << "debug_inject_nan_path = " << c.debug_inject_nan_path << "\n";

  o << "\n[noise]\n";
  o << "profile = " << (c.noise.uniform ? "uniform" : "eigen") << "\n";
  if (!c.noise.mu.empty()) {
    o << "mu = ";
    for (size_t i = 0; i < c.noise.mu.size(); ++i)
      o << (i ? ", " : "") << fmt(c.noise.mu[i]);
    o << "\n";
  }
  if (!c.noise.modes.empty()) {
    o << "modes = ";
    for (size_t i = 0; i < c.noise.modes.size(); ++i) {
      o << (i ? ", " : "") << c.noise.modes[i][0];
      if (c.dim == 2) o << " " << c.noise.modes[i][1];
    }
    o << "\n";
  }

  auto emit_profile = [&](const char* name, const ProfileSpec& p) {
    o << "\n[" << name << "]\n";
    o << "kind = " << profile_kind_name(p.kind) << "\n";
    o << "amplitude = " << fmt(p.amplitude) << "\n";
    o << "support = " << fmt(p.lo) << ", " << fmt(p.hi) << "\n";
    o << "ramp = " << fmt(p.ramp) << "\n";
    if (!p.table.empty()) {
      o << "table = ";
      for (size_t i = 0; i < p.table.size(); ++i)
        o << (i ? ", " : "") << fmt(p.table[i]);
      o << "\n";
    }
  };
  emit_profile("x0", c.x0);
  emit_profile("xc", c.xc);

  o << "\n[compacts]\n";
  o << "insets = ";
  for (size_t i = 0; i < c.compacts.size(); ++i)
    o << (i ? ", " : "") << fmt(c.compacts[i].inner) << ":"
      << fmt(c.compacts[i].outer);
  o << "\n";
  return o.str();
}

void validate_config(const RunConfig& c) {
  Diag d;
  validate_semantics(c, d);
  if (!d.empty()) throw ConfigError(d.items);
}

void apply_override(RunConfig& c, const std::string& key,
                    const std::string& value) {
  std::string section, leaf = key;
  const size_t dot = key.find('.');
  if (dot != std::string::npos) {
    section = key.substr(0, dot);
    leaf = key.substr(dot + 1);
  }
  Diag d;
  KeyContext ctx{&c, &d};
  if (!apply_key(ctx, section, leaf, value, 0))
    d.add(0, "unknown key '" + key + "'");
  if (!d.empty()) throw ConfigError(d.items);
}

std::string config_hash(const RunConfig& c) {
  const std::string s = serialize_config(c);
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001B3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

}  // namespace socsim
