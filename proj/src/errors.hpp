#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace socsim {

// A linear or nonlinear solve failed to converge, or the state left the
// representable range (NaN/Inf). Carries the final residual and the
// simulation time where one applies (negative when not applicable).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, double residual = -1.0,
                          double t = -1.0)
      : std::runtime_error(what), residual_(residual), t_(t) {}

  double residual() const { return residual_; }
  double time() const { return t_; }

 private:
  double residual_;
  double t_;
};

// Configuration text failed to parse or validate. Carries the full list of
// violations so a user sees every problem in one pass.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations)
      : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& line : v) {
      if (!s.empty()) s += "\n";
      s += line;
    }
    return s.empty() ? std::string("invalid configuration") : s;
  }
  std::vector<std::string> violations_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace socsim
