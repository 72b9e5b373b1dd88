#include "regularization.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace socsim {

// Band construction, written for r >= 0 with t = (r - lambda)/lambda in [0,1]
// and q = 1/lambda:
//
//   phi''(r) = (1/lambda) (1-t)^(q-1)
//   phi'(r)  = 1 + lambda (1 - (1-t)^q)
//   phi(r)   = lambda/2 + lambda [ (1+lambda) t
//                                  - lambda (1 - (1-t)^(q+1)) / (q+1) ]
//
// phi'' decreases continuously from 1/lambda (matching the core) to 0
// (matching the outer region), and its band integral is exactly lambda, which
// lifts phi' from 1 at r = lambda to 1+lambda at r = 2*lambda. Hence
// c_pp = 1 and sup|phi' - psi| = lambda (attained for |r| >= 2*lambda).

Regularization make_regularization(double lambda) {
  if (!(lambda > 0.0) || !(lambda < 1.0))
    throw std::invalid_argument("regularization parameter must lie in (0,1), got " +
                                std::to_string(lambda));
  return Regularization{lambda, 1.0, 1.0};
}

double psi_lambda(double r, const Regularization& reg) {
  if (r > reg.lambda) return 1.0;
  if (r < -reg.lambda) return -1.0;
  return r / reg.lambda;
}

double psi_lambda_prime(double r, const Regularization& reg) {
  return std::abs(r) <= reg.lambda ? 1.0 / reg.lambda : 0.0;
}

double phi_lambda(double r, const Regularization& reg) {
  const double lam = reg.lambda;
  const double a = std::abs(r);
  if (a <= lam) return a * a / (2.0 * lam);
  const double q = 1.0 / lam;
  if (a <= 2.0 * lam) {
    const double t = (a - lam) / lam;
    const double tail = (1.0 - std::pow(1.0 - t, q + 1.0)) / (q + 1.0);
    return 0.5 * lam + lam * ((1.0 + lam) * t - lam * tail);
  }
  const double at_2lam = 0.5 * lam + lam * ((1.0 + lam) - lam / (q + 1.0));
  return at_2lam + (1.0 + lam) * (a - 2.0 * lam);
}

double phi_lambda_prime(double r, const Regularization& reg) {
  const double lam = reg.lambda;
  const double a = std::abs(r);
  double d;
  if (a <= lam) {
    d = a / lam;
  } else if (a <= 2.0 * lam) {
    const double t = (a - lam) / lam;
    d = 1.0 + lam * (1.0 - std::pow(1.0 - t, 1.0 / lam));
  } else {
    d = 1.0 + lam;
  }
  return r < 0.0 ? -d : d;
}

double phi_lambda_second(double r, const Regularization& reg) {
  const double lam = reg.lambda;
  const double a = std::abs(r);
  if (a <= lam) return 1.0 / lam;
  if (a >= 2.0 * lam) return 0.0;
  const double t = (a - lam) / lam;
  return std::pow(1.0 - t, 1.0 / lam - 1.0) / lam;
}

double sign_selection(double r) {
  if (r > 0.0) return 1.0;
  if (r < 0.0) return -1.0;
  return 0.0;
}

}  // namespace socsim
