#pragma once

namespace socsim {

// Piecewise-smooth approximation family for the sign graph, indexed by a
// parameter lambda in (0,1). psi_lambda is the piecewise-linear ramp
// (r/lambda inside [-lambda,lambda], +-1 outside). phi_lambda is an even C^2
// potential whose derivative equals r/lambda on the core, +-(1+lambda) beyond
// 2*lambda, and bridges the band lambda <= |r| <= 2*lambda with a power
// profile chosen so phi'' is continuous, nonnegative, and exactly bounded by
// c_pp/lambda. sup_r |phi' - psi_lambda| = c_prime * lambda.
struct Regularization {
  double lambda;
  double c_pp;     // phi'' <= c_pp / lambda       (this construction: 1)
  double c_prime;  // sup|phi' - psi| <= c_prime * lambda  (this construction: 1)
};

// Validates 0 < lambda < 1.
Regularization make_regularization(double lambda);

// Ramp approximation: r/lambda for |r| <= lambda, sign(r) otherwise.
// Globally Lipschitz with constant 1/lambda.
double psi_lambda(double r, const Regularization& reg);

// Slope of psi_lambda (generalized derivative at the kinks): 1/lambda on the
// closed core, 0 outside. Used as the diagonal Jacobian in the Newton solve.
double psi_lambda_prime(double r, const Regularization& reg);

// Even potential with phi(0) = 0; see struct comment for the shape.
double phi_lambda(double r, const Regularization& reg);
double phi_lambda_prime(double r, const Regularization& reg);
double phi_lambda_second(double r, const Regularization& reg);

// sign(r) with the minimal-section convention sign(0) = 0. The analytic
// object is set-valued at 0; the solver never evaluates it there.
double sign_selection(double r);

}  // namespace socsim
