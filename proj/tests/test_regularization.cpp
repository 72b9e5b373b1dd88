#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "regularization.hpp"

using namespace socsim;

TEST_CASE("ramp approximation: core slope, saturation, oddness") {
  auto reg = make_regularization(0.01);
  const double lam = reg.lambda;
  CHECK(psi_lambda(lam / 2, reg) == Catch::Approx(0.5));
  CHECK(psi_lambda(0.0, reg) == 0.0);
  CHECK(psi_lambda(-3 * lam, reg) == -1.0);
  CHECK(psi_lambda(3 * lam, reg) == 1.0);
  CHECK(psi_lambda(lam, reg) == Catch::Approx(1.0));
  CHECK(psi_lambda(-0.7, reg) == -psi_lambda(0.7, reg));
}

TEST_CASE("ramp approximation is Lipschitz with constant 1/lambda") {
  auto reg = make_regularization(0.05);
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> dist(-0.5, 0.5);
  for (int i = 0; i < 2000; ++i) {
    const double a = dist(rng), b = dist(rng);
    if (a == b) continue;
    const double slope =
        std::abs(psi_lambda(a, reg) - psi_lambda(b, reg)) / std::abs(a - b);
    CHECK(slope <= 1.0 / reg.lambda + 1e-9);
  }
}

TEST_CASE("ramp approximation is monotone") {
  auto reg = make_regularization(0.02);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double a = dist(rng), b = dist(rng);
    CHECK((psi_lambda(a, reg) - psi_lambda(b, reg)) * (a - b) >= 0.0);
  }
}

TEST_CASE("potential anchoring and core/outer derivative values") {
  for (double lam : {1e-1, 1e-2, 1e-3, 0.5}) {
    auto reg = make_regularization(lam);
    CHECK(phi_lambda(0.0, reg) == 0.0);
    CHECK(phi_lambda_prime(0.0, reg) == 0.0);
    CHECK(phi_lambda_prime(lam / 2, reg) == Catch::Approx(0.5));
    CHECK(phi_lambda_prime(3 * lam, reg) == Catch::Approx(1.0 + lam));
    CHECK(phi_lambda_prime(-3 * lam, reg) == Catch::Approx(-(1.0 + lam)));
    // Even function, odd derivative.
    CHECK(phi_lambda(0.7, reg) == Catch::Approx(phi_lambda(-0.7, reg)));
    CHECK(phi_lambda_prime(0.3, reg) == -phi_lambda_prime(-0.3, reg));
  }
}

TEST_CASE("derivative stays within 2*lambda of the ramp") {
  // Numeric sup over a dense grid spanning the band where they can differ.
  for (double lam : {1e-1, 1e-2, 1e-3}) {
    auto reg = make_regularization(lam);
    double sup = 0.0;
    const int n = 40001;
    for (int i = 0; i < n; ++i) {
      const double r = -4 * lam + 8 * lam * i / (n - 1);
      sup = std::max(sup,
                     std::abs(phi_lambda_prime(r, reg) - psi_lambda(r, reg)));
    }
    CHECK(sup <= 2 * lam + 1e-15);
    CHECK(sup <= reg.c_prime * lam + 1e-15);
    // The bound is tight: it is attained past the band.
    CHECK(sup == Catch::Approx(lam).epsilon(1e-9));
  }
}

TEST_CASE("second derivative is continuous, nonnegative, and bounded") {
  for (double lam : {1e-1, 1e-2, 1e-3, 0.5}) {
    auto reg = make_regularization(lam);
    const int n = 20001;
    double prev = phi_lambda_second(-3 * lam, reg);
    const double dr = 6 * lam / (n - 1);
    bool in_band_decreasing = true;
    for (int i = 0; i < n; ++i) {
      const double r = -3 * lam + dr * i;
      const double s = phi_lambda_second(r, reg);
      CHECK(s >= 0.0);
      CHECK(s <= reg.c_pp / lam + 1e-12);
      if (r > lam && r < 2 * lam && s > prev + 1e-12) in_band_decreasing = false;
      prev = s;
    }
    CHECK(in_band_decreasing);  // monotone bridge between 1/lambda and 0
    CHECK(phi_lambda_second(0.0, reg) == Catch::Approx(1.0 / lam));
    CHECK(phi_lambda_second(5 * lam, reg) == 0.0);

    // Continuity at the two seams: values from either side agree closely.
    const double eps = lam * 1e-10;
    CHECK(phi_lambda_second(lam + eps, reg) ==
          Catch::Approx(1.0 / lam).epsilon(1e-5));
    CHECK(phi_lambda_second(2 * lam - eps, reg) ==
          Catch::Approx(0.0).margin(1e-6 / lam));
    CHECK(phi_lambda_prime(lam + eps, reg) ==
          Catch::Approx(1.0).epsilon(1e-9));
    CHECK(phi_lambda_prime(2 * lam - eps, reg) ==
          Catch::Approx(1.0 + lam).epsilon(1e-9));
    CHECK(phi_lambda(lam + eps, reg) ==
          Catch::Approx(lam / 2).epsilon(1e-9));
  }
}

TEST_CASE("finite differences of the potential recover its derivatives") {
  auto reg = make_regularization(0.1);
  const double eps = 1e-6;
  for (double r : {0.03, 0.12, 0.17, 0.35, -0.08, -0.14}) {
    const double fd1 =
        (phi_lambda(r + eps, reg) - phi_lambda(r - eps, reg)) / (2 * eps);
    CHECK(fd1 == Catch::Approx(phi_lambda_prime(r, reg)).margin(1e-6));
    const double fd2 = (phi_lambda_prime(r + eps, reg) -
                        phi_lambda_prime(r - eps, reg)) /
                       (2 * eps);
    CHECK(fd2 == Catch::Approx(phi_lambda_second(r, reg)).margin(1e-4));
  }
}

TEST_CASE("derivative is bounded by 1 + lambda") {
  auto reg = make_regularization(0.05);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> dist(-10.0, 10.0);
  for (int i = 0; i < 5000; ++i) {
    const double r = dist(rng);
    CHECK(std::abs(phi_lambda_prime(r, reg)) <= 1.0 + reg.lambda + 1e-12);
    CHECK(std::abs(psi_lambda(r, reg)) <= 1.0);
  }
}

TEST_CASE("ramp approximation converges pointwise to the sign selection") {
  for (double r : {0.9, 0.05, -0.3, -0.004}) {
    double prev_err = 2.0;
    for (double lam : {1e-1, 1e-2, 1e-3, 1e-4}) {
      if (lam >= std::abs(r)) continue;
      auto reg = make_regularization(lam);
      const double err = std::abs(psi_lambda(r, reg) - sign_selection(r));
      CHECK(err <= prev_err);
      CHECK(err == 0.0);  // exact once lambda < |r|
      prev_err = err;
    }
  }
  CHECK(sign_selection(5.0) == 1.0);
  CHECK(sign_selection(0.0) == 0.0);
  CHECK(sign_selection(-0.1) == -1.0);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(make_regularization(0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_regularization(1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_regularization(-0.5), std::invalid_argument);
  CHECK_THROWS_AS(make_regularization(2.0), std::invalid_argument);
  CHECK_NOTHROW(make_regularization(0.999));
  CHECK_NOTHROW(make_regularization(1e-6));
}

TEST_CASE("newton slope matches the ramp kinks") {
  auto reg = make_regularization(0.01);
  CHECK(psi_lambda_prime(0.0, reg) == Catch::Approx(100.0));
  CHECK(psi_lambda_prime(0.009, reg) == Catch::Approx(100.0));
  CHECK(psi_lambda_prime(0.011, reg) == 0.0);
  CHECK(psi_lambda_prime(-0.5, reg) == 0.0);
}
