#include "doctest.h"
#include "poolrisk/model.hpp"
#include "poolrisk/rng.hpp"
#include "poolrisk/rootfind.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

using namespace poolrisk;

TEST_SUITE("rootfind") {

TEST_CASE("aberth finds the roots of a cubic") {
  // (x-1)(x-2)(x-3) = x^3 - 6x^2 + 11x - 6
  auto roots = aberth_all_roots({-6.0, 11.0, -6.0, 1.0});
  REQUIRE(roots.size() == 3);
  std::vector<double> re;
  for (auto z : roots) {
    CHECK(std::abs(z.imag()) < 1e-9);
    re.push_back(z.real());
  }
  std::sort(re.begin(), re.end());
  CHECK(re[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(re[1] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(re[2] == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("powers by squaring flush to zero below the underflow horizon") {
  CHECK(rpow(0.5, 10) == doctest::Approx(std::pow(0.5, 10)).epsilon(1e-15));
  CHECK(rpow(0.1, 400) == 0.0);
  cd z = cpow(cd(0.0, 0.5), 4);  // (i/2)^4 = 1/16
  CHECK(z.real() == doctest::Approx(0.0625).epsilon(1e-15));
  CHECK(std::abs(z.imag()) < 1e-18);
  CHECK(cpow(cd(0.1, 0.0), 400) == cd(0.0, 0.0));
  CHECK(rpow(0.7, 0) == 1.0);
}

TEST_CASE("guarded newton hits the bracketed root") {
  auto f = [](double x) { return std::make_pair(x * x - 2.0, 2.0 * x); };
  CHECK(find_root(f, 0.0, 2.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  // flat derivative away from the root still converges via bisection
  auto g = [](double x) { return std::make_pair(std::tanh(10.0 * (x - 0.7)), 0.0); };
  CHECK(find_root(g, 0.0, 1.0) == doctest::Approx(0.7).epsilon(1e-10));
}

TEST_CASE("quadratic characteristic roots, one payout unit") {
  // lambda x^2 - (lambda+mu_d+1/t) x + mu_d with lambda=mu_d=t=1:
  // x^2 - 3x + 1, interior root (3-sqrt(5))/2
  RootSet rs = char_poly_roots(1.0, 1.0, 1.0, 2, 1);
  REQUIRE(rs.roots.size() == 1);
  CHECK(rs.expected_count == 1);
  CHECK(rs.roots[0].real() == doctest::Approx(0.3819660112501051).epsilon(1e-12));
  CHECK(std::abs(rs.roots[0].imag()) < 1e-14);
  CHECK(rs.max_residual() < 1e-10);
}

TEST_CASE("interior root count matches the payout size") {
  RootSet rs = char_poly_roots(10.0, 90.0, 1.0, 100, 9);
  CHECK(rs.expected_count == 9);
  CHECK(rs.roots.size() == 9);
  for (auto z : rs.roots) CHECK(std::abs(z) < 1.0);
  CHECK(rs.max_residual() < 1e-8);
}

TEST_CASE("root count is stable under tiny parameter perturbations") {
  Rng rng(20240901ull, 42);
  for (int k = 0; k < 20; ++k) {
    const double lambda = 0.2 + 2.0 * rng.uniform();
    const double mu_d = 0.2 + 4.0 * rng.uniform();
    const double t = 2.0 + 40.0 * rng.uniform();
    const double bump = 1.0 + 1e-6 * (2.0 * rng.uniform() - 1.0);
    RootSet a = char_poly_roots(lambda, mu_d, t, 10, 3);
    RootSet b = char_poly_roots(lambda * bump, mu_d / bump, t * bump, 10, 3);
    CHECK(a.roots.size() == 3);
    CHECK(b.roots.size() == 3);
  }
}

TEST_CASE("near-unit roots trip the ambiguity band") {
  // with a long horizon one root approaches 1: x ~ 0.9990005 at t = 1e6
  CharRootOptions wide;
  wide.boundary_eps = 1.2e-3;
  CHECK_THROWS_AS(char_poly_roots(1.0, 1.0, 1e6, 2, 1, wide), boundary_root_error);
  RootSet rs = char_poly_roots(1.0, 1.0, 1e6, 2, 1);
  REQUIRE(rs.roots.size() == 1);
  CHECK(rs.roots[0].real() == doctest::Approx(0.9990005).epsilon(1e-6));
}

TEST_CASE("reference-scale characteristic roots are conjugate closed") {
  RootSet rs = char_poly_roots(0.6, 5.4, 336.0, 1000, 98);
  REQUIRE(rs.roots.size() == 98);
  CHECK(rs.max_residual() < 1e-8);
  for (auto z : rs.roots) {
    CHECK(std::abs(z) < 1.0);
    if (std::abs(z.imag()) > 0) {
      bool found = false;
      for (auto y : rs.roots)
        if (std::abs(y - std::conj(z)) < 1e-10) found = true;
      CHECK(found);
    }
  }
}

TEST_CASE("half-plane root count equals the payout term count") {
  Rng rng(20240901ull, 43);
  for (int k = 0; k < 50; ++k) {
    const int n = 1 + k % 3;
    std::vector<double> rates(n);
    double r = 0.1 + rng.uniform();
    for (int i = 0; i < n; ++i) {
      rates[i] = r;
      r += 0.1 + rng.uniform();
    }
    std::vector<double> weights;
    if (n == 1) {
      weights = {1.0};
    } else {
      // positive mixture
      double s = 0;
      for (int i = 0; i < n; ++i) {
        weights.push_back(0.1 + rng.uniform());
        s += weights.back();
      }
      for (double& wi : weights) wi /= s;
    }
    CombExp W = make_comb_exp(weights, rates);
    CombExp B = scale_comb_exp(W, 1.5 + 8.0 * rng.uniform());
    const double lambda = 0.2 + 2.0 * rng.uniform();
    const double mu_d = 0.2 + 2.0 * rng.uniform();
    const double t = 5.0 + 45.0 * rng.uniform();
    RootSet rs = lundberg_roots(lambda, mu_d, t, W, B);
    CHECK(rs.roots.size() == static_cast<size_t>(n));
    for (auto z : rs.roots) CHECK(z.real() > 0.0);
    CHECK(rs.max_residual() < 1e-8);
  }
}

TEST_CASE("cauchy system, hand-solved 2x2") {
  // coef0/(a_i - r_0) + coef1/(a_i - r_1) = 1 for a = {1,2}, r = {3,4}
  // has the unique solution (2, -6)
  std::vector<double> alphas{1.0, 2.0};
  std::vector<cd> roots{cd(3.0, 0.0), cd(4.0, 0.0)};
  std::vector<cd> rhs{cd(1.0, 0.0), cd(1.0, 0.0)};
  for (auto* f : {&cauchy_closed_form, &cauchy_direct}) {
    auto coef = (*f)(alphas, roots, rhs);
    REQUIRE(coef.size() == 2);
    CHECK(coef[0].real() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(coef[1].real() == doctest::Approx(-6.0).epsilon(1e-12));
    CHECK(std::abs(coef[0].imag()) < 1e-12);
    CHECK(std::abs(coef[1].imag()) < 1e-12);
  }
  CauchySolution s = solve_cauchy(alphas, roots, rhs);
  CHECK_FALSE(s.direct_fallback);
  CHECK(s.coef[0].real() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("cauchy solver falls back when nodes nearly collide") {
  std::vector<double> alphas{1.0, 1.0 + 1e-9};
  std::vector<cd> roots{cd(3.0, 0.0), cd(4.0, 0.0)};
  std::vector<cd> rhs{cd(1.0, 0.0), cd(1.0, 0.0)};
  CauchySolution s = solve_cauchy(alphas, roots, rhs);
  CHECK(s.direct_fallback);
  // the solution still satisfies the system
  for (int i = 0; i < 2; ++i) {
    cd lhs = s.coef[0] / (alphas[i] - roots[0]) + s.coef[1] / (alphas[i] - roots[1]);
    CHECK(std::abs(lhs - rhs[i]) < 1e-4);
  }
}

}  // TEST_SUITE
