#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "poolrisk/model.hpp"

namespace poolrisk {

using cd = std::complex<double>;

struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// interior/half-plane root count differs from the theory's count
struct root_count_error : numeric_error {
  using numeric_error::numeric_error;
};
// a root sits inside the unit-circle ambiguity band
struct boundary_root_error : numeric_error {
  using numeric_error::numeric_error;
};
struct singular_system_error : numeric_error {
  using numeric_error::numeric_error;
};
// a Lundberg root collides with a density pole
struct pole_collision_error : numeric_error {
  using numeric_error::numeric_error;
};
// bracketed search found no sign change
struct no_root_error : numeric_error {
  using numeric_error::numeric_error;
};

enum class RootRegion { UnitDiskInterior, RightHalfPlane };

struct RootSet {
  std::vector<cd> roots;
  std::vector<double> residuals;  // per root, relative to max coefficient
  RootRegion region = RootRegion::UnitDiskInterior;
  int expected_count = 0;
  double max_residual() const;
};

struct CharRootOptions {
  double boundary_eps = 1e-9;  // |x| within this band of 1 is ambiguous
  double residual_tol = 1e-8;  // relative to the largest coefficient
  int max_sweeps = 400;
};

// All roots of lambda*x^b - (lambda+mu_d+1/t)*x^w + mu_d strictly inside
// the unit disk. The count is exactly w for admissible parameters.
RootSet char_poly_roots(double lambda, double mu_d, double t, int b, int w,
                        const CharRootOptions& opt = {});

// Roots with positive real part of
//   lambda*E[exp(-r B)] + mu_d*E[exp(r W)] = lambda + mu_d + 1/t
// for combination-of-exponentials laws W (down jumps) and B (up jumps).
// The count equals the number of terms of W.
RootSet lundberg_roots(double lambda, double mu_d, double t, const CombExp& W,
                       const CombExp& B, double pole_eps = 1e-9,
                       double residual_tol = 1e-8);

// Coefficients of sum_k coef[k]/(alphas[i] - roots[k]) = rhs[i].
struct CauchySolution {
  std::vector<cd> coef;
  bool direct_fallback = false;  // nodes nearly coincide, closed form skipped
};

std::vector<cd> cauchy_closed_form(const std::vector<double>& alphas,
                                   const std::vector<cd>& roots,
                                   const std::vector<cd>& rhs);
std::vector<cd> cauchy_direct(const std::vector<double>& alphas,
                              const std::vector<cd>& roots,
                              const std::vector<cd>& rhs);
CauchySolution solve_cauchy(const std::vector<double>& alphas,
                            const std::vector<cd>& roots,
                            const std::vector<cd>& rhs,
                            double sep_tol = 1e-6);

// z^n by squaring; values below the underflow horizon flush to exact 0
cd cpow(cd z, long long n);
double rpow(double z, long long n);

// All complex roots of sum_k coeffs[k]*x^k (real coefficients, dense)
std::vector<cd> aberth_all_roots(const std::vector<double>& coeffs,
                                 int max_sweeps = 400);

// Safeguarded Newton on a bracket with a sign change. f_df returns
// (value, derivative). Newton steps that leave the bracket fall back to
// bisection; the bracket shrinks monotonically.
double find_root(const std::function<std::pair<double, double>(double)>& f_df,
                 double lo, double hi, double xtol = 1e-14);

}  // namespace poolrisk
