#include "poolrisk/pool_det.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace poolrisk {

namespace {

// columns are geometric in the roots; coefficients come out conjugate
// symmetric because the right-hand side is real
std::vector<cd> solve_boundary_system(const std::vector<cd>& roots,
                                      double lambda, double Lam,
                                      const std::vector<double>& rhs,
                                      int b, int w) {
  Eigen::MatrixXcd M(w, w);
  Eigen::VectorXcd v(w);
  for (int j = 0; j < w; ++j) v(j) = rhs[j];
  for (int i = 0; i < w; ++i) {
    const cd x = roots[i];
    const cd xbw = cpow(x, b - w);
    cd xp(1.0, 0.0);
    for (int j = 0; j < w; ++j) {
      M(j, i) = lambda * xbw * xp - Lam * xp;
      xp *= x;
    }
  }
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);
  Eigen::VectorXcd c = lu.solve(v);
  const double resid = (M * c - v).lpNorm<Eigen::Infinity>();
  const double scale = v.lpNorm<Eigen::Infinity>() + 1e-30;
  if (!(resid / scale < 1e-8))
    throw singular_system_error("boundary system residual " +
                                std::to_string(resid / scale));

  std::vector<cd> coef(c.data(), c.data() + w);
  // pin conjugate symmetry of the coefficients to the paired roots so
  // evaluation is exactly real
  for (int i = 0; i < w; ++i) {
    if (roots[i].imag() == 0) {
      coef[i] = cd(coef[i].real(), 0.0);
      continue;
    }
    if (roots[i].imag() < 0) continue;
    for (int j = 0; j < w; ++j) {
      if (j != i && roots[j] == std::conj(roots[i])) {
        const cd m = 0.5 * (coef[i] + std::conj(coef[j]));
        coef[i] = m;
        coef[j] = std::conj(m);
        break;
      }
    }
  }
  return coef;
}

DetPoolSolution build(const PoolParams& p, const RootSet& rs,
                      SolutionKind kind) {
  if (static_cast<int>(rs.roots.size()) != p.w ||
      rs.region != RootRegion::UnitDiskInterior)
    throw invalid_params("root set does not match pool parameters");

  DetPoolSolution sol;
  sol.kind = kind;
  sol.roots = rs.roots;
  sol.lambda = p.lambda;
  sol.mu_d = p.mu_d;
  sol.t = p.t;
  sol.b = p.b;
  sol.w = p.w;
  sol.d0 = p.lambda * p.b * p.t - (p.lambda + p.mu_d) * p.w * p.t;

  const double Lam = p.lambda + p.mu_d + 1.0 / p.t;
  std::vector<double> rhs(p.w);
  if (kind == SolutionKind::Value) {
    for (int j = 0; j < p.w; ++j)
      rhs[j] = j * p.mu_d + p.mu_d * sol.d0 - p.mu_d * p.w;
  } else {
    for (int j = 0; j < p.w; ++j) rhs[j] = -p.mu_d;
  }
  sol.coef = solve_boundary_system(sol.roots, p.lambda, Lam, rhs, p.b, p.w);
  return sol;
}

}  // namespace

double DetPoolSolution::at(long long u) const {
  if (u < 0) return kind == SolutionKind::Value ? 0.0 : 1.0;
  double s = 0;
  for (size_t i = 0; i < roots.size(); ++i) {
    const cd& x = roots[i];
    if (x.imag() > 0) {
      s += 2.0 * (coef[i] * cpow(x, u)).real();
    } else if (x.imag() == 0) {
      s += coef[i].real() * rpow(x.real(), u);
    }
    // negative-imag members are covered by their conjugate partners
  }
  if (kind == SolutionKind::Value) s += static_cast<double>(u) + d0;
  return s;
}

DetPoolSolution solve_value_det(const PoolParams& p,
                                const CharRootOptions& opt) {
  return build(p, char_poly_roots(p.lambda, p.mu_d, p.t, p.b, p.w, opt),
               SolutionKind::Value);
}

DetPoolSolution solve_ruin_det(const PoolParams& p,
                               const CharRootOptions& opt) {
  return build(p, char_poly_roots(p.lambda, p.mu_d, p.t, p.b, p.w, opt),
               SolutionKind::RuinProb);
}

DetPoolSolution solve_value_det(const PoolParams& p, const RootSet& roots) {
  return build(p, roots, SolutionKind::Value);
}

DetPoolSolution solve_ruin_det(const PoolParams& p, const RootSet& roots) {
  return build(p, roots, SolutionKind::RuinProb);
}

DetResidualReport recursion_residual(const DetPoolSolution& sol, long long u_lo,
                                     long long u_hi) {
  const double Lam = sol.lambda + sol.mu_d + 1.0 / sol.t;
  DetResidualReport rep;
  for (long long u = std::max<long long>(u_lo, 0); u <= u_hi; ++u) {
    const double su = sol.at(u);
    double r = sol.lambda * sol.at(u + sol.b - sol.w) - Lam * su +
               sol.mu_d * sol.at(u - sol.w);
    if (sol.kind == SolutionKind::Value) r += static_cast<double>(u) / sol.t;
    const double rel = std::abs(r) / (1.0 + std::abs(su));
    if (rel > rep.max_rel) {
      rep.max_rel = rel;
      rep.argmax = u;
    }
  }
  return rep;
}

long long smallest_u_below(const DetPoolSolution& sol, double level,
                           long long u_cap) {
  if (sol.at(0) < level) return 0;
  long long hi = 1;
  while (sol.at(hi) >= level) {
    hi *= 2;
    if (hi > u_cap)
      throw numeric_error("no crossing below the search cap");
  }
  long long lo = hi / 2;  // at(lo) >= level
  while (hi - lo > 1) {
    const long long mid = lo + (hi - lo) / 2;
    if (sol.at(mid) < level)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

}  // namespace poolrisk
