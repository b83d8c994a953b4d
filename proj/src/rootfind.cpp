#include "poolrisk/rootfind.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace poolrisk {

double RootSet::max_residual() const {
  double m = 0;
  for (double r : residuals) m = std::max(m, r);
  return m;
}

cd cpow(cd z, long long n) {
  // squaring keeps the per-term rounding at ~log2(n) ulps, which is what
  // makes degree-1000 evaluation viable near |z| = 1
  cd acc(1.0, 0.0);
  while (n > 0) {
    if (n & 1) {
      acc *= z;
      if (std::norm(acc) < 1e-300) return {0.0, 0.0};
    }
    n >>= 1;
    if (n) {
      z *= z;
      if (std::norm(z) < 1e-300) z = {0.0, 0.0};
    }
  }
  return acc;
}

double rpow(double z, long long n) {
  double acc = 1.0;
  while (n > 0) {
    if (n & 1) {
      acc *= z;
      if (std::abs(acc) < 1e-300) return 0.0;
    }
    n >>= 1;
    if (n) {
      z *= z;
      if (std::abs(z) < 1e-300) z = 0.0;
    }
  }
  return acc;
}

namespace {

constexpr double kPi = std::numbers::pi;

// lambda*x^hi + c_mid*x^mid + c_lo and its derivative; sparse form, only
// three terms, so no long Horner chain to lose digits in
struct TrinomialEval {
  double c_hi, c_mid, c_lo;
  long long e_hi, e_mid;
  void operator()(cd x, cd& p, cd& dp) const {
    const cd xm1 = cpow(x, e_mid - 1);
    const cd xh1 = xm1 * cpow(x, e_hi - e_mid);
    const cd xm = xm1 * x;
    const cd xh = xh1 * x;
    p = c_hi * xh + c_mid * xm + c_lo;
    dp = static_cast<double>(e_hi) * c_hi * xh1 +
         static_cast<double>(e_mid) * c_mid * xm1;
  }
};

struct HornerEval {
  const std::vector<double>* c;
  void operator()(cd x, cd& p, cd& dp) const {
    p = cd(0, 0);
    dp = cd(0, 0);
    for (int k = static_cast<int>(c->size()) - 1; k >= 0; --k) {
      dp = dp * x + p;
      p = p * x + (*c)[k];
    }
  }
};

// Ehrlich-Aberth simultaneous iteration, in-place updates. clamp_r keeps
// wandering iterates from overflowing high powers; all true roots lie
// well inside it for the polynomials this file builds. The repulsion sum
// floors every pairwise distance: an overflowed 1/d turns one iterate
// into NaN, and a single NaN silently disables the repulsion term for
// the whole population, which then collapses several iterates onto one
// root. Any iterate that still goes non-finite is reseeded on a golden-
// angle scatter so it keeps hunting instead of freezing.
template <class Eval>
void aberth(std::vector<cd>& z, const Eval& eval, int max_sweeps,
            double clamp_r) {
  const int n = static_cast<int>(z.size());
  unsigned reseed = 0;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double worst = 0;
    for (int i = 0; i < n; ++i) {
      cd p, dp;
      eval(z[i], p, dp);
      if (p == cd(0, 0)) continue;
      if (dp == cd(0, 0)) {
        z[i] += cd(1e-8, 1e-8) * (1.0 + std::abs(z[i]));
        worst = 1;
        continue;
      }
      const cd nw = p / dp;
      cd s(0, 0);
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        cd d = z[i] - z[j];
        const double floor_d = 1e-12 * (1.0 + std::abs(z[i]));
        if (!(std::abs(d) >= floor_d)) d = cd(floor_d, 0.0);
        s += 1.0 / d;
      }
      const cd denom = 1.0 - nw * s;
      const cd delta = (std::norm(denom) > 1e-60) ? nw / denom : nw;
      z[i] -= delta;
      if (!std::isfinite(z[i].real()) || !std::isfinite(z[i].imag())) {
        ++reseed;
        z[i] = std::polar(clamp_r * (0.45 + 0.07 * (reseed % 5)),
                          2.0 * kPi * 0.7548776662466927 * reseed);
        worst = 1;
        continue;
      }
      const double az = std::abs(z[i]);
      if (az > clamp_r) z[i] *= clamp_r / az;
      worst = std::max(worst, std::abs(delta) / (1.0 + std::abs(z[i])));
    }
    if (worst < 1e-14) return;
  }
}

template <class Eval>
void newton_polish(cd& x, const Eval& eval, int iters) {
  for (int it = 0; it < iters; ++it) {
    cd p, dp;
    eval(x, p, dp);
    if (dp == cd(0, 0)) return;
    const cd step = p / dp;
    x -= step;
    if (std::abs(step) <= 1e-16 * (1.0 + std::abs(x))) return;
  }
}

// real coefficients close the root set under conjugation, so a root whose
// mirror is absent means two iterates collapsed onto one root and another
// was never visited; the mirror is itself a guaranteed root, so move one
// member of the closest duplicate pair there and re-polish
template <class Eval>
void repair_conjugate_gaps(std::vector<cd>& roots, const Eval& eval,
                           double pair_tol) {
  const int n = static_cast<int>(roots.size());
  for (int pass = 0; pass < n; ++pass) {
    int gap = -1;
    for (int i = 0; i < n && gap < 0; ++i) {
      if (std::abs(roots[i].imag()) <=
          1e-10 * (1.0 + std::abs(roots[i].real())))
        continue;
      double bd = std::numeric_limits<double>::infinity();
      for (int j = 0; j < n; ++j)
        if (j != i)
          bd = std::min(bd, std::abs(roots[j] - std::conj(roots[i])));
      if (bd > pair_tol * (1.0 + std::abs(roots[i]))) gap = i;
    }
    if (gap < 0) return;
    int dj = -1;
    double dd = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double d = std::abs(roots[i] - roots[j]);
        if (d < dd) {
          dd = d;
          dj = j;
        }
      }
    if (dj < 0 || dd > 1e-8 * (1.0 + std::abs(roots[dj]))) return;
    roots[dj] = std::conj(roots[gap]);
    newton_polish(roots[dj], eval, 6);
  }
}

// snap near-real roots, then rewrite every complex root and its partner
// as an exact conjugate pair
void conjugate_canonicalize(std::vector<cd>& roots, double pair_tol) {
  for (cd& z : roots)
    if (std::abs(z.imag()) <= 1e-10 * (1.0 + std::abs(z.real())))
      z = cd(z.real(), 0.0);
  std::sort(roots.begin(), roots.end(), [](cd a, cd b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  std::vector<char> used(roots.size(), 0);
  for (size_t i = 0; i < roots.size(); ++i) {
    if (used[i] || roots[i].imag() == 0) continue;
    size_t best = SIZE_MAX;
    double bd = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < roots.size(); ++j) {
      if (used[j] || j == i || roots[j].imag() == 0) continue;
      const double d = std::abs(roots[j] - std::conj(roots[i]));
      if (d < bd) {
        bd = d;
        best = j;
      }
    }
    if (best == SIZE_MAX || bd > pair_tol * (1.0 + std::abs(roots[i])))
      throw numeric_error(
          "conjugate closure violated in root set near (" +
          std::to_string(roots[i].real()) + ", " +
          std::to_string(roots[i].imag()) + "), nearest partner " +
          (best == SIZE_MAX ? std::string("missing")
                            : "at distance " + std::to_string(bd)));
    cd m = 0.5 * (roots[i] + std::conj(roots[best]));
    if (m.imag() < 0) m = std::conj(m);
    roots[i] = (roots[i].imag() > 0) ? m : std::conj(m);
    roots[best] = std::conj(roots[i]);
    used[i] = 1;
    used[best] = 1;
  }
}

void check_distinct(const std::vector<cd>& roots, double tol) {
  for (size_t i = 0; i < roots.size(); ++i)
    for (size_t j = i + 1; j < roots.size(); ++j)
      if (std::abs(roots[i] - roots[j]) <
          tol * (1.0 + std::abs(roots[i])))
        throw numeric_error("coincident roots detected (multiplicity unsupported)");
}

std::vector<double> poly_mul(const std::vector<double>& a,
                             const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

}  // namespace

RootSet char_poly_roots(double lambda, double mu_d, double t, int b, int w,
                        const CharRootOptions& opt) {
  if (!(b > w && w >= 1)) throw invalid_params("need integer b > w >= 1");
  if (!(lambda > 0 && mu_d > 0 && t > 0))
    throw invalid_params("rates and horizon must be positive");

  const double Lam = lambda + mu_d + 1.0 / t;
  // only the exponents b, w, 0 carry coefficients, so with g = gcd(b, w)
  // the polynomial is a polynomial in x^g; solve the reduced problem and
  // expand each solution into its g-th roots
  const int g = std::gcd(b, w);
  const int rb = b / g, rw = w / g;

  TrinomialEval reduced{lambda, -Lam, mu_d, rb, rw};
  // Newton-polygon circles: rw roots near the inner radius, rb-rw near
  // the outer one; mu_d < Lam and lambda < Lam puts them either side of 1
  const double r_in = std::pow(mu_d / Lam, 1.0 / rw);
  const double r_out = std::pow(Lam / lambda, 1.0 / (rb - rw));
  std::vector<cd> y;
  y.reserve(rb);
  for (int k = 0; k < rw; ++k)
    y.push_back(std::polar(r_in, 2.0 * kPi * (k + 0.5) / rw + 0.2357));
  for (int k = 0; k < rb - rw; ++k)
    y.push_back(
        std::polar(r_out, 2.0 * kPi * (k + 0.5) / (rb - rw) + 0.1113));
  aberth(y, reduced, opt.max_sweeps, 4.0 * r_out);

  TrinomialEval full{lambda, -Lam, mu_d, b, w};
  std::vector<cd> all;
  all.reserve(b);
  for (const cd& yr : y) {
    const double r = std::pow(std::abs(yr), 1.0 / g);
    const double a0 = std::arg(yr) / g;
    for (int l = 0; l < g; ++l) {
      cd x = std::polar(r, a0 + 2.0 * kPi * l / g);
      newton_polish(x, full, 6);
      all.push_back(x);
    }
  }

  repair_conjugate_gaps(all, full, 1e-9);

  std::vector<cd> interior;
  for (const cd& x : all) {
    const double ax = std::abs(x);
    if (std::abs(ax - 1.0) <= opt.boundary_eps)
      throw boundary_root_error("root on the unit-circle ambiguity band");
    if (ax < 1.0) interior.push_back(x);
  }
  if (static_cast<int>(interior.size()) != w)
    throw root_count_error("expected " + std::to_string(w) +
                           " interior roots, found " +
                           std::to_string(interior.size()));

  conjugate_canonicalize(interior, 1e-9);
  check_distinct(interior, 1e-10);

  RootSet out;
  out.region = RootRegion::UnitDiskInterior;
  out.expected_count = w;
  out.roots = std::move(interior);
  out.residuals.reserve(w);
  for (const cd& x : out.roots) {
    cd p, dp;
    full(x, p, dp);
    const double rr = std::abs(p) / Lam;
    if (rr > opt.residual_tol)
      throw numeric_error("interior root residual " + std::to_string(rr) +
                          " above tolerance");
    out.residuals.push_back(rr);
  }
  return out;
}

std::vector<cd> aberth_all_roots(const std::vector<double>& coeffs,
                                 int max_sweeps) {
  std::vector<double> c = coeffs;
  while (!c.empty() && c.back() == 0.0) c.pop_back();
  if (c.size() < 2) throw invalid_params("polynomial degree must be >= 1");
  const int deg = static_cast<int>(c.size()) - 1;

  double cb = 0;
  for (int k = 0; k < deg; ++k) cb = std::max(cb, std::abs(c[k] / c[deg]));
  const double radius = 1.0 + cb;  // Cauchy bound

  std::vector<cd> z;
  z.reserve(deg);
  for (int k = 0; k < deg; ++k)
    z.push_back(std::polar(0.7 * radius, 2.0 * kPi * (k + 0.5) / deg + 0.3789));
  HornerEval eval{&c};
  aberth(z, eval, max_sweeps, 8.0 * radius);
  for (cd& x : z) newton_polish(x, eval, 6);
  return z;
}

RootSet lundberg_roots(double lambda, double mu_d, double t, const CombExp& W,
                       const CombExp& B, double pole_eps,
                       double residual_tol) {
  if (!(lambda > 0 && mu_d > 0 && t > 0))
    throw invalid_params("rates and horizon must be positive");
  const double Lam = lambda + mu_d + 1.0 / t;
  const int nw = W.n(), nb = B.n();

  // clear denominators of
  //   lambda*sum Ab_i beta_i/(beta_i+r) + mu_d*sum Aw_i alpha_i/(alpha_i-r) - Lam
  // over prod(beta_j+r)*prod(alpha_j-r)
  std::vector<double> acc(nw + nb + 1, 0.0);
  auto accumulate = [&acc](const std::vector<double>& p, double scale) {
    for (size_t k = 0; k < p.size(); ++k) acc[k] += scale * p[k];
  };
  auto prod_except = [](const std::vector<double>& rates, double sign,
                        int skip) {
    std::vector<double> p{1.0};
    for (size_t j = 0; j < rates.size(); ++j) {
      if (static_cast<int>(j) == skip) continue;
      p = poly_mul(p, {rates[j], sign});
    }
    return p;
  };
  const std::vector<double> prod_b = prod_except(B.rates, +1.0, -1);
  const std::vector<double> prod_a = prod_except(W.rates, -1.0, -1);
  for (int i = 0; i < nb; ++i)
    accumulate(poly_mul(prod_except(B.rates, +1.0, i), prod_a),
               lambda * B.weights[i] * B.rates[i]);
  for (int i = 0; i < nw; ++i)
    accumulate(poly_mul(prod_b, prod_except(W.rates, -1.0, i)),
               mu_d * W.weights[i] * W.rates[i]);
  accumulate(poly_mul(prod_b, prod_a), -Lam);

  std::vector<cd> roots = aberth_all_roots(acc);
  repair_conjugate_gaps(roots, HornerEval{&acc}, 1e-9);

  auto rational = [&](cd r) {
    cd v(0, 0);
    for (int i = 0; i < nb; ++i)
      v += lambda * B.weights[i] * B.rates[i] / (B.rates[i] + r);
    for (int i = 0; i < nw; ++i)
      v += mu_d * W.weights[i] * W.rates[i] / (W.rates[i] - r);
    return v - Lam;
  };

  // the cleared polynomial inherits cancellation error from poly_mul, so
  // finish each root on the rational function itself in extended precision;
  // downstream exp(-r u) terms amplify root error by |coef| * u
  using cld = std::complex<long double>;
  auto polish_rational = [&](cd r0) {
    cld r(r0.real(), r0.imag());
    const cld LamL(Lam, 0.0L);
    for (int it = 0; it < 40; ++it) {
      cld v = -LamL, dv(0.0L, 0.0L);
      for (int i = 0; i < nb; ++i) {
        const cld d = cld(B.rates[i], 0.0L) + r;
        const long double s = static_cast<long double>(lambda) *
                              B.weights[i] * B.rates[i];
        v += s / d;
        dv -= s / (d * d);
      }
      for (int i = 0; i < nw; ++i) {
        const cld d = cld(W.rates[i], 0.0L) - r;
        const long double s = static_cast<long double>(mu_d) * W.weights[i] *
                              W.rates[i];
        v += s / d;
        dv += s / (d * d);
      }
      if (dv == cld(0.0L, 0.0L)) break;
      const cld step = v / dv;
      r -= step;
      if (std::abs(step) <= 1e-19L * (1.0L + std::abs(r))) break;
    }
    return cd(static_cast<double>(r.real()), static_cast<double>(r.imag()));
  };

  std::vector<cd> pos;
  for (cd& r : roots) {
    r = polish_rational(r);
    for (double a : W.rates)
      if (std::abs(r - a) < pole_eps * std::max(1.0, a))
        throw pole_collision_error("Lundberg root collides with a density pole");
    if (r.real() > 0) pos.push_back(r);
  }
  if (static_cast<int>(pos.size()) != nw)
    throw root_count_error("expected " + std::to_string(nw) +
                           " Lundberg roots in the right half-plane, found " +
                           std::to_string(pos.size()));
  conjugate_canonicalize(pos, 1e-9);
  check_distinct(pos, 1e-10);

  RootSet out;
  out.region = RootRegion::RightHalfPlane;
  out.expected_count = nw;
  out.roots = std::move(pos);
  out.residuals.reserve(nw);
  for (const cd& r : out.roots) {
    const double rr = std::abs(rational(r)) / Lam;
    if (rr > residual_tol)
      throw numeric_error("Lundberg root residual " + std::to_string(rr) +
                          " above tolerance");
    out.residuals.push_back(rr);
  }
  return out;
}

std::vector<cd> cauchy_closed_form(const std::vector<double>& alphas,
                                   const std::vector<cd>& roots,
                                   const std::vector<cd>& rhs) {
  const int n = static_cast<int>(alphas.size());
  std::vector<cd> coef(n);
  for (int k = 0; k < n; ++k) {
    cd num(0, 0);
    for (int j = 0; j < n; ++j) {
      cd term = rhs[j];
      for (int h = 0; h < n; ++h) term *= (alphas[j] - roots[h]);
      for (int i = 0; i < n; ++i) {
        if (i == j) continue;
        term *= (roots[k] - alphas[i]) / (alphas[j] - alphas[i]);
      }
      num += term;
    }
    cd den(1, 0);
    for (int h = 0; h < n; ++h)
      if (h != k) den *= (roots[k] - roots[h]);
    coef[k] = num / den;
  }
  return coef;
}

std::vector<cd> cauchy_direct(const std::vector<double>& alphas,
                              const std::vector<cd>& roots,
                              const std::vector<cd>& rhs) {
  const int n = static_cast<int>(alphas.size());
  Eigen::MatrixXcd M(n, n);
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) {
    v(i) = rhs[i];
    for (int k = 0; k < n; ++k) M(i, k) = 1.0 / (alphas[i] - roots[k]);
  }
  Eigen::VectorXcd x = M.partialPivLu().solve(v);
  const double resid = (M * x - v).lpNorm<Eigen::Infinity>();
  const double scale = v.lpNorm<Eigen::Infinity>() + 1e-30;
  if (resid / scale > 1e-10)
    throw singular_system_error("Cauchy system solve residual too large");
  return {x.data(), x.data() + n};
}

CauchySolution solve_cauchy(const std::vector<double>& alphas,
                            const std::vector<cd>& roots,
                            const std::vector<cd>& rhs, double sep_tol) {
  if (alphas.size() != roots.size() || alphas.size() != rhs.size() ||
      alphas.empty())
    throw invalid_params("Cauchy system needs equal nonzero sizes");

  double min_sep = std::numeric_limits<double>::infinity();
  const size_t n = alphas.size();
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      min_sep = std::min(min_sep, std::abs(alphas[i] - alphas[j]));
      min_sep = std::min(min_sep, std::abs(roots[i] - roots[j]));
    }
    for (size_t j = 0; j < n; ++j)
      min_sep = std::min(min_sep, std::abs(alphas[i] - roots[j]));
  }

  CauchySolution out;
  if (min_sep < sep_tol) {
    // closed form amplifies node collisions; least-squares solve instead
    const int m = static_cast<int>(n);
    Eigen::MatrixXcd M(m, m);
    Eigen::VectorXcd v(m);
    for (int i = 0; i < m; ++i) {
      v(i) = rhs[i];
      for (int k = 0; k < m; ++k) M(i, k) = 1.0 / (alphas[i] - roots[k]);
    }
    Eigen::VectorXcd x = M.completeOrthogonalDecomposition().solve(v);
    out.coef.assign(x.data(), x.data() + m);
    out.direct_fallback = true;
    return out;
  }
  out.coef = cauchy_closed_form(alphas, roots, rhs);
  const std::vector<cd> direct = cauchy_direct(alphas, roots, rhs);
  double scale = 0;
  for (const cd& c : out.coef) scale = std::max(scale, std::abs(c));
  for (size_t k = 0; k < n; ++k) {
    if (std::abs(out.coef[k] - direct[k]) > 1e-8 * std::max(1.0, scale))
      throw numeric_error(
          "closed-form and direct Cauchy solutions disagree");
  }
  return out;
}

double find_root(const std::function<std::pair<double, double>(double)>& f_df,
                 double lo, double hi, double xtol) {
  auto [flo, dlo] = f_df(lo);
  auto [fhi, dhi] = f_df(hi);
  (void)dlo;
  (void)dhi;
  if (flo == 0) return lo;
  if (fhi == 0) return hi;
  if ((flo > 0) == (fhi > 0))
    throw no_root_error("bracket endpoints have the same sign");

  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    auto [f, df] = f_df(x);
    if (f == 0) return x;
    if ((f > 0) == (fhi > 0)) {
      hi = x;
      fhi = f;
    } else {
      lo = x;
      flo = f;
    }
    double xn = (df != 0) ? x - f / df : x;
    if (!(xn > std::min(lo, hi) && xn < std::max(lo, hi)))
      xn = 0.5 * (lo + hi);
    if (std::abs(hi - lo) <= xtol * (1.0 + std::abs(x))) return xn;
    x = xn;
  }
  return x;
}

}  // namespace poolrisk
