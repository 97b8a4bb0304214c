#pragma once

// Perturbed traffic-flow model, pressure rho^gamma/gamma with 1 < gamma < 3.
// Both characteristic families are genuinely nonlinear; velocities stay
// nonnegative. Middle states come from a nested bisection: the outer loop
// runs over the middle density, the inner loops invert each family's
// compressive branch where no closed form applies.

#include <cmath>
#include <utility>
#include <vector>

#include "wavefan/core.hpp"
#include "wavefan/pgd.hpp"

namespace wavefan::par {

inline void check_model(const RiemannData& d) {
  if (d.model != Model::par)
    throw DomainError("perturbed-model routine fed data for another model");
  validate(d);
}

inline std::pair<double, double> eigenvalues(const PrimState& s, double gamma) {
  return {detail::par_lambda(s, gamma, 1), detail::par_lambda(s, gamma, 2)};
}

// expansion curve through `from`, parameterized by density; family 1 runs
// toward lower density, family 2 toward higher (or backward from a right
// state toward lower). Rejects points past the vacuum edge.
inline double rarefaction_u(double rho, const PrimState& from, double gamma,
                            int family) {
  const double s = detail::par_curve_sqrt_u(rho, from, gamma, family);
  if (s < 0.0)
    throw NegativeRoot("expansion curve traced past its vacuum edge");
  return s * s;
}

// eliminant of the two jump relations across a single discontinuity: zero
// exactly when (left, right) admit a common speed
inline double jump_defect(const PrimState& left, const PrimState& right,
                          double gamma) {
  const double rl = left.rho, ul = left.u, rr = right.rho, ur = right.u;
  const double q =
      (1.0 / gamma) *
      ((gamma - 1.0) * (1.0 / rl - 1.0 / rr) *
           (std::pow(rr, gamma) * ur - std::pow(rl, gamma) * ul) +
       (ul - ur) * (std::pow(rr, gamma - 1.0) - std::pow(rl, gamma - 1.0)));
  return (ur - ul) * (ur - ul) - q;
}

// signed residual along the compressive 1-branch through `from`: negative
// below the on-curve velocity, positive above it
inline double shock_locus_residual(double u, double rho, const PrimState& from,
                                   double gamma) {
  const double rl = from.rho, ul = from.u;
  const double q =
      (1.0 / gamma) *
      ((gamma - 1.0) * (1.0 / rl - 1.0 / rho) *
           (std::pow(rho, gamma) * u - std::pow(rl, gamma) * ul) +
       (ul - u) * (std::pow(rho, gamma - 1.0) - std::pow(rl, gamma - 1.0)));
  if (q < 0.0)
    throw NegativeRadicand("locus residual radicand negative");
  return (u - ul) + std::sqrt(q);
}

// compressive branches of the locus through `from` in closed form; family 1
// is the branch reached at higher density, family 2 at lower
inline double hugoniot_u(double rho, const PrimState& from, double gamma,
                         int family) {
  if (rho == from.rho) return from.u;
  const double dr = rho - from.rho;
  const double dpd = (std::pow(rho, gamma) - std::pow(from.rho, gamma)) / dr;
  const double A =
      (std::pow(rho, gamma) - (rho / gamma) * dpd) / (2.0 * rho * from.rho);
  const double B =
      (1.0 - 1.0 / gamma) * from.u / (rho * from.rho) * dpd;
  const double disc = A * A + B;
  if (disc < 0.0)
    throw NegativeRadicand("compressive curve discriminant negative");
  const double branch = (family == 1) ? -1.0 : 1.0;
  return from.u + dr * (A + branch * std::sqrt(disc));
}

// The first family is genuinely nonlinear only while c < (1+gamma) u, i.e.
// (gamma-1) rho^(gamma-1) < (1+gamma)^2 u: along a 1-curve with invariant
// K = sqrt(u) + sqrt(rho^(gamma-1)/(gamma-1)) the speed factors as
// (K-y)(K-gamma y), which turns around at y = (1+gamma)K/(2 gamma). The
// admissibility chain of a 1-jump is only guaranteed while both end states
// sit on the monotone side. The second family never degenerates.
inline bool genuinely_nonlinear_1(const PrimState& s, double gamma) {
  return (gamma - 1.0) * std::pow(s.rho, gamma - 1.0) <
         (1.0 + gamma) * (1.0 + gamma) * s.u;
}

// does the data land in the region where both waves are jumps
inline bool in_two_shock_region(const RiemannData& d) {
  check_model(d);
  if (d.right.rho == d.left.rho) return d.right.u < d.left.u;
  const int family = (d.right.rho > d.left.rho) ? 1 : 2;
  return d.right.u < hugoniot_u(d.right.rho, d.left, d.gamma, family);
}

enum class Pattern { r1_r2, s1_r2, r1_s2, s1_s2, r1_vacuum_r2 };

struct Solution {
  Pattern pattern;
  WaveFan fan;
  // set when the single-crossing assumption behind the outer bisection looks
  // violated near the computed middle density
  bool curve_warning = false;
};

namespace detail_par {

// velocity reachable from the left state at middle density rho along the
// 1-family (expansion for rho <= rho_l, jump above)
inline double trace_from_left(double rho, const PrimState& L, double gamma) {
  if (rho <= L.rho) {
    const double s = detail::par_curve_sqrt_u(rho, L, gamma, 1);
    return s * s;  // s >= sqrt(u_l) >= 0 on this side
  }
  const auto defect = [&](double u) {
    return jump_defect(L, {rho, u}, gamma);
  };
  double lo = L.u - 1.0;
  while (defect(lo) <= 0.0) {
    lo = L.u - 2.0 * (L.u - lo);
    if (lo < -1e12) throw NoConvergence("1-branch bracket ran away");
  }
  // defect(L.u) < 0 for rho > rho_l, defect(lo) > 0
  double hi = L.u;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (defect(mid) > 0.0 ? lo : hi) = mid;
    if (hi - lo <= 1e-14 * std::max(1.0, std::abs(hi))) break;
  }
  return 0.5 * (lo + hi);
}

// velocity reachable backward from the right state at middle density rho
// along the 2-family; signed square keeps the map monotone past the vacuum
// edge during bracketing
inline double trace_from_right(double rho, const PrimState& R, double gamma) {
  if (rho <= R.rho) {
    const double s = detail::par_curve_sqrt_u(rho, R, gamma, 2);
    return s * std::abs(s);
  }
  const auto defect = [&](double u) {
    return jump_defect({rho, u}, R, gamma);
  };
  double hi = R.u + 1.0;
  while (defect(hi) <= 0.0) {
    hi = R.u + 2.0 * (hi - R.u);
    if (hi > 1e12) throw NoConvergence("2-branch bracket ran away");
  }
  double lo = R.u;  // defect(R.u) < 0 for rho > rho_r
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (defect(mid) > 0.0 ? hi : lo) = mid;
    if (hi - lo <= 1e-14 * std::max(1.0, std::abs(hi))) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail_par

inline Solution solve_riemann(const RiemannData& d) {
  check_model(d);
  const PrimState L = d.left, R = d.right;
  const double g = d.gamma;

  Solution sol;
  sol.fan.data = d;

  if (L.rho == R.rho && L.u == R.u) {
    sol.pattern = Pattern::r1_r2;
    sol.fan.states = {L};
    return sol;
  }

  // vacuum pre-test in sqrt(u): the 1-expansion from the left tops out at
  // s1_0^2, the backward 2-expansion from the right bottoms out at s2_0^2
  const double s1_0 =
      std::sqrt(L.u) + std::sqrt(std::pow(L.rho, g - 1.0) / (g - 1.0));
  const double s2_0 =
      std::sqrt(R.u) - std::sqrt(std::pow(R.rho, g - 1.0) / (g - 1.0));
  if (s2_0 >= s1_0) {
    const double u_vl = s1_0 * s1_0;
    const double u_vr = s2_0 * s2_0;
    const PrimState edge_l{0.0, u_vl}, edge_r{0.0, u_vr};
    sol.pattern = Pattern::r1_vacuum_r2;
    sol.fan.states = {L, edge_l, edge_r, R};
    sol.fan.waves = {
        {Rarefaction{1, detail::par_lambda(L, g, 1), u_vl}, L, edge_l},
        {VacuumZone{u_vl, u_vr}, edge_l, edge_r},
        {Rarefaction{2, u_vr, detail::par_lambda(R, g, 2)}, edge_r, R}};
    return sol;
  }

  const auto t1 = [&](double rho) {
    return detail_par::trace_from_left(rho, L, g);
  };
  const auto t2 = [&](double rho) {
    return detail_par::trace_from_right(rho, R, g);
  };
  const auto phi = [&](double rho) { return t1(rho) - t2(rho); };

  // phi decreases in rho and is positive at 0+ whenever no vacuum opens
  double lo = std::min(L.rho, R.rho);
  while (phi(lo) <= 0.0) {
    lo *= 0.5;
    if (lo < 1e-300) throw NoConvergence("middle-density bracket underflow");
  }
  double hi = std::max(L.rho, R.rho);
  while (phi(hi) >= 0.0) {
    hi *= 2.0;
    if (hi > 1e18) throw NoConvergence("middle-density bracket overflow");
  }
  const double rho_star = detail::bisect(phi, lo, hi);
  const double u_star = 0.5 * (t1(rho_star) + t2(rho_star));
  const PrimState mid{rho_star, u_star};

  Wave w1, w2;
  const bool left_expands = rho_star <= L.rho;
  if (left_expands) {
    w1 = {Rarefaction{1, detail::par_lambda(L, g, 1),
                      detail::par_lambda(mid, g, 1)},
          L, mid};
  } else {
    const double sb1 = (rho_star * u_star - L.rho * L.u) / (rho_star - L.rho);
    w1 = {Shock{1, sb1}, L, mid};
  }
  const bool right_expands = rho_star <= R.rho;
  if (right_expands) {
    w2 = {Rarefaction{2, detail::par_lambda(mid, g, 2),
                      detail::par_lambda(R, g, 2)},
          mid, R};
  } else {
    const double sb2 = (R.rho * R.u - rho_star * u_star) / (R.rho - rho_star);
    w2 = {Shock{2, sb2}, mid, R};
  }
  sol.pattern = left_expands ? (right_expands ? Pattern::r1_r2 : Pattern::r1_s2)
                             : (right_expands ? Pattern::s1_r2 : Pattern::s1_s2);
  sol.fan.states = {L, mid, R};
  sol.fan.waves = {w1, w2};

  // single-crossing probe: the left trace should fall and the right trace
  // rise across the computed middle density
  const double delta = 1e-3 * rho_star;
  if (rho_star > delta) {
    const double slack = 1e-9 * std::max(1.0, std::abs(u_star));
    if (t1(rho_star - delta) < t1(rho_star + delta) - slack ||
        t2(rho_star - delta) > t2(rho_star + delta) + slack)
      sol.curve_warning = true;
  }
  return sol;
}

// limiting carrier data as gamma tends to 1: both jumps merge onto the ray
// moving at the density-weighted mean velocity
inline DeltaLimitQuantities limit_quantities(const RiemannData& d) {
  check_model(d);
  if (!(d.left.u > d.right.u))
    throw NotDeltaRegime("stiffening carrier needs left u > right u");
  const double sl = std::sqrt(d.left.rho), sr = std::sqrt(d.right.rho);
  const double sigma = (sl * d.left.u + sr * d.right.u) / (sl + sr);
  const double jump_r = d.right.rho - d.left.rho;
  const double jump_m = d.right.rho * d.right.u - d.left.rho * d.left.u;
  const double jump_e = d.right.rho * d.right.u * d.right.u -
                        d.left.rho * d.left.u * d.left.u;
  DeltaLimitQuantities q;
  const double spread = sl * sr / (sl + sr) * (d.left.u - d.right.u);
  q.a = spread * spread;
  q.sigma = sigma;
  q.w1_rate = sigma * jump_r - jump_m;
  q.w2_rate = sigma * jump_m - jump_e;
  return q;
}

struct ConvergenceRow {
  double gamma = 0.0;
  double rho_star = 0.0;
  double u_star = 0.0;
  double sigma_bar1 = 0.0;
  double sigma_bar2 = 0.0;
  double dev_sigma1 = 0.0;  // |sigma_bar1 - limiting speed|
  double dev_sigma2 = 0.0;
  double mass_integral = 0.0;  // middle-region mass per unit time
  double a_estimate = 0.0;     // (gamma-1) rho_*^gamma u_*
};

inline std::vector<ConvergenceRow> convergence_table(
    const RiemannData& d, const std::vector<double>& gammas) {
  check_model(d);
  for (double g : gammas)
    if (!(g > 1.0) || !(g < 3.0))
      throw GammaOutOfRange("table exponent outside (1,3)");
  if (!(d.left.u > d.right.u))
    throw NotDeltaRegime("sharpening table needs left u > right u");

  const double sl = std::sqrt(d.left.rho), sr = std::sqrt(d.right.rho);
  const double sigma = (sl * d.left.u + sr * d.right.u) / (sl + sr);

  std::vector<ConvergenceRow> rows;
  rows.reserve(gammas.size());
  for (double g : gammas) {
    RiemannData dg = d;
    dg.gamma = g;
    if (!in_two_shock_region(dg))
      throw RegionMismatch("data leaves the two-jump region at a table exponent");
    const Solution sol = solve_riemann(dg);
    const PrimState mid = sol.fan.states[1];
    ConvergenceRow row;
    row.gamma = g;
    row.rho_star = mid.rho;
    row.u_star = mid.u;
    row.sigma_bar1 = std::get<Shock>(sol.fan.waves[0].shape).speed;
    row.sigma_bar2 = std::get<Shock>(sol.fan.waves[1].shape).speed;
    row.dev_sigma1 = std::abs(row.sigma_bar1 - sigma);
    row.dev_sigma2 = std::abs(row.sigma_bar2 - sigma);
    row.mass_integral = mid.rho * (row.sigma_bar2 - row.sigma_bar1);
    row.a_estimate = (g - 1.0) * std::pow(mid.rho, g) * mid.u;
    rows.push_back(row);
  }
  return rows;
}

inline std::vector<double> default_gamma_grid() {
  return {1.4, 1.1, 1.04, 1.01, 1.001};
}

inline std::array<double, 2> conserved(const PrimState& s, double gamma) {
  const double pr = std::pow(s.rho, gamma) / gamma;
  return {s.rho, s.rho * s.u + pr};
}

inline std::array<double, 2> flux(const PrimState& s, double gamma) {
  const double pr = std::pow(s.rho, gamma);
  return {s.rho * s.u, s.rho * s.u * s.u + s.u * pr};
}

inline double rh_residual_max(const WaveFan& fan) {
  if (fan.data.model != Model::par)
    throw DomainError("jump-condition check fed a fan from another model");
  double worst = 0.0;
  for (const Wave& w : fan.waves) {
    const Shock* s = std::get_if<Shock>(&w.shape);
    if (!s) continue;
    const auto Ul = conserved(w.left_state, fan.data.gamma);
    const auto Ur = conserved(w.right_state, fan.data.gamma);
    const auto Fl = flux(w.left_state, fan.data.gamma);
    const auto Fr = flux(w.right_state, fan.data.gamma);
    for (int k = 0; k < 2; ++k) {
      const double defect = s->speed * (Ur[k] - Ul[k]) - (Fr[k] - Fl[k]);
      const double scale = std::max(
          {1.0, std::abs(s->speed) * (std::abs(Ul[k]) + std::abs(Ur[k])),
           std::abs(Fl[k]) + std::abs(Fr[k])});
      worst = std::max(worst, std::abs(defect) / scale);
    }
  }
  return worst;
}

}  // namespace wavefan::par
