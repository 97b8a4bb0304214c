#pragma once

// Traffic-flow model with pressure rho^gamma, 0 < gamma < 1. The first
// family is genuinely nonlinear, the second is the contact family u = const.
// Along first-family waves u + rho^gamma is invariant, which gives every
// middle state in closed form.

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "wavefan/core.hpp"

namespace wavefan::ar {

inline std::pair<double, double> eigenvalues(const PrimState& s, double gamma) {
  return {detail::ar_lambda1(s, gamma), detail::ar_lambda2(s)};
}

// first-family curve through `left`, parameterized by density
inline double wave_curve_u(double rho, const PrimState& left, double gamma) {
  if (rho == left.rho) return left.u;
  return left.u - (std::pow(rho, gamma) - std::pow(left.rho, gamma));
}

// speed of the jump from `left` to the curve point at density rho; the
// degenerate jump collapses to the first characteristic speed
inline double shock_speed(double rho, const PrimState& left, double gamma) {
  if (rho == left.rho) return detail::ar_lambda1(left, gamma);
  const double dp = std::pow(rho, gamma) - std::pow(left.rho, gamma);
  return left.u - rho * dp / (rho - left.rho);
}

enum class Pattern { shock_contact, rarefaction_contact, rarefaction_vacuum };

struct Classification {
  Pattern pattern;
  double u_vacuum;  // right velocity at which the expansion empties out
};

inline void check_model(const RiemannData& d) {
  if (d.model != Model::ar)
    throw DomainError("traffic-model routine fed data for another model");
  validate(d);
}

inline Classification classify(const RiemannData& d) {
  check_model(d);
  const double u_vac = d.left.u + std::pow(d.left.rho, d.gamma);
  if (d.right.u < d.left.u) return {Pattern::shock_contact, u_vac};
  if (d.right.u < u_vac) return {Pattern::rarefaction_contact, u_vac};
  return {Pattern::rarefaction_vacuum, u_vac};
}

inline WaveFan solve_riemann(const RiemannData& d) {
  const Classification cls = classify(d);
  const PrimState L = d.left, R = d.right;
  const double g = d.gamma;
  const double pg = std::pow(L.rho, g);

  WaveFan fan;
  fan.data = d;

  switch (cls.pattern) {
    case Pattern::shock_contact: {
      const double rho_star = std::pow(pg + (L.u - R.u), 1.0 / g);
      if (!std::isfinite(rho_star))
        throw UnrepresentableState(
            "middle density exceeds double range; use the sharpening table");
      const PrimState mid{rho_star, R.u};
      const double s1 = R.u - L.rho * (L.u - R.u) / (rho_star - L.rho);
      fan.states = {L, mid, R};
      fan.waves = {{Shock{1, s1}, L, mid}, {Contact{R.u}, mid, R}};
      break;
    }
    case Pattern::rarefaction_contact: {
      if (R.u == L.u) {
        fan.states = {L, R};
        fan.waves = {{Contact{L.u}, L, R}};
        break;
      }
      const double pg_star = pg - (R.u - L.u);  // positive below the vacuum line
      const double rho_star = std::pow(pg_star, 1.0 / g);
      const PrimState mid{rho_star, R.u};
      fan.states = {L, mid, R};
      fan.waves = {{Rarefaction{1, L.u - g * pg, R.u - g * pg_star}, L, mid},
                   {Contact{R.u}, mid, R}};
      break;
    }
    case Pattern::rarefaction_vacuum: {
      const PrimState edge{0.0, cls.u_vacuum};
      const PrimState ahead{0.0, R.u};
      fan.states = {L, edge, ahead, R};
      fan.waves = {{Rarefaction{1, L.u - g * pg, cls.u_vacuum}, L, edge},
                   {VacuumZone{cls.u_vacuum, R.u}, edge, ahead},
                   {Contact{R.u}, ahead, R}};
      break;
    }
  }
  return fan;
}

// limiting carrier data as the pressure exponent vanishes: the two waves
// merge onto the ray xi = u_right and the strength parameter tends to
// 1 + [u]
inline DeltaLimitQuantities limit_quantities(const RiemannData& d) {
  check_model(d);
  if (!(d.left.u > d.right.u))
    throw NotDeltaRegime("vanishing-pressure carrier needs left u > right u");
  const double jump_m = d.right.rho * d.right.u - d.left.rho * d.left.u;
  const double jump_e = d.right.rho * d.right.u * d.right.u -
                        d.left.rho * d.left.u * d.left.u;
  DeltaLimitQuantities q;
  q.a = 1.0 + (d.left.u - d.right.u);
  q.sigma = d.right.u;
  q.w1_rate = d.left.rho * (d.left.u - d.right.u);
  q.w2_rate = q.sigma * jump_m - jump_e;
  return q;
}

struct ConvergenceRow {
  double gamma = 0.0;
  double rho_star = 0.0;      // +inf once the middle density leaves double range
  double log_rho_star = 0.0;  // natural log, always finite
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double mass_integral = 0.0;  // middle-region mass per unit time
  double dev_sigma1 = 0.0;     // sigma2 - sigma1, computed without cancellation
  double dev_mass = 0.0;       // mass_integral minus its limit
  double a_estimate = 0.0;     // rho_left^gamma + [u]
};

// Sharpening table toward the vanishing-pressure limit. Deviations from the
// limit shrink like rho_left/rho_star, far below double subtraction
// resolution for small exponents, so every column is formed in extended
// precision from logarithms rather than by differencing near-equal numbers.
inline std::vector<ConvergenceRow> convergence_table(
    const RiemannData& d, const std::vector<double>& gammas) {
  check_model(d);
  if (!(d.left.u > d.right.u))
    throw NotDeltaRegime("sharpening table needs left u > right u");
  for (double g : gammas)
    if (!(g > 0.0) || !(g < 1.0))
      throw GammaOutOfRange("table exponent outside (0,1)");

  const long double rl = d.left.rho;
  const long double du = static_cast<long double>(d.left.u) - d.right.u;
  const long double w1 = rl * du;

  std::vector<ConvergenceRow> rows;
  rows.reserve(gammas.size());
  for (double g : gammas) {
    const long double pg = std::pow(rl, static_cast<long double>(g));
    const long double log_rho_star = std::log(pg + du) / g;
    const long double ratio = std::exp(std::log(rl) - log_rho_star);  // rho_l/rho*
    const long double dev_sigma1 = du * ratio / (1.0L - ratio);
    const long double dev_mass = w1 * ratio / (1.0L - ratio);

    ConvergenceRow row;
    row.gamma = g;
    row.log_rho_star = static_cast<double>(log_rho_star);
    row.rho_star = static_cast<double>(std::exp(log_rho_star));
    row.sigma1 = static_cast<double>(d.right.u - dev_sigma1);
    row.sigma2 = d.right.u;
    row.mass_integral = static_cast<double>(w1 / (1.0L - ratio));
    row.dev_sigma1 = static_cast<double>(dev_sigma1);
    row.dev_mass = static_cast<double>(dev_mass);
    row.a_estimate = static_cast<double>(pg + du);
    rows.push_back(row);
  }
  return rows;
}

inline std::vector<double> default_gamma_grid() {
  return {0.6, 0.3, 0.1, 0.03, 0.01, 0.003, 0.001};
}

inline std::array<double, 2> conserved(const PrimState& s, double gamma) {
  const double pr = std::pow(s.rho, gamma + 1.0);
  return {s.rho, s.rho * s.u + pr};
}

inline std::array<double, 2> flux(const PrimState& s, double gamma) {
  const double pr = std::pow(s.rho, gamma + 1.0);
  return {s.rho * s.u, s.rho * s.u * s.u + s.u * pr};
}

// largest normalized jump-condition defect over the discontinuities of a
// fan; expansions and vacuum zones are continuous and carry no condition
inline double rh_residual_max(const WaveFan& fan) {
  if (fan.data.model != Model::ar)
    throw DomainError("jump-condition check fed a fan from another model");
  double worst = 0.0;
  for (const Wave& w : fan.waves) {
    double speed = 0.0;
    if (const Shock* s = std::get_if<Shock>(&w.shape))
      speed = s->speed;
    else if (const Contact* c = std::get_if<Contact>(&w.shape))
      speed = c->speed;
    else
      continue;
    const auto Ul = conserved(w.left_state, fan.data.gamma);
    const auto Ur = conserved(w.right_state, fan.data.gamma);
    const auto Fl = flux(w.left_state, fan.data.gamma);
    const auto Fr = flux(w.right_state, fan.data.gamma);
    for (int k = 0; k < 2; ++k) {
      const double defect = speed * (Ur[k] - Ul[k]) - (Fr[k] - Fl[k]);
      const double scale = std::max(
          {1.0, std::abs(speed) * (std::abs(Ul[k]) + std::abs(Ur[k])),
           std::abs(Fl[k]) + std::abs(Fr[k])});
      worst = std::max(worst, std::abs(defect) / scale);
    }
  }
  return worst;
}

}  // namespace wavefan::ar
