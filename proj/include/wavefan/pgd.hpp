#pragma once
// Exact Riemann solution of the pressureless gas system. Diverging streams
// open a vacuum fan, equal speeds join through a contact, and converging
// streams concentrate mass on a delta shock whose Dirac weights grow
// linearly in time.

#include <cmath>

#include "wavefan/core.hpp"

namespace wavefan::pgd {

// delta-shock carrier: speed is the sqrt(rho)-weighted mean of the side
// velocities, which makes both generalized jump relations hold exactly
inline DeltaShockProfile delta_profile(const RiemannData& d) {
  if (d.model != Model::pgd)
    throw DomainError("pressureless carrier profile fed data for another model");
  validate(d);
  if (!(d.left.u > d.right.u))
    throw NotDeltaRegime("carrier needs converging flow (left u > right u)");
  const double rl = d.left.rho, ul = d.left.u;
  const double rr = d.right.rho, ur = d.right.u;
  const double sl = std::sqrt(rl), sr = std::sqrt(rr);
  const double sigma = (sl * ul + sr * ur) / (sl + sr);
  const double jump_m = rr * ur - rl * ul;
  const double jump_e = rr * ur * ur - rl * ul * ul;
  DeltaShockProfile p;
  p.sigma = sigma;
  p.w1_rate = std::sqrt(rl * rr) * (ul - ur);
  p.w2_rate = sigma * jump_m - jump_e;
  p.u_delta = sigma;
  return p;
}

inline WaveFan solve_riemann(const RiemannData& d) {
  if (d.model != Model::pgd)
    throw DomainError("pressureless solver fed data for another model");
  validate(d);
  WaveFan fan;
  fan.data = d;
  const PrimState L = d.left;
  const PrimState R = d.right;
  if (L.u < R.u) {
    // expansion: the two streams separate and vacuum fills the gap
    const PrimState vl{0.0, L.u};
    const PrimState vr{0.0, R.u};
    fan.states = {L, vl, vr, R};
    fan.waves = {{Contact{L.u}, L, vl},
                 {VacuumZone{L.u, R.u}, vl, vr},
                 {Contact{R.u}, vr, R}};
  } else if (L.u == R.u) {
    fan.states = {L, R};
    fan.waves = {{Contact{L.u}, L, R}};
  } else {
    fan.states = {L, R};
    fan.waves = {{DeltaShock{delta_profile(d)}, L, R}};
  }
  return fan;
}

struct GrhResidual {
  double r_position = 0.0;  // carrier slope against the velocity assigned on it
  double r_mass = 0.0;      // dw/dt against sigma [rho] - [rho u]
  double r_momentum = 0.0;  // d(w sigma)/dt against sigma [rho u] - [rho u^2]
  double max() const { return std::max({r_position, r_mass, r_momentum}); }
};

// absolute defects of the generalized jump relations for a straight-line
// carrier; all three vanish exactly on solver output
inline GrhResidual grh_residual(const DeltaShockProfile& p, const RiemannData& d) {
  validate(d);
  const double jump_r = d.right.rho - d.left.rho;
  const double jump_m = d.right.rho * d.right.u - d.left.rho * d.left.u;
  const double jump_e = d.right.rho * d.right.u * d.right.u - d.left.rho * d.left.u * d.left.u;
  GrhResidual r;
  r.r_position = std::abs(p.sigma - p.u_delta);
  r.r_mass = std::abs(p.w1_rate - (p.sigma * jump_r - jump_m));
  r.r_momentum = std::abs(p.sigma * p.w1_rate - (p.sigma * jump_m - jump_e));
  return r;
}

// strict overcompressivity: all characteristics run into the carrier
inline bool overcompressive(const DeltaShockProfile& p, const RiemannData& d) {
  return d.right.u < p.sigma && p.sigma < d.left.u;
}

}  // namespace wavefan::pgd
