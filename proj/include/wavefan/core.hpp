#pragma once
// Wave-fan data model for self-similar Riemann solutions.
//
// A WaveFan is a left-to-right ordered list of waves separating constant
// states. Evaluation at a ray xi = x/t walks the fan and fills in
// rarefaction interiors, vacuum zones, and Dirac carriers. The same model
// carries solutions of the traffic system (model ar), its perturbed variant
// (model par), and the pressureless system (model pgd).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace wavefan {

// ---------------------------------------------------------------- errors --

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonPositiveDensity : Error { using Error::Error; };
struct GammaOutOfRange : Error { using Error::Error; };
struct NegativeVelocity : Error { using Error::Error; };
struct NotDeltaRegime : Error { using Error::Error; };
struct BranchError : Error { using Error::Error; };
struct NegativeRoot : Error { using Error::Error; };
struct NegativeRadicand : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct RegionMismatch : Error { using Error::Error; };
struct StructureError : Error { using Error::Error; };
struct UnstableBlowup : Error {
  explicit UnstableBlowup(const std::string& msg, double t = 0.0)
      : Error(msg), t_blowup(t) {}
  double t_blowup;  // simulation time reached when the state left double range
};
struct NonMonotone : Error { using Error::Error; };
struct UnrepresentableState : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };

// ---------------------------------------------------------- basic values --

enum class Model { ar, par, pgd };

inline const char* model_name(Model m) {
  switch (m) {
    case Model::ar: return "ar";
    case Model::par: return "par";
    default: return "pgd";
  }
}

struct PrimState {
  double rho = 0.0;
  double u = 0.0;
};

struct RiemannData {
  Model model = Model::pgd;
  double gamma = 0.0;  // pressure exponent; ignored for pgd
  PrimState left;
  PrimState right;
};

// gamma windows: the traffic model needs 0 < gamma < 1, the perturbed
// variant 1 < gamma < 3 and nonnegative velocities for real wave speeds
inline void validate(const RiemannData& d) {
  if (!std::isfinite(d.left.rho) || !std::isfinite(d.right.rho) ||
      !std::isfinite(d.left.u) || !std::isfinite(d.right.u))
    throw DomainError("riemann data: non-finite state");
  if (!(d.left.rho > 0.0) || !(d.right.rho > 0.0))
    throw NonPositiveDensity("riemann data: side densities must be positive");
  if (d.model == Model::ar && !(d.gamma > 0.0 && d.gamma < 1.0))
    throw GammaOutOfRange("traffic model: gamma must lie in (0,1)");
  if (d.model == Model::par) {
    if (!(d.gamma > 1.0 && d.gamma < 3.0))
      throw GammaOutOfRange("perturbed model: gamma must lie in (1,3)");
    if (d.left.u < 0.0 || d.right.u < 0.0)
      throw NegativeVelocity("perturbed model: needs u >= 0 on both sides");
  }
}

// straight-line Dirac carrier x(t) = sigma * t with weights growing
// linearly in time
struct DeltaShockProfile {
  double sigma = 0.0;    // carrier speed
  double w1_rate = 0.0;  // density weight per unit time
  double w2_rate = 0.0;  // momentum weight per unit time
  double u_delta = 0.0;  // velocity assigned on the carrier
};

// closed-form limit data of a vanishing-pressure family of solutions
struct DeltaLimitQuantities {
  double a = 0.0;  // limit of the scaled pressure at the middle state
  double sigma = 0.0;
  double w1_rate = 0.0;
  double w2_rate = 0.0;
};

// ----------------------------------------------------------------- waves --

struct Shock {
  int family = 1;
  double speed = 0.0;
};

struct Rarefaction {
  int family = 1;
  double xi_head = 0.0;  // upstream edge, xi_head <= xi_tail
  double xi_tail = 0.0;
};

struct Contact {
  double speed = 0.0;
};

struct VacuumZone {
  double xi_left = 0.0;
  double xi_right = 0.0;
};

struct DeltaShock {
  DeltaShockProfile profile;
};

using WaveShape = std::variant<Shock, Rarefaction, Contact, VacuumZone, DeltaShock>;

struct Wave {
  WaveShape shape;
  PrimState left_state;
  PrimState right_state;
};

namespace detail {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace detail

inline double wave_lo(const Wave& w) {
  return std::visit(detail::overloaded{
                        [](const Shock& s) { return s.speed; },
                        [](const Rarefaction& r) { return r.xi_head; },
                        [](const Contact& c) { return c.speed; },
                        [](const VacuumZone& v) { return v.xi_left; },
                        [](const DeltaShock& d) { return d.profile.sigma; }},
                    w.shape);
}

inline double wave_hi(const Wave& w) {
  return std::visit(detail::overloaded{
                        [](const Shock& s) { return s.speed; },
                        [](const Rarefaction& r) { return r.xi_tail; },
                        [](const Contact& c) { return c.speed; },
                        [](const VacuumZone& v) { return v.xi_right; },
                        [](const DeltaShock& d) { return d.profile.sigma; }},
                    w.shape);
}

// waves ordered left to right; states has one more entry than waves, with
// states[i] / states[i+1] flanking waves[i]
struct WaveFan {
  RiemannData data;
  std::vector<Wave> waves;
  std::vector<PrimState> states;
};

// sample of the self-similar solution along one ray
struct StateSample {
  PrimState state;
  std::optional<DeltaShockProfile> dirac;  // set when the ray is a Dirac carrier
  bool on_dirac() const { return dirac.has_value(); }
};

// ------------------------------------------------------- root bracketing --

namespace detail {

struct BisectOptions {
  double rel_tol = 1e-12;
  int max_iter = 200;
};

// plain bisection; f must change sign on [lo, hi]
template <class F>
double bisect(F&& f, double lo, double hi, BisectOptions opt = {}) {
  double flo = f(lo);
  if (flo == 0.0) return lo;
  if (double fhi = f(hi); fhi == 0.0)
    return hi;
  else if ((flo > 0.0) == (fhi > 0.0))
    throw NoConvergence("bisect: no sign change on the bracket");
  for (int it = 0; it < opt.max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= opt.rel_tol * std::max(1.0, std::abs(mid))) return mid;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// ------------------------------------------- shared state relations ------

// traffic model: characteristic speeds u - g rho^g (genuinely nonlinear)
// and u (contact field)
inline double ar_lambda1(const PrimState& s, double g) {
  return s.u - g * std::pow(s.rho, g);
}

inline double ar_lambda2(const PrimState& s) { return s.u; }

// perturbed model: squared sound-like term (g-1) rho^(g-1) u
inline double par_csq(const PrimState& s, double g) {
  return (g - 1.0) * std::pow(s.rho, g - 1.0) * s.u;
}

inline double par_lambda(const PrimState& s, double g, int family) {
  const double c2 = par_csq(s, g);
  if (c2 < 0.0)
    throw NegativeRadicand("perturbed model: wave speed needs u >= 0");
  const double c = std::sqrt(c2);
  return family == 1 ? s.u - c : s.u + c;
}

// forward rarefaction curves in sqrt(u); family 1 trades pressure head for
// speed, family 2 the reverse
inline double par_curve_sqrt_u(double rho, const PrimState& from, double g, int family) {
  const double shift = (std::sqrt(std::pow(rho, g - 1.0)) -
                        std::sqrt(std::pow(from.rho, g - 1.0))) /
                       std::sqrt(g - 1.0);
  return family == 1 ? std::sqrt(from.u) - shift : std::sqrt(from.u) + shift;
}

// closed-form interior of a traffic-model fan: eliminate u between
// xi = u - g rho^g and the wave-curve relation through the anchor state
inline PrimState ar_rarefaction_interior(double xi, const PrimState& anchor, double g) {
  const double pg = (anchor.u + std::pow(anchor.rho, g) - xi) / (1.0 + g);
  const double rho = pg <= 0.0 ? 0.0 : std::pow(pg, 1.0 / g);
  return {rho, xi + g * std::max(pg, 0.0)};
}

// interior of a perturbed-model fan: invert xi = lambda(rho, u(rho)) along
// the curve through the wave's upstream state (monotone in rho)
inline PrimState par_rarefaction_interior(double xi, const Wave& w, double g, int family) {
  const PrimState& anchor = w.left_state;
  const auto u_of = [&](double rho) {
    const double s = par_curve_sqrt_u(rho, anchor, g, family);
    return s * s;
  };
  const auto xi_of = [&](double rho) {
    return par_lambda({rho, u_of(rho)}, g, family) - xi;
  };
  double lo, hi;
  if (family == 1) {  // rho decreases left to right, xi_of decreasing in rho
    lo = w.right_state.rho;
    hi = anchor.rho;
  } else {  // rho increases left to right, xi_of increasing in rho
    lo = anchor.rho;
    hi = w.right_state.rho;
  }
  const double rho = bisect(xi_of, lo, hi);
  return {rho, u_of(rho)};
}

inline bool close(double a, double b, double tol = 1e-12) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

inline bool state_close(const PrimState& a, const PrimState& b) {
  return close(a.rho, b.rho) && close(a.u, b.u);
}

}  // namespace detail

// ------------------------------------------------------------ evaluation --

inline void validate(const WaveFan& fan) {
  if (fan.states.size() != fan.waves.size() + 1)
    throw StructureError("wave fan: need one more state than waves");
  for (const PrimState& s : fan.states) {
    if (!std::isfinite(s.rho) || !std::isfinite(s.u) || s.rho < 0.0)
      throw StructureError("wave fan: non-finite or negative state");
  }
  if (!detail::state_close(fan.states.front(), fan.data.left) ||
      !detail::state_close(fan.states.back(), fan.data.right))
    throw StructureError("wave fan: end states must match the data");
  for (std::size_t i = 0; i < fan.waves.size(); ++i) {
    const Wave& w = fan.waves[i];
    const double lo = wave_lo(w);
    const double hi = wave_hi(w);
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi)
      throw StructureError("wave fan: wave edges out of order");
    if (!detail::state_close(w.left_state, fan.states[i]) ||
        !detail::state_close(w.right_state, fan.states[i + 1]))
      throw StructureError("wave fan: wave states disagree with fan states");
    if (i + 1 < fan.waves.size()) {
      const double next_lo = wave_lo(fan.waves[i + 1]);
      if (next_lo < hi && !detail::close(next_lo, hi))
        throw StructureError("wave fan: waves overlap");
    }
  }
}

namespace detail {

inline StateSample on_wave(const WaveFan& fan, std::size_t i, double xi) {
  const Wave& w = fan.waves[i];
  return std::visit(
      overloaded{
          // at the exact ray of a sharp discontinuity report the downstream limit
          [&](const Shock&) { return StateSample{w.right_state, {}}; },
          [&](const Contact&) { return StateSample{w.right_state, {}}; },
          [&](const DeltaShock& d) {
            // finite part on the carrier: zero density, carrier velocity
            return StateSample{{0.0, d.profile.u_delta}, d.profile};
          },
          [&](const VacuumZone&) { return StateSample{{0.0, xi}, {}}; },
          [&](const Rarefaction& r) {
            if (xi <= r.xi_head) return StateSample{w.left_state, {}};
            if (xi >= r.xi_tail) return StateSample{w.right_state, {}};
            switch (fan.data.model) {
              case Model::ar:
                return StateSample{ar_rarefaction_interior(xi, w.left_state, fan.data.gamma), {}};
              case Model::par:
                return StateSample{par_rarefaction_interior(xi, w, fan.data.gamma, r.family), {}};
              default:
                throw StructureError("pressureless model has no rarefactions");
            }
          }},
      w.shape);
}

}  // namespace detail

// sample the self-similar solution at the ray xi = x/t
inline StateSample eval_self_similar(const WaveFan& fan, double xi) {
  validate(fan);
  if (!std::isfinite(xi)) throw DomainError("eval: xi must be finite");
  for (std::size_t i = 0; i < fan.waves.size(); ++i) {
    if (xi < wave_lo(fan.waves[i])) return {fan.states[i], {}};
    if (xi <= wave_hi(fan.waves[i])) return detail::on_wave(fan, i, xi);
  }
  return {fan.states.back(), {}};
}

}  // namespace wavefan
