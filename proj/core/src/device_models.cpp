#include "spinrf/device_models.hpp"

#include <cmath>
#include <string>

#include "spinrf/errors.hpp"

namespace spinrf {

void ResonatorParams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("ResonatorParams: alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
  if (!(k_sd > 0.0) || !std::isfinite(k_sd)) {
    throw DomainError("ResonatorParams: k_sd must be positive");
  }
}

void OscillatorParams::validate() const {
  if (!(i_th > 0.0) || !(r_ohm > 0.0) || !(clamp_factor > 1.0)) {
    throw DomainError("OscillatorParams: need i_th > 0, r_ohm > 0, clamp_factor > 1");
  }
  if (!(q_nl >= 0.0)) throw DomainError("OscillatorParams: q_nl must be >= 0");
  if (!(a_scale > 0.0) || !(shape_tmr_factor > 0.0)) {
    throw DomainError("OscillatorParams: a_scale and shape_tmr_factor must be positive");
  }
}

namespace {

void check_fres(double f_res) {
  if (!std::isfinite(f_res) || f_res <= 0.0) {
    throw DomainError("resonance frequency must be finite and positive, got " +
                      std::to_string(f_res));
  }
}

}  // namespace

double rectification_coefficient(double f_in, double f_res, const ResonatorParams& p) {
  check_fres(f_res);
  const double c = p.alpha * f_res;
  const double x = f_in - f_res;
  return 2.0 * c * x * p.k_sd / (c * c + x * x);
}

double rectification_coefficient_grad_fres(double f_in, double f_res, const ResonatorParams& p) {
  check_fres(f_res);
  // G = 2 k c x / (c^2 + x^2), c = alpha f_res, x = f_in - f_res.
  // dG/df_res = 2k [ (alpha x - c)(c^2 + x^2) - c x (2 alpha c - 2 x) ] / (c^2 + x^2)^2
  const double c = p.alpha * f_res;
  const double x = f_in - f_res;
  const double d = c * c + x * x;
  const double num = (p.alpha * x - c) * d - c * x * (2.0 * p.alpha * c - 2.0 * x);
  return 2.0 * p.k_sd * num / (d * d);
}

double normalized_power(double xi, double q_nl) noexcept {
  if (xi <= 1.0) return 0.0;
  return (xi - 1.0) / (xi + q_nl);
}

namespace {

double unclamped_power(double i_dc, const OscillatorParams& o) noexcept {
  if (i_dc <= o.i_th) return 0.0;
  const double xi = i_dc / o.i_th;
  const double tmr = o.shape_tmr_factor * o.shape_tmr_factor;
  return o.a_scale * normalized_power(xi, o.q_nl) * tmr * o.r_ohm * i_dc * i_dc;
}

double unclamped_power_grad(double i_dc, const OscillatorParams& o) noexcept {
  if (i_dc < o.i_th) return 0.0;
  // P = A t R I^2 (xi - 1)/(xi + Q), xi = I / I_th
  // dP/dI = A t R [ 2 I p + I^2 (1 + Q) / ((xi + Q)^2 I_th) ]
  const double xi = i_dc / o.i_th;
  const double tmr = o.shape_tmr_factor * o.shape_tmr_factor;
  const double p = (xi - 1.0) / (xi + o.q_nl);
  const double dp_dxi = (1.0 + o.q_nl) / ((xi + o.q_nl) * (xi + o.q_nl));
  return o.a_scale * tmr * o.r_ohm * (2.0 * i_dc * p + i_dc * i_dc * dp_dxi / o.i_th);
}

}  // namespace

double stno_power(double i_dc, const OscillatorParams& o, bool clamped) noexcept {
  if (clamped && i_dc >= o.clamp_current()) return unclamped_power(o.clamp_current(), o);
  return unclamped_power(i_dc, o);
}

double stno_power_grad(double i_dc, const OscillatorParams& o, bool clamped) noexcept {
  if (clamped && i_dc > o.clamp_current()) return 0.0;
  return unclamped_power_grad(i_dc, o);
}

double stno_clamp_power(const OscillatorParams& o) noexcept {
  return unclamped_power(o.clamp_current(), o);
}

}  // namespace spinrf
