#pragma once

// Closed-form models of the two device roles in the network:
//  - a magnetic tunnel junction used as a resonator, which rectifies RF power
//    into a DC voltage (spin-diode effect) -> synaptic weight;
//  - a spin-torque nano-oscillator, which converts a DC current above
//    threshold into emitted RF power -> neuron activation.
//
// Frequencies are in Hz everywhere. Sensitivities are in uV/uW so that
// power in uW times weight gives uV.

namespace spinrf {

struct ResonatorParams {
  double alpha = 0.01;   // Gilbert damping, sets the fractional linewidth
  double k_sd = 8.8e3;   // peak spin-diode sensitivity, uV/uW

  void validate() const;
  bool operator==(const ResonatorParams&) const = default;
};

struct OscillatorParams {
  double i_th = 10e-6;          // threshold current, A
  double q_nl = 2.0;            // nonlinear damping Q
  double a_scale = 1.25;        // output scaling A
  double r_ohm = 1e3;           // resistance, ohm
  double clamp_factor = 4.0;    // I_c = clamp_factor * i_th
  double shape_tmr_factor = 1.0;  // (dR/R * beta_s); squared into the output power

  double clamp_current() const noexcept { return clamp_factor * i_th; }
  void validate() const;
  bool operator==(const OscillatorParams&) const = default;
};

// Rectification coefficient G(f_in, f_res), uV/uW. Antisymmetric Lorentzian
// in the detuning f_in - f_res with half-width alpha * f_res and peak k_sd.
double rectification_coefficient(double f_in, double f_res, const ResonatorParams& p);

// dG/df_res, uV/(uW Hz).
double rectification_coefficient_grad_fres(double f_in, double f_res, const ResonatorParams& p);

// Normalized precession power p(xi) = (xi - 1)/(xi + Q) for xi > 1, else 0.
double normalized_power(double xi, double q_nl) noexcept;

// Emitted power in W for a DC drive current in A. Zero at or below threshold
// (including any negative current). When clamped, frozen at the I_c value
// for i_dc >= I_c.
double stno_power(double i_dc, const OscillatorParams& o, bool clamped) noexcept;

// dP/dI in W/A. At the threshold kink the right-sided derivative is returned,
// at the clamp kink the left-sided one.
double stno_power_grad(double i_dc, const OscillatorParams& o, bool clamped) noexcept;

// Largest power the oscillator can emit when clamped, W.
double stno_clamp_power(const OscillatorParams& o) noexcept;

}  // namespace spinrf
