#pragma once

// Fits of measured device curves:
//  - spin-diode spectra as a sum of symmetric (Lorentzian) and antisymmetric
//    (anti-Lorentzian) resonances;
//  - the piecewise-linear neuron response V(I) = 0 below threshold,
//    W I + c above.

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "spinrf/errors.hpp"

namespace spinrf {

struct FittedResonance {
  double f_res = 0.0;     // Hz
  double width = 0.0;     // half-width c, Hz
  double sym_amp = 0.0;   // A, uV (Lorentzian peak)
  double asym_amp = 0.0;  // B, uV (anti-Lorentzian, extremes +-B/2 at +-c)
};

struct SpinDiodeFit {
  std::vector<FittedResonance> resonances;  // sorted by f_res
  double offset = 0.0;  // uV
  double rmse = 0.0;    // uV
  std::size_t iterations = 0;
};

// V(f) = offset + sum_r [A_r c_r^2 + B_r c_r (f - f_r)] / (c_r^2 + (f - f_r)^2)
double spin_diode_model(const SpinDiodeFit& fit, double f);

struct SpinDiodeFitOptions {
  std::size_t max_iterations = 500;
  double rel_tolerance = 1e-9;  // on the relative RMSE change of an accepted step
};

class FitNotConverged : public NumericError {
 public:
  FitNotConverged(const std::string& what, SpinDiodeFit best)
      : NumericError(what), best_(std::move(best)) {}
  const SpinDiodeFit& best_so_far() const noexcept { return best_; }

 private:
  SpinDiodeFit best_;
};

// Nonlinear least squares (damped Gauss-Newton with analytic Jacobian).
// Needs at least 4 n_resonances + 1 points with strictly increasing freqs.
// Starting centers come from peaks of |d^2V/df^2|.
SpinDiodeFit fit_spin_diode(std::span<const double> freqs, std::span<const double> voltages,
                            std::size_t n_resonances, const SpinDiodeFitOptions& opt = {});

struct PiecewiseNeuronFit {
  double i_th = 0.0;       // A
  double slope = 0.0;      // W, uV/A
  double intercept = 0.0;  // c, uV
  double rmse = 0.0;       // uV
};

double piecewise_neuron_model(const PiecewiseNeuronFit& fit, double i_dc) noexcept;

// Exhaustive search over thresholds at midpoints of consecutive currents (plus
// "everything linear" at the first current and "everything flat" at the
// last), each with a linear least-squares fit above threshold. Ties go to the
// highest threshold.
PiecewiseNeuronFit fit_piecewise_neuron(std::span<const double> i_dc, std::span<const double> v);

// V = V1(I1) + V2(I2)
double eval_two_neuron_model(const PiecewiseNeuronFit& fit1, const PiecewiseNeuronFit& fit2,
                             double i1, double i2) noexcept;

struct RmseReport {
  double rmse = 0.0;              // uV
  double percent_of_range = 0.0;  // 100 rmse / (max - min) of measured
};

RmseReport rmse_report(std::span<const double> measured, std::span<const double> predicted);

// Two-column CSV with a header line (e.g. "freq_hz,v_uv" or "i_a,v_uv");
// '#' lines are comments. ParseError carries the line number.
struct XYData {
  std::string x_name, y_name;
  std::vector<double> x, y;
};
XYData read_xy_csv(const std::filesystem::path& path);
void write_xy_csv(const std::filesystem::path& path, const XYData& data);

std::string spin_diode_fit_to_json(const SpinDiodeFit& fit);
std::string piecewise_fit_to_json(const PiecewiseNeuronFit& fit, const RmseReport& report);

}  // namespace spinrf
