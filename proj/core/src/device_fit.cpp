#include "spinrf/device_fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "json.hpp"

namespace spinrf {

double spin_diode_model(const SpinDiodeFit& fit, double f) {
  double v = fit.offset;
  for (const auto& r : fit.resonances) {
    const double x = f - r.f_res;
    const double c = r.width;
    v += (r.sym_amp * c * c + r.asym_amp * c * x) / (c * c + x * x);
  }
  return v;
}

namespace {

// Problem in normalized units: x = (f - center) / span, y = v / y_scale.
// Parameter vector: [x0, w, A, B] per resonance, then offset.
struct Problem {
  std::vector<double> x;
  std::vector<double> y;
  std::size_t n_res = 0;
  std::size_t n_params() const { return 4 * n_res + 1; }
};

void evaluate(const Problem& pb, const Eigen::VectorXd& p, Eigen::VectorXd& resid,
              Eigen::MatrixXd* jac) {
  const std::size_t n = pb.x.size();
  resid.resize(static_cast<Eigen::Index>(n));
  if (jac) jac->setZero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(pb.n_params()));
  const auto off_idx = static_cast<Eigen::Index>(4 * pb.n_res);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    double m = p(off_idx);
    for (std::size_t r = 0; r < pb.n_res; ++r) {
      const auto b = static_cast<Eigen::Index>(4 * r);
      const double x0 = p(b), w = p(b + 1), a = p(b + 2), bb = p(b + 3);
      const double u = pb.x[i] - x0;
      const double d = w * w + u * u;
      const double num = a * w * w + bb * w * u;
      m += num / d;
      if (jac) {
        const double d2 = d * d;
        // d/dx0: du/dx0 = -1
        (*jac)(ii, b) = -(bb * w * d - num * 2.0 * u) / d2;
        (*jac)(ii, b + 1) = ((2.0 * a * w + bb * u) * d - num * 2.0 * w) / d2;
        (*jac)(ii, b + 2) = w * w / d;
        (*jac)(ii, b + 3) = w * u / d;
      }
    }
    if (jac) (*jac)(ii, off_idx) = 1.0;
    resid(ii) = m - pb.y[i];
  }
}

double rss_of(const Problem& pb, const Eigen::VectorXd& p) {
  Eigen::VectorXd r;
  evaluate(pb, p, r, nullptr);
  return r.squaredNorm();
}

// Linear least squares for amplitudes and offset with centers/widths fixed.
// Returns the residual sum of squares and writes the amplitudes into p.
double solve_linear(const Problem& pb, Eigen::VectorXd& p, std::size_t n_active) {
  const std::size_t n = pb.x.size();
  const auto cols = static_cast<Eigen::Index>(2 * n_active + 1);
  Eigen::MatrixXd a(static_cast<Eigen::Index>(n), cols);
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    for (std::size_t r = 0; r < n_active; ++r) {
      const auto b = static_cast<Eigen::Index>(4 * r);
      const double w = p(b + 1);
      const double u = pb.x[i] - p(b);
      const double d = w * w + u * u;
      a(ii, static_cast<Eigen::Index>(2 * r)) = w * w / d;
      a(ii, static_cast<Eigen::Index>(2 * r + 1)) = w * u / d;
    }
    a(ii, cols - 1) = 1.0;
    y(ii) = pb.y[i];
  }
  const Eigen::VectorXd sol = a.colPivHouseholderQr().solve(y);
  for (std::size_t r = 0; r < n_active; ++r) {
    p(static_cast<Eigen::Index>(4 * r + 2)) = sol(static_cast<Eigen::Index>(2 * r));
    p(static_cast<Eigen::Index>(4 * r + 3)) = sol(static_cast<Eigen::Index>(2 * r + 1));
  }
  p(static_cast<Eigen::Index>(4 * pb.n_res)) = sol(cols - 1);
  return (a * sol - y).squaredNorm();
}

// Indices of local maxima of |second difference|, strongest first, with
// non-maximum suppression over `radius` samples.
std::vector<std::size_t> curvature_peaks(const std::vector<double>& y, std::size_t radius) {
  const std::size_t n = y.size();
  std::vector<double> c(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) c[i] = std::abs(y[i + 1] - 2.0 * y[i] + y[i - 1]);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return c[a] > c[b]; });
  std::vector<std::size_t> peaks;
  std::vector<bool> taken(n, false);
  for (std::size_t i : idx) {
    if (taken[i] || c[i] <= 0.0) continue;
    peaks.push_back(i);
    const std::size_t lo = i > radius ? i - radius : 0;
    const std::size_t hi = std::min(n - 1, i + radius);
    for (std::size_t k = lo; k <= hi; ++k) taken[k] = true;
  }
  return peaks;
}

}  // namespace

SpinDiodeFit fit_spin_diode(std::span<const double> freqs, std::span<const double> voltages,
                            std::size_t n_resonances, const SpinDiodeFitOptions& opt) {
  const std::size_t n = freqs.size();
  if (n != voltages.size()) throw StructuralError("fit_spin_diode: length mismatch");
  if (n_resonances == 0) throw DomainError("fit_spin_diode: need at least one resonance");
  if (n < 4 * n_resonances + 1) {
    throw DomainError("fit_spin_diode: need at least 4 n_resonances + 1 points");
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(freqs[i] > freqs[i - 1])) {
      throw DomainError("fit_spin_diode: frequencies must be strictly increasing");
    }
  }

  const double center = 0.5 * (freqs.front() + freqs.back());
  const double span = freqs.back() - freqs.front();
  double y_scale = 0.0;
  for (double v : voltages) y_scale = std::max(y_scale, std::abs(v));
  if (y_scale == 0.0) y_scale = 1.0;

  Problem pb;
  pb.n_res = n_resonances;
  for (std::size_t i = 0; i < n; ++i) {
    pb.x.push_back((freqs[i] - center) / span);
    pb.y.push_back(voltages[i] / y_scale);
  }
  const double dx = 1.0 / static_cast<double>(n - 1);

  // Greedy initialization: candidate centers at curvature peaks, candidate
  // widths on a log ladder; each resonance in turn takes the candidate that
  // most reduces the linear-least-squares residual.
  const auto peaks = curvature_peaks(pb.y, 2);
  const std::size_t n_cand = std::min(peaks.size(), 4 * n_resonances + 4);
  const std::vector<double> widths = {1.0 * dx, 2.0 * dx, 4.0 * dx, 8.0 * dx, 16.0 * dx,
                                      32.0 * dx};
  const auto n_params = static_cast<Eigen::Index>(pb.n_params());
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n_params);
  for (std::size_t r = 0; r < n_resonances; ++r) {
    p(static_cast<Eigen::Index>(4 * r)) = pb.x[n / 2];
    p(static_cast<Eigen::Index>(4 * r + 1)) = widths[2];
  }
  for (std::size_t r = 0; r < n_resonances; ++r) {
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_p = p;
    for (std::size_t c = 0; c < n_cand; ++c) {
      for (double w : widths) {
        Eigen::VectorXd trial = p;
        trial(static_cast<Eigen::Index>(4 * r)) = pb.x[peaks[c]];
        trial(static_cast<Eigen::Index>(4 * r + 1)) = w;
        const double rss = solve_linear(pb, trial, r + 1);
        if (rss < best) {
          best = rss;
          best_p = trial;
        }
      }
    }
    p = best_p;
  }
  solve_linear(pb, p, n_resonances);

  // Levenberg-Marquardt refinement.
  Eigen::VectorXd resid;
  Eigen::MatrixXd jac;
  evaluate(pb, p, resid, &jac);
  double rss = resid.squaredNorm();
  double lambda = 1e-3;
  bool converged = rss == 0.0;
  std::size_t it = 0;
  for (; it < opt.max_iterations && !converged; ++it) {
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd g = jac.transpose() * resid;
    Eigen::MatrixXd damped = jtj;
    for (Eigen::Index k = 0; k < n_params; ++k) {
      damped(k, k) += lambda * std::max(jtj(k, k), 1e-12);
    }
    const Eigen::VectorXd step = damped.ldlt().solve(-g);
    Eigen::VectorXd trial = p + step;
    for (std::size_t r = 0; r < n_resonances; ++r) {
      auto& w = trial(static_cast<Eigen::Index>(4 * r + 1));
      w = std::max(std::abs(w), 1e-9);
    }
    const double trial_rss = step.allFinite() ? rss_of(pb, trial) : INFINITY;
    if (trial_rss < rss) {
      const double old_rmse = std::sqrt(rss);
      const double new_rmse = std::sqrt(trial_rss);
      p = trial;
      rss = trial_rss;
      evaluate(pb, p, resid, &jac);
      lambda = std::max(lambda / 3.0, 1e-12);
      if (old_rmse == 0.0 || (old_rmse - new_rmse) <= opt.rel_tolerance * old_rmse) {
        converged = true;
      }
    } else {
      lambda *= 4.0;
      // No descent direction left at machine precision: at a minimum.
      if (lambda > 1e16) converged = true;
    }
  }

  SpinDiodeFit fit;
  fit.iterations = it;
  for (std::size_t r = 0; r < n_resonances; ++r) {
    const auto b = static_cast<Eigen::Index>(4 * r);
    FittedResonance res;
    res.f_res = center + p(b) * span;
    res.width = std::abs(p(b + 1)) * span;
    res.sym_amp = p(b + 2) * y_scale;
    res.asym_amp = p(b + 3) * y_scale;
    fit.resonances.push_back(res);
  }
  std::sort(fit.resonances.begin(), fit.resonances.end(),
            [](const auto& a, const auto& b) { return a.f_res < b.f_res; });
  fit.offset = p(static_cast<Eigen::Index>(4 * n_resonances)) * y_scale;
  double sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = spin_diode_model(fit, freqs[i]) - voltages[i];
    sq += d * d;
  }
  fit.rmse = std::sqrt(sq / static_cast<double>(n));
  if (!converged) {
    throw FitNotConverged("fit_spin_diode: no convergence after " +
                              std::to_string(opt.max_iterations) + " iterations",
                          fit);
  }
  return fit;
}

double piecewise_neuron_model(const PiecewiseNeuronFit& fit, double i_dc) noexcept {
  return i_dc < fit.i_th ? 0.0 : fit.slope * i_dc + fit.intercept;
}

PiecewiseNeuronFit fit_piecewise_neuron(std::span<const double> i_dc, std::span<const double> v) {
  const std::size_t n = i_dc.size();
  if (n != v.size()) throw StructuralError("fit_piecewise_neuron: length mismatch");
  if (n < 4) throw DomainError("fit_piecewise_neuron: need at least 4 points");
  for (std::size_t i = 1; i < n; ++i) {
    if (i_dc[i] < i_dc[i - 1]) throw DomainError("fit_piecewise_neuron: currents must be sorted");
  }

  // Prefix sums over the tail [m, n) give each candidate's line in O(1).
  std::vector<double> sx(n + 1, 0.0), sy(n + 1, 0.0), sxx(n + 1, 0.0), sxy(n + 1, 0.0),
      syy(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    sx[i] = sx[i + 1] + i_dc[i];
    sy[i] = sy[i + 1] + v[i];
    sxx[i] = sxx[i + 1] + i_dc[i] * i_dc[i];
    sxy[i] = sxy[i + 1] + i_dc[i] * v[i];
    syy[i] = syy[i + 1] + v[i] * v[i];
  }
  const double total_yy = syy[0];

  PiecewiseNeuronFit best;
  double best_rss = std::numeric_limits<double>::infinity();
  bool any = false;
  // Flat everywhere: threshold at the largest current, zero line.
  {
    best.i_th = i_dc[n - 1];
    best_rss = total_yy;
    any = true;
  }
  // Candidate m: points m..n-1 are on the line; threshold just below point m.
  for (std::size_t m = n - 1; m-- > 0;) {
    const double k = static_cast<double>(n - m);
    if (n - m < 2) continue;
    const double mx = sx[m] / k;
    const double my = sy[m] / k;
    const double vxx = sxx[m] - k * mx * mx;
    const double vxy = sxy[m] - k * mx * my;
    if (vxx <= 0.0) continue;
    const double slope = vxy / vxx;
    const double icpt = my - slope * mx;
    double rss = total_yy - syy[m];  // flat part predicted as 0
    for (std::size_t i = m; i < n; ++i) {
      const double d = slope * i_dc[i] + icpt - v[i];
      rss += d * d;
    }
    const double tol = 1e-12 * std::max(total_yy, 1e-300);
    if (rss < best_rss - tol) {
      best_rss = rss;
      best.slope = slope;
      best.intercept = icpt;
      best.i_th = m == 0 ? i_dc[0] : 0.5 * (i_dc[m - 1] + i_dc[m]);
      any = true;
    }
  }
  if (!any) throw DomainError("fit_piecewise_neuron: fewer than 2 points above every threshold");
  best.rmse = std::sqrt(std::max(best_rss, 0.0) / static_cast<double>(n));
  return best;
}

double eval_two_neuron_model(const PiecewiseNeuronFit& fit1, const PiecewiseNeuronFit& fit2,
                             double i1, double i2) noexcept {
  return piecewise_neuron_model(fit1, i1) + piecewise_neuron_model(fit2, i2);
}

RmseReport rmse_report(std::span<const double> measured, std::span<const double> predicted) {
  if (measured.empty()) throw DomainError("rmse_report: empty data");
  if (measured.size() != predicted.size()) throw StructuralError("rmse_report: length mismatch");
  double sq = 0.0;
  for (std::size_t i = 0; i < measured.size(); ++i) {
    const double d = measured[i] - predicted[i];
    sq += d * d;
  }
  RmseReport r;
  r.rmse = std::sqrt(sq / static_cast<double>(measured.size()));
  const auto [lo, hi] = std::minmax_element(measured.begin(), measured.end());
  r.percent_of_range = *hi > *lo ? 100.0 * r.rmse / (*hi - *lo) : 0.0;
  return r;
}

namespace {

double parse_field(std::string_view s, std::size_t line) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ParseError("xy csv: bad number '" + std::string(s) + "'", line);
  }
  return v;
}

}  // namespace

XYData read_xy_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open '" + path.string() + "'");
  XYData d;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(f, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw ParseError("xy csv: expected exactly two columns", line_no);
    }
    if (!have_header) {
      d.x_name = line.substr(0, comma);
      d.y_name = line.substr(comma + 1);
      have_header = true;
      continue;
    }
    const std::string_view sv(line);
    d.x.push_back(parse_field(sv.substr(0, comma), line_no));
    d.y.push_back(parse_field(sv.substr(comma + 1), line_no));
  }
  if (!have_header) throw ParseError("xy csv: missing header line", line_no);
  if (d.x.empty()) throw ParseError("xy csv: no data rows", line_no);
  return d;
}

void write_xy_csv(const std::filesystem::path& path, const XYData& data) {
  if (data.x.size() != data.y.size()) throw StructuralError("write_xy_csv: length mismatch");
  std::ofstream f(path);
  if (!f) throw IoError("cannot write '" + path.string() + "'");
  f << data.x_name << ',' << data.y_name << '\n';
  char buf[64];
  for (std::size_t i = 0; i < data.x.size(); ++i) {
    auto r = std::to_chars(buf, buf + sizeof buf, data.x[i]);
    f.write(buf, r.ptr - buf);
    f << ',';
    r = std::to_chars(buf, buf + sizeof buf, data.y[i]);
    f.write(buf, r.ptr - buf);
    f << '\n';
  }
  if (!f) throw IoError("write failed for '" + path.string() + "'");
}

std::string spin_diode_fit_to_json(const SpinDiodeFit& fit) {
  nlohmann::ordered_json j;
  j["model"] = "spin_diode";
  auto res = nlohmann::ordered_json::array();
  for (const auto& r : fit.resonances) {
    res.push_back({{"f_res_hz", r.f_res},
                   {"width_hz", r.width},
                   {"sym_amp_uv", r.sym_amp},
                   {"asym_amp_uv", r.asym_amp}});
  }
  j["resonances"] = res;
  j["offset_uv"] = fit.offset;
  j["rmse_uv"] = fit.rmse;
  j["iterations"] = fit.iterations;
  return j.dump(2);
}

std::string piecewise_fit_to_json(const PiecewiseNeuronFit& fit, const RmseReport& report) {
  nlohmann::ordered_json j;
  j["model"] = "piecewise_neuron";
  j["i_th_a"] = fit.i_th;
  j["slope_uv_per_a"] = fit.slope;
  j["intercept_uv"] = fit.intercept;
  j["rmse_uv"] = report.rmse;
  j["rmse_percent_of_range"] = report.percent_of_range;
  return j.dump(2);
}

}  // namespace spinrf
