#include "levitodyn/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include <fftw3.h>
#include <gsl/gsl_matrix.h>
#include <gsl/gsl_multifit_nlinear.h>
#include <gsl/gsl_vector.h>

#include "levitodyn/constants.hpp"

namespace levitodyn::spectral {

using constants::pi;

namespace {

// FFTW plan creation/destruction is not thread-safe; executing a plan on
// its own buffers is.
std::mutex fftw_planner_mutex;

} // namespace

Spectrum welch_psd(const std::vector<double>& series, double dt,
                   std::size_t segment_len, double overlap,
                   const std::string& window) {
  if (segment_len < 4)
    throw std::invalid_argument("welch_psd: segment length must be >= 4");
  if (series.size() < segment_len)
    throw std::invalid_argument(
        "welch_psd: series shorter than one segment");
  if (!(overlap >= 0.0 && overlap < 1.0))
    throw std::invalid_argument("welch_psd: overlap must be in [0, 1)");
  if (!(dt > 0.0)) throw std::invalid_argument("welch_psd: dt must be > 0");
  if (window != "hann" && window != "rect")
    throw std::invalid_argument("welch_psd: window must be hann or rect");

  const std::size_t n = segment_len;
  const auto hop = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::lround(static_cast<double>(n) * (1.0 - overlap))));
  const std::size_t count = 1 + (series.size() - n) / hop;

  // Window taper and its power (the periodogram normalizer). The Hann
  // window is the periodic variant.
  std::vector<double> taper(n, 1.0);
  if (window == "hann")
    for (std::size_t i = 0; i < n; ++i)
      taper[i] = 0.5 * (1.0 - std::cos(2.0 * pi * static_cast<double>(i) /
                                       static_cast<double>(n)));
  double wpow = 0.0;
  for (std::size_t i = 0; i < n; ++i) wpow += taper[i] * taper[i];

  const std::size_t n_bins = n / 2 + 1;
  std::vector<double> accum(n_bins, 0.0);

  double* in;
  fftw_complex* out;
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex);
    in = fftw_alloc_real(n);
    out = fftw_alloc_complex(n_bins);
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
  }

  for (std::size_t s = 0; s < count; ++s) {
    const double* seg = series.data() + s * hop;
    for (std::size_t i = 0; i < n; ++i) in[i] = seg[i] * taper[i];
    fftw_execute(plan);
    for (std::size_t k = 0; k < n_bins; ++k)
      accum[k] += out[k][0] * out[k][0] + out[k][1] * out[k][1];
  }

  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex);
    fftw_destroy_plan(plan);
    fftw_free(in);
    fftw_free(out);
  }

  Spectrum spec;
  spec.window = window;
  spec.segment_len = n;
  spec.overlap = overlap;
  spec.segments = count;
  spec.dt = dt;
  spec.freqs.resize(n_bins);
  spec.psd.resize(n_bins);
  const double norm = dt / (wpow * static_cast<double>(count));
  for (std::size_t k = 0; k < n_bins; ++k) {
    spec.freqs[k] =
        static_cast<double>(k) / (static_cast<double>(n) * dt);
    // One-sided: double everything except DC and (for even n) Nyquist.
    const bool edge = (k == 0) || (2 * k == n);
    spec.psd[k] = (edge ? 1.0 : 2.0) * norm * accum[k];
  }
  return spec;
}

namespace {

struct FitData {
  const std::vector<double>* x; ///< scaled angular frequency
  const std::vector<double>* z; ///< scaled PSD
};

int lorentz_residuals(const gsl_vector* u, void* params, gsl_vector* f) {
  const auto* d = static_cast<const FitData*>(params);
  const double W = gsl_vector_get(u, 0);
  const double G = gsl_vector_get(u, 1);
  const double C = gsl_vector_get(u, 2);
  const double B = gsl_vector_get(u, 3);
  for (std::size_t i = 0; i < d->x->size(); ++i) {
    const double xi = (*d->x)[i];
    const double dx = W * W - xi * xi;
    const double den = dx * dx + G * G * xi * xi;
    gsl_vector_set(f, i, C * G / den + B - (*d->z)[i]);
  }
  return GSL_SUCCESS;
}

int lorentz_jacobian(const gsl_vector* u, void* params, gsl_matrix* jac) {
  const auto* d = static_cast<const FitData*>(params);
  const double W = gsl_vector_get(u, 0);
  const double G = gsl_vector_get(u, 1);
  const double C = gsl_vector_get(u, 2);
  for (std::size_t i = 0; i < d->x->size(); ++i) {
    const double xi = (*d->x)[i];
    const double x2 = xi * xi;
    const double dx = W * W - x2;
    const double den = dx * dx + G * G * x2;
    const double den2 = den * den;
    gsl_matrix_set(jac, i, 0, -4.0 * C * G * W * dx / den2);
    gsl_matrix_set(jac, i, 1, C * (den - 2.0 * G * G * x2) / den2);
    gsl_matrix_set(jac, i, 2, G / den);
    gsl_matrix_set(jac, i, 3, 1.0);
  }
  return GSL_SUCCESS;
}

} // namespace

LorentzianFit fit_lorentzian(const Spectrum& spec,
                             std::pair<double, double> band) {
  const auto& freqs = spec.freqs;
  const auto& psd = spec.psd;
  std::vector<double> x, z; // scaled omega, scaled psd in band
  for (std::size_t i = 0; i < freqs.size(); ++i)
    if (freqs[i] >= band.first && freqs[i] <= band.second) {
      x.push_back(2.0 * pi * freqs[i]);
      z.push_back(psd[i]);
    }
  if (x.size() < 10)
    throw std::invalid_argument(
        "fit_lorentzian: band must contain at least 10 bins");

  // Peak bin (first maximum = lowest frequency on ties) and scales.
  const std::size_t peak =
      static_cast<std::size_t>(std::distance(
          z.begin(), std::max_element(z.begin(), z.end())));
  const double omega_scale = x[peak] > 0.0 ? x[peak] : x.back();
  const double psd_scale = z[peak] > 0.0 ? z[peak] : 1.0;
  for (auto& v : x) v /= omega_scale;
  for (auto& v : z) v /= psd_scale;

  // Initial guesses: floor from the band minimum, linewidth from the
  // half-power width around the peak, amplitude from the peak height.
  const double b0 = *std::min_element(z.begin(), z.end());
  const double half = b0 + 0.5 * (z[peak] - b0);
  std::size_t lo = peak, hi = peak;
  while (lo > 0 && z[lo] > half) --lo;
  while (hi + 1 < z.size() && z[hi] > half) ++hi;
  const double grid = x.size() > 1 ? (x.back() - x.front()) /
                                         static_cast<double>(x.size() - 1)
                                   : 1e-3;
  const double g0 = std::max(x[hi] - x[lo], 2.0 * grid);
  const double c0 = std::max(z[peak] - b0, 1e-3) * g0;

  // A rival maximum counts as a second peak only when a deep valley
  // separates it from the main line: comparable height alone is not
  // enough, since an averaged periodogram fluctuates bin to bin.
  bool rival = false;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (i == peak) continue;
    if (z[i] - b0 <= 0.5 * (z[peak] - b0)) continue;
    double valley = z[i];
    const std::size_t a = std::min(i, peak), b = std::max(i, peak);
    for (std::size_t j = a; j <= b; ++j) valley = std::min(valley, z[j]);
    if (valley - b0 < 0.2 * (z[i] - b0)) rival = true;
  }

  FitData data{&x, &z};
  gsl_multifit_nlinear_fdf fdf;
  fdf.f = lorentz_residuals;
  fdf.df = lorentz_jacobian;
  fdf.fvv = nullptr;
  fdf.n = x.size();
  fdf.p = 4;
  fdf.params = &data;

  gsl_multifit_nlinear_parameters fit_params =
      gsl_multifit_nlinear_default_parameters();
  gsl_multifit_nlinear_workspace* work = gsl_multifit_nlinear_alloc(
      gsl_multifit_nlinear_trust, &fit_params, x.size(), 4);

  double u0[4] = {1.0, g0, c0, b0};
  gsl_vector_view u0v = gsl_vector_view_array(u0, 4);
  gsl_multifit_nlinear_init(&u0v.vector, &fdf, work);

  int info = 0;
  const int status = gsl_multifit_nlinear_driver(
      500, 1e-12, 1e-12, 0.0, nullptr, nullptr, &info, work);
  if (status != GSL_SUCCESS && status != GSL_EMAXITER) {
    double rnorm = 0.0;
    gsl_vector* residual = gsl_multifit_nlinear_residual(work);
    for (std::size_t i = 0; i < residual->size; ++i)
      rnorm += gsl_vector_get(residual, i) * gsl_vector_get(residual, i);
    gsl_multifit_nlinear_free(work);
    std::ostringstream os;
    os << "fit_lorentzian: no convergence (status " << status
       << ", residual norm " << std::sqrt(rnorm) << " after driver stop)";
    throw std::runtime_error(os.str());
  }

  gsl_vector* u = gsl_multifit_nlinear_position(work);
  gsl_vector* residual = gsl_multifit_nlinear_residual(work);
  double chisq = 0.0;
  for (std::size_t i = 0; i < residual->size; ++i)
    chisq += gsl_vector_get(residual, i) * gsl_vector_get(residual, i);
  const double dof =
      static_cast<double>(x.size()) - 4.0 > 0 ? x.size() - 4.0 : 1.0;
  const double var = chisq / dof;

  gsl_matrix* covar = gsl_matrix_alloc(4, 4);
  gsl_multifit_nlinear_covar(gsl_multifit_nlinear_jac(work), 0.0, covar);
  const auto err = [&](int i) {
    return std::sqrt(var * gsl_matrix_get(covar, i, i));
  };

  LorentzianFit fit;
  // The model is even in (omega, gamma); report the positive branch.
  fit.omega = std::abs(gsl_vector_get(u, 0)) * omega_scale;
  fit.gamma = std::abs(gsl_vector_get(u, 1)) * omega_scale;
  fit.amplitude = gsl_vector_get(u, 2) * psd_scale * omega_scale *
                  omega_scale * omega_scale;
  fit.floor = gsl_vector_get(u, 3) * psd_scale;
  fit.omega_err = err(0) * omega_scale;
  fit.gamma_err = err(1) * omega_scale;
  fit.amplitude_err = err(2) * psd_scale * omega_scale * omega_scale *
                      omega_scale;
  fit.floor_err = err(3) * psd_scale;
  fit.multiple_peaks = rival;
  fit.iterations = static_cast<int>(gsl_multifit_nlinear_niter(work));

  gsl_matrix_free(covar);
  gsl_multifit_nlinear_free(work);
  return fit;
}

std::pair<double, double> fit_sqrt_power(
    const std::vector<std::pair<double, double>>& power_freq) {
  if (power_freq.size() < 3)
    throw std::invalid_argument("fit_sqrt_power: need at least 3 points");
  double pmin = power_freq.front().first, pmax = pmin;
  for (const auto& [p, w] : power_freq) {
    if (!(p > 0.0))
      throw std::invalid_argument("fit_sqrt_power: powers must be > 0");
    pmin = std::min(pmin, p);
    pmax = std::max(pmax, p);
  }
  if (pmax - pmin <= 1e-12 * pmax)
    throw std::invalid_argument(
        "fit_sqrt_power: degenerate grid (all powers equal)");

  double num = 0.0, den = 0.0, wsq = 0.0;
  for (const auto& [p, w] : power_freq) {
    num += w * std::sqrt(p);
    den += p;
    wsq += w * w;
  }
  const double a = num / den;
  double rss = 0.0;
  for (const auto& [p, w] : power_freq) {
    const double r = w - a * std::sqrt(p);
    rss += r * r;
  }
  return {a, wsq > 0.0 ? std::sqrt(rss / wsq) : 0.0};
}

std::pair<double, double> pressure_independence(
    const std::vector<std::pair<double, double>>& pressure_freq) {
  if (pressure_freq.size() < 2)
    throw std::invalid_argument(
        "pressure_independence: need at least 2 points");
  double mean = 0.0;
  for (const auto& [p, w] : pressure_freq) mean += w;
  mean /= static_cast<double>(pressure_freq.size());
  if (mean == 0.0) return {0.0, 0.0};
  double var = 0.0;
  for (const auto& [p, w] : pressure_freq) {
    const double r = w / mean - 1.0;
    var += r * r;
  }
  var /= static_cast<double>(pressure_freq.size());
  return {mean, std::sqrt(var)};
}

} // namespace levitodyn::spectral
