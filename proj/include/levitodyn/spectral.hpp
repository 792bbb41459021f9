#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

// Spectral estimation and model fitting: Welch-averaged one-sided PSDs,
// the damped-oscillator (Lorentzian) line fit that recovers (Omega, gamma)
// from a spectrum, the A sqrt(P) frequency-vs-power regression, and the
// pressure-independence statistic.
//
// Conventions: PSDs are one-sided in frequency f [Hz] with units
// signal^2/Hz, so the integral over the grid recovers the signal variance.
// Fit results are angular frequencies [rad/s]; conversion to Hz happens
// only at I/O boundaries.

namespace levitodyn::spectral {

struct Spectrum {
  std::vector<double> freqs; ///< Hz, 0 .. Nyquist inclusive
  std::vector<double> psd;   ///< signal^2/Hz

  // Estimator metadata.
  std::string window;        ///< window name ("hann")
  std::size_t segment_len = 0;
  double overlap = 0.0;
  std::size_t segments = 0; ///< number of averaged segments
  double dt = 0.0;          ///< sample interval of the input [s]
};

/// Welch PSD: mean of windowed periodograms over overlapping segments,
/// window-power normalized, one-sided. The series is not demeaned; DC
/// power lands in bin 0 (and, for tapered windows, the main-lobe bins).
/// `window` is "hann" (default) or "rect". Throws std::invalid_argument on
/// a series shorter than one segment, overlap outside [0, 1), or an
/// unknown window name.
Spectrum welch_psd(const std::vector<double>& series, double dt,
                   std::size_t segment_len, double overlap = 0.5,
                   const std::string& window = "hann");

/// Damped-oscillator line fit over the band [f_lo, f_hi] (Hz):
///   S(w) = amplitude * gamma / ((omega^2 - w^2)^2 + gamma^2 w^2) + floor.
/// Initialized from the peak bin and its half-power width; solved by
/// trust-region least squares with an analytic Jacobian on
/// nondimensionalized parameters.
struct LorentzianFit {
  double omega = 0.0;     ///< resonance [rad/s]
  double gamma = 0.0;     ///< linewidth [rad/s]
  double amplitude = 0.0; ///< numerator scale [signal^2/Hz * (rad/s)^3]
  double floor = 0.0;     ///< white background [signal^2/Hz]
  double omega_err = 0.0; ///< asymptotic standard errors
  double gamma_err = 0.0;
  double amplitude_err = 0.0;
  double floor_err = 0.0;
  bool multiple_peaks = false; ///< a secondary peak rivals the main one
  int iterations = 0;
};

/// Throws std::invalid_argument for a bad band (fewer than 10 bins) and
/// std::runtime_error with residual diagnostics on non-convergence.
LorentzianFit fit_lorentzian(const Spectrum& spec,
                             std::pair<double, double> band);

/// Least squares for Omega = A sqrt(P) through (P, Omega) points.
/// Returns (A, normalized residual sqrt(sum r^2 / sum Omega^2)).
/// Throws std::invalid_argument on fewer than 3 points, nonpositive P, or
/// a degenerate single-power grid.
std::pair<double, double> fit_sqrt_power(
    const std::vector<std::pair<double, double>>& power_freq);

/// Mean resonance frequency and population standard deviation of
/// Omega/<Omega> over (pressure, Omega) points: the statistic showing the
/// torsional frequency does not drift with pressure.
std::pair<double, double> pressure_independence(
    const std::vector<std::pair<double, double>>& pressure_freq);

} // namespace levitodyn::spectral
