#pragma once

#include <optional>
#include <vector>

#include "throwsense/error.hpp"

namespace throwsense::signal {

// A uniformly sampled scalar signal. dt is seconds per sample (1/fps).
struct Series {
    std::vector<double> values;
    double dt = 1.0 / 30.0;

    std::size_t size() const { return values.size(); }
};

// Fills gaps by linear interpolation between the nearest valid neighbors;
// leading/trailing gaps hold the nearest valid value. Throws AllMissing when
// no valid sample exists.
Series interpolate_missing(const std::vector<std::optional<double>>& values, double dt);

// Zero-phase low-pass: an order-N digital Butterworth design applied
// forward-backward, with odd-reflection padding and steady-state initial
// conditions to suppress edge transients. Length-preserving, DC gain 1.
Series butterworth_lowpass(const Series& s, double cutoff_hz = 2.0, int order = 4);

// Smoothed first derivative via Savitzky-Golay convolution, in value-units per
// sample. Edge samples come from evaluating the first/last window's fitted
// polynomial at their positions, so output length equals input length.
Series savgol_derivative(const Series& s, int window = 11, int polyorder = 2);

namespace detail {

struct FilterCoeffs {
    std::vector<double> b; // numerator, b[0] first
    std::vector<double> a; // denominator, a[0] == 1
};

FilterCoeffs butterworth_design(double cutoff_hz, double fs, int order);

// Direct-form II transposed filter with explicit initial state.
std::vector<double> lfilter(const FilterCoeffs& c, const std::vector<double>& x,
                            const std::vector<double>& zi);

// Steady-state initial conditions for a unit step (scale by x[0] before use).
std::vector<double> lfilter_zi(const FilterCoeffs& c);

// Convolution weights for the Savitzky-Golay derivative at the window center.
std::vector<double> savgol_deriv_weights(int window, int polyorder);

} // namespace detail

} // namespace throwsense::signal
