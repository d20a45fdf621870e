#include "throwsense/signal.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

namespace throwsense::signal {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Solve A x = rhs in place by Gaussian elimination with partial pivoting.
std::vector<double> solve_linear(std::vector<std::vector<double>> A, std::vector<double> rhs) {
    const std::size_t n = rhs.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(A[r][col]) > std::abs(A[pivot][col])) pivot = r;
        }
        std::swap(A[col], A[pivot]);
        std::swap(rhs[col], rhs[pivot]);
        const double d = A[col][col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = A[r][col] / d;
            for (std::size_t c = col; c < n; ++c) A[r][c] -= f * A[col][c];
            rhs[r] -= f * rhs[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double acc = rhs[i];
        for (std::size_t c = i + 1; c < n; ++c) acc -= A[i][c] * x[c];
        x[i] = acc / A[i][i];
    }
    return x;
}

// Expand prod (z - roots[k]) into monic polynomial coefficients, highest power first.
std::vector<std::complex<double>> poly_from_roots(const std::vector<std::complex<double>>& roots) {
    std::vector<std::complex<double>> coeffs{1.0};
    for (const auto& r : roots) {
        std::vector<std::complex<double>> next(coeffs.size() + 1, 0.0);
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            next[i] += coeffs[i];
            next[i + 1] -= coeffs[i] * r;
        }
        coeffs = std::move(next);
    }
    return coeffs;
}

} // namespace

Series interpolate_missing(const std::vector<std::optional<double>>& values, double dt) {
    Series out;
    out.dt = dt;
    out.values.resize(values.size());

    std::vector<std::size_t> valid;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i].has_value()) valid.push_back(i);
    }
    if (valid.empty()) throw AllMissing("cannot interpolate a series with no valid samples");

    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i].has_value()) {
            out.values[i] = *values[i];
            continue;
        }
        auto right = std::lower_bound(valid.begin(), valid.end(), i);
        if (right == valid.begin()) {
            out.values[i] = *values[valid.front()]; // leading gap: hold first value
        } else if (right == valid.end()) {
            out.values[i] = *values[valid.back()]; // trailing gap: hold last value
        } else {
            const std::size_t hi = *right;
            const std::size_t lo = *(right - 1);
            const double t = static_cast<double>(i - lo) / static_cast<double>(hi - lo);
            out.values[i] = *values[lo] + t * (*values[hi] - *values[lo]);
        }
    }
    return out;
}

namespace detail {

FilterCoeffs butterworth_design(double cutoff_hz, double fs, int order) {
    const double nyquist = fs / 2.0;
    if (!(cutoff_hz > 0.0) || !(cutoff_hz < nyquist)) {
        throw InvalidCutoff("cutoff must lie in (0, " + std::to_string(nyquist) + ") Hz, got " +
                            std::to_string(cutoff_hz));
    }

    // analog prototype poles scaled by the pre-warped cutoff, then bilinear transform
    const double warped = std::tan(kPi * cutoff_hz / fs);
    std::vector<std::complex<double>> zpoles;
    zpoles.reserve(static_cast<std::size_t>(order));
    for (int k = 0; k < order; ++k) {
        const double theta = kPi * (2.0 * k + 1.0) / (2.0 * order) + kPi / 2.0;
        const std::complex<double> s = warped * std::complex<double>(std::cos(theta), std::sin(theta));
        zpoles.push_back((1.0 + s) / (1.0 - s));
    }

    const auto a_cplx = poly_from_roots(zpoles);
    // zeros all at z = -1
    std::vector<std::complex<double>> zzeros(static_cast<std::size_t>(order), -1.0);
    const auto b_cplx = poly_from_roots(zzeros);

    FilterCoeffs c;
    c.a.reserve(a_cplx.size());
    c.b.reserve(b_cplx.size());
    for (const auto& v : a_cplx) c.a.push_back(v.real());

    // unity gain at DC: H(1) = g * sum(b) / sum(a)
    double a_sum = 0.0;
    for (double v : c.a) a_sum += v;
    const double gain = a_sum / std::pow(2.0, order);
    for (const auto& v : b_cplx) c.b.push_back(gain * v.real());
    return c;
}

std::vector<double> lfilter(const FilterCoeffs& c, const std::vector<double>& x,
                            const std::vector<double>& zi) {
    const std::size_t nz = c.a.size() - 1;
    std::vector<double> z = zi;
    z.resize(nz, 0.0);
    std::vector<double> y(x.size());
    for (std::size_t n = 0; n < x.size(); ++n) {
        const double yn = c.b[0] * x[n] + (nz ? z[0] : 0.0);
        for (std::size_t i = 0; i + 1 < nz; ++i) {
            z[i] = c.b[i + 1] * x[n] + z[i + 1] - c.a[i + 1] * yn;
        }
        if (nz) z[nz - 1] = c.b[nz] * x[n] - c.a[nz] * yn;
        y[n] = yn;
    }
    return y;
}

std::vector<double> lfilter_zi(const FilterCoeffs& c) {
    const std::size_t m = c.a.size() - 1;
    // Solve (I - A^T) zi = B with A the companion matrix of a, so that a unit
    // step input is already in steady state.
    std::vector<std::vector<double>> M(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) M[i][i] = 1.0;
    // A[0][j] = -a[j+1], A[i][i-1] = 1  =>  A^T[j][0] = -a[j+1], A^T[i-1][i] = 1
    for (std::size_t j = 0; j < m; ++j) M[j][0] += c.a[j + 1];
    for (std::size_t i = 1; i < m; ++i) M[i - 1][i] -= 1.0;

    std::vector<double> rhs(m);
    for (std::size_t i = 0; i < m; ++i) rhs[i] = c.b[i + 1] - c.a[i + 1] * c.b[0];
    return solve_linear(std::move(M), std::move(rhs));
}

std::vector<double> savgol_deriv_weights(int window, int polyorder) {
    const int m = window / 2;
    const int p = polyorder + 1;
    // normal equations for the least-squares polynomial over positions -m..m;
    // the linear coefficient of the fit is the derivative at the center
    std::vector<std::vector<double>> G(p, std::vector<double>(p, 0.0));
    for (int r = 0; r < p; ++r) {
        for (int c = 0; c < p; ++c) {
            double acc = 0.0;
            for (int j = -m; j <= m; ++j) acc += std::pow(static_cast<double>(j), r + c);
            G[r][c] = acc;
        }
    }
    std::vector<double> weights(static_cast<std::size_t>(window));
    for (int j = -m; j <= m; ++j) {
        std::vector<double> rhs(p);
        for (int r = 0; r < p; ++r) rhs[r] = std::pow(static_cast<double>(j), r);
        const auto coef = solve_linear(G, std::move(rhs));
        weights[static_cast<std::size_t>(j + m)] = coef[1];
    }
    return weights;
}

} // namespace detail

Series butterworth_lowpass(const Series& s, double cutoff_hz, int order) {
    const std::size_t n = s.size();
    const std::size_t min_len = static_cast<std::size_t>(3 * order);
    if (n < min_len) {
        throw TooShort("butterworth_lowpass needs at least " + std::to_string(min_len) +
                       " samples, got " + std::to_string(n));
    }
    const double fs = 1.0 / s.dt;
    const auto coeffs = detail::butterworth_design(cutoff_hz, fs, order);

    const std::size_t padlen = std::min(min_len, n - 1);
    std::vector<double> ext;
    ext.reserve(n + 2 * padlen);
    for (std::size_t i = padlen; i >= 1; --i) ext.push_back(2.0 * s.values[0] - s.values[i]);
    ext.insert(ext.end(), s.values.begin(), s.values.end());
    for (std::size_t i = 1; i <= padlen; ++i) ext.push_back(2.0 * s.values[n - 1] - s.values[n - 1 - i]);

    const auto zi = detail::lfilter_zi(coeffs);
    auto scaled_zi = [&zi](double x0) {
        std::vector<double> z = zi;
        for (double& v : z) v *= x0;
        return z;
    };

    auto fwd = detail::lfilter(coeffs, ext, scaled_zi(ext.front()));
    std::reverse(fwd.begin(), fwd.end());
    auto bwd = detail::lfilter(coeffs, fwd, scaled_zi(fwd.front()));
    std::reverse(bwd.begin(), bwd.end());

    Series out;
    out.dt = s.dt;
    out.values.assign(bwd.begin() + static_cast<std::ptrdiff_t>(padlen),
                      bwd.begin() + static_cast<std::ptrdiff_t>(padlen + n));
    return out;
}

Series savgol_derivative(const Series& s, int window, int polyorder) {
    if (window % 2 == 0 || window <= polyorder) {
        throw BadWindow("window must be odd and greater than polyorder");
    }
    const std::size_t n = s.size();
    if (n < static_cast<std::size_t>(window)) {
        throw TooShort("savgol_derivative needs at least " + std::to_string(window) +
                       " samples, got " + std::to_string(n));
    }

    const int m = window / 2;
    const auto weights = detail::savgol_deriv_weights(window, polyorder);

    Series out;
    out.dt = s.dt;
    out.values.resize(n);

    for (std::size_t i = static_cast<std::size_t>(m); i + static_cast<std::size_t>(m) < n; ++i) {
        double acc = 0.0;
        for (int j = -m; j <= m; ++j) acc += weights[static_cast<std::size_t>(j + m)] * s.values[i + j];
        out.values[i] = acc;
    }

    // Edges: fit the polynomial to the boundary window once and evaluate its
    // derivative at each edge position.
    const int p = polyorder + 1;
    auto edge_fit = [&](std::size_t start) {
        std::vector<std::vector<double>> G(p, std::vector<double>(p, 0.0));
        std::vector<double> rhs(p, 0.0);
        for (int j = 0; j < window; ++j) {
            const double y = s.values[start + static_cast<std::size_t>(j)];
            for (int r = 0; r < p; ++r) {
                rhs[r] += y * std::pow(static_cast<double>(j), r);
                for (int c = 0; c < p; ++c) G[r][c] += std::pow(static_cast<double>(j), r + c);
            }
        }
        return solve_linear(std::move(G), std::move(rhs));
    };

    const auto head = edge_fit(0);
    for (int i = 0; i < m; ++i) {
        double d = 0.0;
        for (int r = 1; r < p; ++r) d += r * head[static_cast<std::size_t>(r)] * std::pow(static_cast<double>(i), r - 1);
        out.values[static_cast<std::size_t>(i)] = d;
    }
    const auto tail = edge_fit(n - static_cast<std::size_t>(window));
    for (int i = 0; i < m; ++i) {
        const double x = static_cast<double>(window - m + i);
        double d = 0.0;
        for (int r = 1; r < p; ++r) d += r * tail[static_cast<std::size_t>(r)] * std::pow(x, r - 1);
        out.values[n - static_cast<std::size_t>(m) + static_cast<std::size_t>(i)] = d;
    }
    return out;
}

} // namespace throwsense::signal
