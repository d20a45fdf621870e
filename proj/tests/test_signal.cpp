#include "doctest.h"

#include <cmath>
#include <optional>

#include "throwsense/rng.hpp"
#include "throwsense/signal.hpp"
#include "oracles.hpp"

using namespace throwsense;
using signal::Series;

namespace {

Series make_series(std::vector<double> v, double fps = 30.0) {
    return Series{std::move(v), 1.0 / fps};
}

constexpr std::optional<double> kGap = std::nullopt;

} // namespace

TEST_CASE("interpolate_missing fills interior gaps linearly") {
    const auto s = signal::interpolate_missing({1.0, kGap, 3.0}, 1.0 / 30.0);
    CHECK(s.values == std::vector<double>{1.0, 2.0, 3.0});
}

TEST_CASE("interpolate_missing holds edges") {
    const auto s = signal::interpolate_missing({kGap, kGap, 5.0, 7.0}, 1.0 / 30.0);
    CHECK(s.values == std::vector<double>{5.0, 5.0, 5.0, 7.0});

    const auto t = signal::interpolate_missing({2.0, 4.0, kGap, kGap}, 1.0 / 30.0);
    CHECK(t.values == std::vector<double>{2.0, 4.0, 4.0, 4.0});
}

TEST_CASE("interpolate_missing is identity without gaps") {
    const std::vector<std::optional<double>> in{1.5, -2.0, 0.25, 9.0};
    const auto s = signal::interpolate_missing(in, 1.0 / 30.0);
    CHECK(s.values == std::vector<double>{1.5, -2.0, 0.25, 9.0});
}

TEST_CASE("interpolate_missing rejects an all-missing series") {
    CHECK_THROWS_AS(signal::interpolate_missing({kGap, kGap, kGap}, 1.0 / 30.0), AllMissing);
}

TEST_CASE("butterworth keeps a constant series (DC gain 1)") {
    Series s = make_series(std::vector<double>(40, 5.0));
    const auto out = signal::butterworth_lowpass(s);
    REQUIRE(out.size() == 40);
    for (double v : out.values) CHECK(v == doctest::Approx(5.0).epsilon(1e-6));
}

TEST_CASE("butterworth attenuation at 10 Hz matches the design-equation oracle") {
    const double fs = 30.0, fc = 2.0, f = 10.0;
    const int n = 600;
    Series s;
    s.dt = 1.0 / fs;
    for (int i = 0; i < n; ++i) s.values.push_back(std::sin(2.0 * M_PI * f * i / fs));
    const auto out = signal::butterworth_lowpass(s, fc, 4);

    double measured = 0.0;
    for (int i = n / 3; i < 2 * n / 3; ++i) measured = std::max(measured, std::abs(out.values[i]));

    const double expected = oracles::butterworth_fb_amplitude_ratio(f, fs, fc, 4);
    CHECK(measured < 1.5 * expected);
    CHECK(measured > 0.5 * expected);
}

TEST_CASE("butterworth is linear") {
    Rng rng(101);
    Series x;
    x.dt = 1.0 / 30.0;
    for (int i = 0; i < 120; ++i) x.values.push_back(rng.normal());
    Series x3 = x;
    for (double& v : x3.values) v *= 3.0;

    const auto fx = signal::butterworth_lowpass(x);
    const auto fx3 = signal::butterworth_lowpass(x3);
    for (std::size_t i = 0; i < fx.size(); ++i) {
        CHECK(fx3.values[i] == doctest::Approx(3.0 * fx.values[i]).epsilon(1e-9));
    }
}

TEST_CASE("butterworth is zero-phase on a symmetric pulse") {
    const int n = 401;
    Series s;
    s.dt = 1.0 / 30.0;
    for (int i = 0; i < n; ++i) {
        const double d = (i - 200) / 12.0;
        s.values.push_back(std::exp(-0.5 * d * d));
    }
    const auto out = signal::butterworth_lowpass(s);
    for (int i = 0; i < n / 2; ++i) {
        CHECK(out.values[i] == doctest::Approx(out.values[n - 1 - i]).epsilon(1e-9));
    }
}

TEST_CASE("butterworth rejects bad inputs") {
    CHECK_THROWS_AS(signal::butterworth_lowpass(make_series(std::vector<double>(5, 1.0))), TooShort);
    CHECK_THROWS_AS(signal::butterworth_lowpass(make_series(std::vector<double>(40, 1.0)), 15.0), InvalidCutoff);
    CHECK_THROWS_AS(signal::butterworth_lowpass(make_series(std::vector<double>(40, 1.0)), 0.0), InvalidCutoff);
}

TEST_CASE("savgol derivative is exact on a quadratic") {
    Series s = make_series({});
    for (int i = 0; i < 30; ++i) s.values.push_back(static_cast<double>(i) * i);
    const auto d = signal::savgol_derivative(s);
    for (int i = 0; i < 30; ++i) {
        CHECK(d.values[static_cast<std::size_t>(i)] == doctest::Approx(2.0 * i).epsilon(1e-9));
    }
}

TEST_CASE("savgol derivative of a constant is zero") {
    Series s = make_series(std::vector<double>(25, 4.2));
    const auto d = signal::savgol_derivative(s);
    for (double v : d.values) CHECK(v == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("savgol derivative matches the brute-force window-fit oracle on a cubic") {
    Series s = make_series({});
    for (int i = 0; i < 40; ++i) {
        const double x = i * 0.3 - 5.0;
        s.values.push_back(0.02 * x * x * x - 0.5 * x * x + x + 2.0);
    }
    const auto d = signal::savgol_derivative(s, 11, 2);
    for (std::size_t i = 5; i + 5 < s.size(); ++i) {
        const double expected = oracles::quadratic_window_derivative(s.values, i, 5);
        CHECK(d.values[i] == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("savgol rejects bad windows") {
    Series s = make_series(std::vector<double>(30, 1.0));
    CHECK_THROWS_AS(signal::savgol_derivative(s, 10, 2), BadWindow);
    CHECK_THROWS_AS(signal::savgol_derivative(s, 3, 4), BadWindow);
    CHECK_THROWS_AS(signal::savgol_derivative(make_series(std::vector<double>(7, 1.0)), 11, 2), TooShort);
}

TEST_CASE("filters preserve length and finiteness on random input") {
    Rng rng(7);
    for (int trial = 0; trial < 5; ++trial) {
        Series s;
        s.dt = 1.0 / 30.0;
        const std::size_t n = 20 + rng.uniform_index(200);
        for (std::size_t i = 0; i < n; ++i) s.values.push_back(rng.normal(0.0, 10.0));
        const auto bw = signal::butterworth_lowpass(s);
        const auto sg = signal::savgol_derivative(s);
        REQUIRE(bw.size() == n);
        REQUIRE(sg.size() == n);
        for (double v : bw.values) CHECK(std::isfinite(v));
        for (double v : sg.values) CHECK(std::isfinite(v));
    }
}
