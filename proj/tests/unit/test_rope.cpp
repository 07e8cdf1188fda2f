#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lcl/errors.hpp"
#include "lcl/rope.hpp"

using namespace lcl;

TEST_CASE("dim frequencies") {
    auto f = dim_frequencies(RopeConfig{4, 10000.0});
    REQUIRE(f.size() == 2);
    CHECK(f[0] == doctest::Approx(1.0));
    CHECK(f[1] == doctest::Approx(0.01));

    for (double base : {100.0, 500000.0, 150e6}) {
        auto fr = dim_frequencies(RopeConfig{64, base});
        CHECK(fr[0] == 1.0);
        for (std::size_t i = 1; i < fr.size(); ++i) {
            CHECK(fr[i] < fr[i - 1]);
            CHECK(fr[i] > 0.0);
        }
    }

    CHECK_THROWS_AS(dim_frequencies(RopeConfig{3, 10000.0}), ArgumentError);
    CHECK_THROWS_AS(dim_frequencies(RopeConfig{4, 0.5}), ArgumentError);
}

TEST_CASE("wavelength reciprocity") {
    const RopeConfig cfg{128, 500000.0};
    auto f = dim_frequencies(cfg);
    auto lam = wavelengths(cfg);
    REQUIRE(f.size() == lam.size());
    CHECK(lam[0] == doctest::Approx(2.0 * std::numbers::pi));
    for (std::size_t i = 0; i < f.size(); ++i) {
        CHECK(lam[i] == doctest::Approx(2.0 * std::numbers::pi / f[i]).epsilon(1e-12));
        if (i) CHECK(lam[i] > lam[i - 1]);
    }

    // i=1, d=4, base 10000: lambda = 2*pi*100
    auto small = wavelengths(RopeConfig{4, 10000.0});
    CHECK(small[1] == doctest::Approx(2.0 * std::numbers::pi * 100.0));

    // doubling the base raises every wavelength beyond the first
    auto doubled = wavelengths(RopeConfig{128, 1'000'000.0});
    auto orig = wavelengths(RopeConfig{128, 500000.0});
    for (std::size_t i = 1; i < orig.size(); ++i) CHECK(doubled[i] > orig[i]);
}

TEST_CASE("max supported context") {
    const double at_150m = max_supported_context(RopeConfig{128, 150e6});
    const double at_500k = max_supported_context(RopeConfig{128, 500000.0});
    CHECK(at_150m == doctest::Approx(7.02e8).epsilon(0.01));
    CHECK(at_500k == doctest::Approx(2.56e6).epsilon(0.01));
    CHECK(at_150m > 131072.0);
    CHECK(at_150m > at_500k);

    // equals the longest wavelength
    auto lam = wavelengths(RopeConfig{128, 150e6});
    CHECK(at_150m == doctest::Approx(lam.back()).epsilon(1e-12));

    // d=2: exponent 0, always 2*pi
    CHECK(max_supported_context(RopeConfig{2, 123456.0}) ==
          doctest::Approx(2.0 * std::numbers::pi));
}

TEST_CASE("base scaling methods") {
    const RopeConfig cfg{128, 500000.0};

    auto exp = scale_base_for_context(cfg, 8192, 131072, RopeScaleMethod::ExplicitBase, 150e6);
    CHECK(exp.config.base == doctest::Approx(150e6));
    CHECK(exp.position_scale == 1.0);

    auto ntk = scale_base_for_context(RopeConfig{128, 10000.0}, 8192, 4 * 8192,
                                      RopeScaleMethod::NtkAware);
    CHECK(ntk.config.base == doctest::Approx(10000.0 * std::pow(4.0, 128.0 / 126.0)));

    auto pi_scale =
        scale_base_for_context(cfg, 8192, 131072, RopeScaleMethod::PositionInterpolation);
    CHECK(pi_scale.config.base == doctest::Approx(cfg.base));
    CHECK(pi_scale.position_scale == doctest::Approx(16.0));

    CHECK_THROWS_AS(scale_base_for_context(cfg, 131072, 8192, RopeScaleMethod::NtkAware),
                    ArgumentError);
}

TEST_CASE("ntk identity at s=1 and wavelength growth for s>1") {
    const RopeConfig cfg{64, 10000.0};
    auto identity = scale_base_for_context(cfg, 4096, 4096, RopeScaleMethod::NtkAware);
    auto f0 = dim_frequencies(cfg);
    auto f1 = dim_frequencies(identity.config);
    for (std::size_t i = 0; i < f0.size(); ++i) {
        CHECK(f1[i] == doctest::Approx(f0[i]).epsilon(1e-12));
    }

    auto scaled = scale_base_for_context(cfg, 4096, 16384, RopeScaleMethod::NtkAware);
    auto lam0 = wavelengths(cfg);
    auto lam1 = wavelengths(scaled.config);
    for (std::size_t i = 1; i < lam0.size(); ++i) CHECK(lam1[i] > lam0[i]);
}
