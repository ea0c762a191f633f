#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace cdsfcrf;
using namespace testing_support;

TEST(Phantom, EmptySceneIsConstantBackground) {
    PhantomSpec s;
    s.width = 40;
    s.height = 30;
    s.background = 0.2;
    for (double v : generate_phantom(s)) EXPECT_DOUBLE_EQ(v, 0.2);
}

TEST(Phantom, CenterPixelIsUrethra) {
    const Image img = generate_phantom(default_prostate_spec(256, 256));
    EXPECT_DOUBLE_EQ(img.at(128, 128), kUrethraLevel);
}

// Shapes in the default scene are nested without overlap, so the exact mean
// follows from the analytic areas.
TEST(Phantom, MeanMatchesAnalyticAreaOracle) {
    for (std::uint64_t seed : {0u, 1u, 7u}) {
        const PhantomSpec s = default_prostate_spec(256, 256, seed);
        const double w = 256.0, h = 256.0, m = 256.0;
        const double total = w * h;
        const double gland = std::numbers::pi * s.prostate->ax * w * s.prostate->ay * h;
        const double ur = std::numbers::pi * std::pow(s.urethra->radius * m, 2);
        double lesions = 0.0, lesion_mass = 0.0;
        for (const auto& l : s.lesions) {
            const double a = std::numbers::pi * std::pow(l.radius * m, 2);
            lesions += a;
            lesion_mass += a * l.intensity;
        }
        const double expected = (s.background * (total - gland) + s.prostate->intensity * (gland - lesions - ur) +
                                 lesion_mass + s.urethra->intensity * ur) /
                                total;
        const Image img = generate_phantom(s);
        double mean = 0.0;
        for (double v : img) mean += v;
        mean /= total;
        EXPECT_NEAR(mean, expected, 1e-3) << "seed " << seed;
    }
}

TEST(Phantom, DefaultSpecIsValidAndDeterministic) {
    const PhantomSpec a = default_prostate_spec(256, 256, 42);
    EXPECT_NO_THROW(validate(a));
    EXPECT_EQ(a, default_prostate_spec(256, 256, 42));
    EXPECT_NE(a, default_prostate_spec(256, 256, 43));
    EXPECT_EQ(a.lesions.size(), 3u);
    EXPECT_DOUBLE_EQ(a.background, 0.15);
    EXPECT_DOUBLE_EQ(a.prostate->intensity, 0.6);
    EXPECT_DOUBLE_EQ(a.urethra->intensity, 0.1);
    for (const auto& l : a.lesions) EXPECT_DOUBLE_EQ(l.intensity, 0.35);
    // 5 : 4.5 gland proportions, 40% of the width.
    EXPECT_NEAR(a.prostate->ax * 256.0 / (a.prostate->ay * 256.0), 5.0 / 4.5, 1e-12);
    EXPECT_NEAR(2.0 * a.prostate->ax, 0.4, 1e-12);
}

TEST(Phantom, LesionSizesSpanHalfToOneCentimetre) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const PhantomSpec s = default_prostate_spec(256, 256, seed);
        for (std::size_t i = 0; i < s.lesions.size(); ++i) {
            const double f = lesion_radius_fraction_of_major_axis(s, i);
            EXPECT_GE(f, 0.25 / 5.0 - 1e-12);
            EXPECT_LE(f, 0.5 / 5.0 + 1e-12);
        }
        // urethra: 0.7 cm diameter against the 5 cm axis
        EXPECT_NEAR(s.urethra->radius * 256.0 / (2.0 * s.prostate->ax * 256.0), 0.35 / 5.0, 1e-12);
    }
}

TEST(Phantom, BitIdenticalAndBounded) {
    const PhantomSpec s = default_prostate_spec(96, 80, 5);
    const Image a = generate_phantom(s), b = generate_phantom(s);
    EXPECT_EQ(a, b);
    for (double v : a) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
}

TEST(Phantom, LesionPixelsLieInsideGland) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const PhantomSpec s = default_prostate_spec(128, 128, seed);
        const double w = 128.0, h = 128.0, m = 128.0;
        for (std::size_t r = 0; r < 128; ++r) {
            for (std::size_t c = 0; c < 128; ++c) {
                const double x = c + 0.5, y = r + 0.5;
                for (const auto& l : s.lesions) {
                    if (std::hypot(x - l.cx * w, y - l.cy * h) > l.radius * m) continue;
                    const double dx = (x - s.prostate->cx * w) / (s.prostate->ax * w);
                    const double dy = (y - s.prostate->cy * h) / (s.prostate->ay * h);
                    EXPECT_LE(dx * dx + dy * dy, 1.0);
                }
            }
        }
    }
}

TEST(Phantom, ValidationErrors) {
    EXPECT_THROW(default_prostate_spec(31, 64), ParameterError);
    PhantomSpec s = default_prostate_spec(64, 64);
    s.lesions[0].cx = 0.99;
    EXPECT_THROW(generate_phantom(s), ParameterError);
    s = default_prostate_spec(64, 64);
    s.lesions[1].radius = 0.0;
    EXPECT_THROW(generate_phantom(s), ParameterError);
    s = default_prostate_spec(64, 64);
    s.prostate->intensity = 1.2;
    EXPECT_THROW(generate_phantom(s), ParameterError);
}

TEST(Phantom, SpecTextRoundTripRegeneratesSameImage) {
    const PhantomSpec s = default_prostate_spec(128, 96, 9);
    const PhantomSpec back = phantom_spec_from_text(to_text(s));
    EXPECT_EQ(back, s);
    EXPECT_EQ(generate_phantom(back), generate_phantom(s));
    EXPECT_THROW(phantom_spec_from_text("width = 10\n"), FormatError);
}
