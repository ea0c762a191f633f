#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace cdsfcrf;
using namespace testing_support;

namespace {

struct Instance {
    Image y, obs;
    KSpace x;
    SamplingMask mask;
    CliqueSet cliques;
};

// Random 8x8 case with obs and y close enough that pairwise terms are neither
// saturated nor negligible at sigma = 0.2.
Instance random_instance(std::uint64_t seed, Dims d = {8, 8}) {
    Instance in;
    in.obs = random_image(d, seed, 0.0, 1.0);
    in.y = random_image(d, seed + 1000, 0.0, 1.0);
    in.x = dft2_forward(random_image(d, seed + 2000));
    in.mask = random_mask(d, seed + 3000);
    CliqueSamplingConfig c;
    c.gamma = 0.3;
    c.sigma_s = 2.0;
    c.sigma_d = 0.5;
    c.candidate_radius = 0;
    c.seed = seed;
    in.cliques = sample_cliques(in.obs, c);
    return in;
}

// Elementwise agreement within `rel` where the analytic value exceeds 1e-8.
void expect_matches_fd(const Image& analytic, const std::function<double(const Image&)>& f, const Image& y,
                       double rel, const std::vector<std::size_t>& pixels) {
    for (std::size_t k : pixels) {
        const double fd = central_difference(f, y, k);
        if (std::abs(analytic[k]) > 1e-8) {
            EXPECT_LE(rel_err(analytic[k], fd), rel) << "pixel " << k << " analytic " << analytic[k] << " fd " << fd;
        } else {
            EXPECT_NEAR(fd, 0.0, 1e-7);
        }
    }
}

std::vector<std::size_t> all_pixels(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), 0);
    return v;
}

} // namespace

TEST(UnaryEnergy, ZeroAtExactFidelity) {
    const Image img = random_image(Dims{16, 16}, 1);
    const SamplingMask full(img.dims(), 1);
    const KSpace x = apply_mask(dft2_forward(img), full);
    EXPECT_LE(unary_energy(zero_filled_recon(x), x, full), 1e-18);
}

TEST(UnaryEnergy, ZeroImageGivesObservedPower) {
    const KSpace x = random_kspace(Dims{12, 12}, 2);
    const SamplingMask m = random_mask(x.dims(), 3);
    double expected = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (m[i]) expected += std::norm(x[i]);
    EXPECT_NEAR(unary_energy(Image(x.dims(), 0.0), x, m), expected, 1e-12 * expected);
}

TEST(UnaryEnergy, MatchesNaiveDftOracle) {
    const Dims d{16, 16};
    const Image y = random_image(d, 4);
    const KSpace x = random_kspace(d, 5);
    const SamplingMask m = random_mask(d, 6);
    const KSpace fy = naive_dft(y);
    double expected = 0.0;
    for (std::size_t i = 0; i < fy.size(); ++i)
        if (m[i]) expected += std::norm(fy[i] - x[i]);
    EXPECT_LE(rel_err(unary_energy(y, x, m), expected), 1e-10);
}

TEST(UnaryEnergy, DimensionMismatch) {
    EXPECT_THROW(unary_energy(Image(Dims{4, 4}), KSpace(Dims{4, 5}), SamplingMask(Dims{4, 4}, 1)), DimensionError);
    EXPECT_THROW(unary_gradient(Image(Dims{4, 4}), KSpace(Dims{4, 4}), SamplingMask(Dims{5, 4}, 1)), DimensionError);
}

TEST(UnaryGradient, ZeroResidualZeroGradient) {
    const Image img = random_image(Dims{8, 8}, 7);
    const SamplingMask m(img.dims(), 1);
    for (double g : unary_gradient(img, dft2_forward(img), m)) EXPECT_NEAR(g, 0.0, 1e-14);
}

TEST(UnaryGradient, MatchesFiniteDifferences) {
    const Instance in = random_instance(8);
    const Image g = unary_gradient(in.y, in.x, in.mask);
    std::mt19937_64 gen(1);
    std::vector<std::size_t> pixels;
    for (int k = 0; k < 10; ++k) pixels.push_back(gen() % 64);
    expect_matches_fd(g, [&](const Image& y) { return unary_energy(y, in.x, in.mask); }, in.y, 1e-5, pixels);
}

TEST(UnaryGradient, SmallStepDecreasesEnergy) {
    const Instance in = random_instance(9);
    const Image g = unary_gradient(in.y, in.x, in.mask);
    Image next = in.y;
    for (std::size_t i = 0; i < next.size(); ++i) next[i] -= 0.05 * g[i];
    EXPECT_LT(unary_energy(next, in.x, in.mask), unary_energy(in.y, in.x, in.mask));
}

TEST(PairwiseEnergy, ConstantStateOrObservationGivesZero) {
    const Instance in = random_instance(10);
    EXPECT_EQ(pairwise_energy(Image(in.y.dims(), 0.3), in.obs, in.cliques, 0.2), 0.0);
    EXPECT_EQ(pairwise_energy(in.y, Image(in.y.dims(), 0.7), in.cliques, 0.2), 0.0);
}

TEST(PairwiseEnergy, SinglePairScalarOracle) {
    const double sigma = 0.3;
    const double diff = sigma * std::sqrt(3.0);
    Image y(Dims{2, 1}), obs(Dims{2, 1});
    y[0] = 0.1, y[1] = 0.1 + diff;
    obs[0] = 0.5, obs[1] = 0.5 - diff;
    const std::pair<std::uint32_t, std::uint32_t> pair{0, 1};
    const CliqueSet one(Dims{2, 1}, std::span(&pair, 1));
    const double expected = 1.0 - std::exp(-3.0 * sigma * sigma);
    EXPECT_NEAR(pairwise_energy(y, obs, one, sigma), expected, 1e-15);
    // direct evaluation of the kernel form
    const double f = std::exp(-(diff * diff) * (diff * diff) / (3.0 * sigma * sigma));
    EXPECT_NEAR(pairwise_energy(y, obs, one, sigma), 1.0 - f, 1e-15);
}

TEST(PairwiseEnergy, BoundsAndCliqueMonotonicity) {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 10; ++trial) {
        const Instance in = random_instance(gen());
        const double e = pairwise_energy(in.y, in.obs, in.cliques, 0.2);
        EXPECT_GE(e, 0.0);
        EXPECT_LE(e, double(in.cliques.num_pairs()));
        // Superset of pairs: sample at a lower gamma with the same key.
        CliqueSamplingConfig c;
        c.gamma = 0.1;
        c.sigma_s = 2.0;
        c.sigma_d = 0.5;
        c.candidate_radius = 0;
        c.seed = in.cliques.metadata().seed;
        const CliqueSet more = sample_cliques(in.obs, c);
        ASSERT_GE(more.num_pairs(), in.cliques.num_pairs());
        EXPECT_GE(pairwise_energy(in.y, in.obs, more, 0.2), e);
    }
}

TEST(PairwiseEnergy, CliquesForOtherDimsRejected) {
    const Instance in = random_instance(12);
    const Image other(Dims{4, 4}, 0.0);
    EXPECT_THROW(pairwise_energy(other, other, in.cliques, 0.2), DimensionError);
    EXPECT_THROW(pairwise_gradient(in.y, other, in.cliques, 0.2), DimensionError);
}

TEST(PairwiseGradient, ConstantStateZeroGradient) {
    const Instance in = random_instance(13);
    for (double g : pairwise_gradient(Image(in.y.dims(), 0.5), in.obs, in.cliques, 0.2)) EXPECT_EQ(g, 0.0);
}

TEST(PairwiseGradient, MatchesFiniteDifferences) {
    for (std::uint64_t seed = 14; seed < 19; ++seed) {
        const Instance in = random_instance(seed);
        const Image g = pairwise_gradient(in.y, in.obs, in.cliques, 0.2);
        expect_matches_fd(g, [&](const Image& y) { return pairwise_energy(y, in.obs, in.cliques, 0.2); }, in.y, 1e-5,
                          all_pixels(64));
    }
}

TEST(PairwiseGradient, PairContributionsAreAntisymmetric) {
    Image y(Dims{3, 1}), obs(Dims{3, 1});
    y[0] = 0.2, y[1] = 0.5, y[2] = 0.9;
    obs[0] = 0.1, obs[1] = 0.4, obs[2] = 0.3;
    const std::pair<std::uint32_t, std::uint32_t> pair{0, 2};
    const Image g = pairwise_gradient(y, obs, CliqueSet(Dims{3, 1}, std::span(&pair, 1)), 0.1);
    EXPECT_NE(g[0], 0.0);
    EXPECT_EQ(g[0], -g[2]);
    EXPECT_EQ(g[1], 0.0);
}

TEST(TotalEnergy, BreakdownComposition) {
    const Instance in = random_instance(20);
    EnergyParams p{0.7, 0.0, 0.2};
    auto b = total_energy(in.y, in.x, in.mask, in.obs, in.cliques, p);
    EXPECT_EQ(b.total, 0.7 * b.unary);

    p = {0.0, 1.0, 0.2};
    EXPECT_EQ(total_energy(Image(in.y.dims(), 0.4), in.x, in.mask, in.obs, in.cliques, p).total, 0.0);

    p = {0.8, 0.3, 0.2};
    b = total_energy(in.y, in.x, in.mask, in.obs, in.cliques, p);
    const double u = unary_energy(in.y, in.x, in.mask);
    const double pw = pairwise_energy(in.y, in.obs, in.cliques, 0.2);
    EXPECT_EQ(b.unary, u);
    EXPECT_EQ(b.pairwise, pw);
    EXPECT_LE(std::abs(b.total - (0.8 * u + 0.3 * pw)), 1e-12 * std::abs(b.total));
}

TEST(TotalEnergy, ParameterValidation) {
    const Instance in = random_instance(21);
    EXPECT_THROW(total_energy(in.y, in.x, in.mask, in.obs, in.cliques, {0.0, 0.0, 1.0}), ParameterError);
    EXPECT_THROW(total_energy(in.y, in.x, in.mask, in.obs, in.cliques, {1.0, 0.0, 0.0}), ParameterError);
    EXPECT_THROW(total_energy(in.y, in.x, in.mask, in.obs, in.cliques, {-1.0, 2.0, 1.0}), ParameterError);
}

TEST(TotalGradient, ReducesToComponents) {
    const Instance in = random_instance(22);
    EXPECT_EQ(total_gradient(in.y, in.x, in.mask, in.obs, in.cliques, {1.0, 0.0, 0.2}),
              unary_gradient(in.y, in.x, in.mask));
    EXPECT_EQ(total_gradient(in.y, in.x, in.mask, in.obs, in.cliques, {0.0, 1.0, 0.2}),
              pairwise_gradient(in.y, in.obs, in.cliques, 0.2));
}

TEST(TotalGradient, MatchesFiniteDifferences) {
    const EnergyParams p{0.9, 0.4, 0.2};
    for (std::uint64_t seed = 23; seed < 26; ++seed) {
        const Instance in = random_instance(seed);
        const Image g = total_gradient(in.y, in.x, in.mask, in.obs, in.cliques, p);
        expect_matches_fd(
            g, [&](const Image& y) { return total_energy(y, in.x, in.mask, in.obs, in.cliques, p).total; }, in.y,
            1e-5, all_pixels(64));
    }
}

TEST(EvaluateEnergy, AgreesWithSeparateCalls) {
    const Instance in = random_instance(27);
    const EnergyParams p{1.3, 0.6, 0.2};
    const auto both = evaluate_energy(in.y, in.x, in.mask, in.obs, in.cliques, p);
    const auto b = total_energy(in.y, in.x, in.mask, in.obs, in.cliques, p);
    const Image g = total_gradient(in.y, in.x, in.mask, in.obs, in.cliques, p);
    EXPECT_NEAR(both.energy.total, b.total, 1e-12 * b.total);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(both.gradient[i], g[i], 1e-12);
}
