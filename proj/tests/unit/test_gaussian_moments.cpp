#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cantion/fock_oracle.hpp"
#include "cantion/gaussian_moments.hpp"
#include "cantion/validation.hpp"

using namespace cantion;

namespace {

// Direct multinomial expansion of rho exp(a1 x^2 + a2 x y + a3 y^2) applied
// to the vacuum: c[i][j] = rho sqrt(i! j!) sum a1^k1 a2^k2 a3^k3 / (k1! k2! k3!)
// over 2 k1 + k2 = i, k2 + 2 k3 = j.
cplx multinomial_amp(const AnsatzState& s, int i, int j) {
    cplx sum{};
    for (int k2 = 0; k2 <= std::min(i, j); ++k2) {
        if ((i - k2) % 2 != 0 || (j - k2) % 2 != 0) continue;
        const int k1 = (i - k2) / 2, k3 = (j - k2) / 2;
        const double log_mag = 0.5 * (std::lgamma(i + 1.0) + std::lgamma(j + 1.0)) - std::lgamma(k1 + 1.0) -
                               std::lgamma(k2 + 1.0) - std::lgamma(k3 + 1.0);
        sum += std::exp(log_mag) * std::pow(s.alpha1, k1) * std::pow(s.alpha2, k2) * std::pow(s.alpha3, k3);
    }
    return s.rho * sum;
}

}  // namespace

TEST(StateNorm, InitialStateIsNormalized) {
    EXPECT_NEAR(state_norm(initial_ansatz(6.0)), 1.0, 1e-14);
    EXPECT_EQ(state_norm(AnsatzState{}), 1.0);
}

TEST(StateNorm, SingleModeClosedForm) {
    const AnsatzState s{cplx{0.3, 0.4}, cplx{0.1, -0.35}, 0.0, 0.0};
    EXPECT_NEAR(state_norm(s), 0.25 / std::sqrt(1.0 - 4.0 * std::norm(s.alpha1)), 1e-15);
}

TEST(MeanOccupations, InitialState) {
    for (double n : {0.0, 1.0, 6.0, 13.5}) {
        const MomentRecord r = mean_occupations(initial_ansatz(n));
        EXPECT_NEAR(r.n_a, n, 1e-11);
        EXPECT_EQ(r.n_b, 0.0);
    }
}

TEST(MeanOccupations, TwoModeSqueezedVacuum) {
    const AnsatzState s{1.0, 0.0, 0.5, 0.0};
    const MomentRecord r = mean_occupations(s);
    EXPECT_NEAR(r.n_a, 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(r.n_b, 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(r.norm, 4.0 / 3.0, 1e-15);

    // sum_n 0.5^n |n, n>
    double norm = 0.0, na = 0.0;
    for (int n = 0; n < 200; ++n) {
        const double p = std::pow(0.25, n);
        norm += p;
        na += n * p;
    }
    EXPECT_NEAR(r.norm, norm, 1e-14);
    EXPECT_NEAR(r.n_a, na / norm, 1e-14);
}

TEST(MeanOccupations, RejectsNonNormalizable) {
    EXPECT_THROW(mean_occupations(AnsatzState{1.0, 0.5, 0.0, 0.0}), NormSingular);
    EXPECT_THROW(state_norm(AnsatzState{1.0, 0.0, 1.2, 0.0}), NormSingular);
}

TEST(ExpandAnsatz, MatchesMultinomialExpansion) {
    std::mt19937_64 rng(7);
    for (int k = 0; k < 20; ++k) {
        const AnsatzState s = random_ansatz_state(rng);
        const FockState f = expand_ansatz(s, 24);
        for (int i = 0; i <= 24; ++i)
            for (int j = 0; j <= 24; ++j) {
                const cplx ref = multinomial_amp(s, i, j);
                ASSERT_NEAR(std::abs(f.at(i, j) - ref), 0.0, 1e-13 * std::max(1.0, std::abs(ref)))
                    << "state " << k << " at (" << i << ", " << j << ")";
            }
    }
}

TEST(MeanOccupations, MatchesFockExpansionForRandomStates) {
    std::mt19937_64 rng(12345);
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
        const AnsatzState s = random_ansatz_state(rng, 0.8);
        const MomentRecord a = mean_occupations(s);
        const MomentRecord f = fock_occupations(expand_ansatz_converged(s));
        worst = std::max({worst, std::abs(a.norm - f.norm) / f.norm, std::abs(a.n_a - f.n_a),
                          std::abs(a.n_b - f.n_b)});
    }
    EXPECT_LT(worst, 1e-8);
}

TEST(MeanOccupations, ModeSwapAndPhaseInvariance) {
    std::mt19937_64 rng(99);
    for (int k = 0; k < 100; ++k) {
        const AnsatzState s = random_ansatz_state(rng);
        const MomentRecord a = mean_occupations(s);
        const MomentRecord b = mean_occupations(s.mode_swapped());
        EXPECT_NEAR(a.n_a, b.n_b, 1e-15 * std::max(1.0, a.n_a));
        EXPECT_NEAR(a.n_b, b.n_a, 1e-15 * std::max(1.0, a.n_b));
        EXPECT_NEAR(a.norm, b.norm, 1e-15 * a.norm);
        AnsatzState ph = s;
        ph.rho *= std::polar(1.0, 0.1 * k);
        const MomentRecord c = mean_occupations(ph);
        EXPECT_NEAR(a.norm, c.norm, 1e-15 * a.norm);
        EXPECT_EQ(a.n_a, c.n_a);
        EXPECT_EQ(a.n_b, c.n_b);
    }
}

TEST(Series, NormExamples) {
    EXPECT_EQ(series_norm_partial(0.0, 1), 1.0);
    EXPECT_EQ(series_norm_partial(0.0, 50), 1.0);
    EXPECT_NEAR(series_norm_partial(0.25, 60), 1.0 / std::sqrt(0.75), 1e-12);
    EXPECT_NEAR(series_norm_partial(0.462910, 400), std::sqrt(7.0), 1e-5);  // x is rounded
    const double x = 0.5 * std::sqrt(6.0 / 7.0);
    EXPECT_NEAR(series_norm_partial(x, 400), std::sqrt(7.0), 1e-9);
}

TEST(Series, OccupationExamples) {
    EXPECT_EQ(series_occupation_partial(0.0, 10), 1.0);
    EXPECT_NEAR(series_occupation_partial(0.25, 80), std::pow(0.75, -1.5), 1e-12);
    const double x = 0.5 * std::sqrt(6.0 / 7.0);
    EXPECT_NEAR(series_occupation_partial(x, 600), std::pow(7.0, 1.5), 1e-6);
}

TEST(Series, ConvergeToClosedForms) {
    for (double x : {0.1, 0.25, 0.462910}) {
        const double q = 1.0 - 4.0 * x * x;
        EXPECT_NEAR(series_norm_partial(x, 3000), std::pow(q, -0.5), 1e-9);
        EXPECT_NEAR(series_occupation_partial(x, 3000), std::pow(q, -1.5), 1e-9);
    }
}

TEST(Series, DivergentArgumentRejected) {
    EXPECT_THROW(series_norm_partial(0.5, 10), DomainError);
    EXPECT_THROW(series_occupation_partial(-0.7, 10), DomainError);
}

TEST(Series, SingleModeConsistency) {
    const AnsatzState s{cplx{0.0, 0.9}, cplx{-0.2, 0.33}, 0.0, 0.0};
    const double x = std::abs(s.alpha1);
    const MomentRecord r = mean_occupations(s);
    EXPECT_NEAR(r.norm, 0.81 * series_norm_partial(x, 5000), 1e-12);
    EXPECT_NEAR(r.n_a * r.norm + r.norm, 0.81 * series_occupation_partial(x, 5000), 1e-11);
}

TEST(SqueezeMatrix, SingularValue) {
    const SqueezeMatrix m(AnsatzState{1.0, 0.25, 0.0, 0.0});
    EXPECT_NEAR(m.largest_singular_value(), 0.5, 1e-15);
    const SqueezeMatrix t(AnsatzState{1.0, 0.0, cplx{0.0, 0.6}, 0.0});
    EXPECT_NEAR(t.largest_singular_value(), 0.6, 1e-15);
}
