#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "cantion/core_model.hpp"
#include "cantion/gaussian_moments.hpp"

using namespace cantion;

TEST(InitialAnsatz, VacuumForZeroOccupation) {
    const AnsatzState s = initial_ansatz(0.0);
    EXPECT_EQ(s.rho, cplx(1.0));
    EXPECT_EQ(s.alpha1, cplx(0.0));
    EXPECT_EQ(s.alpha2, cplx(0.0));
    EXPECT_EQ(s.alpha3, cplx(0.0));
}

TEST(InitialAnsatz, SixQuanta) {
    const AnsatzState s = initial_ansatz(6.0);
    EXPECT_NEAR(s.rho.real(), std::pow(7.0, -0.25), 1e-15);
    EXPECT_NEAR(s.rho.real(), 0.614789, 1e-6);
    EXPECT_NEAR(s.alpha1.real(), 0.5 * std::sqrt(6.0 / 7.0), 1e-15);
    EXPECT_NEAR(s.alpha1.real(), 0.462910, 1e-6);
    EXPECT_EQ(s.rho.imag(), 0.0);
    EXPECT_EQ(s.alpha1.imag(), 0.0);
    EXPECT_EQ(s.alpha2, cplx(0.0));
    EXPECT_EQ(s.alpha3, cplx(0.0));
}

TEST(InitialAnsatz, ThreeQuanta) {
    const AnsatzState s = initial_ansatz(3.0);
    EXPECT_NEAR(s.rho.real(), 0.707107, 1e-6);
    EXPECT_NEAR(s.alpha1.real(), std::sqrt(3.0) / 4.0, 1e-15);
}

TEST(InitialAnsatz, RejectsNegativeAndNonFinite) {
    EXPECT_THROW(initial_ansatz(-1e-12), DomainError);
    EXPECT_THROW(initial_ansatz(std::numeric_limits<double>::quiet_NaN()), DomainError);
    EXPECT_THROW(initial_ansatz(std::numeric_limits<double>::infinity()), DomainError);
}

TEST(InitialAnsatz, NormalizedWithRequestedOccupation) {
    for (double n = 0.0; n <= 50.0; n += 0.37) {
        const AnsatzState s = initial_ansatz(n);
        ASSERT_GE(s.alpha1.real(), 0.0);
        ASSERT_LT(s.alpha1.real(), 0.5);
        ASSERT_LT(SqueezeMatrix(s).largest_singular_value(), 1.0);
        const MomentRecord r = mean_occupations(s);
        EXPECT_NEAR(r.norm, 1.0, 1e-12) << "n_a0 = " << n;
        EXPECT_NEAR(r.n_a, n, 1e-10 * std::max(1.0, n)) << "n_a0 = " << n;
        EXPECT_NEAR(r.n_b, 0.0, 1e-10);
    }
}

TEST(SystemParams, Validation) {
    EXPECT_TRUE((SystemParams{19.7, 19.7, 1.8, 0.0197, 0.0197}.valid()));
    EXPECT_TRUE((SystemParams{1.0, 1.0, 0.0, 0.0, 0.0}.valid()));
    EXPECT_THROW((SystemParams{0.0, 1.0, 1.0, 0.0, 0.0}.validate()), DomainError);
    EXPECT_THROW((SystemParams{1.0, -1.0, 1.0, 0.0, 0.0}.validate()), DomainError);
    EXPECT_THROW((SystemParams{1.0, 1.0, -0.1, 0.0, 0.0}.validate()), DomainError);
    EXPECT_THROW((SystemParams{1.0, 1.0, 1.0, -1e-3, 0.0}.validate()), DomainError);
    EXPECT_THROW((SystemParams{1.0, 1.0, 1.0, 0.0, std::numeric_limits<double>::infinity()}.validate()),
                 DomainError);
}

TEST(SystemParams, ModeSwapIsInvolution) {
    const SystemParams p{19.7, 16.0, 4.0, 0.01, 0.03};
    const SystemParams q = p.mode_swapped();
    EXPECT_EQ(q.omega, 16.0);
    EXPECT_EQ(q.gamma_a, 0.03);
    EXPECT_EQ(q.mode_swapped(), p);
}

TEST(ModelKind, Names) {
    EXPECT_EQ(to_string(ModelKind::Full), "full");
    EXPECT_EQ(to_string(ModelKind::Rwa), "rwa");
}
