#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cantion/ansatz_dynamics.hpp"
#include "cantion/rwa_analytic.hpp"
#include "cantion/simulation.hpp"
#include "cantion/validation.hpp"

using namespace cantion;

namespace {

const SystemParams kFig2{19.7, 19.7, 1.8, 0.0197, 0.0197};

// exp(-i K t) x0 by scaling and squaring with a Taylor kernel, no eigenvectors.
Vec3c expm_apply(const Mat3& K, double t, Vec3c x0) {
    double nrm = 0.0;
    for (const cplx& z : K.m) nrm = std::max(nrm, std::abs(z));
    int squarings = 0;
    double h = t;
    while (nrm * std::abs(h) > 0.1) {
        h *= 0.5;
        ++squarings;
    }
    Mat3 A;  // -i K h
    for (int i = 0; i < 9; ++i) A.m[i] = -I_unit * K.m[i] * h;
    Mat3 E, term;
    for (int i = 0; i < 3; ++i) E(i, i) = term(i, i) = 1.0;
    for (int k = 1; k < 30; ++k) {
        Mat3 next;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                cplx s{};
                for (int l = 0; l < 3; ++l) s += term(i, l) * A(l, j);
                next(i, j) = s / static_cast<double>(k);
            }
        term = next;
        for (int i = 0; i < 9; ++i) E.m[i] += term.m[i];
    }
    for (int s = 0; s < squarings; ++s) {
        Mat3 sq;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                cplx acc{};
                for (int l = 0; l < 3; ++l) acc += E(i, l) * E(l, j);
                sq(i, j) = acc;
            }
        E = sq;
    }
    return E * x0;
}

}  // namespace

TEST(RwaMatrix, Entries) {
    const Mat3 K = rwa_matrix(kFig2);
    EXPECT_EQ(K(0, 0), cplx(39.4, -0.0394));
    EXPECT_EQ(K(0, 1), cplx(-1.8));
    EXPECT_EQ(K(1, 0), cplx(-3.6));
    EXPECT_EQ(K(0, 2), cplx(0.0));
    EXPECT_EQ(K(2, 0), cplx(0.0));
    SystemParams p = kFig2;
    p.kappa = 0.0;
    const Mat3 D = rwa_matrix(p);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            if (i != j) {
                EXPECT_EQ(D(i, j), cplx(0.0));
            }
        }
    std::mt19937_64 rng(5);
    for (int k = 0; k < 20; ++k) {
        const SystemParams q = random_params(rng);
        const cplx tr = rwa_matrix(q).trace();
        EXPECT_NEAR(std::abs(tr - cplx{3.0 * (q.omega + q.nu), -3.0 * (q.gamma_a + q.gamma_b)}), 0.0,
                    1e-13 * std::abs(tr));
    }
}

TEST(EigenModes, KnownModeIsExact) {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 100; ++k) {
        const SystemParams p = random_params(rng);
        const auto modes = eigen_modes(p);
        EXPECT_EQ(modes[0].omega_big, cplx(-(p.gamma_a + p.gamma_b), -(p.omega + p.nu)));
    }
}

TEST(EigenModes, ResonantSplittingIsTwoKappa) {
    const auto modes = eigen_modes(kFig2);
    const cplx lo{-0.0394, -(39.4 - 3.6)}, hi{-0.0394, -(39.4 + 3.6)};
    const bool order = std::abs(modes[1].omega_big - lo) < std::abs(modes[2].omega_big - lo);
    EXPECT_NEAR(std::abs((order ? modes[1] : modes[2]).omega_big - lo), 0.0, 1e-12);
    EXPECT_NEAR(std::abs((order ? modes[2] : modes[1]).omega_big - hi), 0.0, 1e-12);
}

TEST(EigenModes, MatchDiscriminantFormula) {
    // lambda = K22 +/- sqrt(d^2 + 4 k^2), d = (w - v) - i(Ga - Gb)
    std::mt19937_64 rng(17);
    for (int k = 0; k < 100; ++k) {
        const SystemParams p = random_params(rng);
        const cplx k22{p.omega + p.nu, -(p.gamma_a + p.gamma_b)};
        const cplx d{p.omega - p.nu, -(p.gamma_a - p.gamma_b)};
        const cplx r = std::sqrt(d * d + 4.0 * p.kappa * p.kappa);
        const auto modes = eigen_modes(p);
        for (cplx lam : {k22 + r, k22 - r}) {
            const cplx om = -I_unit * lam;
            const double dist = std::min(std::abs(modes[1].omega_big - om), std::abs(modes[2].omega_big - om));
            EXPECT_LT(dist, 1e-11 * std::abs(om));
        }
    }
}

TEST(EigenModes, DecoupledModes) {
    const SystemParams p{19.7, 16.0, 0.0, 0.0197, 0.03};
    const auto modes = eigen_modes(p);
    std::vector<cplx> expect{cplx{-2 * p.gamma_a, -2 * p.omega}, cplx{-(p.gamma_a + p.gamma_b), -(p.omega + p.nu)},
                             cplx{-2 * p.gamma_b, -2 * p.nu}};
    for (const cplx& e : expect) {
        double best = 1e300;
        for (const auto& m : modes) best = std::min(best, std::abs(m.omega_big - e));
        EXPECT_LT(best, 1e-12);
    }
}

TEST(EigenModes, DegenerateThrows) {
    EXPECT_THROW(eigen_modes(SystemParams{19.7, 19.7, 0.0, 0.0197, 0.0197}), DegenerateModes);
    EXPECT_THROW(propagate_rwa(6.0, SystemParams{19.7, 19.7, 0.0, 0.0, 0.0}, 1.0), DegenerateModes);
}

TEST(EigenModes, Invariants) {
    std::mt19937_64 rng(23);
    for (int k = 0; k < 200; ++k) {
        SystemParams p = random_params(rng);
        p.kappa = std::max(p.kappa, 0.05);
        const auto modes = eigen_modes(p);
        const Mat3 K = rwa_matrix(p);
        cplx sum{};
        for (const auto& m : modes) {
            sum += I_unit * m.omega_big;
            EXPECT_LE(m.omega_big.real(), 0.0);
            EXPECT_GT(detail::norm2(m.vec), 0.0);
            // K v = i Omega v
            const Vec3c kv = K * m.vec;
            for (int c = 0; c < 3; ++c) EXPECT_LT(std::abs(kv[c] - I_unit * m.omega_big * m.vec[c]), 1e-11 * 60.0);
            const cplx iw = I_unit * m.omega_big;
            const cplx lhs = p.kappa * m.vec[1];
            const cplx r1 = (2.0 * cplx{p.omega, -p.gamma_a} - iw) * m.vec[0];
            const cplx r3 = (2.0 * cplx{p.nu, -p.gamma_b} - iw) * m.vec[2];
            const double sc = std::max({std::abs(lhs), std::abs(r1), std::abs(r3)});
            EXPECT_LT(std::abs(lhs - r1), 1e-10 * sc);
            EXPECT_LT(std::abs(lhs - r3), 1e-10 * sc);
        }
        EXPECT_LT(std::abs(sum - K.trace()), 1e-12 * std::abs(K.trace()));
    }
}

TEST(PropagateRwa, IdentityAtZero) {
    EXPECT_EQ(propagate_rwa(6.0, kFig2, 0.0), initial_ansatz(6.0));
    EXPECT_THROW(propagate_rwa(6.0, kFig2, -0.1), DomainError);
}

TEST(PropagateRwa, MatchesMatrixExponential) {
    std::mt19937_64 rng(31);
    for (int k = 0; k < 30; ++k) {
        SystemParams p = random_params(rng);
        p.kappa = std::max(p.kappa, 0.1);
        const double t = 0.37 * (k % 7 + 1);
        const AnsatzState a = propagate_rwa(3.0, p, t);
        const Vec3c x = expm_apply(rwa_matrix(p), t, {initial_ansatz(3.0).alpha1, 0.0, 0.0});
        EXPECT_LT(std::abs(a.alpha1 - x[0]), 1e-10);
        EXPECT_LT(std::abs(a.alpha2 - x[1]), 1e-10);
        EXPECT_LT(std::abs(a.alpha3 - x[2]), 1e-10);
        EXPECT_EQ(a.rho, initial_ansatz(3.0).rho);
    }
}

TEST(PropagateRwa, MatchesIntegratorOnPresets) {
    for (int fig = 2; fig <= 5; ++fig) {
        const SystemParams p = figure_preset(fig).params;
        const Trajectory tr = integrate(initial_ansatz(6.0), p, ModelKind::Rwa, uniform_grid(3.0, 0.1));
        for (const auto& pt : tr) {
            const AnsatzState a = propagate_rwa(6.0, p, pt.t);
            EXPECT_LT(std::abs(a.rho - pt.state.rho), 1e-8);
            EXPECT_LT(std::abs(a.alpha1 - pt.state.alpha1), 1e-8) << "fig " << fig << " t " << pt.t;
            EXPECT_LT(std::abs(a.alpha2 - pt.state.alpha2), 1e-8);
            EXPECT_LT(std::abs(a.alpha3 - pt.state.alpha3), 1e-8);
        }
    }
}

TEST(PropagateRwa, CompleteTransferWithoutDamping) {
    const SystemParams p{19.7, 19.7, 1.8, 0.0, 0.0};
    const MomentRecord r = mean_occupations(propagate_rwa(6.0, p, std::numbers::pi / (2.0 * p.kappa)));
    EXPECT_LT(r.n_a, 1e-6);
    EXPECT_NEAR(r.n_b, 6.0, 1e-6);
}
