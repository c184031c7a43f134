#pragma once

// Closed-form solution of the rotating-wave ansatz equations. With
// x = (alpha1, alpha2, alpha3) they read i dx/dt = K x, so x(t) is a sum of
// three eigenmodes e^{Omega t} with Omega = -i lambda, lambda an eigenvalue of K.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

#include "cantion/core_model.hpp"
#include "cantion/errors.hpp"

namespace cantion {

using Vec3c = std::array<cplx, 3>;

struct Mat3 {
    std::array<cplx, 9> m{};

    cplx& operator()(int r, int c) noexcept { return m[3 * r + c]; }
    const cplx& operator()(int r, int c) const noexcept { return m[3 * r + c]; }

    cplx trace() const noexcept { return m[0] + m[4] + m[8]; }

    cplx det() const noexcept {
        const Mat3& a = *this;
        return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
               a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
               a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
    }

    /// Sum of the three principal 2x2 minors.
    cplx principal_minor_sum() const noexcept {
        const Mat3& a = *this;
        return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0) + a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0) +
               a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
    }

    Vec3c operator*(const Vec3c& v) const noexcept {
        Vec3c r{};
        for (int i = 0; i < 3; ++i) r[i] = m[3 * i] * v[0] + m[3 * i + 1] * v[1] + m[3 * i + 2] * v[2];
        return r;
    }
};

/// One eigen-solution x(t) = vec * e^{omega_big t} of the RWA system.
struct EigenMode {
    cplx omega_big;  ///< growth/rotation rate [1/us]
    Vec3c vec;       ///< (alpha10, alpha20, alpha30)
};

/// K of i d/dt (a1, a2, a3)^T = K (a1, a2, a3)^T.
inline Mat3 rwa_matrix(const SystemParams& p) {
    p.validate();
    const cplx wa{p.omega, -p.gamma_a};
    const cplx wb{p.nu, -p.gamma_b};
    const double k = p.kappa;
    Mat3 K;
    K(0, 0) = 2.0 * wa;
    K(0, 1) = -k;
    K(1, 0) = -2.0 * k;
    K(1, 1) = wa + wb;
    K(1, 2) = -2.0 * k;
    K(2, 1) = -k;
    K(2, 2) = 2.0 * wb;
    return K;
}

namespace detail {

inline Vec3c cross(const Vec3c& a, const Vec3c& b) noexcept {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline double norm2(const Vec3c& v) noexcept { return std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]); }

/// Null vector of the (rank-2) matrix K - lambda I: the cross product of the
/// pair of rows giving the largest result.
inline Vec3c null_vector(const Mat3& K, cplx lambda) {
    std::array<Vec3c, 3> rows;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) rows[r][c] = K(r, c) - (r == c ? lambda : cplx{});
    Vec3c best{};
    double best_n = -1.0;
    for (auto [i, j] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}}) {
        const Vec3c v = cross(rows[i], rows[j]);
        const double n = norm2(v);
        if (n > best_n) {
            best_n = n;
            best = v;
        }
    }
    if (!(best_n > 0.0)) throw DegenerateModes("eigenvector is not unique (rank of K - lambda I below 2)");
    const double s = 1.0 / std::sqrt(best_n);
    for (auto& z : best) z *= s;
    return best;
}

/// Solves A x = b for a 3x3 system by Gaussian elimination with partial pivoting.
inline Vec3c solve3(Mat3 A, Vec3c b) {
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(A(r, col)) > std::abs(A(piv, col))) piv = r;
        if (std::abs(A(piv, col)) == 0.0) throw DegenerateModes("eigenvector matrix is singular");
        if (piv != col) {
            for (int c = 0; c < 3; ++c) std::swap(A(col, c), A(piv, c));
            std::swap(b[col], b[piv]);
        }
        for (int r = col + 1; r < 3; ++r) {
            const cplx f = A(r, col) / A(col, col);
            for (int c = col; c < 3; ++c) A(r, c) -= f * A(col, c);
            b[r] -= f * b[col];
        }
    }
    Vec3c x{};
    for (int r = 2; r >= 0; --r) {
        cplx acc = b[r];
        for (int c = r + 1; c < 3; ++c) acc -= A(r, c) * x[c];
        x[r] = acc / A(r, r);
    }
    return x;
}

}  // namespace detail

/// The three eigenmodes, ordered so that mode 0 is the one at
/// Omega = -(Ga + Gb) - i(w + v).
///
/// lambda = K22 is always an eigenvalue (K22 is the mean of K11 and K33). The
/// characteristic cubic is deflated by that root and the remaining quadratic
/// is solved in cancellation-free form.
inline std::array<EigenMode, 3> eigen_modes(const SystemParams& p) {
    const Mat3 K = rwa_matrix(p);
    const cplx known = K(1, 1);

    // det(lambda I - K) = lambda^3 - c2 lambda^2 + c1 lambda - c0
    const cplx c2 = K.trace();
    const cplx c1 = K.principal_minor_sum();
    // synthetic division by (lambda - known): lambda^2 + b lambda + c
    const cplx b = known - c2;
    const cplx c = c1 + known * b;
    const cplx disc = std::sqrt(b * b - 4.0 * c);
    const cplx q = -0.5 * (b + (std::real(std::conj(b) * disc) >= 0.0 ? disc : -disc));
    std::array<cplx, 3> lambda{known, q, q == cplx{} ? cplx{} : c / q};
    if (q == cplx{}) lambda[2] = -b;  // b = c = 0: double root at zero

    std::array<EigenMode, 3> modes;
    double scale = 0.0;
    for (int j = 0; j < 3; ++j) {
        modes[j].omega_big = -I_unit * lambda[j];
        scale = std::max(scale, std::abs(modes[j].omega_big));
    }
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (std::abs(lambda[i] - lambda[j]) <= 1e-10 * scale) {
                throw DegenerateModes("RWA eigenfrequencies coincide; use numerical integration");
            }
    for (int j = 0; j < 3; ++j) modes[j].vec = detail::null_vector(K, lambda[j]);
    return modes;
}

/// Analytic RWA state at time t for the initial condition initial_ansatz(n_a0).
/// rho is a constant of the RWA motion.
inline AnsatzState propagate_rwa(double n_a0, const SystemParams& p, double t) {
    if (!(t >= 0.0)) throw DomainError("propagate_rwa: t must be >= 0");
    const AnsatzState init = initial_ansatz(n_a0);
    if (t == 0.0) return init;
    const auto modes = eigen_modes(p);
    Mat3 V;
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) V(k, j) = modes[j].vec[k];
    const Vec3c coef = detail::solve3(V, {init.alpha1, init.alpha2, init.alpha3});

    Vec3c x{};
    for (int j = 0; j < 3; ++j) {
        const cplx e = coef[j] * std::exp(modes[j].omega_big * t);
        for (int k = 0; k < 3; ++k) x[k] += e * modes[j].vec[k];
    }
    return {init.rho, x[0], x[1], x[2]};
}

}  // namespace cantion
