#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

#include "cantion/core_model.hpp"
#include "cantion/errors.hpp"

namespace cantion {

/// Dense 2x2 complex matrix, row major.
struct Mat2 {
    std::array<cplx, 4> m{};

    cplx& operator()(int r, int c) noexcept { return m[2 * r + c]; }
    const cplx& operator()(int r, int c) const noexcept { return m[2 * r + c]; }

    static Mat2 identity() noexcept { return {{cplx{1.0}, cplx{}, cplx{}, cplx{1.0}}}; }

    cplx det() const noexcept { return m[0] * m[3] - m[1] * m[2]; }
    cplx trace() const noexcept { return m[0] + m[3]; }

    Mat2 conj() const noexcept {
        return {{std::conj(m[0]), std::conj(m[1]), std::conj(m[2]), std::conj(m[3])}};
    }

    friend Mat2 operator*(const Mat2& x, const Mat2& y) noexcept {
        Mat2 r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) r(i, j) = x(i, 0) * y(0, j) + x(i, 1) * y(1, j);
        return r;
    }
    friend Mat2 operator-(const Mat2& x, const Mat2& y) noexcept {
        return {{x.m[0] - y.m[0], x.m[1] - y.m[1], x.m[2] - y.m[2], x.m[3] - y.m[3]}};
    }
};

/// The symmetric matrix M with exp(a1 a+a+ + a2 a+b+ + a3 b+b+) = exp(1/2 a+^T M a+).
struct SqueezeMatrix {
    Mat2 m;

    explicit SqueezeMatrix(const AnsatzState& s) noexcept
        : m{{2.0 * s.alpha1, s.alpha2, s.alpha2, 2.0 * s.alpha3}} {}

    /// conj(M) M, which equals M^H M because M is symmetric.
    Mat2 gram() const noexcept { return m.conj() * m; }

    double largest_singular_value() const noexcept {
        // eigenvalues of the Hermitian PSD matrix M^H M
        const Mat2 g = gram();
        const double half_tr = 0.5 * g.trace().real();
        const double det = g.det().real();
        const double disc = std::max(0.0, half_tr * half_tr - det);
        return std::sqrt(std::max(0.0, half_tr + std::sqrt(disc)));
    }
};

/// Norm and normalized mean occupations of an ansatz state.
struct MomentRecord {
    double norm = 1.0;
    double n_a = 0.0;
    double n_b = 0.0;
};

namespace detail {

inline double one_minus_gram_det(const AnsatzState& s) {
    const SqueezeMatrix sm(s);
    const double d = (Mat2::identity() - sm.gram()).det().real();
    if (!(sm.largest_singular_value() < 1.0) || !(d > 0.0))
        throw NormSingular("largest singular value of M is not below 1; state is not normalizable");
    return d;
}

}  // namespace detail

/// <t|t> = |rho|^2 det(I - conj(M) M)^(-1/2).
inline double state_norm(const AnsatzState& s) {
    return std::norm(s.rho) / std::sqrt(detail::one_minus_gram_det(s));
}

/// Occupation matrix N = conj(M) M (I - conj(M) M)^(-1); n_a, n_b are its
/// diagonal, already divided by the norm.
inline MomentRecord mean_occupations(const AnsatzState& s) {
    const double d = detail::one_minus_gram_det(s);
    const SqueezeMatrix sm(s);
    const Mat2 g = sm.gram();
    const Mat2 a = Mat2::identity() - g;
    // inverse of a, scaled by its determinant
    Mat2 adj{{a(1, 1), -a(0, 1), -a(1, 0), a(0, 0)}};
    const Mat2 n = g * adj;
    MomentRecord r;
    r.norm = std::norm(s.rho) / std::sqrt(d);
    r.n_a = std::max(0.0, n(0, 0).real() / d);
    r.n_b = std::max(0.0, n(1, 1).real() / d);
    return r;
}

namespace detail {

inline void check_series_arg(double x) {
    if (!(std::abs(x) < 0.5)) throw DomainError("series diverges for |x| >= 1/2");
}

}  // namespace detail

/// Partial sum of sum_n (2n)!/(n!)^2 x^(2n), which tends to (1 - 4x^2)^(-1/2).
inline double series_norm_partial(double x, int n_terms) {
    detail::check_series_arg(x);
    const double x2 = x * x;
    double term = 1.0;
    double sum = 0.0;
    for (int n = 0; n < n_terms; ++n) {
        sum += term;
        term *= x2 * (2.0 * n + 1.0) * (2.0 * n + 2.0) / ((n + 1.0) * (n + 1.0));
    }
    return sum;
}

/// Partial sum of sum_n (2n+1)!/(n!)^2 x^(2n), which tends to (1 - 4x^2)^(-3/2).
inline double series_occupation_partial(double x, int n_terms) {
    detail::check_series_arg(x);
    const double x2 = x * x;
    double term = 1.0;
    double sum = 0.0;
    for (int n = 0; n < n_terms; ++n) {
        sum += term;
        term *= x2 * (2.0 * n + 2.0) * (2.0 * n + 3.0) / ((n + 1.0) * (n + 1.0));
    }
    return sum;
}

}  // namespace cantion
