#pragma once

// Dormand-Prince 5(4) embedded Runge-Kutta stepper with a proportional-integral
// step-size controller and the 4th-order continuous extension of Hairer,
// Norsett & Wanner (routine DOPRI5). Works on fixed-size real state vectors.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

#include "cantion/errors.hpp"

namespace cantion::ode {

template <std::size_t N>
using Vec = std::array<double, N>;

struct Dopri5Options {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    double initial_step = 0.0;  ///< <= 0 selects the step automatically
    long max_steps = 50'000'000;
};

struct Dopri5Stats {
    long accepted = 0;
    long rejected = 0;
    long rhs_calls = 0;
};

namespace dp {
// nodes
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
// stage coefficients
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
// 5th minus embedded 4th order weights
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// dense output
inline constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                        d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                        d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
}  // namespace dp

/// Integrates y' = f(t, y) from grid.front() to grid.back(), calling
/// `emit(i, t_i, y(t_i))` for every grid point (y(grid[0]) = y0 is emitted
/// first) and `accepted(t, y)` after every accepted step. `accepted` may throw
/// to abort. Grid values between steps come from the continuous extension.
///
/// `f` has signature void(double t, const Vec<N>& y, Vec<N>& dydt).
template <std::size_t N, class Rhs, class Emit, class Accepted>
Dopri5Stats dopri5_integrate(Rhs&& f, const Vec<N>& y0, std::span<const double> grid,
                             const Dopri5Options& opt, Emit&& emit, Accepted&& accepted) {
    using namespace dp;
    Dopri5Stats stats;
    if (grid.empty()) return stats;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) throw DomainError("output grid must be strictly increasing");
    }
    if (!(opt.rel_tol > 0.0) || !(opt.abs_tol > 0.0) || !(opt.max_step > 0.0)) {
        throw DomainError("integrator tolerances and max_step must be positive");
    }

    double t = grid.front();
    const double t_end = grid.back();
    Vec<N> y = y0;
    emit(std::size_t{0}, t, y);
    if (grid.size() == 1) return stats;

    Vec<N> k1, k2, k3, k4, k5, k6, k7, ytmp, ynew;
    auto call = [&](double tt, const Vec<N>& yy, Vec<N>& out) {
        f(tt, yy, out);
        ++stats.rhs_calls;
    };
    auto scale = [&](double a, double b) { return opt.abs_tol + opt.rel_tol * std::max(std::abs(a), std::abs(b)); };

    call(t, y, k1);

    double h = opt.initial_step;
    if (!(h > 0.0)) {
        // Hairer's starting step heuristic
        double dnf = 0.0, dny = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sk = opt.abs_tol + opt.rel_tol * std::abs(y[i]);
            dnf = std::max(dnf, std::abs(k1[i]) / sk);
            dny = std::max(dny, std::abs(y[i]) / sk);
        }
        h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * dny / dnf;
        h = std::min(h, opt.max_step);
        for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * k1[i];
        call(t + h, ytmp, k2);
        double der2 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sk = opt.abs_tol + opt.rel_tol * std::abs(y[i]);
            der2 = std::max(der2, std::abs(k2[i] - k1[i]) / sk);
        }
        der2 /= h;
        const double der12 = std::max(der2, dnf);
        const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
        h = std::min({100.0 * h, h1, opt.max_step});
    }

    constexpr double safe = 0.9, beta = 0.04, expo1 = 0.2 - beta * 0.75;
    constexpr double facc1 = 1.0 / 0.2, facc2 = 1.0 / 10.0;
    double facold = 1e-4;
    bool last_rejected = false;
    std::size_t next = 1;

    while (next < grid.size()) {
        if (stats.accepted + stats.rejected >= opt.max_steps) {
            throw StepSizeUnderflow("integrator exceeded the maximum number of steps", t);
        }
        h = std::min(h, opt.max_step);
        const bool final_step = t + 1.01 * h >= t_end;
        if (final_step) h = t_end - t;
        if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
            throw StepSizeUnderflow("step size underflow: tolerance cannot be met", t);
        }

        for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        call(t + c2 * h, ytmp, k2);
        for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        call(t + c3 * h, ytmp, k3);
        for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        call(t + c4 * h, ytmp, k4);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        call(t + c5 * h, ytmp, k5);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        const double t_new = final_step ? t_end : t + h;
        call(t_new, ytmp, k6);
        for (std::size_t i = 0; i < N; ++i)
            ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        call(t_new, ynew, k7);

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double ei =
                h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double r = std::abs(ei) / scale(y[i], ynew[i]);
            err = std::isfinite(r) ? std::max(err, r) : 1e10;
            if (err >= 1e10) break;
        }
        if (!std::isfinite(err)) err = 1e10;

        const double fac11 = std::pow(err, expo1);
        if (err <= 1.0) {
            double fac = fac11 / std::pow(facold, beta);
            fac = std::clamp(fac / safe, facc2, facc1);
            double h_new = h / fac;
            if (last_rejected) h_new = std::min(h_new, h);
            facold = std::max(err, 1e-4);
            ++stats.accepted;
            last_rejected = false;

            // continuous extension coefficients
            while (next < grid.size() && grid[next] <= t_new) {
                Vec<N> out;
                if (grid[next] == t_new) {
                    out = ynew;
                } else {
                    const double theta = (grid[next] - t) / h;
                    const double theta1 = 1.0 - theta;
                    for (std::size_t i = 0; i < N; ++i) {
                        const double ydiff = ynew[i] - y[i];
                        const double bspl = h * k1[i] - ydiff;
                        const double r4 = ydiff - h * k7[i] - bspl;
                        const double r5 =
                            h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
                        out[i] = y[i] + theta * (ydiff + theta1 * (bspl + theta * (r4 + theta1 * r5)));
                    }
                }
                emit(next, grid[next], out);
                ++next;
            }

            y = ynew;
            t = t_new;
            k1 = k7;  // first same as last
            accepted(t, y);
            h = h_new;
        } else {
            h = h / std::min(facc1, fac11 / safe);
            ++stats.rejected;
            last_rejected = true;
        }
    }
    return stats;
}

}  // namespace cantion::ode
