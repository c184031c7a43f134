#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "cantion/core_model.hpp"
#include "cantion/dopri5.hpp"
#include "cantion/errors.hpp"
#include "cantion/gaussian_moments.hpp"

namespace cantion {

/// Time derivatives of the four ansatz parameters [1/us].
struct AnsatzDerivative {
    cplx d_rho{};
    cplx d_alpha1{};
    cplx d_alpha2{};
    cplx d_alpha3{};

    bool finite() const noexcept {
        return AnsatzState{d_rho, d_alpha1, d_alpha2, d_alpha3}.finite();
    }
};

/// Equations of motion of the ansatz under the full Hamiltonian
/// (w - iGa) a+a + (v - iGb) b+b - k (a + a+)(b + b+).
inline AnsatzDerivative full_rhs(const AnsatzState& s, const SystemParams& p) noexcept {
    const cplx wa{p.omega, -p.gamma_a};
    const cplx wb{p.nu, -p.gamma_b};
    const double k = p.kappa;
    const cplx& a1 = s.alpha1;
    const cplx& a2 = s.alpha2;
    const cplx& a3 = s.alpha3;
    AnsatzDerivative d;
    d.d_rho = I_unit * k * a2 * s.rho;
    d.d_alpha1 = -I_unit * (2.0 * wa * a1 - k * a2 - 2.0 * k * a2 * a1);
    d.d_alpha2 = -I_unit * ((wa + wb) * a2 - k - k * a2 * a2 - 4.0 * k * a1 * a3 - 2.0 * k * a1 - 2.0 * k * a3);
    d.d_alpha3 = -I_unit * (2.0 * wb * a3 - k * a2 - 2.0 * k * a2 * a3);
    return d;
}

/// Equations of motion under the rotating-wave Hamiltonian, coupling -k (a b+ + a+ b).
/// rho is constant and the alphas obey a linear system.
inline AnsatzDerivative rwa_rhs(const AnsatzState& s, const SystemParams& p) noexcept {
    const cplx wa{p.omega, -p.gamma_a};
    const cplx wb{p.nu, -p.gamma_b};
    const double k = p.kappa;
    AnsatzDerivative d;
    d.d_alpha1 = -I_unit * (2.0 * wa * s.alpha1 - k * s.alpha2);
    d.d_alpha2 = -I_unit * ((wa + wb) * s.alpha2 - 2.0 * k * s.alpha1 - 2.0 * k * s.alpha3);
    d.d_alpha3 = -I_unit * (2.0 * wb * s.alpha3 - k * s.alpha2);
    return d;
}

inline AnsatzDerivative model_rhs(ModelKind m, const AnsatzState& s, const SystemParams& p) noexcept {
    return m == ModelKind::Full ? full_rhs(s, p) : rwa_rhs(s, p);
}

/// Any right-hand side with the shape of full_rhs / rwa_rhs.
using AnsatzRhs = std::function<AnsatzDerivative(const AnsatzState&, const SystemParams&)>;

struct IntegratorConfig {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double max_step = 0.05;      ///< [us]
    double initial_step = 0.0;   ///< [us]; <= 0 picks one automatically

    void validate() const {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(max_step > 0.0)) {
            throw DomainError("IntegratorConfig: rel_tol, abs_tol and max_step must be positive");
        }
    }
};

/// Singular value beyond which the ansatz is treated as non-normalizable.
inline constexpr double kBreakdownThreshold = 1.0 - 1e-9;

struct TrajectoryPoint {
    double t = 0.0;
    AnsatzState state;
    double n_a = 0.0;
    double n_b = 0.0;
    double norm = 1.0;
};

using Trajectory = std::vector<TrajectoryPoint>;

namespace detail {

inline ode::Vec<8> pack(const AnsatzState& s) noexcept {
    return {s.rho.real(), s.rho.imag(), s.alpha1.real(), s.alpha1.imag(),
            s.alpha2.real(), s.alpha2.imag(), s.alpha3.real(), s.alpha3.imag()};
}

inline AnsatzState unpack(const ode::Vec<8>& y) noexcept {
    return {{y[0], y[1]}, {y[2], y[3]}, {y[4], y[5]}, {y[6], y[7]}};
}

inline void check_grid(std::span<const double> t_grid) {
    if (t_grid.empty() || t_grid.front() != 0.0) throw DomainError("time grid must start at 0");
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > t_grid[i - 1])) throw DomainError("time grid must be strictly increasing");
    }
}

}  // namespace detail

/// Integrates the ansatz equations given by `rhs` and samples the trajectory
/// with its observables at every grid time.
inline Trajectory integrate(const AnsatzState& initial, const SystemParams& params, const AnsatzRhs& rhs,
                            std::span<const double> t_grid, const IntegratorConfig& cfg = {}) {
    params.validate();
    cfg.validate();
    detail::check_grid(t_grid);
    if (!initial.finite() || SqueezeMatrix(initial).largest_singular_value() >= kBreakdownThreshold) {
        throw AnsatzBreakdown("initial ansatz state is not normalizable", 0.0);
    }

    Trajectory traj;
    traj.reserve(t_grid.size());

    auto f = [&](double, const ode::Vec<8>& y, ode::Vec<8>& dy) {
        const AnsatzDerivative d = rhs(detail::unpack(y), params);
        dy = detail::pack({d.d_rho, d.d_alpha1, d.d_alpha2, d.d_alpha3});
    };
    auto emit = [&](std::size_t, double t, const ode::Vec<8>& y) {
        TrajectoryPoint pt;
        pt.t = t;
        pt.state = detail::unpack(y);
        try {
            const MomentRecord m = mean_occupations(pt.state);
            pt.n_a = m.n_a;
            pt.n_b = m.n_b;
            pt.norm = m.norm;
        } catch (const NormSingular&) {
            throw AnsatzBreakdown("ansatz lost normalizability", t);
        }
        traj.push_back(pt);
    };
    auto accepted = [&](double t, const ode::Vec<8>& y) {
        const AnsatzState s = detail::unpack(y);
        if (!s.finite() || SqueezeMatrix(s).largest_singular_value() > kBreakdownThreshold) {
            throw AnsatzBreakdown("squeeze matrix singular value reached 1 at t = " + detail::sci(t) + " us", t);
        }
    };

    ode::Dopri5Options opt;
    opt.rel_tol = cfg.rel_tol;
    opt.abs_tol = cfg.abs_tol;
    opt.max_step = cfg.max_step;
    opt.initial_step = cfg.initial_step;
    ode::dopri5_integrate<8>(f, detail::pack(initial), t_grid, opt, emit, accepted);
    return traj;
}

inline Trajectory integrate(const AnsatzState& initial, const SystemParams& params, ModelKind model,
                            std::span<const double> t_grid, const IntegratorConfig& cfg = {}) {
    const AnsatzRhs rhs = model == ModelKind::Full ? AnsatzRhs(full_rhs) : AnsatzRhs(rwa_rhs);
    return integrate(initial, params, rhs, t_grid, cfg);
}

/// Uniform grid 0, dt, 2 dt, ... up to t_max (inclusive when t_max is a multiple of dt).
inline std::vector<double> uniform_grid(double t_max, double dt) {
    if (!(t_max > 0.0) || !(dt > 0.0)) throw DomainError("uniform_grid: t_max and dt must be positive");
    const auto n = static_cast<long>(std::floor(t_max / dt + 1e-9));
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(n) + 1);
    for (long i = 0; i <= n; ++i) g.push_back(static_cast<double>(i) * dt);
    return g;
}

}  // namespace cantion
