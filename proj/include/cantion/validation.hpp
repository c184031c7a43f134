#pragma once

// Self-check suite: oracle equivalence and invariants of every module,
// reported as measured error against tolerance.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cantion/ansatz_dynamics.hpp"
#include "cantion/core_model.hpp"
#include "cantion/fock_oracle.hpp"
#include "cantion/gaussian_moments.hpp"
#include "cantion/rwa_analytic.hpp"
#include "cantion/simulation.hpp"

namespace cantion {

struct ValidationCheck {
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::string note;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;

    bool all_passed() const noexcept {
        return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.passed; });
    }
};

struct ValidationOptions {
    double tol_scale = 1.0;        ///< multiplies every tolerance
    AnsatzRhs full_rhs = cantion::full_rhs;  ///< full-model rhs under test
    std::uint64_t seed = 20240611;
};

/// full_rhs with the sign of the constant -k pair-creation term in d_alpha2 flipped.
inline AnsatzDerivative corrupted_full_rhs(const AnsatzState& s, const SystemParams& p) noexcept {
    AnsatzDerivative d = full_rhs(s, p);
    d.d_alpha2 += -I_unit * (2.0 * p.kappa);
    return d;
}

/// Random ansatz state whose squeeze matrix has largest singular value
/// uniform in [0.05, max_sigma] and |rho| <= 1.
template <class Rng>
AnsatzState random_ansatz_state(Rng& rng, double max_sigma = 0.8) {
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    AnsatzState s;
    s.alpha1 = {g(rng), g(rng)};
    s.alpha2 = {g(rng), g(rng)};
    s.alpha3 = {g(rng), g(rng)};
    const double sigma = 0.05 + (max_sigma - 0.05) * u(rng);
    const double scale = sigma / SqueezeMatrix(s).largest_singular_value();
    s.alpha1 *= scale;
    s.alpha2 *= scale;
    s.alpha3 *= scale;
    s.rho = std::polar(0.2 + 0.8 * u(rng), 2.0 * std::numbers::pi * u(rng));
    return s;
}

/// Expansion of `s` in the number basis with outer-shell mass below
/// rel_tail of the total.
inline FockState expand_ansatz_converged(const AnsatzState& s, double rel_tail = 1e-14) {
    for (int n = 32;; n *= 2) {
        FockState f = expand_ansatz(s, n);
        if (f.tail_mass() < rel_tail * f.mass()) return f;
        if (n > 1024) throw TruncationTooSmall("expand_ansatz_converged: tail does not decay");
    }
}

inline SystemParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> w(5.0, 30.0), k(0.0, 6.0), gm(0.0, 0.5);
    return {w(rng), w(rng), k(rng), gm(rng), gm(rng)};
}

namespace detail {

inline double cmax_diff(const AnsatzState& x, const AnsatzState& y) {
    return std::max({std::abs(x.rho - y.rho), std::abs(x.alpha1 - y.alpha1), std::abs(x.alpha2 - y.alpha2),
                     std::abs(x.alpha3 - y.alpha3)});
}

inline double cmax_diff(const AnsatzDerivative& x, const AnsatzDerivative& y) {
    return cmax_diff(AnsatzState{x.d_rho, x.d_alpha1, x.d_alpha2, x.d_alpha3},
                     AnsatzState{y.d_rho, y.d_alpha1, y.d_alpha2, y.d_alpha3});
}

class Suite {
public:
    explicit Suite(double scale) : scale_(scale) {}

    template <class F>
    void check(const std::string& name, double tolerance, F&& measure) {
        ValidationCheck c;
        c.name = name;
        c.tolerance = tolerance * scale_;
        try {
            c.measured = measure();
            c.passed = std::isfinite(c.measured) && c.measured <= c.tolerance;
        } catch (const std::exception& e) {
            c.measured = std::numeric_limits<double>::quiet_NaN();
            c.passed = false;
            c.note = e.what();
        }
        report_.checks.push_back(std::move(c));
    }

    void annotate(const std::string& note) {
        auto& c = report_.checks.back();
        if (!c.note.empty()) c.note += "; ";
        c.note += note;
    }

    ValidationReport take() { return std::move(report_); }

private:
    double scale_;
    ValidationReport report_;
};

inline double max_occ_dev(const Trajectory& a, const std::vector<FockMomentPoint>& f) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size() && i < f.size(); ++i)
        m = std::max({m, std::abs(a[i].n_a - f[i].moments.n_a), std::abs(a[i].n_b - f[i].moments.n_b)});
    return m;
}

}  // namespace detail

/// Runs every check; takes on the order of a minute.
inline ValidationReport run_validation(const ValidationOptions& opt = {}) {
    detail::Suite suite(opt.tol_scale);
    std::mt19937_64 rng(opt.seed);
    const std::vector<double> occupations{0.0, 0.5, 1.0, 3.0, 6.0, 20.0};
    const SystemParams fig2 = figure_preset(2).params;
    const SystemParams fig3 = figure_preset(3).params;

    // ---- initial conditions and series
    suite.check("initial_ansatz: |norm - 1|", 1e-12, [&] {
        double m = 0.0;
        for (double n : occupations) m = std::max(m, std::abs(state_norm(initial_ansatz(n)) - 1.0));
        return m;
    });
    suite.check("initial_ansatz: |n_a - n_a0| + n_b", 1e-10, [&] {
        double m = 0.0;
        for (double n : occupations) {
            const MomentRecord r = mean_occupations(initial_ansatz(n));
            m = std::max(m, std::abs(r.n_a - n) + r.n_b);
        }
        return m;
    });
    suite.check("series identities, x in {0.1, 0.25, 0.462910}", 1e-9, [&] {
        double m = 0.0;
        for (double x : {0.1, 0.25, 0.462910}) {
            const double q = 1.0 - 4.0 * x * x;
            m = std::max(m, std::abs(series_norm_partial(x, 4000) - std::pow(q, -0.5)));
            m = std::max(m, std::abs(series_occupation_partial(x, 4000) - std::pow(q, -1.5)) / std::pow(q, -1.5));
        }
        return m;
    });
    suite.check("single-mode norm and occupation vs series", 1e-9, [&] {
        double m = 0.0;
        for (double n : occupations) {
            AnsatzState s = initial_ansatz(n);
            s.rho *= 0.8;
            const double x = std::abs(s.alpha1);
            const double r2 = std::norm(s.rho);
            const MomentRecord r = mean_occupations(s);
            const double sn = r2 * series_norm_partial(x, 20000);
            const double so = r2 * series_occupation_partial(x, 20000);
            m = std::max({m, std::abs(r.norm - sn) / sn, std::abs(r.n_a * r.norm + r.norm - so) / so});
        }
        return m;
    });
    suite.check("build_initial_fock vs initial_ansatz", 1e-9, [&] {
        double m = 0.0;
        for (double n : occupations) {
            const MomentRecord r = fock_occupations(build_initial_fock(n, required_truncation(n, 1e-10)));
            m = std::max({m, std::abs(r.norm - 1.0), std::abs(r.n_a - n), r.n_b});
        }
        return m;
    });

    // ---- gaussian moments
    suite.check("moments vs Fock expansion, 200 random states", 1e-8, [&] {
        double m = 0.0;
        for (int k = 0; k < 200; ++k) {
            const AnsatzState s = random_ansatz_state(rng);
            const MomentRecord a = mean_occupations(s);
            const MomentRecord f = fock_occupations(expand_ansatz_converged(s));
            m = std::max({m, std::abs(a.norm - f.norm) / f.norm, std::abs(a.n_a - f.n_a), std::abs(a.n_b - f.n_b)});
        }
        return m;
    });
    suite.check("moments: mode swap and rho phase invariance", 1e-14, [&] {
        double m = 0.0;
        for (int k = 0; k < 50; ++k) {
            const AnsatzState s = random_ansatz_state(rng);
            const MomentRecord a = mean_occupations(s);
            const MomentRecord b = mean_occupations(s.mode_swapped());
            AnsatzState ph = s;
            ph.rho *= std::polar(1.0, 0.7 + k);
            const MomentRecord c = mean_occupations(ph);
            m = std::max({m, std::abs(a.n_a - b.n_b), std::abs(a.n_b - b.n_a), std::abs(a.norm - b.norm) / a.norm,
                          std::abs(a.norm - c.norm) / a.norm, std::abs(a.n_a - c.n_a), std::abs(a.n_b - c.n_b)});
        }
        return m;
    });

    // ---- ansatz dynamics
    suite.check("full_rhs - rwa_rhs = counter-rotating terms", 1e-12, [&] {
        double m = 0.0;
        for (int k = 0; k < 100; ++k) {
            const AnsatzState s = random_ansatz_state(rng);
            const SystemParams p = random_params(rng);
            const AnsatzDerivative f = opt.full_rhs(s, p);
            const AnsatzDerivative r = rwa_rhs(s, p);
            const double kap = p.kappa;
            AnsatzDerivative cr;
            cr.d_rho = I_unit * kap * s.alpha2 * s.rho;
            cr.d_alpha1 = -I_unit * (-2.0 * kap * s.alpha2 * s.alpha1);
            cr.d_alpha2 = -I_unit * (-kap) * (1.0 + s.alpha2 * s.alpha2 + 4.0 * s.alpha1 * s.alpha3);
            cr.d_alpha3 = -I_unit * (-2.0 * kap * s.alpha2 * s.alpha3);
            const AnsatzDerivative diff{f.d_rho - r.d_rho, f.d_alpha1 - r.d_alpha1, f.d_alpha2 - r.d_alpha2,
                                        f.d_alpha3 - r.d_alpha3};
            m = std::max(m, detail::cmax_diff(diff, cr) / std::max(1.0, kap));
        }
        return m;
    });
    suite.check("kappa = 0: alpha1(1 us) closed form, both models", 1e-8, [&] {
        SystemParams p = fig2;
        p.kappa = 0.0;
        const AnsatzState s0 = initial_ansatz(6.0);
        const std::vector<double> grid{0.0, 0.5, 1.0};
        const cplx expect = s0.alpha1 * std::exp(cplx{-2.0 * p.gamma_a, -2.0 * p.omega});
        double m = 0.0;
        for (ModelKind mk : {ModelKind::Full, ModelKind::Rwa}) {
            const AnsatzRhs rhs = mk == ModelKind::Full ? opt.full_rhs : AnsatzRhs(rwa_rhs);
            m = std::max(m, std::abs(integrate(s0, p, rhs, grid).back().state.alpha1 - expect));
        }
        return m;
    });
    suite.check("G = k = 0: |rho|, |alpha_i| constant over 10 us", 1e-10, [&] {
        const SystemParams p{19.7, 16.0, 0.0, 0.0, 0.0};
        AnsatzState s0{cplx{0.9, 0.1}, cplx{0.2, 0.1}, cplx{-0.1, 0.15}, cplx{0.05, -0.2}};
        IntegratorConfig tight;
        tight.rel_tol = 1e-12;
        tight.abs_tol = 1e-14;
        const auto tr = integrate(s0, p, opt.full_rhs, uniform_grid(10.0, 0.5), tight);
        double m = 0.0;
        for (const auto& pt : tr) {
            m = std::max({m, std::abs(std::abs(pt.state.rho) - std::abs(s0.rho)),
                          std::abs(std::abs(pt.state.alpha1) - std::abs(s0.alpha1)),
                          std::abs(std::abs(pt.state.alpha2) - std::abs(s0.alpha2)),
                          std::abs(std::abs(pt.state.alpha3) - std::abs(s0.alpha3))});
        }
        return m;
    });
    suite.check("mode-swap symmetry of full trajectories", 1e-9, [&] {
        const SystemParams p = figure_preset(4).params;
        const auto grid = uniform_grid(3.0, 0.05);
        const auto a = integrate(initial_ansatz(6.0), p, opt.full_rhs, grid);
        const auto b = integrate(initial_ansatz(6.0).mode_swapped(), p.mode_swapped(), opt.full_rhs, grid);
        double m = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
            m = std::max({m, detail::cmax_diff(a[i].state, b[i].state.mode_swapped()), std::abs(a[i].n_a - b[i].n_b),
                          std::abs(a[i].n_b - b[i].n_a)});
        return m;
    });
    {
        // A local error tolerance does not bound the global error, so the
        // change is compared with the coarse run's own global error.
        const auto g = uniform_grid(3.0, 0.05);
        IntegratorConfig coarse, fine, ref;
        fine.rel_tol = 0.5 * coarse.rel_tol;
        ref.rel_tol = 1e-13;
        ref.abs_tol = 1e-15;
        double change = 0.0, error = 0.0, rel_change = 0.0;
        std::string note;
        try {
            for (int fig = 2; fig <= 5; ++fig) {
                const SystemParams p = figure_preset(fig).params;
                const auto a = integrate(initial_ansatz(6.0), p, opt.full_rhs, g, coarse);
                const auto b = integrate(initial_ansatz(6.0), p, opt.full_rhs, g, fine);
                const auto r = integrate(initial_ansatz(6.0), p, opt.full_rhs, g, ref);
                for (std::size_t i = 0; i < a.size(); ++i) {
                    const double c = std::max(std::abs(a[i].n_a - b[i].n_a), std::abs(a[i].n_b - b[i].n_b));
                    change = std::max(change, c);
                    error = std::max({error, std::abs(a[i].n_a - r[i].n_a), std::abs(a[i].n_b - r[i].n_b)});
                    rel_change = std::max(rel_change, c / std::max({1.0, a[i].n_a, a[i].n_b}));
                }
            }
            char buf[96];
            std::snprintf(buf, sizeof buf, "max change %.2e = %.1f x coarse rel_tol", change,
                          rel_change / coarse.rel_tol);
            note = buf;
        } catch (const std::exception& e) {
            note = e.what();
            change = std::numeric_limits<double>::quiet_NaN();
        }
        suite.check("halving rel_tol: n change / coarse global error", 1.0, [&] { return change / error; });
        suite.annotate(note);
    }

    // ---- RWA analytic solution
    suite.check("propagate_rwa vs integrate(Rwa), presets 2-5, [0, 3] us", 1e-8, [&] {
        const auto grid = uniform_grid(3.0, 0.05);
        double m = 0.0;
        for (int fig = 2; fig <= 5; ++fig) {
            const SystemParams p = figure_preset(fig).params;
            const auto tr = integrate(initial_ansatz(6.0), p, ModelKind::Rwa, grid);
            for (const auto& pt : tr) m = std::max(m, detail::cmax_diff(pt.state, propagate_rwa(6.0, p, pt.t)));
        }
        return m;
    });
    suite.check("Omega(1) = -(Ga + Gb) - i(w + v) exactly", 0.0, [&] {
        double m = 0.0;
        for (int k = 0; k < 100; ++k) {
            const SystemParams p = random_params(rng);
            const cplx expect{-(p.gamma_a + p.gamma_b), -(p.omega + p.nu)};
            m = std::max(m, std::abs(eigen_modes(p)[0].omega_big - expect));
        }
        return m;
    });
    suite.check("sum of i Omega = trace K (relative)", 1e-12, [&] {
        double m = 0.0;
        for (int k = 0; k < 100; ++k) {
            const SystemParams p = random_params(rng);
            const auto modes = eigen_modes(p);
            cplx sum{};
            for (const auto& md : modes) sum += I_unit * md.omega_big;
            const cplx tr = rwa_matrix(p).trace();
            m = std::max(m, std::abs(sum - tr) / std::abs(tr));
        }
        return m;
    });
    suite.check("eigenvector ratio relations (relative)", 1e-10, [&] {
        double m = 0.0;
        for (int k = 0; k < 100; ++k) {
            SystemParams p = random_params(rng);
            p.kappa = std::max(p.kappa, 0.1);
            for (const auto& md : eigen_modes(p)) {
                const cplx iw = I_unit * md.omega_big;
                const cplx a = 2.0 * cplx{p.omega, -p.gamma_a} - iw;
                const cplx b = 2.0 * cplx{p.nu, -p.gamma_b} - iw;
                const cplx lhs = p.kappa * md.vec[1];
                const double sc = std::max({std::abs(lhs), std::abs(a * md.vec[0]), std::abs(b * md.vec[2])});
                m = std::max({m, std::abs(lhs - a * md.vec[0]) / sc, std::abs(lhs - b * md.vec[2]) / sc});
            }
        }
        return m;
    });
    suite.check("max Re(Omega) with G >= 0", 0.0, [&] {
        double m = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < 100; ++k)
            for (const auto& md : eigen_modes(random_params(rng))) m = std::max(m, md.omega_big.real());
        return m;
    });
    suite.check("fig. 2 normal modes -0.0394 - i(39.4 -/+ 3.6)", 1e-12, [&] {
        const auto modes = eigen_modes(fig2);
        const cplx e1{-0.0394, -(39.4 - 3.6)}, e2{-0.0394, -(39.4 + 3.6)};
        const double d1 = std::min(std::abs(modes[1].omega_big - e1), std::abs(modes[2].omega_big - e1));
        const double d2 = std::min(std::abs(modes[1].omega_big - e2), std::abs(modes[2].omega_big - e2));
        return std::max(d1, d2);
    });
    suite.check("undamped resonant transfer at t = pi/(2k)", 1e-6, [&] {
        const SystemParams p{19.7, 19.7, 1.8, 0.0, 0.0};
        const MomentRecord r = mean_occupations(propagate_rwa(6.0, p, std::numbers::pi / (2.0 * p.kappa)));
        return std::max(r.n_a, std::abs(r.n_b - 6.0));
    });

    // ---- Fock oracle
    suite.check("apply_hamiltonian on |0,0> and |2,0>", 1e-14, [&] {
        FockState vac(4);
        vac.at(0, 0) = 1.0;
        const FockState hf = apply_hamiltonian(vac, fig2, ModelKind::Full);
        const FockState hr = apply_hamiltonian(vac, fig2, ModelKind::Rwa);
        double m = std::abs(hf.at(1, 1) + fig2.kappa) + std::abs(hf.mass() - fig2.kappa * fig2.kappa) + hr.mass();
        SystemParams p0 = fig2;
        p0.kappa = 0.0;
        FockState two(4);
        two.at(2, 0) = 1.0;
        for (ModelKind mk : {ModelKind::Full, ModelKind::Rwa}) {
            const FockState h = apply_hamiltonian(two, p0, mk);
            m = std::max(m, std::abs(h.at(2, 0) - 2.0 * cplx{p0.omega, -p0.gamma_a}) + h.mass() -
                                std::norm(h.at(2, 0)));
        }
        return m;
    });
    suite.check("Fock, k = 0: |2,0> picks up exp(-2iwt - 2Ga t)", 1e-12, [&] {
        SystemParams p = fig2;
        p.kappa = 0.0;
        FockState s(4);
        s.at(2, 0) = 1.0;
        FockEvolveOptions o;
        o.verify_convergence = false;
        const auto snaps = evolve_fock(s, p, ModelKind::Full, uniform_grid(1.0, 0.25), o);
        double m = 0.0;
        for (const auto& sn : snaps) {
            const cplx expect = std::exp(cplx{-2.0 * p.gamma_a * sn.t, -2.0 * p.omega * sn.t});
            m = std::max({m, std::abs(sn.state.at(2, 0) - expect), std::abs(fock_occupations(sn.state).n_a - 2.0)});
        }
        return m;
    });

    const double n_small = 1.0;
    const int nm_small = required_truncation(n_small);
    const auto grid = uniform_grid(3.0, 0.05);
    suite.check("ansatz full vs Fock oracle (fig. 3, n_a0 = 1, dt/2 verified)", 1e-4, [&] {
        const auto a = integrate(initial_ansatz(n_small), fig3, opt.full_rhs, grid);
        FockEvolveOptions o;
        o.dt = fock_step_for(fig3);
        const auto f = fock_moment_trajectory(build_initial_fock(n_small, nm_small), fig3, ModelKind::Full, grid, o);
        return detail::max_occ_dev(a, f.points);
    });
    suite.check("RWA analytic vs Fock oracle (fig. 2, n_a0 = 1)", 1e-6, [&] {
        FockEvolveOptions o;
        o.dt = fock_step_for(fig2);
        const auto f = fock_moment_trajectory(build_initial_fock(n_small, nm_small), fig2, ModelKind::Rwa, grid, o);
        double m = 0.0;
        for (const auto& pt : f.points) {
            const MomentRecord r = mean_occupations(propagate_rwa(n_small, fig2, pt.t));
            m = std::max({m, std::abs(r.n_a - pt.moments.n_a), std::abs(r.n_b - pt.moments.n_b)});
        }
        return m;
    });

    SystemParams herm3 = fig3;
    herm3.gamma_a = herm3.gamma_b = 0.0;
    FockEvolveOptions nov;
    nov.verify_convergence = false;
    nov.dt = fock_step_for(herm3);
    suite.check("Fock, G = 0: norm conserved over 3 us (full)", 1e-9, [&] {
        const auto f = fock_moment_trajectory(build_initial_fock(n_small, nm_small), herm3, ModelKind::Full, grid, nov);
        double m = 0.0;
        for (const auto& pt : f.points) m = std::max(m, std::abs(pt.moments.norm - 1.0));
        return m;
    });
    suite.check("Fock, G = 0: RWA n_a + n_b conserved", 1e-9, [&] {
        const auto f = fock_moment_trajectory(build_initial_fock(n_small, nm_small), herm3, ModelKind::Rwa, grid, nov);
        double m = 0.0;
        const double n0 = f.points.front().moments.n_a + f.points.front().moments.n_b;
        for (const auto& pt : f.points) m = std::max(m, std::abs(pt.moments.n_a + pt.moments.n_b - n0));
        return m;
    });
    suite.check("Fock: joint parity stays +1 (full)", 1e-10, [&] {
        double m = 0.0;
        detail::FockPropagator prop(fig3, ModelKind::Full, nm_small);
        prop.run(build_initial_fock(n_small, nm_small), grid, fock_step_for(fig3), 1e-6,
                 [&](double, const FockState& f) { m = std::max(m, std::abs(fock_parity(f) - 1.0)); });
        return m;
    });
    suite.check("Fock: n_max + 8 moves occupations by < leakage bound", 1e-6, [&] {
        FockEvolveOptions o;
        o.verify_convergence = false;
        o.dt = fock_step_for(fig3);
        const auto a = fock_moment_trajectory(build_initial_fock(n_small, nm_small), fig3, ModelKind::Full, grid, o);
        const auto b =
            fock_moment_trajectory(build_initial_fock(n_small, nm_small + 8), fig3, ModelKind::Full, grid, o);
        double m = 0.0;
        for (std::size_t i = 0; i < a.points.size(); ++i)
            m = std::max({m, std::abs(a.points[i].moments.n_a - b.points[i].moments.n_a),
                          std::abs(a.points[i].moments.n_b - b.points[i].moments.n_b)});
        return m;
    });

    // ---- runs
    suite.check("identical config gives byte-identical CSV", 0.0, [&] {
        RunConfig cfg = figure_preset(3);
        std::ostringstream a, b;
        write_csv(a, simulate(cfg));
        write_csv(b, simulate(cfg));
        return a.str() == b.str() ? 0.0 : 1.0;
    });
    return suite.take();
}

inline void print_report(std::ostream& os, const ValidationReport& r) {
    char buf[64];
    int failed = 0;
    for (const auto& c : r.checks) {
        std::snprintf(buf, sizeof buf, "%10.3e <= %9.3e", c.measured, c.tolerance);
        os << (c.passed ? "[PASS] " : "[FAIL] ") << buf << "  " << c.name;
        if (!c.note.empty()) os << "  (" << c.note << ')';
        os << '\n';
        if (!c.passed) ++failed;
    }
    os << r.checks.size() - failed << '/' << r.checks.size() << " checks passed\n";
}

}  // namespace cantion
