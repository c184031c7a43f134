#pragma once

// Figure-regime runs: both ansatz models on a uniform output grid, CSV export,
// run summaries and one-parameter sweeps.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cantion/ansatz_dynamics.hpp"
#include "cantion/core_model.hpp"
#include "cantion/errors.hpp"
#include "cantion/fock_oracle.hpp"

namespace cantion {

enum class ModelSelection { Rwa, Full, Both };

inline bool uses_rwa(ModelSelection m) noexcept { return m != ModelSelection::Full; }
inline bool uses_full(ModelSelection m) noexcept { return m != ModelSelection::Rwa; }

inline std::optional<ModelSelection> parse_model_selection(const std::string& s) {
    if (s == "rwa") return ModelSelection::Rwa;
    if (s == "full") return ModelSelection::Full;
    if (s == "both") return ModelSelection::Both;
    return std::nullopt;
}

struct RunConfig {
    SystemParams params{19.7, 19.7, 1.8, 0.0197, 0.0197};
    double n_a0 = 6.0;
    double t_max = 3.0;   ///< [us]
    double dt_out = 0.01; ///< [us]
    ModelSelection model = ModelSelection::Both;
    bool fock_check = false;
    int n_max = 0;        ///< Fock truncation; 0 picks required_truncation(n_a0)
    double fock_dt = 0.0; ///< Fock RK4 step [us]; 0 picks fock_step_for(params)
    std::string output_path;
    IntegratorConfig integrator;

    void validate() const {
        params.validate();
        integrator.validate();
        if (!(n_a0 >= 0.0) || !std::isfinite(n_a0)) throw DomainError("n_a0 must be a finite value >= 0");
        if (!(t_max > 0.0) || !std::isfinite(t_max)) throw DomainError("t_max must be positive");
        if (!(dt_out > 0.0) || dt_out > t_max) throw DomainError("dt_out must satisfy 0 < dt_out <= t_max");
        if (n_max < 0 || (n_max > 0 && n_max % 2 != 0)) throw DomainError("n_max must be 0 (auto) or a positive even number");
        if (fock_dt < 0.0) throw DomainError("fock_dt must be >= 0");
    }
};

/// Parameter presets of the four reference regimes (n_a0 = 6, Ga = Gb = 0.0197).
inline RunConfig figure_preset(int figure) {
    RunConfig c;
    switch (figure) {
        case 2: c.params = {19.7, 19.7, 1.8, 0.0197, 0.0197}; break;
        case 3: c.params = {19.7, 19.7, 5.0, 0.0197, 0.0197}; break;
        case 4: c.params = {19.7, 16.0, 4.0, 0.0197, 0.0197}; break;
        case 5: c.params = {19.7, 16.0, 5.0, 0.0197, 0.0197}; break;
        default: throw DomainError("figure preset must be 2, 3, 4 or 5");
    }
    c.n_a0 = 6.0;
    return c;
}

/// RK4 step for the Fock oracle. The interaction-picture coupling grows with
/// kappa, so the step shrinks with it.
inline double fock_step_for(const SystemParams& p) {
    return p.kappa > 0.0 ? std::min(1e-4, 2.5e-4 / p.kappa) : 1e-4;
}

/// Index of the first local maximum of `v` that reaches at least half of the
/// global maximum (skips the small counter-rotating ripples). Falls back to
/// the first global maximum.
inline std::size_t first_major_max(const std::vector<double>& v) {
    if (v.empty()) throw DomainError("first_major_max: empty series");
    const double top = *std::max_element(v.begin(), v.end());
    const double level = v.front() + 0.5 * (top - v.front());
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        if (v[i] >= level && v[i] >= v[i - 1] && v[i] > v[i + 1]) return i;
    }
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

/// Index of the first local minimum that gets at least half way down from
/// v[0] to the global minimum.
inline std::size_t first_major_min(const std::vector<double>& v) {
    std::vector<double> neg(v.size());
    std::transform(v.begin(), v.end(), neg.begin(), [](double x) { return -x; });
    return first_major_max(neg);
}

struct ModelSummary {
    double first_nb_max_time = 0.0;
    double first_nb_max = 0.0;
    double first_na_min_time = 0.0;
    double first_na_min = 0.0;
    double global_nb_max = 0.0;
    double final_norm = 0.0;
};

struct RunSummary {
    std::optional<ModelSummary> rwa;
    std::optional<ModelSummary> full;
    std::optional<double> max_na_discrepancy;  ///< max_t |n_a^rwa - n_a^full|
    std::optional<double> fock_deviation_rwa;  ///< max_t over both occupations
    std::optional<double> fock_deviation_full;
    int fock_n_max = 0;
};

struct RunResult {
    std::vector<double> t;
    Trajectory rwa;   ///< empty when the model was not selected
    Trajectory full;
    RunSummary summary;
};

inline ModelSummary summarize(const Trajectory& traj) {
    std::vector<double> na, nb;
    for (const auto& p : traj) {
        na.push_back(p.n_a);
        nb.push_back(p.n_b);
    }
    ModelSummary s;
    const std::size_t imax = first_major_max(nb);
    const std::size_t imin = first_major_min(na);
    s.first_nb_max_time = traj[imax].t;
    s.first_nb_max = nb[imax];
    s.first_na_min_time = traj[imin].t;
    s.first_na_min = na[imin];
    s.global_nb_max = *std::max_element(nb.begin(), nb.end());
    s.final_norm = traj.back().norm;
    return s;
}

namespace detail {

inline double fock_deviation(const Trajectory& ansatz, const FockMomentTrajectory& fock) {
    double m = 0.0;
    for (std::size_t i = 0; i < ansatz.size() && i < fock.points.size(); ++i) {
        m = std::max({m, std::abs(ansatz[i].n_a - fock.points[i].moments.n_a),
                      std::abs(ansatz[i].n_b - fock.points[i].moments.n_b)});
    }
    return m;
}

}  // namespace detail

/// Fock-oracle occupations for one model on `grid`, with the dt/2 check.
inline FockMomentTrajectory fock_reference(const RunConfig& cfg, ModelKind model, std::span<const double> grid) {
    const int n_max = cfg.n_max > 0 ? cfg.n_max : required_truncation(cfg.n_a0);
    const FockState f0 = build_initial_fock(cfg.n_a0, n_max);
    FockEvolveOptions opt;
    opt.dt = cfg.fock_dt > 0.0 ? cfg.fock_dt : fock_step_for(cfg.params);
    return fock_moment_trajectory(f0, cfg.params, model, grid, opt);
}

/// Integrates the selected models on the output grid and fills the summary.
/// AnsatzBreakdown, LeakageExceeded, TruncationTooSmall and ConvergenceFailure propagate.
inline RunResult simulate(const RunConfig& cfg) {
    cfg.validate();
    RunResult r;
    r.t = uniform_grid(cfg.t_max, cfg.dt_out);
    const AnsatzState init = initial_ansatz(cfg.n_a0);
    if (uses_rwa(cfg.model)) {
        r.rwa = integrate(init, cfg.params, ModelKind::Rwa, r.t, cfg.integrator);
        r.summary.rwa = summarize(r.rwa);
    }
    if (uses_full(cfg.model)) {
        r.full = integrate(init, cfg.params, ModelKind::Full, r.t, cfg.integrator);
        r.summary.full = summarize(r.full);
    }
    if (!r.rwa.empty() && !r.full.empty()) {
        double d = 0.0;
        for (std::size_t i = 0; i < r.t.size(); ++i) d = std::max(d, std::abs(r.rwa[i].n_a - r.full[i].n_a));
        r.summary.max_na_discrepancy = d;
    }
    if (cfg.fock_check) {
        r.summary.fock_n_max = cfg.n_max > 0 ? cfg.n_max : required_truncation(cfg.n_a0);
        if (!r.rwa.empty())
            r.summary.fock_deviation_rwa = detail::fock_deviation(r.rwa, fock_reference(cfg, ModelKind::Rwa, r.t));
        if (!r.full.empty())
            r.summary.fock_deviation_full = detail::fock_deviation(r.full, fock_reference(cfg, ModelKind::Full, r.t));
    }
    return r;
}

namespace detail {

inline std::string g9(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

}  // namespace detail

inline constexpr const char* kCsvHeader = "t,na_rwa,nb_rwa,na_full,nb_full,norm_full";

/// CSV of a run: header kCsvHeader, one LF-terminated row per grid point.
inline void write_csv(std::ostream& os, const RunResult& r) {
    using detail::g9;
    os << kCsvHeader << '\n';
    for (std::size_t i = 0; i < r.t.size(); ++i) {
        std::string row = g9(r.t[i]) + ',';
        if (!r.rwa.empty()) row += g9(r.rwa[i].n_a) + ',' + g9(r.rwa[i].n_b) + ',';
        else row += ",,";
        if (!r.full.empty()) row += g9(r.full[i].n_a) + ',' + g9(r.full[i].n_b) + ',' + g9(r.full[i].norm);
        else row += ",,";
        os << row << '\n';
    }
}

inline void write_summary(std::ostream& os, const RunSummary& s) {
    using detail::g9;
    auto model = [&](const char* name, const ModelSummary& m) {
        os << name << ": first n_b max " << g9(m.first_nb_max) << " at t = " << g9(m.first_nb_max_time)
           << " us; first n_a min " << g9(m.first_na_min) << " at t = " << g9(m.first_na_min_time)
           << " us; final norm " << g9(m.final_norm) << '\n';
    };
    if (s.rwa) model("rwa ", *s.rwa);
    if (s.full) model("full", *s.full);
    if (s.max_na_discrepancy) os << "max |n_a rwa - n_a full|: " << g9(*s.max_na_discrepancy) << '\n';
    if (s.fock_deviation_rwa) os << "fock check rwa  (n_max " << s.fock_n_max << "): " << g9(*s.fock_deviation_rwa) << '\n';
    if (s.fock_deviation_full) os << "fock check full (n_max " << s.fock_n_max << "): " << g9(*s.fock_deviation_full) << '\n';
}

enum class SweepVar { Kappa, Nu };

inline std::optional<SweepVar> parse_sweep_var(const std::string& s) {
    if (s == "kappa") return SweepVar::Kappa;
    if (s == "nu") return SweepVar::Nu;
    return std::nullopt;
}

struct SweepRow {
    double value = 0.0;
    double transfer_time = std::numeric_limits<double>::quiet_NaN();
    double fidelity = std::numeric_limits<double>::quiet_NaN();
    double discrepancy = std::numeric_limits<double>::quiet_NaN();
    std::string error;  ///< empty on success
};

/// One summary row per value. Transfer time and fidelity (max n_b / n_a0)
/// come from the full model when it is selected, otherwise from the RWA.
/// Errors are recorded per row and the sweep continues.
inline std::vector<SweepRow> run_sweep(const RunConfig& base, SweepVar var, const std::vector<double>& values) {
    if (values.empty()) throw DomainError("run_sweep: no values given");
    std::vector<SweepRow> rows;
    for (double v : values) {
        SweepRow row;
        row.value = v;
        RunConfig cfg = base;
        cfg.fock_check = false;
        (var == SweepVar::Kappa ? cfg.params.kappa : cfg.params.nu) = v;
        try {
            if (!(cfg.n_a0 > 0.0)) throw DomainError("transfer fidelity needs n_a0 > 0");
            const RunResult r = simulate(cfg);
            const ModelSummary& m = r.summary.full ? *r.summary.full : *r.summary.rwa;
            row.transfer_time = m.first_nb_max_time;
            row.fidelity = m.global_nb_max / cfg.n_a0;
            if (r.summary.max_na_discrepancy) row.discrepancy = *r.summary.max_na_discrepancy;
        } catch (const Error& e) {
            row.error = e.what();
        }
        rows.push_back(row);
    }
    return rows;
}

inline void write_sweep_csv(std::ostream& os, SweepVar var, const std::vector<SweepRow>& rows) {
    using detail::g9;
    auto cell = [](double x) { return std::isnan(x) ? std::string{} : g9(x); };
    os << (var == SweepVar::Kappa ? "kappa" : "nu") << ",transfer_time,fidelity,discrepancy,error\n";
    for (const auto& r : rows) {
        std::string err = r.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        os << g9(r.value) << ',' << cell(r.transfer_time) << ',' << cell(r.fidelity) << ',' << cell(r.discrepancy)
           << ',' << err << '\n';
    }
}

}  // namespace cantion
