// Command-line front end: figure-regime runs, sweeps and the validation suite.
//
// Exit codes: 0 success, 1 validation failure, 2 bad configuration,
// 3 runtime breakdown (ansatz or Fock truncation).

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cantion/cantion.hpp"

namespace {

enum Exit { kOk = 0, kValidationFailed = 1, kBadConfig = 2, kBreakdown = 3 };

struct Cli {
    int figure = 0;
    double omega = 0, nu = 0, kappa = 0, gamma_a = 0, gamma_b = 0, na0 = 0, t_max = 0, dt_out = 0, fock_dt = 0;
    std::string model = "both";
    bool fock_check = false;
    int n_max = 0;
    std::string out;
    std::string sweep;
    std::vector<double> values;
    bool validate = false;
    double tol_scale = 1.0;
    bool corrupt_rhs = false;
};

std::ostream* open_output(const std::string& path, std::ofstream& file) {
    if (path.empty() || path == "-") return &std::cout;
    file.open(path, std::ios::binary);
    if (!file) throw cantion::DomainError("cannot open output file " + path);
    return &file;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cantilever / trapped-ion phonon dynamics: squeezed-state ansatz, RWA and Fock oracle"};
    Cli c;
    const cantion::RunConfig defaults;

    app.set_config("--config", "", "key=value file; command-line flags take precedence");
    app.add_option("--figure", c.figure, "parameter preset 2, 3, 4 or 5")
        ->check(CLI::IsMember({2, 3, 4, 5}));
    auto* o_omega = app.add_option("--omega", c.omega, "cantilever frequency [rad/us]");
    auto* o_nu = app.add_option("--nu", c.nu, "ion frequency [rad/us]");
    auto* o_kappa = app.add_option("--kappa", c.kappa, "coupling [rad/us]");
    auto* o_ga = app.add_option("--gamma-a", c.gamma_a, "cantilever decay [rad/us]");
    auto* o_gb = app.add_option("--gamma-b", c.gamma_b, "ion decay [rad/us]");
    auto* o_na0 = app.add_option("--na0", c.na0, "initial cantilever occupation");
    auto* o_tmax = app.add_option("--t-max", c.t_max, "end time [us] (default 3)");
    auto* o_dt = app.add_option("--dt-out", c.dt_out, "output spacing [us] (default 0.01)");
    app.add_option("--model", c.model, "rwa, full or both")->check(CLI::IsMember({"rwa", "full", "both"}));
    app.add_flag("--fock-check", c.fock_check, "compare against the truncated Fock oracle");
    app.add_option("--n-max", c.n_max, "Fock truncation per mode (0 = smallest adequate)");
    app.add_option("--fock-dt", c.fock_dt, "Fock RK4 step [us] (0 = min(1e-4, 2.5e-4/kappa))");
    app.add_option("--out", c.out, "output CSV path (default stdout)");
    auto* o_sweep = app.add_option("--sweep", c.sweep, "sweep variable: kappa or nu")
                        ->check(CLI::IsMember({"kappa", "nu"}));
    auto* o_values = app.add_option("--values", c.values, "sweep values")->delimiter(',');
    o_sweep->needs(o_values);
    auto* o_validate = app.add_flag("--validate", c.validate, "run the validation suite");
    app.add_option("--tol-scale", c.tol_scale, "multiply every validation tolerance")->needs(o_validate);
    app.add_flag("--corrupt-rhs", c.corrupt_rhs, "validate a deliberately corrupted full-model rhs")
        ->needs(o_validate);
    o_validate->excludes(o_sweep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kBadConfig;
    }

    if (c.validate) {
        cantion::ValidationOptions vo;
        vo.tol_scale = c.tol_scale;
        if (c.corrupt_rhs) vo.full_rhs = cantion::corrupted_full_rhs;
        if (!(vo.tol_scale > 0.0)) {
            std::cerr << "error: --tol-scale must be positive\n";
            return kBadConfig;
        }
        const auto report = cantion::run_validation(vo);
        cantion::print_report(std::cout, report);
        return report.all_passed() ? kOk : kValidationFailed;
    }

    try {
        cantion::RunConfig cfg = c.figure ? cantion::figure_preset(c.figure) : defaults;
        auto set = [](CLI::Option* o, double v, double& dst) {
            if (o->count() > 0) dst = v;
        };
        set(o_omega, c.omega, cfg.params.omega);
        set(o_nu, c.nu, cfg.params.nu);
        set(o_kappa, c.kappa, cfg.params.kappa);
        set(o_ga, c.gamma_a, cfg.params.gamma_a);
        set(o_gb, c.gamma_b, cfg.params.gamma_b);
        set(o_na0, c.na0, cfg.n_a0);
        set(o_tmax, c.t_max, cfg.t_max);
        set(o_dt, c.dt_out, cfg.dt_out);
        cfg.model = *cantion::parse_model_selection(c.model);
        cfg.fock_check = c.fock_check;
        cfg.n_max = c.n_max;
        cfg.fock_dt = c.fock_dt;
        cfg.output_path = c.out;
        cfg.validate();

        std::ofstream file;
        if (!c.sweep.empty()) {
            const auto var = *cantion::parse_sweep_var(c.sweep);
            const auto rows = cantion::run_sweep(cfg, var, c.values);
            std::ostringstream csv;
            cantion::write_sweep_csv(csv, var, rows);
            *open_output(c.out, file) << csv.str();
            return kOk;
        }

        const cantion::RunResult r = cantion::simulate(cfg);
        std::ostringstream csv;
        cantion::write_csv(csv, r);
        std::ostream* os = open_output(c.out, file);
        *os << csv.str();
        os->flush();
        cantion::write_summary(os == &std::cout ? std::cerr : std::cout, r.summary);
        return kOk;
    } catch (const cantion::TimedError& e) {
        std::cerr << "breakdown at t = " << e.time() << " us: " << e.what() << '\n';
        return kBreakdown;
    } catch (const cantion::TruncationTooSmall& e) {
        std::cerr << "breakdown: " << e.what() << '\n';
        return kBreakdown;
    } catch (const cantion::ConvergenceFailure& e) {
        std::cerr << "breakdown: " << e.what() << '\n';
        return kBreakdown;
    } catch (const cantion::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBadConfig;
    }
}
