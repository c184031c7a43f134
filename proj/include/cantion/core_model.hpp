#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <string_view>

#include "cantion/errors.hpp"

namespace cantion {

using cplx = std::complex<double>;

inline constexpr cplx I_unit{0.0, 1.0};

/// Physical rates of the cantilever (mode a) / ion (mode b) system.
/// All values are angular frequencies in rad/us; time is in us.
struct SystemParams {
    double omega = 0.0;    ///< cantilever frequency
    double nu = 0.0;       ///< ion vibrational frequency
    double kappa = 0.0;    ///< coupling constant
    double gamma_a = 0.0;  ///< cantilever decay
    double gamma_b = 0.0;  ///< ion decay

    bool valid() const noexcept {
        return omega > 0.0 && nu > 0.0 && kappa >= 0.0 && gamma_a >= 0.0 && gamma_b >= 0.0 &&
               std::isfinite(omega) && std::isfinite(nu) && std::isfinite(kappa) &&
               std::isfinite(gamma_a) && std::isfinite(gamma_b);
    }

    void validate() const {
        if (!valid()) {
            throw DomainError("SystemParams: need omega > 0, nu > 0 and kappa, gamma_a, gamma_b >= 0");
        }
    }

    /// Parameters with the roles of the two modes exchanged.
    SystemParams mode_swapped() const noexcept { return {nu, omega, kappa, gamma_b, gamma_a}; }

    friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

/// Full keeps the counter-rotating terms a^+b^+ + ab of the coupling; Rwa drops them.
enum class ModelKind { Full, Rwa };

inline std::string_view to_string(ModelKind m) noexcept {
    return m == ModelKind::Full ? "full" : "rwa";
}

/// Variational parameters of rho * exp(a1 a^+a^+ + a2 a^+b^+ + a3 b^+b^+)|0,0>.
struct AnsatzState {
    cplx rho{1.0, 0.0};
    cplx alpha1{};
    cplx alpha2{};
    cplx alpha3{};

    /// Same state with modes a and b exchanged.
    AnsatzState mode_swapped() const noexcept { return {rho, alpha3, alpha2, alpha1}; }

    bool finite() const noexcept {
        auto ok = [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
        return ok(rho) && ok(alpha1) && ok(alpha2) && ok(alpha3);
    }

    friend bool operator==(const AnsatzState&, const AnsatzState&) = default;
};

/// Normalized squeezed vacuum of the cantilever with mean occupation n_a0 and
/// the ion in its ground state. Positive roots are taken for rho and alpha1.
inline AnsatzState initial_ansatz(double n_a0) {
    if (!(n_a0 >= 0.0) || !std::isfinite(n_a0)) {
        throw DomainError("initial_ansatz: mean phonon number must be a finite value >= 0");
    }
    AnsatzState s;
    s.rho = std::pow(n_a0 + 1.0, -0.25);
    s.alpha1 = 0.5 * std::sqrt(n_a0 / (n_a0 + 1.0));
    return s;
}

}  // namespace cantion
