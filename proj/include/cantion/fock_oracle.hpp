#pragma once

// Brute-force reference for the ansatz: the state vector in a truncated
// two-mode number basis |n_a, n_b>, 0 <= n_a, n_b <= n_max, evolved with
// fixed-step classical RK4 under the non-Hermitian Hamiltonian.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "cantion/core_model.hpp"
#include "cantion/errors.hpp"
#include "cantion/gaussian_moments.hpp"

namespace cantion {

class FockState {
public:
    FockState() = default;
    explicit FockState(int n_max) : n_max_(n_max), amps_(static_cast<std::size_t>(n_max + 1) * (n_max + 1)) {
        if (n_max < 1) throw DomainError("FockState: n_max must be >= 1");
    }

    int n_max() const noexcept { return n_max_; }
    int side() const noexcept { return n_max_ + 1; }

    cplx& at(int n_a, int n_b) noexcept { return amps_[static_cast<std::size_t>(n_a) * side() + n_b]; }
    const cplx& at(int n_a, int n_b) const noexcept { return amps_[static_cast<std::size_t>(n_a) * side() + n_b]; }

    std::span<cplx> amps() noexcept { return amps_; }
    std::span<const cplx> amps() const noexcept { return amps_; }

    /// Accumulated bound on the amplitude norm pushed past n_max.
    double leakage() const noexcept { return leakage_; }
    void add_leakage(double x) noexcept { leakage_ += x; }
    void set_leakage(double x) noexcept { leakage_ = x; }

    double mass() const noexcept {
        double s = 0.0;
        for (const cplx& c : amps_) s += std::norm(c);
        return s;
    }

    /// Total |c|^2 in the two outermost shells of either mode.
    double tail_mass() const noexcept {
        double s = 0.0;
        const int n = n_max_;
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= n; ++j)
                if (i >= n - 1 || j >= n - 1) s += std::norm(at(i, j));
        return s;
    }

private:
    int n_max_ = 0;
    std::vector<cplx> amps_;
    double leakage_ = 0.0;
};

/// Minimum total probability a freshly built initial state must hold.
inline constexpr double kInitialMassTolerance = 1e-10;

/// rho exp(alpha1 a+a+)|0> with the parameters of initial_ansatz(n_a0):
/// c[2n][0] = rho alpha1^n sqrt((2n)!) / n!.
inline FockState build_initial_fock(double n_a0, int n_max) {
    if (n_max < 2 || n_max % 2 != 0) throw DomainError("build_initial_fock: n_max must be even and >= 2");
    const AnsatzState s = initial_ansatz(n_a0);
    FockState f(n_max);
    cplx c = s.rho;
    for (int n = 0; 2 * n <= n_max; ++n) {
        f.at(2 * n, 0) = c;
        c *= s.alpha1 * std::sqrt((2.0 * n + 1.0) * (2.0 * n + 2.0)) / (n + 1.0);
    }
    const double m = f.mass();
    if (m < 1.0 - kInitialMassTolerance) {
        throw TruncationTooSmall("build_initial_fock: n_max = " + std::to_string(n_max) +
                                 " keeps only probability " + detail::sci(m));
    }
    return f;
}

/// Smallest even n_max accepted by build_initial_fock(n_a0, .). A finite
/// occupation_tol also requires the truncated state to carry n_a0 to within
/// that amount.
inline int required_truncation(double n_a0, double occupation_tol = std::numeric_limits<double>::infinity()) {
    const AnsatzState s = initial_ansatz(n_a0);
    double mass = 0.0, occ = 0.0;
    double c2 = std::norm(s.rho);
    const double a2 = std::norm(s.alpha1);
    for (int n = 0;; ++n) {
        mass += c2;
        occ += 2.0 * n * c2;
        if (mass >= 1.0 - kInitialMassTolerance && n_a0 - occ <= occupation_tol)
            return std::max(2, 2 * n + (n == 0 ? 2 : 0));
        c2 *= a2 * (2.0 * n + 1.0) * (2.0 * n + 2.0) / ((n + 1.0) * (n + 1.0));
        if (n > 1'000'000) throw DomainError("required_truncation: n_a0 too large");
    }
}

/// Number-basis expansion of an arbitrary ansatz state, from the ladder
/// identities a|psi> = (2 a1 a+ + a2 b+)|psi> and b|psi> = (a2 a+ + 2 a3 b+)|psi>.
inline FockState expand_ansatz(const AnsatzState& s, int n_max) {
    FockState f(n_max);
    const int n = n_max;
    auto sq = [](int k) { return std::sqrt(static_cast<double>(k)); };
    f.at(0, 0) = s.rho;
    for (int j = 0; j < n; ++j) {
        // sqrt(j+1) c[0][j+1] = 2 a3 sqrt(j) c[0][j-1]
        f.at(0, j + 1) = j >= 1 ? 2.0 * s.alpha3 * sq(j) * f.at(0, j - 1) / sq(j + 1) : cplx{};
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= n; ++j) {
            cplx acc{};
            if (i >= 1) acc += 2.0 * s.alpha1 * sq(i) * f.at(i - 1, j);
            if (j >= 1) acc += s.alpha2 * sq(j) * f.at(i, j - 1);
            f.at(i + 1, j) = acc / sq(i + 1);
        }
    }
    return f;
}

/// Norm and normalized occupations computed directly from the amplitudes.
inline MomentRecord fock_occupations(const FockState& f) {
    double norm = 0.0, na = 0.0, nb = 0.0;
    const int n = f.n_max();
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            const double p = std::norm(f.at(i, j));
            norm += p;
            na += i * p;
            nb += j * p;
        }
    }
    if (!(norm > 0.0)) throw ZeroNorm("fock_occupations: state has zero norm");
    return {norm, na / norm, nb / norm};
}

/// Expectation value of the joint parity (-1)^(n_a + n_b), normalized.
inline double fock_parity(const FockState& f) {
    double norm = 0.0, par = 0.0;
    for (int i = 0; i <= f.n_max(); ++i)
        for (int j = 0; j <= f.n_max(); ++j) {
            const double p = std::norm(f.at(i, j));
            norm += p;
            par += ((i + j) % 2 == 0 ? p : -p);
        }
    if (!(norm > 0.0)) throw ZeroNorm("fock_parity: state has zero norm");
    return par / norm;
}

/// H|psi> with H = (w - iGa) a+a + (v - iGb) b+b - k C, where C is
/// (a + a+)(b + b+) for the full model and a b+ + a+ b for the RWA. Components
/// pushed beyond n_max are dropped; their norm is stored as the result's leakage.
inline FockState apply_hamiltonian(const FockState& psi, const SystemParams& p, ModelKind model) {
    p.validate();
    const int n = psi.n_max();
    FockState out(n);
    const cplx wa{p.omega, -p.gamma_a};
    const cplx wb{p.nu, -p.gamma_b};
    const double k = p.kappa;
    const bool full = model == ModelKind::Full;
    auto sq = [](int x) { return std::sqrt(static_cast<double>(x)); };
    auto get = [&](int i, int j) -> cplx {
        return (i < 0 || j < 0 || i > n || j > n) ? cplx{} : psi.at(i, j);
    };

    // Target-indexed stencil over an extended grid so that out-of-range
    // targets can be measured as leakage.
    double dropped = 0.0;
    for (int i = 0; i <= n + 1; ++i) {
        for (int j = 0; j <= n + 1; ++j) {
            cplx acc{};
            if (i <= n && j <= n) acc += (wa * static_cast<double>(i) + wb * static_cast<double>(j)) * psi.at(i, j);
            cplx c{};
            c += sq(i + 1) * sq(j) * get(i + 1, j - 1);  // a b+
            c += sq(i) * sq(j + 1) * get(i - 1, j + 1);  // a+ b
            if (full) {
                c += sq(i + 1) * sq(j + 1) * get(i + 1, j + 1);  // a b
                c += sq(i) * sq(j) * get(i - 1, j - 1);          // a+ b+
            }
            acc -= k * c;
            if (i <= n && j <= n) {
                out.at(i, j) = acc;
            } else {
                dropped += std::norm(acc);
            }
        }
    }
    out.add_leakage(std::sqrt(dropped));
    return out;
}

struct FockEvolveOptions {
    double dt = 1e-4;                 ///< RK4 step [us]
    bool verify_convergence = true;   ///< re-run at dt/2 and compare occupations
    double convergence_tol = 1e-8;
    double leakage_tol = 1e-6;        ///< relative to the current norm
};

struct FockMomentPoint {
    double t = 0.0;
    MomentRecord moments;
    double tail_mass = 0.0;
    double leakage = 0.0;
};

struct FockMomentTrajectory {
    std::vector<FockMomentPoint> points;
    double dt_change = 0.0;  ///< max |change in n_a, n_b| when dt is halved (0 if not verified)
    int n_max = 0;
};

namespace detail {

/// Coupling coefficients of one row of the sublattice derivative.
struct RowCoeffs {
    double abp_r, abp_i, apb_r, apb_i, ab_r, ab_i, apbp_r, apbp_i, ga, gb;
};

template <bool Full>
inline void ladder_row(int L, const RowCoeffs& k, const double* __restrict sj, const double* __restrict sj1,
                       const double* __restrict nb, const double* __restrict cr, const double* __restrict ci,
                       const double* __restrict upr_m, const double* __restrict upi_m,
                       const double* __restrict dnr_p, const double* __restrict dni_p,
                       const double* __restrict upr_p, const double* __restrict upi_p,
                       const double* __restrict dnr_m, const double* __restrict dni_m, double* __restrict orr,
                       double* __restrict oi) noexcept {
    const double abp_r = k.abp_r, abp_i = k.abp_i, apb_r = k.apb_r, apb_i = k.apb_i;
    const double ab_r = k.ab_r, ab_i = k.ab_i, apbp_r = k.apbp_r, apbp_i = k.apbp_i;
    const double ga = k.ga, gb = k.gb;
    for (int m = 0; m < L; ++m) {
        // a b+ from (i+1, j-1), a+ b from (i-1, j+1)
        const double x1r = sj[m] * upr_m[m], x1i = sj[m] * upi_m[m];
        const double x2r = sj1[m] * dnr_p[m], x2i = sj1[m] * dni_p[m];
        double accr = abp_r * x1r - abp_i * x1i + apb_r * x2r - apb_i * x2i;
        double acci = abp_r * x1i + abp_i * x1r + apb_r * x2i + apb_i * x2r;
        if constexpr (Full) {
            // a b from (i+1, j+1), a+ b+ from (i-1, j-1)
            const double x3r = sj1[m] * upr_p[m], x3i = sj1[m] * upi_p[m];
            const double x4r = sj[m] * dnr_m[m], x4i = sj[m] * dni_m[m];
            accr += ab_r * x3r - ab_i * x3i + apbp_r * x4r - apbp_i * x4i;
            acci += ab_r * x3i + ab_i * x3r + apbp_r * x4i + apbp_i * x4r;
        }
        const double g = ga + gb * nb[m];
        orr[m] = accr - g * cr[m];
        oi[m] = acci - g * ci[m];
    }
}

/// One joint-parity class of the number grid, (n_a + n_b) % 2 == parity, in
/// compact structure-of-arrays form. Both Hamiltonians conserve the joint
/// parity, so the classes evolve independently.
///
/// Row i (n_a = i) holds n_b = j0(i) + 2m, m = 0 .. len(i)-1, at column m + 1
/// of a zero-padded row; rows -1 and n_max + 1 are zero padding as well, so
/// out-of-grid neighbours read as zero.
class ParitySublattice {
public:
    ParitySublattice(int parity, int n_max)
        : parity_(parity), n_(n_max), width_(n_max / 2 + 4), rows_(n_max + 3) {
        const std::size_t size = static_cast<std::size_t>(rows_) * width_;
        for (auto* v : {&re_, &im_, &k1r_, &k1i_, &k2r_, &k2i_, &k3r_, &k3i_, &k4r_, &k4i_, &tr_, &ti_})
            v->assign(size, 0.0);
        for (int off = 0; off < 2; ++off) {
            sqj_[off].assign(width_, 0.0);
            sqj1_[off].assign(width_, 0.0);
            nb_[off].assign(width_, 0.0);
            for (int m = 0; off + 2 * m <= n_max; ++m) {
                const int j = off + 2 * m;
                sqj_[off][m] = std::sqrt(static_cast<double>(j));
                sqj1_[off][m] = std::sqrt(static_cast<double>(j + 1));
                nb_[off][m] = j;
            }
        }
    }

    int j0(int i) const noexcept { return (parity_ + i) & 1; }
    int len(int i) const noexcept { return (n_ - j0(i)) / 2 + 1; }
    std::size_t pos(int i, int m) const noexcept {
        return static_cast<std::size_t>(i + 1) * width_ + static_cast<std::size_t>(m + 1);
    }

    void load(const FockState& f) {
        for (int i = 0; i <= n_; ++i)
            for (int m = 0; m < len(i); ++m) {
                const cplx c = f.at(i, j0(i) + 2 * m);
                re_[pos(i, m)] = c.real();
                im_[pos(i, m)] = c.imag();
            }
    }

    /// Writes lab-frame amplitudes c = e^{-i(w n_a + v n_b) t} d into `lab`.
    void store(FockState& lab, std::span<const cplx> row_phase, std::span<const cplx> col_phase) const {
        for (int i = 0; i <= n_; ++i)
            for (int m = 0; m < len(i); ++m) {
                const int j = j0(i) + 2 * m;
                lab.at(i, j) = cplx{re_[pos(i, m)], im_[pos(i, m)]} * row_phase[i] * col_phase[j];
            }
    }

    cplx amp(int i, int j) const noexcept {
        if (i < 0 || j < 0 || i > n_ || j > n_ || ((i + j) & 1) != parity_) return {};
        const std::size_t p = pos(i, (j - j0(i)) / 2);
        return {re_[p], im_[p]};
    }

    struct Coupling {
        double ga, gb;   // decay rates
        cplx ab, apbp;   // counter-rotating pairs, i k e^{-/+ i(w+v)t}
        cplx abp, apb;   // exchange pairs, i k e^{-/+ i(w-v)t}
    };

    template <bool Full>
    void step(const std::function<Coupling(double)>& coupling, double t, double h) {
        deriv<Full>(coupling(t), re_, im_, k1r_, k1i_);
        combine(0.5 * h, k1r_, k1i_);
        const Coupling mid = coupling(t + 0.5 * h);
        deriv<Full>(mid, tr_, ti_, k2r_, k2i_);
        combine(0.5 * h, k2r_, k2i_);
        deriv<Full>(mid, tr_, ti_, k3r_, k3i_);
        combine(h, k3r_, k3i_);
        deriv<Full>(coupling(t + h), tr_, ti_, k4r_, k4i_);
        const double h6 = h / 6.0;
        const std::size_t size = re_.size();
        double* __restrict r = re_.data();
        double* __restrict im = im_.data();
        const double *a = k1r_.data(), *b = k2r_.data(), *c = k3r_.data(), *d = k4r_.data();
        const double *ai = k1i_.data(), *bi = k2i_.data(), *ci = k3i_.data(), *di = k4i_.data();
        for (std::size_t x = 0; x < size; ++x) {
            r[x] += h6 * (a[x] + 2.0 * (b[x] + c[x]) + d[x]);
            im[x] += h6 * (ai[x] + 2.0 * (bi[x] + ci[x]) + di[x]);
        }
    }

private:
    int parity_;
    int n_;
    int width_;
    int rows_;
    std::vector<double> re_, im_, k1r_, k1i_, k2r_, k2i_, k3r_, k3i_, k4r_, k4i_, tr_, ti_;
    std::array<std::vector<double>, 2> sqj_, sqj1_, nb_;

    // t = d + a k
    void combine(double a, const std::vector<double>& kr, const std::vector<double>& ki) {
        const std::size_t size = re_.size();
        for (std::size_t x = 0; x < size; ++x) {
            tr_[x] = re_[x] + a * kr[x];
            ti_[x] = im_[x] + a * ki[x];
        }
    }

    template <bool Full>
    void deriv(const Coupling& c, const std::vector<double>& inr, const std::vector<double>& ini,
               std::vector<double>& outr, std::vector<double>& outi) const {
        for (int i = 0; i <= n_; ++i) {
            const int off = j0(i);
            const int L = len(i);
            const std::size_t p0 = pos(i, 0);
            const double* cr = inr.data() + p0;
            const double* ci = ini.data() + p0;
            // neighbours in rows i +/- 1 at n_b = j + 1 / j - 1 sit at column offsets off / off - 1
            const std::size_t up_p = p0 + width_ + off, up_m = up_p - 1;
            const std::size_t dn_p = p0 - width_ + off, dn_m = dn_p - 1;
            const double* upr_p = inr.data() + up_p;
            const double* upi_p = ini.data() + up_p;
            const double* upr_m = inr.data() + up_m;
            const double* upi_m = ini.data() + up_m;
            const double* dnr_p = inr.data() + dn_p;
            const double* dni_p = ini.data() + dn_p;
            const double* dnr_m = inr.data() + dn_m;
            const double* dni_m = ini.data() + dn_m;
            double* orr = outr.data() + p0;
            double* oi = outi.data() + p0;
            const double* sj = sqj_[off].data();
            const double* sj1 = sqj1_[off].data();
            const double* nb = nb_[off].data();
            const double su = std::sqrt(static_cast<double>(i + 1));
            const double sd = std::sqrt(static_cast<double>(i));
            const double ga = c.ga * i;
            const double abp_r = su * c.abp.real(), abp_i = su * c.abp.imag();
            const double apb_r = sd * c.apb.real(), apb_i = sd * c.apb.imag();
            const double ab_r = su * c.ab.real(), ab_i = su * c.ab.imag();
            const double apbp_r = sd * c.apbp.real(), apbp_i = sd * c.apbp.imag();
            const RowCoeffs k{abp_r, abp_i, apb_r, apb_i, ab_r, ab_i, apbp_r, apbp_i, ga, c.gb};
            ladder_row<Full>(L, k, sj, sj1, nb, cr, ci, upr_m, upi_m, dnr_p, dni_p, upr_p, upi_p, dnr_m, dni_m, orr,
                             oi);
        }
    }
};

/// Fixed-step RK4 on the amplitude vector in the interaction picture of
/// H0 = w a+a + v b+b: d = e^{i H0 t} c obeys
/// d' = -G d + i k (phase-rotated ladder couplings) d,
/// which removes the fast free rotation from the stepping error.
/// `observe(t, c)` sees lab-frame amplitudes at every grid time.
class FockPropagator {
public:
    FockPropagator(const SystemParams& p, ModelKind model, int n_max)
        : p_(p), full_(model == ModelKind::Full), n_(n_max) {}

    template <class Observe>
    void run(const FockState& initial, std::span<const double> t_grid, double dt, double leakage_tol,
             Observe&& observe) {
        if (initial.n_max() != n_) throw DomainError("FockPropagator: truncation mismatch");
        std::vector<ParitySublattice> parts;
        for (int parity = 0; parity < 2; ++parity) {
            bool used = false;
            for (int i = 0; i <= n_ && !used; ++i)
                for (int j = (parity + i) & 1; j <= n_; j += 2)
                    if (initial.at(i, j) != cplx{}) {
                        used = true;
                        break;
                    }
            if (used) {
                parts.emplace_back(parity, n_);
                parts.back().load(initial);
            }
        }

        const SystemParams p = p_;
        const bool full = full_;
        const std::function<ParitySublattice::Coupling(double)> coupling = [p, full](double t) {
            const double sum = (p.omega + p.nu) * t;
            const double diff = (p.omega - p.nu) * t;
            const cplx ik{0.0, p.kappa};
            ParitySublattice::Coupling c;
            c.ga = p.gamma_a;
            c.gb = p.gamma_b;
            c.ab = full ? ik * std::polar(1.0, -sum) : cplx{};
            c.apbp = full ? ik * std::polar(1.0, sum) : cplx{};
            c.abp = ik * std::polar(1.0, -diff);
            c.apb = ik * std::polar(1.0, diff);
            return c;
        };

        double leak = initial.leakage();
        FockState lab(n_);
        std::vector<cplx> row_phase(n_ + 1), col_phase(n_ + 1);
        auto emit = [&](double t) {
            for (int k = 0; k <= n_; ++k) {
                row_phase[k] = std::polar(1.0, -p_.omega * k * t);
                col_phase[k] = std::polar(1.0, -p_.nu * k * t);
            }
            for (const auto& part : parts) part.store(lab, row_phase, col_phase);
            lab.set_leakage(leak);
            const double norm = lab.mass();
            const double tail = lab.tail_mass();
            if (leak * leak > leakage_tol * norm || tail > leakage_tol * norm) {
                throw LeakageExceeded("Fock truncation n_max = " + std::to_string(n_) +
                                          " too small at t = " + detail::sci(t) + " us",
                                      t);
            }
            observe(t, static_cast<const FockState&>(lab));
        };

        emit(t_grid.front());
        for (std::size_t g = 1; g < t_grid.size(); ++g) {
            const double span = t_grid[g] - t_grid[g - 1];
            const long steps = std::max(1L, static_cast<long>(std::ceil(span / dt - 1e-9)));
            const double h = span / static_cast<double>(steps);
            for (long st = 0; st < steps; ++st) {
                const double t0 = t_grid[g - 1] + static_cast<double>(st) * h;
                leak += h * boundary_flux(parts);
                for (auto& part : parts) {
                    if (full_) {
                        part.step<true>(coupling, t0, h);
                    } else {
                        part.step<false>(coupling, t0, h);
                    }
                }
            }
            emit(t_grid[g]);
        }
    }

private:
    SystemParams p_;
    bool full_;
    int n_;

    /// Norm of the part of d' that the coupling pushes past n_max.
    double boundary_flux(const std::vector<ParitySublattice>& parts) const {
        const int n = n_;
        auto at = [&](int i, int j) {
            cplx s{};
            for (const auto& part : parts) s += part.amp(i, j);
            return s;
        };
        auto sq = [](int x) { return std::sqrt(static_cast<double>(x)); };
        double flux = 0.0;
        for (int j = 0; j <= n + 1; ++j) {
            cplx a = sq(n + 1) * sq(j + 1) * at(n, j + 1);        // a+ b  into n_a = n + 1
            if (full_) a += sq(n + 1) * sq(j) * at(n, j - 1);     // a+ b+
            flux += std::norm(p_.kappa * a);
        }
        for (int i = 0; i <= n; ++i) {
            cplx b = sq(i + 1) * sq(n + 1) * at(i + 1, n);         // a b+  into n_b = n + 1
            if (full_) b += sq(i) * sq(n + 1) * at(i - 1, n);      // a+ b+
            flux += std::norm(p_.kappa * b);
        }
        return std::sqrt(flux);
    }
};

inline void check_fock_grid(std::span<const double> t_grid, double dt) {
    if (t_grid.empty()) throw DomainError("evolve_fock: empty time grid");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1])) throw DomainError("evolve_fock: time grid must be strictly increasing");
    if (!(dt > 0.0)) throw DomainError("evolve_fock: dt must be positive");
}

inline std::vector<MomentRecord> fock_moments_only(const FockState& s, const SystemParams& p, ModelKind model,
                                                   std::span<const double> t_grid, double dt, double leak_tol) {
    std::vector<MomentRecord> out;
    FockPropagator prop(p, model, s.n_max());
    prop.run(s, t_grid, dt, leak_tol, [&](double, const FockState& f) { out.push_back(fock_occupations(f)); });
    return out;
}

inline double max_occupation_change(const std::vector<MomentRecord>& a, const std::vector<MomentRecord>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
        m = std::max({m, std::abs(a[i].n_a - b[i].n_a), std::abs(a[i].n_b - b[i].n_b)});
    }
    return m;
}

}  // namespace detail

struct FockSnapshot {
    double t = 0.0;
    FockState state;
};

/// Snapshots of the evolved amplitudes at every grid time. With
/// verify_convergence the run is repeated at dt/2 and ConvergenceFailure is
/// thrown if any occupation moves by more than convergence_tol.
inline std::vector<FockSnapshot> evolve_fock(const FockState& state, const SystemParams& p, ModelKind model,
                                             std::span<const double> t_grid, const FockEvolveOptions& opt = {}) {
    p.validate();
    detail::check_fock_grid(t_grid, opt.dt);
    std::vector<FockSnapshot> snaps;
    detail::FockPropagator prop(p, model, state.n_max());
    prop.run(state, t_grid, opt.dt, opt.leakage_tol,
             [&](double t, const FockState& f) { snaps.push_back({t, f}); });
    if (opt.verify_convergence) {
        std::vector<MomentRecord> coarse;
        for (const auto& s : snaps) coarse.push_back(fock_occupations(s.state));
        const auto fine = detail::fock_moments_only(state, p, model, t_grid, 0.5 * opt.dt, opt.leakage_tol);
        const double change = detail::max_occupation_change(coarse, fine);
        if (change > opt.convergence_tol) {
            throw ConvergenceFailure("evolve_fock: halving dt changed occupations by " + detail::sci(change));
        }
    }
    return snaps;
}

/// Occupation trajectory only; same contract as evolve_fock but without
/// keeping the amplitudes (large grids at large n_max do not fit in memory).
inline FockMomentTrajectory fock_moment_trajectory(const FockState& state, const SystemParams& p, ModelKind model,
                                                   std::span<const double> t_grid,
                                                   const FockEvolveOptions& opt = {}) {
    p.validate();
    detail::check_fock_grid(t_grid, opt.dt);
    FockMomentTrajectory traj;
    traj.n_max = state.n_max();
    detail::FockPropagator prop(p, model, state.n_max());
    prop.run(state, t_grid, opt.dt, opt.leakage_tol, [&](double t, const FockState& f) {
        traj.points.push_back({t, fock_occupations(f), f.tail_mass(), f.leakage()});
    });
    if (opt.verify_convergence) {
        std::vector<MomentRecord> coarse;
        for (const auto& pt : traj.points) coarse.push_back(pt.moments);
        const auto fine = detail::fock_moments_only(state, p, model, t_grid, 0.5 * opt.dt, opt.leakage_tol);
        traj.dt_change = detail::max_occupation_change(coarse, fine);
        if (traj.dt_change > opt.convergence_tol) {
            throw ConvergenceFailure("fock_moment_trajectory: halving dt changed occupations by " +
                                     detail::sci(traj.dt_change));
        }
    }
    return traj;
}

}  // namespace cantion
