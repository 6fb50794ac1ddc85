#pragma once

// Evolution models and the adaptive integrator that samples them.
//
// Sign conventions.  The thermodynamic layer works with H = -v.sigma, whose
// ground state has Bloch vector +vhat and energy -|v|.  The optical master
// equations below are stated for H = +(omega0/2) sigma_z with lowering
// operator sigma_- = (sigma_x - i sigma_y)/2, so the matching field is
// v = (0, 0, -omega0/2): eps = omega0/2 and Bpar = -<sigma_z>.  With that
// bridge the stationary state of the thermal master equation is exactly the
// Gibbs state of H = -v.sigma at the bath temperature.  The closed-pair
// harness defines its Hamiltonian directly as -eps_a sigma_z x I
// - eps_b I x sigma_z + g_c (exchange), so its local fields are +eps_k zhat.

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "blochtherm/bloch.hpp"
#include "blochtherm/smalg.hpp"
#include "blochtherm/trajectory.hpp"

namespace blochtherm {

struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Mean thermal photon number at the transition frequency:
/// N = 1/(exp(omega0/T) - 1).
inline double planck_occupation(double omega0, double t_env) {
    if (!(omega0 > 0.0)) throw std::invalid_argument("planck_occupation: omega0 must be positive");
    if (!(t_env > 0.0)) throw std::invalid_argument("planck_occupation: T_env must be positive");
    return 1.0 / std::expm1(omega0 / t_env);
}

/// Qubit damped by a thermal reservoir (Markovian regime): dissipators
/// D[sigma_-] at rate gamma0(N+1) and D[sigma_+] at rate gamma0 N.
struct SingleQubitThermal {
    double gamma0 = 1.0;
    double omega0 = 2.0;
    double t_env = 1.0;

    void validate() const {
        if (!(gamma0 > 0.0)) throw std::invalid_argument("SingleQubitThermal: gamma0 must be positive");
        if (!(omega0 > 0.0)) throw std::invalid_argument("SingleQubitThermal: omega0 must be positive");
        if (!(t_env > 0.0)) throw std::invalid_argument("SingleQubitThermal: T_env must be positive");
    }
    double planck() const { return planck_occupation(omega0, t_env); }
    /// Field of the thermodynamic view; eps = omega0/2.
    FieldVector thermo_field() const { return {0.0, 0.0, -0.5 * omega0}; }
};

/// Two identical atoms undergoing collective spontaneous emission into a
/// common zero-temperature environment; gamma_AA = gamma_BB = gamma0 and the
/// photon-exchange constant gamma_AB = gamma_BA = g*gamma0, 0 < g <= 1.
struct TwoAtomDissipative {
    double gamma0 = 1.0;
    double g = 0.5;
    double omega0 = 2.0;

    void validate() const {
        if (!(gamma0 > 0.0)) throw std::invalid_argument("TwoAtomDissipative: gamma0 must be positive");
        // g = 0 is the infinite-separation limit: two independent decays
        if (!(g >= 0.0 && g <= 1.0)) throw std::invalid_argument("TwoAtomDissipative: g must lie in [0, 1]");
        if (!(omega0 > 0.0)) throw std::invalid_argument("TwoAtomDissipative: omega0 must be positive");
    }
    /// Local field attached to either atom's thermodynamic view.
    FieldVector thermo_field() const { return {0.0, 0.0, -0.5 * omega0}; }
};

/// Closed pair of qubits with a resonant-exchange coupling; the global
/// evolution is unitary, so the joint entropy and spectrum are conserved.
struct ClosedPairExchange {
    double g_c = 0.5;
    double eps_a = 1.0;
    double eps_b = 1.0;

    void validate() const {
        if (!(eps_a > 0.0 && eps_b > 0.0))
            throw std::invalid_argument("ClosedPairExchange: local energies must be positive");
        if (!(g_c != 0.0) || !std::isfinite(g_c))
            throw std::invalid_argument("ClosedPairExchange: coupling must be finite and nonzero");
    }
    FieldVector field_a() const { return {0.0, 0.0, eps_a}; }
    FieldVector field_b() const { return {0.0, 0.0, eps_b}; }
    Mat4 hamiltonian() const {
        const Mat4 ha = kron(pauli_z(), Mat2::identity());
        const Mat4 hb = kron(Mat2::identity(), pauli_z());
        const Mat4 ex = kron(sigma_plus(), sigma_minus()) + kron(sigma_minus(), sigma_plus());
        return (-eps_a) * ha + (-eps_b) * hb + g_c * ex;
    }
};

namespace detail {

template <int N>
Matrix<N> dissipator(const Matrix<N>& l, const Matrix<N>& ldag, const Matrix<N>& ldag_l,
                     const Matrix<N>& rho) {
    return l * rho * ldag - 0.5 * (ldag_l * rho + rho * ldag_l);
}

struct SingleQubitGenerator {
    double down, up;
    Mat2 sm = sigma_minus(), sp = sigma_plus();
    Mat2 spsm = sigma_plus() * sigma_minus();
    Mat2 smsp = sigma_minus() * sigma_plus();

    explicit SingleQubitGenerator(const SingleQubitThermal& s)
        : down(s.gamma0 * (s.planck() + 1.0)), up(s.gamma0 * s.planck()) {}

    Mat2 operator()(const Mat2& rho) const {
        return down * dissipator(sm, sp, spsm, rho) + up * dissipator(sp, sm, smsp, rho);
    }
};

struct TwoAtomGenerator {
    double rate[2][2];
    Mat4 sm[2], sp[2], spsm[2][2];

    explicit TwoAtomGenerator(const TwoAtomDissipative& s) {
        rate[0][0] = rate[1][1] = s.gamma0;
        rate[0][1] = rate[1][0] = s.g * s.gamma0;
        sm[0] = kron(sigma_minus(), Mat2::identity());
        sm[1] = kron(Mat2::identity(), sigma_minus());
        for (int k = 0; k < 2; ++k) sp[k] = sm[k].adjoint();
        for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l) spsm[k][l] = sp[k] * sm[l];
    }

    Mat4 operator()(const Mat4& rho) const {
        Mat4 out;
        for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l) {
                const double gkl = rate[k][l];
                out += (0.5 * gkl) * (2.0 * (sm[k] * rho * sp[l]) - spsm[k][l] * rho - rho * spsm[k][l]);
            }
        return out;
    }
};

struct PairUnitaryGenerator {
    Mat4 h;
    explicit PairUnitaryGenerator(const ClosedPairExchange& s) : h(s.hamiltonian()) {}
    Mat4 operator()(const Mat4& rho) const { return cplx(0.0, -1.0) * (h * rho - rho * h); }
};

}  // namespace detail

/// Right-hand side of the thermal master equation; trace-free and
/// Hermiticity-preserving.
inline Mat2 rhs_single_qubit_thermal(const Mat2& rho, const SingleQubitThermal& spec) {
    spec.validate();
    return detail::SingleQubitGenerator(spec)(rho);
}

/// Right-hand side of the collective-decay master equation
/// (1/2) sum_kl gamma_kl (2 sm_k rho sp_l - sp_k sm_l rho - rho sp_k sm_l).
inline Mat4 rhs_two_atom(const Mat4& rho, const TwoAtomDissipative& spec) {
    spec.validate();
    return detail::TwoAtomGenerator(spec)(rho);
}

/// Right-hand side -i[H, rho] of the closed-pair harness.
inline Mat4 rhs_unitary_pair(const Mat4& rho, const ClosedPairExchange& spec) {
    spec.validate();
    return detail::PairUnitaryGenerator(spec)(rho);
}

struct IntegratorConfig {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    double t_end = 1.0;
    double sample_interval = 1e-2;

    void validate() const {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
            throw std::invalid_argument("IntegratorConfig: tolerances must be positive");
        if (!(t_end > 0.0)) throw std::invalid_argument("IntegratorConfig: t_end must be positive");
        if (!(sample_interval > 0.0))
            throw std::invalid_argument("IntegratorConfig: sample_interval must be positive");
        if (!(max_step > 0.0)) throw std::invalid_argument("IntegratorConfig: max_step must be positive");
    }
};

namespace detail {

constexpr double step_underflow_limit = 1e-12;

template <int N>
void validate_initial_state(const Matrix<N>& rho) {
    require_hermitian(hermiticity_violation(rho), "integrate");
    const double tr = std::real(rho.trace());
    if (std::abs(tr - 1.0) > 1e-10)
        throw std::invalid_argument("integrate: initial trace deviates from 1 by " +
                                    std::to_string(tr - 1.0));
    const auto es = hermitian_eigensystem(rho);
    if (es.eigenvalues[0] < -1e-10)
        throw std::invalid_argument("integrate: initial state has negative eigenvalue " +
                                    std::to_string(es.eigenvalues[0]));
}

template <int N>
double min_eigenvalue_symmetrized(const Matrix<N>& rho) {
    Matrix<N> h;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) h(i, j) = 0.5 * (rho(i, j) + std::conj(rho(j, i)));
    return hermitian_eigensystem(h).eigenvalues[0];
}

/// Adaptive Cash-Karp 4(5) on the flattened density-matrix components, with
/// per-step trace renormalization, a positivity monitor that rejects and
/// halves on eigenvalues below -1e-10, and samples emitted at exact multiples
/// of the sample interval.
template <int N, class Rhs>
Trajectory<N> integrate_adaptive(Rhs&& rhs, const Matrix<N>& rho0, const IntegratorConfig& cfg,
                                 const FieldVector& attach_field) {
    cfg.validate();
    validate_initial_state(rho0);

    // Cash-Karp tableau
    constexpr double a21 = 1.0 / 5.0;
    constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    constexpr double a41 = 3.0 / 10.0, a42 = -9.0 / 10.0, a43 = 6.0 / 5.0;
    constexpr double a51 = -11.0 / 54.0, a52 = 5.0 / 2.0, a53 = -70.0 / 27.0, a54 = 35.0 / 27.0;
    constexpr double a61 = 1631.0 / 55296.0, a62 = 175.0 / 512.0, a63 = 575.0 / 13824.0,
                     a64 = 44275.0 / 110592.0, a65 = 253.0 / 4096.0;
    constexpr double b1 = 37.0 / 378.0, b3 = 250.0 / 621.0, b4 = 125.0 / 594.0,
                     b6 = 512.0 / 1771.0;
    constexpr double e1 = b1 - 2825.0 / 27648.0, e3 = b3 - 18575.0 / 48384.0,
                     e4 = b4 - 13525.0 / 55296.0, e5 = -277.0 / 14336.0, e6 = b6 - 0.25;

    Trajectory<N> out;
    out.points.push_back({0.0, rho0, attach_field});

    Matrix<N> y = rho0;
    double t = 0.0;
    double h = std::min({cfg.max_step, cfg.sample_interval, cfg.t_end / 100.0});
    long sample_index = 1;

    const auto lincomb = [](const Matrix<N>& base, std::initializer_list<std::pair<double, const Matrix<N>*>> terms,
                            double hh) {
        Matrix<N> r = base;
        for (const auto& [c, k] : terms)
            for (int i = 0; i < N * N; ++i) r.m[i] += hh * c * k->m[i];
        return r;
    };

    while (t < cfg.t_end - 1e-15 * cfg.t_end) {
        double t_target = std::min(sample_index * cfg.sample_interval, cfg.t_end);
        if (t_target <= t + 1e-15 * cfg.t_end) {
            ++sample_index;
            continue;
        }

        // advance to t_target, then emit a sample
        while (t < t_target - 1e-14 * std::max(1.0, t_target)) {
            const double hs = std::min({h, cfg.max_step, t_target - t});
            const bool clamped = hs < h;
            if (hs < step_underflow_limit)
                throw numerical_error("integrate: step size underflow (h = " + std::to_string(hs) +
                                      ") at t = " + std::to_string(t));

            const Matrix<N> k1 = rhs(y);
            const Matrix<N> k2 = rhs(lincomb(y, {{a21, &k1}}, hs));
            const Matrix<N> k3 = rhs(lincomb(y, {{a31, &k1}, {a32, &k2}}, hs));
            const Matrix<N> k4 = rhs(lincomb(y, {{a41, &k1}, {a42, &k2}, {a43, &k3}}, hs));
            const Matrix<N> k5 =
                rhs(lincomb(y, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}, hs));
            const Matrix<N> k6 =
                rhs(lincomb(y, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}, hs));

            const Matrix<N> y_new = lincomb(y, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b6, &k6}}, hs);

            double err = 0.0;
            for (int i = 0; i < N * N; ++i) {
                const cplx e = hs * (e1 * k1.m[i] + e3 * k3.m[i] + e4 * k4.m[i] + e5 * k5.m[i] +
                                     e6 * k6.m[i]);
                const double sc =
                    cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y.m[i]), std::abs(y_new.m[i]));
                err += std::norm(e / sc);
            }
            err = std::sqrt(err / (N * N));

            if (err > 1.0) {
                ++out.stats.steps_rejected;
                h = hs * std::max(0.9 * std::pow(err, -0.25), 0.2);
                continue;
            }

            Matrix<N> y_next = y_new;
            const double tr = std::real(y_next.trace());
            out.stats.max_trace_drift = std::max(out.stats.max_trace_drift, std::abs(tr - 1.0));
            if (std::abs(tr - 1.0) > 1e-13) y_next *= cplx(1.0 / tr);

            const double min_eig = min_eigenvalue_symmetrized(y_next);
            if (min_eig < -1e-10) {
                ++out.stats.steps_rejected;
                h = 0.5 * hs;
                continue;
            }

            out.stats.min_eigenvalue = std::min(out.stats.min_eigenvalue, min_eig);
            out.stats.max_hermiticity_drift =
                std::max(out.stats.max_hermiticity_drift, hermiticity_violation(y_next));
            ++out.stats.steps_accepted;
            t += hs;
            y = y_next;
            // keep the controller's step across sample-boundary clamping
            if (!clamped) h = hs * ((err > 0.0) ? std::min(0.9 * std::pow(err, -0.2), 5.0) : 5.0);
        }

        t = t_target;
        out.points.push_back({t, y, attach_field});
        ++sample_index;
    }
    return out;
}

}  // namespace detail

inline Trajectory<2> integrate(const SingleQubitThermal& spec, const Mat2& rho0,
                               const IntegratorConfig& cfg) {
    spec.validate();
    return detail::integrate_adaptive<2>(detail::SingleQubitGenerator(spec), rho0, cfg,
                                         spec.thermo_field());
}

inline Trajectory<4> integrate(const TwoAtomDissipative& spec, const Mat4& rho0,
                               const IntegratorConfig& cfg) {
    spec.validate();
    return detail::integrate_adaptive<4>(detail::TwoAtomGenerator(spec), rho0, cfg,
                                         spec.thermo_field());
}

inline Trajectory<4> integrate(const ClosedPairExchange& spec, const Mat4& rho0,
                               const IntegratorConfig& cfg) {
    spec.validate();
    return detail::integrate_adaptive<4>(detail::PairUnitaryGenerator(spec), rho0, cfg,
                                         spec.field_a());
}

/// Marginal of a two-qubit trajectory as a qubit trajectory carrying the
/// declared local field.
inline Trajectory<2> reduced_thermo_view(const Trajectory<4>& traj, Subsystem which,
                                         const FieldVector& local_field) {
    Trajectory<2> out;
    out.stats = traj.stats;
    out.points.reserve(traj.points.size());
    for (const auto& p : traj.points)
        out.points.push_back({p.t, partial_trace(p.rho, which), local_field});
    return out;
}

/// Equilibrium temperature reached by an atom weakly coupled to thermal
/// radiation at t_env (low-temperature regime):
/// T_eq = omega0 / atanh(1 - 2 exp(-omega0/t_env)).
inline double jc_equilibrium_temperature(double omega0, double t_env) {
    if (!(omega0 > 0.0))
        throw std::invalid_argument("jc_equilibrium_temperature: omega0 must be positive");
    if (!(t_env > 0.0))
        throw std::invalid_argument("jc_equilibrium_temperature: T_env must be positive");
    const double arg = 1.0 - 2.0 * std::exp(-omega0 / t_env);
    if (!(arg > 0.0))
        throw std::invalid_argument(
            "jc_equilibrium_temperature: outside the low-temperature domain (argument " +
            std::to_string(arg) + " must be positive)");
    if (arg >= 1.0) return 0.0;  // deep vacuum limit: the argument rounds to 1
    return omega0 / std::atanh(arg);
}

}  // namespace blochtherm
