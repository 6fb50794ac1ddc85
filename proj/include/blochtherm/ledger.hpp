#pragma once

// Process-level thermodynamic accounting along trajectories: heat, work,
// entropy, and the split of entropy production into an internal part (loss
// of coherence) and a boundary part (heat transfer across a temperature
// difference), together with the relative-entropy route to the total.
//
// All increments are midpoint (trapezoidal) discretizations of the
// differential relations, second-order accurate in the sample spacing:
//   dQ        = -dB.v                     (midpoint field)
//   dW        = -B.dv                     (midpoint state)
//   dS        = S(B1) - S(B0)             (exact; S is a state function)
//   dQ/T      = -atanh(B)(vhat.Bhat)(vhat.dB)   at the midpoint state;
//               smooth across the Bpar = 0 plane, where 1/T -> 0
//   dSgen_int = -atanh(B)[Bhat - (vhat.Bhat)vhat].dB   at the midpoint
//   dSgen_ht  = dQ (1/T - 1/T_env)
//   dSgen_tot = dS - dQ/T_env

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "blochtherm/bloch.hpp"
#include "blochtherm/smalg.hpp"
#include "blochtherm/trajectory.hpp"

namespace blochtherm {

inline constexpr double trajectory_state_tolerance = 1e-8;
inline constexpr double support_eigenvalue_floor = 1e-14;

/// Environment the system exchanges heat with.  The temperature may be left
/// unspecified (unknown or time-dependent reservoir), in which case only the
/// state-local quantities and the internal entropy production are available.
struct EnvironmentSpec {
    std::optional<double> t_env;
    FieldVector field;  // field with which the equilibrium state is constructed

    static EnvironmentSpec unspecified() { return {}; }
    static EnvironmentSpec at(double temperature, const FieldVector& f) {
        return {temperature, f};
    }

    bool specified() const { return t_env.has_value(); }

    /// Gibbs state of H = -field.sigma at t_env.
    Mat2 equilibrium_density() const {
        if (!specified())
            throw std::invalid_argument("EnvironmentSpec: environment temperature unspecified");
        if (*t_env == 0.0)
            throw std::invalid_argument("EnvironmentSpec: equilibrium state singular at T = 0");
        return gibbs_density(field, *t_env);
    }
};

namespace detail {

/// Neumaier compensated summation for long chains of small increments.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

inline Vec3 to_vec(const BlochVector& b) { return {b.x, b.y, b.z}; }
inline Vec3 unit_of(const FieldVector& v) {
    const double e = v.epsilon();
    return {v.x / e, v.y / e, v.z / e};
}
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 sub(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 mid(const Vec3& a, const Vec3& b) {
    return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y), 0.5 * (a.z + b.z)};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline void require_shared_direction(const FieldVector& v0, const FieldVector& v1,
                                     const char* where) {
    const Vec3 u0 = unit_of(v0), u1 = unit_of(v1);
    if (dot(u0, u1) < 1.0 - 1e-12)
        throw std::invalid_argument(std::string(where) +
                                    ": states do not share a field direction");
}

/// Entropy flux dQ/T across a step, evaluated at the midpoint state in the
/// product form -atanh(B)(vhat.Bhat)(vhat.dB).  Finite at Bpar = 0 (where
/// 1/T is continued as 0) and at B = 0.
inline double entropy_flux(const Vec3& b0, const Vec3& b1, const Vec3& vhat) {
    const Vec3 m = mid(b0, b1);
    const double bm = norm(m);
    return -atanh_over(bm) * dot(m, vhat) * dot(sub(b1, b0), vhat);
}

/// Midpoint discretization of the internal entropy production one-form
/// -atanh(B)[Bhat - (vhat.Bhat)vhat].dB.
inline double internal_entropy(const Vec3& b0, const Vec3& b1, const Vec3& vhat) {
    const Vec3 m = mid(b0, b1);
    const Vec3 d = sub(b1, b0);
    const double bm = norm(m);
    return -atanh_over(bm) * (dot(m, d) - dot(m, vhat) * dot(d, vhat));
}

/// Bloch components of a trajectory state, tolerant of integrator round-off:
/// trace-normalized, modulus overshoot up to 1e-7 rescaled onto the sphere.
inline BlochVector bloch_lenient(const Mat2& rho, std::size_t step) {
    const double tr = std::real(rho.trace());
    double bx = std::real(rho(0, 1) + rho(1, 0)) / tr;
    double by = std::real(cplx(0.0, 1.0) * (rho(0, 1) - rho(1, 0))) / tr;
    double bz = std::real(rho(0, 0) - rho(1, 1)) / tr;
    const double b = std::sqrt(bx * bx + by * by + bz * bz);
    if (b > 1.0 + 1e-7)
        throw std::invalid_argument("trajectory point " + std::to_string(step) +
                                    ": Bloch modulus " + std::to_string(b) + " is unphysical");
    if (b > 1.0) {
        bx /= b;
        by /= b;
        bz /= b;
    }
    return BlochVector(bx, by, bz);
}

template <int N>
void validate_trajectory_point(const TrajectoryPoint<N>& p, std::size_t i) {
    const double herm = hermiticity_violation(p.rho);
    if (herm > trajectory_state_tolerance)
        throw std::invalid_argument("trajectory point " + std::to_string(i) +
                                    ": hermiticity violation " + std::to_string(herm));
    const double tr = std::real(p.rho.trace());
    if (std::abs(tr - 1.0) > trajectory_state_tolerance)
        throw std::invalid_argument("trajectory point " + std::to_string(i) +
                                    ": trace deviates from 1 by " + std::to_string(tr - 1.0));
    Matrix<N> h = p.rho;
    for (int r = 0; r < N; ++r) {
        h(r, r) = std::real(h(r, r));
        for (int c = r + 1; c < N; ++c) {
            const cplx e = 0.5 * (h(r, c) + std::conj(h(c, r)));
            h(r, c) = e;
            h(c, r) = std::conj(e);
        }
    }
    const auto es = hermitian_eigensystem(h);
    if (es.eigenvalues[0] < -trajectory_state_tolerance)
        throw std::invalid_argument("trajectory point " + std::to_string(i) +
                                    ": negative eigenvalue " +
                                    std::to_string(es.eigenvalues[0]));
}

}  // namespace detail

/// Heat absorbed across a step: dQ = -(b1 - b0).v with the midpoint field.
inline double heat_increment(const BlochVector& b0, const BlochVector& b1,
                             const FieldVector& field) {
    const BlochVector d = b1 - b0;
    return -(d.x * field.x + d.y * field.y + d.z * field.z);
}

/// Work done on the system across a field change: dW = -b.(v1 - v0) with the
/// midpoint Bloch vector.
inline double work_increment(const BlochVector& b_mid, const FieldVector& v0,
                             const FieldVector& v1) {
    return -(b_mid.x * (v1.x - v0.x) + b_mid.y * (v1.y - v0.y) + b_mid.z * (v1.z - v0.z));
}

/// Internal entropy production across a step (midpoint rule).  Zero for
/// rotations about the field axis and for incoherent (on-axis) motion.
inline double internal_entropy_increment(const QubitThermoState& s0, const QubitThermoState& s1) {
    detail::require_shared_direction(s0.field, s1.field, "internal_entropy_increment");
    return detail::internal_entropy(detail::to_vec(s0.bloch), detail::to_vec(s1.bloch),
                                    detail::unit_of(s0.field));
}

/// The same one-form written through the l1-coherence, -atanh(B) sin(theta) dC,
/// discretized with scalar midpoint means.  Agrees with
/// internal_entropy_increment to second order in the step.
inline double internal_entropy_increment_coherence(const QubitThermoState& s0,
                                                   const QubitThermoState& s1) {
    detail::require_shared_direction(s0.field, s1.field, "internal_entropy_increment_coherence");
    const double b0 = s0.modulus(), b1 = s1.modulus();
    const double c0 = s0.b_perp(), c1 = s1.b_perp();
    const double sin0 = b0 > 0.0 ? c0 / b0 : 0.0;
    const double sin1 = b1 > 0.0 ? c1 / b1 : 0.0;
    return -detail::atanh_clamped(0.5 * (b0 + b1)) * 0.5 * (sin0 + sin1) * (c1 - c0);
}

/// Boundary entropy production dQ (1/T_sys - 1/T_env).  An undefined-infinite
/// system temperature contributes 1/T = 0; a pure-zero temperature with
/// nonzero heat is singular and the step must be subdivided by the caller.
inline double heat_transfer_entropy_increment(double dq, const Temperature& t_sys, double t_env) {
    if (!(std::isfinite(t_env)) || t_env == 0.0)
        throw std::invalid_argument("heat_transfer_entropy_increment: T_env must be finite and nonzero");
    if (dq == 0.0) return 0.0;
    if (t_sys.tag == TempClass::pure_zero)
        throw std::domain_error("heat_transfer_entropy_increment: singular step (pure state with "
                                "nonzero heat); subdivide the step");
    const double inv = t_sys.tag == TempClass::finite ? 1.0 / t_sys.value : 0.0;
    return dq * (inv - 1.0 / t_env);
}

/// von Neumann entropy -tr(rho ln rho) from the spectrum, with the 0 ln 0 = 0
/// convention; eigenvalues within round-off below zero contribute nothing.
template <int N>
double state_entropy(const Matrix<N>& rho) {
    const auto es = hermitian_eigensystem(rho);
    double s = 0.0;
    for (double lam : es.eigenvalues) s -= detail::xlnx(lam);
    return s;
}

/// Kullback-Leibler divergence D(rho||sigma) = tr(rho ln rho) - tr(rho ln sigma).
/// Requires support(rho) within support(sigma): weight on a null direction of
/// sigma (eigenvalue below 1e-14) is rejected, naming the offending eigenvalue.
template <int N>
double relative_entropy(const Matrix<N>& rho, const Matrix<N>& sigma) {
    const auto er = hermitian_eigensystem(rho);
    const auto es = hermitian_eigensystem(sigma);

    double d = 0.0;
    for (double lam : er.eigenvalues) d += detail::xlnx(lam);

    for (int k = 0; k < N; ++k) {
        // weight of rho along sigma's k-th eigenvector
        cplx acc = 0.0;
        for (int i = 0; i < N; ++i) {
            cplx row = 0.0;
            for (int j = 0; j < N; ++j) row += rho(i, j) * es.eigenvectors(j, k);
            acc += std::conj(es.eigenvectors(i, k)) * row;
        }
        const double w = std::max(std::real(acc), 0.0);
        if (es.eigenvalues[k] < support_eigenvalue_floor) {
            if (w > 1e-12)
                throw std::domain_error("relative_entropy: support violation on sigma eigenvalue " +
                                        std::to_string(es.eigenvalues[k]));
            continue;
        }
        d -= w * std::log(es.eigenvalues[k]);
    }
    return d;
}

/// Quantum mutual information I(A:B) = S_A + S_B - S_AB of a two-qubit state;
/// round-off negatives within 1e-12 are clamped to zero.
inline double mutual_information(const Mat4& rho) {
    detail::validate_trajectory_point<4>({0.0, rho, {}}, 0);
    const double sa = state_entropy(partial_trace(rho, Subsystem::A));
    const double sb = state_entropy(partial_trace(rho, Subsystem::B));
    const double sab = state_entropy(rho);
    double mi = sa + sb - sab;
    if (mi < 0.0 && mi > -1e-12) mi = 0.0;
    return mi;
}

/// Total entropy production between two states of a relaxation towards the
/// environment's equilibrium state: D(rho0||rho_eq) - D(rho_t||rho_eq).
inline double total_entropy_production_relative(const Mat2& rho0, const Mat2& rho_t,
                                                const EnvironmentSpec& env) {
    const Mat2 rho_eq = env.equilibrium_density();  // validates the environment
    return relative_entropy(rho0, rho_eq) - relative_entropy(rho_t, rho_eq);
}

/// Per-sample thermodynamic record.  Increments refer to the step ending at
/// this sample (zero on the first).  Boundary and total channels are NaN when
/// the environment is unspecified; the relative-entropy total additionally
/// requires a constant field along the trajectory.
struct LedgerRecord {
    double t = 0.0;
    double energy = 0.0;
    double entropy = 0.0;
    Temperature temp;
    double coherence = 0.0;

    double dq = 0.0, dw = 0.0, ds = 0.0;
    double dsgen_int = 0.0, dsgen_ht = 0.0, dsgen_tot = 0.0;

    double q_cum = 0.0, w_cum = 0.0;
    double sgen_int_cum = 0.0, sgen_ht_cum = 0.0, sgen_tot_cum = 0.0;
    double sgen_tot_relative = std::numeric_limits<double>::quiet_NaN();
};

struct LedgerSeries {
    std::vector<LedgerRecord> records;
    bool env_specified = false;
    bool relative_route_available = false;
};

/// Run the full accounting over a qubit trajectory.  With a specified
/// environment all three entropy-production channels are populated, and for
/// constant fields the relative-entropy total is reported alongside for
/// cross-validation; with an unspecified environment only entropy, heat,
/// work, and the internal channel are available.
inline LedgerSeries accumulate(const Trajectory<2>& traj, const EnvironmentSpec& env) {
    const auto& pts = traj.points;
    if (pts.size() < 2)
        throw std::invalid_argument("accumulate: trajectory needs at least 2 points");

    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    const bool env_on = env.specified();
    if (env_on && (!std::isfinite(*env.t_env) || *env.t_env == 0.0))
        throw std::invalid_argument("accumulate: environment temperature must be finite and nonzero");

    bool constant_field = true;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        detail::validate_trajectory_point(pts[i], i);
        detail::require_field(pts[i].field, "accumulate");
        if (i > 0 && !(pts[i].t > pts[i - 1].t))
            throw std::invalid_argument("accumulate: time must be strictly increasing at point " +
                                        std::to_string(i));
        if (i > 0) {
            const auto& v0 = pts[0].field;
            const auto& vi = pts[i].field;
            if (std::abs(vi.x - v0.x) + std::abs(vi.y - v0.y) + std::abs(vi.z - v0.z) > 1e-12)
                constant_field = false;
        }
    }

    LedgerSeries out;
    out.env_specified = env_on;
    out.relative_route_available = env_on && constant_field;
    out.records.reserve(pts.size());

    Mat2 rho_eq;
    double d0 = 0.0;
    if (out.relative_route_available) {
        rho_eq = gibbs_density(pts[0].field, *env.t_env);
        d0 = relative_entropy(pts[0].rho, rho_eq);
    }

    detail::CompensatedSum q_cum, w_cum, int_cum, ht_cum, tot_cum;
    BlochVector b_prev;
    double s_prev = 0.0;

    for (std::size_t i = 0; i < pts.size(); ++i) {
        const BlochVector b = detail::bloch_lenient(pts[i].rho, i);
        const QubitThermoState state(b, pts[i].field);

        LedgerRecord rec;
        rec.t = pts[i].t;
        rec.energy = internal_energy(state);
        rec.entropy = von_neumann_entropy(b.modulus());
        rec.temp = temperature(state);
        rec.coherence = coherence_l1(state);
        if (!env_on) {
            rec.dsgen_ht = nan;
            rec.dsgen_tot = nan;
        }

        if (i > 0) {
            const auto& v0 = pts[i - 1].field;
            const auto& v1 = pts[i].field;
            const FieldVector v_mid{0.5 * (v0.x + v1.x), 0.5 * (v0.y + v1.y),
                                    0.5 * (v0.z + v1.z)};
            const BlochVector b_mid(0.5 * (b_prev.x + b.x), 0.5 * (b_prev.y + b.y),
                                    0.5 * (b_prev.z + b.z));
            const detail::Vec3 p = detail::to_vec(b_prev);
            const detail::Vec3 c = detail::to_vec(b);
            const detail::Vec3 vhat = detail::unit_of(v_mid);

            rec.dq = heat_increment(b_prev, b, v_mid);
            rec.dw = work_increment(b_mid, v0, v1);
            rec.ds = rec.entropy - s_prev;
            rec.dsgen_int = detail::internal_entropy(p, c, vhat);
            if (env_on) {
                const double flux = detail::entropy_flux(p, c, vhat);
                rec.dsgen_ht = flux - rec.dq / *env.t_env;
                rec.dsgen_tot = rec.ds - rec.dq / *env.t_env;
            } else {
                rec.dsgen_ht = nan;
                rec.dsgen_tot = nan;
            }
        }

        q_cum.add(rec.dq);
        w_cum.add(rec.dw);
        int_cum.add(rec.dsgen_int);
        rec.q_cum = q_cum.value();
        rec.w_cum = w_cum.value();
        rec.sgen_int_cum = int_cum.value();
        if (env_on) {
            if (i > 0) {
                ht_cum.add(rec.dsgen_ht);
                tot_cum.add(rec.dsgen_tot);
            }
            rec.sgen_ht_cum = ht_cum.value();
            rec.sgen_tot_cum = tot_cum.value();
        } else {
            rec.sgen_ht_cum = nan;
            rec.sgen_tot_cum = nan;
        }
        if (out.relative_route_available)
            rec.sgen_tot_relative = d0 - relative_entropy(pts[i].rho, rho_eq);

        out.records.push_back(rec);
        b_prev = b;
        s_prev = rec.entropy;
    }
    return out;
}

/// Entropy balance of a closed (unitarily evolving) two-qubit system: the sum
/// of both internal productions plus the heat-transfer term at the qubits'
/// own temperatures equals the change of mutual information.  All columns are
/// cumulative; `residual` is lhs - delta_mi.
struct PairBalanceRecord {
    double t = 0.0;
    double sint_a = 0.0, sint_b = 0.0, sht = 0.0;
    double lhs = 0.0;
    double delta_mi = 0.0;
    double residual = 0.0;
};

struct PairBalanceReport {
    std::vector<PairBalanceRecord> records;
    double max_abs_residual = 0.0;
    double final_residual = 0.0;
};

inline PairBalanceReport pair_entropy_balance(const Trajectory<4>& traj,
                                              const FieldVector& field_a,
                                              const FieldVector& field_b) {
    const auto& pts = traj.points;
    if (pts.size() < 2)
        throw std::invalid_argument("pair_entropy_balance: trajectory needs at least 2 points");
    detail::require_field(field_a, "pair_entropy_balance");
    detail::require_field(field_b, "pair_entropy_balance");

    const double s_ab0 = state_entropy(pts[0].rho);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        detail::validate_trajectory_point(pts[i], i);
        if (i > 0 && !(pts[i].t > pts[i - 1].t))
            throw std::invalid_argument("pair_entropy_balance: time must be strictly increasing");
        const double drift = std::abs(state_entropy(pts[i].rho) - s_ab0);
        if (drift > 1e-8)
            throw std::invalid_argument("pair_entropy_balance: joint entropy drifts by " +
                                        std::to_string(drift) + " at point " + std::to_string(i) +
                                        "; evolution was not unitary");
    }

    const detail::Vec3 ua = detail::unit_of(field_a);
    const detail::Vec3 ub = detail::unit_of(field_b);

    const double mi0 = mutual_information(pts[0].rho);

    PairBalanceReport out;
    out.records.reserve(pts.size());
    detail::CompensatedSum sint_a, sint_b, sht;
    detail::Vec3 a_prev, b_prev;

    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Mat2 rho_a = partial_trace(pts[i].rho, Subsystem::A);
        const Mat2 rho_b = partial_trace(pts[i].rho, Subsystem::B);
        const detail::Vec3 a = detail::to_vec(detail::bloch_lenient(rho_a, i));
        const detail::Vec3 b = detail::to_vec(detail::bloch_lenient(rho_b, i));

        PairBalanceRecord rec;
        rec.t = pts[i].t;
        if (i > 0) {
            sint_a.add(detail::internal_entropy(a_prev, a, ua));
            sint_b.add(detail::internal_entropy(b_prev, b, ub));
            // dQ_A/T_A + dQ_B/T_B with each 1/T continued through its zeros
            sht.add(detail::entropy_flux(a_prev, a, ua) + detail::entropy_flux(b_prev, b, ub));
        }
        rec.sint_a = sint_a.value();
        rec.sint_b = sint_b.value();
        rec.sht = sht.value();
        rec.lhs = rec.sint_a + rec.sint_b + rec.sht;
        rec.delta_mi = mutual_information(pts[i].rho) - mi0;
        rec.residual = rec.lhs - rec.delta_mi;
        out.max_abs_residual = std::max(out.max_abs_residual, std::abs(rec.residual));
        out.records.push_back(rec);
        a_prev = a;
        b_prev = b;
    }
    out.final_residual = out.records.back().residual;
    return out;
}

}  // namespace blochtherm
