#pragma once

// Closed-form thermodynamics of a qubit parameterized by its Bloch vector B
// and the effective field v of the local Hamiltonian H = -v.sigma (so the
// eigenenergies are -+|v|).  Units: k_B = hbar = 1 throughout; temperatures
// are energies, entropies are dimensionless.
//
// Every quantity below depends on the state only through the Bloch modulus B
// and the longitudinal projection Bpar = B.vhat:
//   entropy      S(B)   = -sum_{+-} (1+-B)/2 ln((1+-B)/2)
//   energy       E      = -B.v = -eps*Bpar            (eps = |v|)
//   temperature  T      = eps*B / (Bpar*atanh(B)),  from 1/T = dS/dE at
//                         fixed transverse component; signed, undefined on
//                         the Bpar = 0 plane
//   coherence    C_l1   = Bperp (distance from the Bloch point to the v axis)

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "blochtherm/smalg.hpp"

namespace blochtherm {

inline constexpr double bloch_clamp_tolerance = 1e-9;   // overshoot rescaled to 1
inline constexpr double pure_state_edge = 1.0 - 1e-12;  // beyond this, treat as pure

/// Dimensionless Bloch vector; construction enforces |B| <= 1, rescaling
/// overshoot up to 1e-9 and rejecting anything larger.
struct BlochVector {
    double x = 0.0, y = 0.0, z = 0.0;

    BlochVector() = default;
    BlochVector(double bx, double by, double bz) : x(bx), y(by), z(bz) {
        const double b = modulus();
        if (b > 1.0 + bloch_clamp_tolerance)
            throw std::invalid_argument("BlochVector: modulus " + std::to_string(b) +
                                        " exceeds 1 beyond tolerance");
        if (b > 1.0) {
            x /= b;
            y /= b;
            z /= b;
        }
    }

    double modulus() const { return std::sqrt(x * x + y * y + z * z); }
};

inline BlochVector operator-(const BlochVector& a, const BlochVector& b) {
    BlochVector d;
    d.x = a.x - b.x;
    d.y = a.y - b.y;
    d.z = a.z - b.z;
    return d;
}

/// Effective field of the qubit Hamiltonian H = -v.sigma, in energy units.
struct FieldVector {
    double x = 0.0, y = 0.0, z = 0.0;

    double epsilon() const { return std::sqrt(x * x + y * y + z * z); }
};

namespace detail {

inline void require_field(const FieldVector& v, const char* where) {
    if (!(v.epsilon() > 0.0))
        throw std::invalid_argument(std::string(where) +
                                    ": field vector must be nonzero for thermodynamic evaluation");
}

inline double dot(const BlochVector& b, const FieldVector& v) {
    return b.x * v.x + b.y * v.y + b.z * v.z;
}

/// x*ln(x) with the 0*ln(0) = 0 convention.
inline double xlnx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

/// atanh clamped just inside the branch point, so products with vanishing
/// transverse factors stay finite instead of producing inf*0 = NaN.
inline double atanh_clamped(double b) {
    return std::atanh(std::min(b, 1.0 - 1e-15));
}

/// atanh(b)/b, series-expanded near zero.
inline double atanh_over(double b) {
    if (b < 1e-4) {
        const double b2 = b * b;
        return 1.0 + b2 / 3.0 + b2 * b2 / 5.0;
    }
    return atanh_clamped(b) / b;
}

}  // namespace detail

/// Qubit state plus its declared field: the pair on which all local
/// thermodynamic quantities are defined.
struct QubitThermoState {
    BlochVector bloch;
    FieldVector field;

    QubitThermoState(const BlochVector& b, const FieldVector& v) : bloch(b), field(v) {
        detail::require_field(v, "QubitThermoState");
    }

    double modulus() const { return bloch.modulus(); }
    /// Projection of B on the field direction.
    double b_par() const { return detail::dot(bloch, field) / field.epsilon(); }
    /// Transverse component sqrt(B^2 - Bpar^2) >= 0.
    double b_perp() const {
        const double b2 = bloch.modulus() * bloch.modulus();
        const double p = b_par();
        return std::sqrt(std::max(b2 - p * p, 0.0));
    }
};

/// rho = (1 + B.sigma)/2; Hermitian, unit trace, eigenvalues (1 +- B)/2.
inline Mat2 density_from_bloch(const BlochVector& b) {
    Mat2 rho;
    rho(0, 0) = 0.5 * (1.0 + b.z);
    rho(1, 1) = 0.5 * (1.0 - b.z);
    rho(0, 1) = 0.5 * cplx(b.x, -b.y);
    rho(1, 0) = 0.5 * cplx(b.x, b.y);
    return rho;
}

/// Pauli expectation values b_k = tr(rho sigma_k) of a valid qubit density
/// matrix.  Rejects non-Hermitian, non-unit-trace, or negative (beyond 1e-10)
/// input, and moduli exceeding 1 + 1e-9.
inline BlochVector bloch_from_density(const Mat2& rho) {
    detail::require_hermitian(hermiticity_violation(rho), "bloch_from_density");
    const double tr = std::real(rho.trace());
    if (std::abs(tr - 1.0) > 1e-10)
        throw std::invalid_argument("bloch_from_density: trace deviates from 1 by " +
                                    std::to_string(tr - 1.0));
    const auto es = hermitian_eigensystem(rho);
    if (es.eigenvalues[0] < -1e-10)
        throw std::invalid_argument("bloch_from_density: negative eigenvalue " +
                                    std::to_string(es.eigenvalues[0]));
    const double bx = std::real(rho(0, 1) + rho(1, 0));
    const double by = std::real(cplx(0.0, 1.0) * (rho(0, 1) - rho(1, 0)));
    const double bz = std::real(rho(0, 0) - rho(1, 1));
    return BlochVector(bx, by, bz);  // ctor enforces the modulus bound
}

/// Dimensionless von Neumann entropy as a function of the Bloch modulus.
/// S(0) = ln 2, S(1) = 0; strictly decreasing with dS/dB = -atanh(B).
inline double von_neumann_entropy(double b) {
    if (b < 0.0 || b > 1.0 + bloch_clamp_tolerance)
        throw std::invalid_argument("von_neumann_entropy: modulus " + std::to_string(b) +
                                    " outside [0, 1]");
    b = std::min(b, 1.0);
    return -detail::xlnx(0.5 * (1.0 + b)) - detail::xlnx(0.5 * (1.0 - b));
}

/// E = -B.v = -eps*Bpar.
inline double internal_energy(const QubitThermoState& s) {
    return -detail::dot(s.bloch, s.field);
}

enum class TempClass {
    finite,              // ordinary signed temperature
    pure_zero,           // B = 1: T = +-0 with the sign of Bpar
    undefined_infinite,  // Bpar = 0 (or B = 0): |T| diverges
};

inline const char* to_string(TempClass c) {
    switch (c) {
        case TempClass::finite: return "finite";
        case TempClass::pure_zero: return "pure-zero";
        default: return "undefined-infinite";
    }
}

/// Signed temperature with its edge classification.  `value` is k_B T in
/// energy units: the finite expression, a signed zero for pure states, and
/// +infinity for the undefined (Bpar = 0) classification.
struct Temperature {
    double value = 0.0;
    TempClass tag = TempClass::finite;

    bool finite() const { return tag == TempClass::finite; }
    /// 1/T with the standard continuation: zero where T is undefined-infinite,
    /// +-infinity at pure states.
    double inverse() const {
        switch (tag) {
            case TempClass::finite: return 1.0 / value;
            case TempClass::pure_zero:
                return std::copysign(std::numeric_limits<double>::infinity(),
                                     std::signbit(value) ? -1.0 : 1.0);
            default: return 0.0;
        }
    }
};

/// T = eps*B / (Bpar * atanh(B)); sign follows Bpar.  All edge states return
/// a classification rather than failing: pure states map to a signed zero,
/// and the Bpar = 0 plane (including B = 0) to undefined-infinite.
inline Temperature temperature(const QubitThermoState& s) {
    const double b = std::min(s.modulus(), 1.0);
    const double bpar = s.b_par();
    const double eps = s.field.epsilon();

    if (b >= pure_state_edge) {
        if (bpar == 0.0)
            return {std::numeric_limits<double>::infinity(), TempClass::undefined_infinite};
        return {std::copysign(0.0, bpar), TempClass::pure_zero};
    }
    if (bpar == 0.0 || b == 0.0)
        return {std::numeric_limits<double>::infinity(), TempClass::undefined_infinite};

    const double t = eps * b / (bpar * std::atanh(b));
    if (!std::isfinite(t))
        return {std::numeric_limits<double>::infinity(), TempClass::undefined_infinite};
    return {t, TempClass::finite};
}

/// Modulus of the thermal-state Bloch vector at environment temperature T_E:
/// B_eq = tanh(eps/T_E).  Negative T_E gives the negative-temperature branch
/// (vector along -vhat).  T_E = 0 is rejected; use the pure state directly.
inline double equilibrium_bloch_modulus(double t_env, double eps) {
    if (t_env == 0.0)
        throw std::invalid_argument("equilibrium_bloch_modulus: T = 0 (use the pure state)");
    if (!(eps > 0.0))
        throw std::invalid_argument("equilibrium_bloch_modulus: eps must be positive");
    return std::tanh(eps / t_env);
}

/// Temperature from the natural populations of a diagonal (thermal) state:
/// T = 2*eps / ln(P_g/P_e).  Equal populations classify as undefined-infinite.
inline Temperature population_temperature(double p_ground, double p_excited, double eps) {
    if (!(eps > 0.0))
        throw std::invalid_argument("population_temperature: eps must be positive");
    if (!(p_ground > 0.0 && p_ground < 1.0 && p_excited > 0.0 && p_excited < 1.0))
        throw std::invalid_argument("population_temperature: populations must lie in (0,1)");
    if (std::abs(p_ground + p_excited - 1.0) > 1e-9)
        throw std::invalid_argument("population_temperature: populations must sum to 1");
    if (p_ground == p_excited)
        return {std::numeric_limits<double>::infinity(), TempClass::undefined_infinite};
    return {2.0 * eps / std::log(p_ground / p_excited), TempClass::finite};
}

/// Heat capacity at fixed field,
///   C = B (1-B^2) atanh(B)^2 Bpar^2 / [atanh(B)(B^2-Bpar^2)(1-B^2) + B Bpar^2],
/// nonnegative everywhere; zero for pure states and on the Bpar = 0 plane.
inline double heat_capacity(const QubitThermoState& s) {
    const double b = std::min(s.modulus(), 1.0);
    const double bpar = std::abs(s.b_par());
    if (b >= pure_state_edge || b < 1e-12 || bpar == 0.0) return 0.0;

    const double at = std::atanh(b);
    const double b2 = b * b;
    const double p2 = bpar * bpar;
    const double num = b * (1.0 - b2) * at * at * p2;
    const double den = at * (std::max(b2 - p2, 0.0)) * (1.0 - b2) + b * p2;
    return num / den;
}

/// Equilibrium (thermal-state) heat capacity [x/cosh(x)]^2 with x = eps/T;
/// even in T, with the T = 0 limit returning 0.
inline double heat_capacity_equilibrium(double t, double eps) {
    if (!(eps > 0.0))
        throw std::invalid_argument("heat_capacity_equilibrium: eps must be positive");
    if (t == 0.0) return 0.0;
    const double x = std::abs(eps / t);
    // x/cosh(x) = 2x e^{-x} / (1 + e^{-2x}) avoids cosh overflow for large x.
    const double y = 2.0 * x * std::exp(-x) / (1.0 + std::exp(-2.0 * x));
    return y * y;
}

/// l1-coherence in the field eigenbasis: the transverse Bloch component,
/// i.e. the Euclidean distance from the Bloch point to the v axis.
inline double coherence_l1(const QubitThermoState& s) { return s.b_perp(); }

struct HeatCapacityMax {
    double b = 0.0;      // modulus at the maximizer
    double b_par = 0.0;  // longitudinal component at the maximizer
    double c_max = 0.0;
};

/// Global maximum of the heat capacity over the physical domain |Bpar| <= B
/// <= 1.  A coarse grid scan (step 1e-3) locates the ridge; golden-section
/// refinement along B = Bpar then pins the maximizer to 1e-8.  The mirrored
/// maximum at Bpar = -B follows from the symmetry C(B, Bpar) = C(B, -Bpar).
inline HeatCapacityMax find_heat_capacity_max() {
    const FieldVector zhat{0.0, 0.0, 1.0};
    const auto c_of = [&](double b, double bpar) {
        const double perp2 = b * b - bpar * bpar;
        const double perp = std::sqrt(std::max(perp2, 0.0));
        return heat_capacity({BlochVector(perp, 0.0, bpar), zhat});
    };

    double best_b = 0.0, best_p = 0.0, best_c = 0.0;
    constexpr double step = 1e-3;
    for (int i = 0; i <= 1000; ++i) {
        const double b = i * step;
        for (int j = -i; j <= i; ++j) {
            const double c = c_of(b, j * step);
            if (c > best_c) {
                best_c = c;
                best_b = b;
                best_p = j * step;
            }
        }
    }

    // Refine along the B = Bpar ridge, where the grid maximum lies.
    const double sign = best_p < 0.0 ? -1.0 : 1.0;
    double lo = std::max(best_b - 2.0 * step, 0.0);
    double hi = std::min(best_b + 2.0 * step, 1.0);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo);
    double x2 = lo + gr * (hi - lo);
    double f1 = c_of(x1, sign * x1);
    double f2 = c_of(x2, sign * x2);
    while (hi - lo > 1e-8) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = c_of(x2, sign * x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = c_of(x1, sign * x1);
        }
    }
    const double b_star = 0.5 * (lo + hi);
    return {b_star, sign * b_star, c_of(b_star, sign * b_star)};
}

/// Thermal state at temperature t_env in field v: Bloch vector
/// tanh(eps/t_env) along vhat.
inline QubitThermoState thermal_state(const FieldVector& v, double t_env) {
    detail::require_field(v, "thermal_state");
    const double eps = v.epsilon();
    const double beq = equilibrium_bloch_modulus(t_env, eps);
    return {BlochVector(beq * v.x / eps, beq * v.y / eps, beq * v.z / eps), v};
}

/// Gibbs density matrix of H = -v.sigma at temperature t_env.
inline Mat2 gibbs_density(const FieldVector& v, double t_env) {
    return density_from_bloch(thermal_state(v, t_env).bloch);
}

/// Build a Bloch vector from components given in a frame aligned with the
/// field: (b1, b2) transverse, bpar along vhat.  The transverse axes are an
/// arbitrary fixed orthonormal completion; every thermodynamic quantity
/// depends only on (B, Bpar), so the choice is immaterial.
inline BlochVector bloch_in_field_frame(double b1, double b2, double bpar, const FieldVector& v) {
    detail::require_field(v, "bloch_in_field_frame");
    const double eps = v.epsilon();
    const double vx = v.x / eps, vy = v.y / eps, vz = v.z / eps;
    // First transverse axis: the coordinate axis least aligned with vhat,
    // projected orthogonal and normalized.
    double e1x, e1y, e1z;
    if (std::abs(vx) <= std::abs(vy) && std::abs(vx) <= std::abs(vz)) {
        e1x = 1.0 - vx * vx; e1y = -vx * vy; e1z = -vx * vz;
    } else if (std::abs(vy) <= std::abs(vz)) {
        e1x = -vy * vx; e1y = 1.0 - vy * vy; e1z = -vy * vz;
    } else {
        e1x = -vz * vx; e1y = -vz * vy; e1z = 1.0 - vz * vz;
    }
    const double n1 = std::sqrt(e1x * e1x + e1y * e1y + e1z * e1z);
    e1x /= n1; e1y /= n1; e1z /= n1;
    // e2 = vhat x e1 completes the right-handed triad (e1, e2, vhat).
    const double e2x = vy * e1z - vz * e1y;
    const double e2y = vz * e1x - vx * e1z;
    const double e2z = vx * e1y - vy * e1x;
    return BlochVector(b1 * e1x + b2 * e2x + bpar * vx,
                       b1 * e1y + b2 * e2y + bpar * vy,
                       b1 * e1z + b2 * e2z + bpar * vz);
}

}  // namespace blochtherm
