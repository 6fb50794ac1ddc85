#pragma once

// Dense complex linear algebra for 2x2 and 4x4 Hermitian matrices: the
// numerical substrate for qubit and two-qubit density operators.  All
// routines are pure functions on value types; nothing here allocates.

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

namespace blochtherm {

using cplx = std::complex<double>;

/// Square complex matrix of fixed dimension N (2 for a qubit, 4 for a pair),
/// row-major storage.
template <int N>
struct Matrix {
    static_assert(N == 2 || N == 4, "only qubit and two-qubit dimensions are supported");
    static constexpr int dim = N;

    std::array<cplx, N * N> m{};

    cplx& operator()(int r, int c) { return m[r * N + c]; }
    const cplx& operator()(int r, int c) const { return m[r * N + c]; }

    static Matrix identity() {
        Matrix out;
        for (int i = 0; i < N; ++i) out(i, i) = 1.0;
        return out;
    }
    static Matrix zero() { return {}; }

    Matrix& operator+=(const Matrix& o) {
        for (int i = 0; i < N * N; ++i) m[i] += o.m[i];
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        for (int i = 0; i < N * N; ++i) m[i] -= o.m[i];
        return *this;
    }
    Matrix& operator*=(cplx s) {
        for (auto& e : m) e *= s;
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(cplx s, Matrix a) { return a *= s; }
    friend Matrix operator*(Matrix a, cplx s) { return a *= s; }
    friend Matrix operator*(double s, Matrix a) { return a *= cplx(s); }
    friend Matrix operator*(Matrix a, double s) { return a *= cplx(s); }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        Matrix out;
        for (int i = 0; i < N; ++i)
            for (int k = 0; k < N; ++k) {
                const cplx aik = a(i, k);
                if (aik == cplx{}) continue;
                for (int j = 0; j < N; ++j) out(i, j) += aik * b(k, j);
            }
        return out;
    }

    Matrix adjoint() const {
        Matrix out;
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) out(i, j) = std::conj((*this)(j, i));
        return out;
    }

    cplx trace() const {
        cplx t = 0.0;
        for (int i = 0; i < N; ++i) t += (*this)(i, i);
        return t;
    }
};

using Mat2 = Matrix<2>;
using Mat4 = Matrix<4>;

template <int N>
double frobenius_norm(const Matrix<N>& a) {
    double s = 0.0;
    for (const auto& e : a.m) s += std::norm(e);
    return std::sqrt(s);
}

template <int N>
double max_abs(const Matrix<N>& a) {
    double s = 0.0;
    for (const auto& e : a.m) s = std::max(s, std::abs(e));
    return s;
}

/// max_ij |M_ij - conj(M_ji)|: zero iff M is exactly Hermitian.
template <int N>
double hermiticity_violation(const Matrix<N>& a) {
    double s = 0.0;
    for (int i = 0; i < N; ++i)
        for (int j = i; j < N; ++j)
            s = std::max(s, std::abs(a(i, j) - std::conj(a(j, i))));
    return s;
}

// Pauli matrices and the ladder operators sigma_pm = (sigma_x +- i sigma_y)/2.
inline Mat2 pauli_x() {
    Mat2 s;
    s(0, 1) = 1.0;
    s(1, 0) = 1.0;
    return s;
}
inline Mat2 pauli_y() {
    Mat2 s;
    s(0, 1) = cplx(0.0, -1.0);
    s(1, 0) = cplx(0.0, 1.0);
    return s;
}
inline Mat2 pauli_z() {
    Mat2 s;
    s(0, 0) = 1.0;
    s(1, 1) = -1.0;
    return s;
}
inline Mat2 sigma_plus() {
    Mat2 s;
    s(0, 1) = 1.0;
    return s;
}
inline Mat2 sigma_minus() {
    Mat2 s;
    s(1, 0) = 1.0;
    return s;
}

/// Tensor product with A as the left factor: row index (ia,ib) -> 2*ia+ib.
inline Mat4 kron(const Mat2& a, const Mat2& b) {
    Mat4 out;
    for (int ia = 0; ia < 2; ++ia)
        for (int ja = 0; ja < 2; ++ja)
            for (int ib = 0; ib < 2; ++ib)
                for (int jb = 0; jb < 2; ++jb)
                    out(2 * ia + ib, 2 * ja + jb) = a(ia, ja) * b(ib, jb);
    return out;
}

enum class Subsystem { A, B };

/// Reduce a two-qubit operator to the kept subsystem by tracing out the other.
inline Mat2 partial_trace(const Mat4& rho, Subsystem keep) {
    Mat2 out;
    if (keep == Subsystem::A) {
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k) out(i, j) += rho(2 * i + k, 2 * j + k);
    } else {
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k) out(i, j) += rho(2 * k + i, 2 * k + j);
    }
    return out;
}

template <int N>
struct Spectrum {
    std::array<double, N> eigenvalues;  // ascending
    Matrix<N> eigenvectors;             // orthonormal columns, column k <-> eigenvalues[k]
};

inline constexpr double hermitian_input_tolerance = 1e-12;
inline constexpr double jacobi_convergence_tolerance = 1e-13;

namespace detail {

inline void require_hermitian(double violation, const char* where) {
    if (!(violation <= hermitian_input_tolerance)) {
        throw std::invalid_argument(std::string(where) +
                                    ": matrix is not Hermitian (max |M - M^dag| = " +
                                    std::to_string(violation) + ")");
    }
}

/// Givens pair (c,s) diagonalizing the real symmetric block [[a, r],[r, d]]
/// with G = [[c, s],[-s, c]] applied as G^T B G; smaller-rotation root.
inline std::pair<double, double> sym_schur2(double a, double d, double r) {
    if (r == 0.0) return {1.0, 0.0};
    const double tau = (d - a) / (2.0 * r);
    const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                  : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    return {c, t * c};
}

template <int N>
double offdiagonal_norm(const Matrix<N>& a) {
    double s = 0.0;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

template <int N>
Spectrum<N> sort_ascending(const std::array<double, N>& vals, const Matrix<N>& vecs) {
    std::array<int, N> idx;
    for (int i = 0; i < N; ++i) idx[i] = i;
    for (int i = 1; i < N; ++i) {  // insertion sort, stable
        int j = i;
        while (j > 0 && vals[idx[j - 1]] > vals[idx[j]]) {
            std::swap(idx[j - 1], idx[j]);
            --j;
        }
    }
    Spectrum<N> out;
    for (int k = 0; k < N; ++k) {
        out.eigenvalues[k] = vals[idx[k]];
        for (int r = 0; r < N; ++r) out.eigenvectors(r, k) = vecs(r, idx[k]);
    }
    return out;
}

}  // namespace detail

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.
/// 2x2 uses the closed form via trace and determinant; 4x4 uses cyclic complex
/// Jacobi rotations, converged when the off-diagonal Frobenius norm drops
/// below 1e-13.  Rejects inputs whose hermiticity violation exceeds 1e-12.
inline Spectrum<2> hermitian_eigensystem(const Mat2& mat) {
    detail::require_hermitian(hermiticity_violation(mat), "hermitian_eigensystem");
    const double a = std::real(mat(0, 0));
    const double d = std::real(mat(1, 1));
    const cplx b = 0.5 * (mat(0, 1) + std::conj(mat(1, 0)));
    const double mean = 0.5 * (a + d);
    const double disc = std::hypot(0.5 * (a - d), std::abs(b));

    Spectrum<2> out;
    out.eigenvalues = {mean - disc, mean + disc};
    if (disc < 1e-300) {
        out.eigenvectors = Mat2::identity();
        return out;
    }
    // Eigenvector for the larger eigenvalue, from the numerically larger pivot.
    const double lam1 = mean + disc;
    cplx v0, v1;
    if (std::abs(lam1 - a) >= std::abs(lam1 - d)) {
        v0 = b;
        v1 = cplx(lam1 - a);
    } else {
        v0 = cplx(lam1 - d);
        v1 = std::conj(b);
    }
    const double nrm = std::sqrt(std::norm(v0) + std::norm(v1));
    v0 /= nrm;
    v1 /= nrm;
    out.eigenvectors(0, 1) = v0;
    out.eigenvectors(1, 1) = v1;
    // Orthonormal partner for the smaller eigenvalue.
    out.eigenvectors(0, 0) = -std::conj(v1);
    out.eigenvectors(1, 0) = std::conj(v0);
    return out;
}

inline Spectrum<4> hermitian_eigensystem(const Mat4& mat) {
    detail::require_hermitian(hermiticity_violation(mat), "hermitian_eigensystem");

    Mat4 a = mat;
    Mat4 v = Mat4::identity();
    // Symmetrize rounding dust so the sweep sees an exactly Hermitian matrix.
    for (int i = 0; i < 4; ++i) {
        a(i, i) = std::real(a(i, i));
        for (int j = i + 1; j < 4; ++j) {
            const cplx h = 0.5 * (a(i, j) + std::conj(a(j, i)));
            a(i, j) = h;
            a(j, i) = std::conj(h);
        }
    }

    constexpr int max_sweeps = 60;
    int sweep = 0;
    while (detail::offdiagonal_norm(a) >= jacobi_convergence_tolerance) {
        if (++sweep > max_sweeps)
            throw std::runtime_error("hermitian_eigensystem: Jacobi sweep limit exceeded");
        for (int p = 0; p < 4; ++p) {
            for (int q = p + 1; q < 4; ++q) {
                const cplx apq = a(p, q);
                const double r = std::abs(apq);
                if (r < 1e-300) continue;

                // Phase rotation making a(p,q) real, then a real Givens rotation.
                const cplx u = apq / r;  // e^{i phi}
                const cplx uc = std::conj(u);
                for (int k = 0; k < 4; ++k) {
                    a(k, q) *= uc;
                    a(q, k) *= u;
                    v(k, q) *= uc;
                }
                const auto [c, s] = detail::sym_schur2(std::real(a(p, p)), std::real(a(q, q)), r);
                for (int k = 0; k < 4; ++k) {  // columns (right-multiply by G)
                    const cplx akp = a(k, p);
                    const cplx akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                    const cplx vkp = v(k, p);
                    const cplx vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
                for (int k = 0; k < 4; ++k) {  // rows (left-multiply by G^T)
                    const cplx apk = a(p, k);
                    const cplx aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = std::real(a(p, p));
                a(q, q) = std::real(a(q, q));
            }
        }
    }

    std::array<double, 4> vals;
    for (int i = 0; i < 4; ++i) vals[i] = std::real(a(i, i));
    return detail::sort_ascending<4>(vals, v);
}

/// Apply a real scalar function to a Hermitian matrix through its spectral
/// decomposition: f(M) = V f(Lambda) V^dag.  Rejects eigenvalues on which f
/// is undefined (non-finite result), naming the offending eigenvalue.
template <int N, class F>
Matrix<N> matrix_fn_hermitian(const Matrix<N>& mat, F&& f) {
    const Spectrum<N> es = hermitian_eigensystem(mat);
    std::array<double, N> fv;
    for (int k = 0; k < N; ++k) {
        fv[k] = f(es.eigenvalues[k]);
        if (!std::isfinite(fv[k]))
            throw std::domain_error("matrix_fn_hermitian: function undefined on eigenvalue " +
                                    std::to_string(es.eigenvalues[k]));
    }
    Matrix<N> out;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            cplx acc = 0.0;
            for (int k = 0; k < N; ++k)
                acc += fv[k] * es.eigenvectors(i, k) * std::conj(es.eigenvectors(j, k));
            out(i, j) = acc;
        }
    return out;
}

}  // namespace blochtherm
