#pragma once

// Shared generators and independent oracles for the test suites.  Everything
// here is deliberately written from scratch against the definitions, not by
// calling the library routines it is meant to check.

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "blochtherm/bloch.hpp"
#include "blochtherm/smalg.hpp"

namespace test_support {

using blochtherm::cplx;
using blochtherm::Mat2;
using blochtherm::Mat4;
using blochtherm::Matrix;

using Rng = std::mt19937_64;

template <int N>
Matrix<N> random_hermitian(Rng& rng, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    Matrix<N> h;
    for (int i = 0; i < N; ++i) {
        h(i, i) = g(rng);
        for (int j = i + 1; j < N; ++j) {
            const cplx e(g(rng), g(rng));
            h(i, j) = e;
            h(j, i) = std::conj(e);
        }
    }
    return h;
}

/// Full-rank random density matrix via the Ginibre construction G G^dag / tr.
template <int N>
Matrix<N> random_density(Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix<N> a;
    for (int i = 0; i < N * N; ++i) a.m[i] = cplx(g(rng), g(rng));
    Matrix<N> rho = a * a.adjoint();
    // regularize so support conditions hold for divergence tests
    for (int i = 0; i < N; ++i) rho(i, i) += 1e-3;
    return rho * (1.0 / std::real(rho.trace()));
}

template <int N>
Matrix<N> random_unitary(Rng& rng) {
    return blochtherm::hermitian_eigensystem(random_hermitian<N>(rng)).eigenvectors;
}

inline blochtherm::BlochVector random_bloch(Rng& rng, double max_modulus = 0.999) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> ur(0.0, max_modulus);
    double x, y, z, n;
    do {
        x = u(rng);
        y = u(rng);
        z = u(rng);
        n = std::sqrt(x * x + y * y + z * z);
    } while (n > 1.0 || n < 1e-6);
    const double r = ur(rng);
    return blochtherm::BlochVector(r * x / n, r * y / n, r * z / n);
}

/// Characteristic polynomial of a Hermitian matrix from Newton's identities;
/// coefficients of lambda^4 - e1 l^3 + e2 l^2 - e3 l + e4 for N = 4.
inline std::array<double, 4> char_poly_elementary(const Mat4& m) {
    const Mat4 m2 = m * m;
    const Mat4 m3 = m2 * m;
    const Mat4 m4 = m3 * m;
    const double p1 = std::real(m.trace());
    const double p2 = std::real(m2.trace());
    const double p3 = std::real(m3.trace());
    const double p4 = std::real(m4.trace());
    const double e1 = p1;
    const double e2 = (e1 * p1 - p2) / 2.0;
    const double e3 = (e2 * p1 - e1 * p2 + p3) / 3.0;
    const double e4 = (e3 * p1 - e2 * p2 + e1 * p3 - p4) / 4.0;
    return {e1, e2, e3, e4};
}

/// Eigenvalues of a 4x4 Hermitian matrix as the roots of its characteristic
/// polynomial, located by scanning for sign changes and bisecting.  Assumes
/// simple roots (random inputs).
inline std::vector<double> eigenvalues_by_bisection(const Mat4& m) {
    const auto [e1, e2, e3, e4] = char_poly_elementary(m);
    const auto p = [&](double x) {
        return (((x - e1) * x + e2) * x - e3) * x + e4;
    };
    double radius = 0.0;
    for (int i = 0; i < 4; ++i) {
        double row = 0.0;
        for (int j = 0; j < 4; ++j) row += std::abs(m(i, j));
        radius = std::max(radius, row);
    }
    radius += 1.0;

    std::vector<double> roots;
    const int cells = 20000;
    double prev_x = -radius, prev_f = p(prev_x);
    for (int i = 1; i <= cells; ++i) {
        const double x = -radius + 2.0 * radius * i / cells;
        const double f = p(x);
        if ((prev_f <= 0.0 && f > 0.0) || (prev_f >= 0.0 && f < 0.0)) {
            double lo = prev_x, hi = x, flo = prev_f;
            for (int it = 0; it < 100; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = p(mid);
                if ((flo <= 0.0) == (fm <= 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        prev_x = x;
        prev_f = f;
    }
    return roots;
}

/// Partial trace written directly as the index sum over the traced subsystem,
/// with explicit composite indices (row = 2*a + b).
inline Mat2 partial_trace_index_sum(const Mat4& rho, bool keep_first) {
    Mat2 out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            cplx acc = 0.0;
            for (int k = 0; k < 2; ++k)
                acc += keep_first ? rho(2 * i + k, 2 * j + k) : rho(2 * k + i, 2 * k + j);
            out(i, j) = acc;
        }
    return out;
}

inline double entropy_of_eigenvalues(const std::array<double, 2>& lam) {
    double s = 0.0;
    for (double l : lam)
        if (l > 0.0) s -= l * std::log(l);
    return s;
}

}  // namespace test_support
