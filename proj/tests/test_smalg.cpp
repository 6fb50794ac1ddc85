#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "blochtherm/smalg.hpp"
#include "test_support.hpp"

using namespace blochtherm;
using test_support::Rng;

namespace {

template <int N>
Matrix<N> reconstruct(const Spectrum<N>& es) {
    Matrix<N> out;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            cplx acc = 0.0;
            for (int k = 0; k < N; ++k)
                acc += es.eigenvalues[k] * es.eigenvectors(i, k) * std::conj(es.eigenvectors(j, k));
            out(i, j) = acc;
        }
    return out;
}

template <int N>
double orthonormality_defect(const Matrix<N>& v) {
    const Matrix<N> g = v.adjoint() * v;
    return max_abs(g - Matrix<N>::identity());
}

}  // namespace

TEST_CASE("eigensystem of the identity and of sigma_z") {
    const auto id = hermitian_eigensystem(Mat2::identity());
    CHECK(id.eigenvalues[0] == Catch::Approx(1.0).margin(1e-15));
    CHECK(id.eigenvalues[1] == Catch::Approx(1.0).margin(1e-15));

    const auto sz = hermitian_eigensystem(pauli_z());
    CHECK(sz.eigenvalues[0] == Catch::Approx(-1.0).margin(1e-15));
    CHECK(sz.eigenvalues[1] == Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("2x2 eigensystem reconstructs random Hermitian input") {
    Rng rng(101);
    for (int trial = 0; trial < 500; ++trial) {
        const Mat2 h = test_support::random_hermitian<2>(rng);
        const auto es = hermitian_eigensystem(h);
        CHECK(es.eigenvalues[0] <= es.eigenvalues[1]);
        CHECK(max_abs(reconstruct(es) - h) < 1e-10);
        CHECK(orthonormality_defect(es.eigenvectors) < 1e-10);
    }
}

TEST_CASE("4x4 eigenvalues match the characteristic-polynomial bisection oracle") {
    Rng rng(202);
    for (int trial = 0; trial < 100; ++trial) {
        const Mat4 h = test_support::random_hermitian<4>(rng);
        const auto es = hermitian_eigensystem(h);
        const auto roots = test_support::eigenvalues_by_bisection(h);
        REQUIRE(roots.size() == 4);
        for (int k = 0; k < 4; ++k)
            CHECK(es.eigenvalues[k] == Catch::Approx(roots[k]).margin(1e-9));
        CHECK(max_abs(reconstruct(es) - h) < 1e-10);
        CHECK(orthonormality_defect(es.eigenvectors) < 1e-10);
    }
}

TEST_CASE("eigenvalues are invariant under unitary conjugation") {
    Rng rng(303);
    for (int trial = 0; trial < 50; ++trial) {
        const Mat4 h = test_support::random_hermitian<4>(rng);
        const Mat4 u = test_support::random_unitary<4>(rng);
        const auto a = hermitian_eigensystem(h);
        const auto b = hermitian_eigensystem(u * h * u.adjoint());
        for (int k = 0; k < 4; ++k)
            CHECK(a.eigenvalues[k] == Catch::Approx(b.eigenvalues[k]).margin(1e-10));
    }
    for (int trial = 0; trial < 50; ++trial) {
        const Mat2 h = test_support::random_hermitian<2>(rng);
        const Mat2 u = test_support::random_unitary<2>(rng);
        const auto a = hermitian_eigensystem(h);
        const auto b = hermitian_eigensystem(u * h * u.adjoint());
        for (int k = 0; k < 2; ++k)
            CHECK(a.eigenvalues[k] == Catch::Approx(b.eigenvalues[k]).margin(1e-10));
    }
}

TEST_CASE("eigenvalues of a unit-trace positive matrix sum to one") {
    Rng rng(404);
    for (int trial = 0; trial < 200; ++trial) {
        const Mat4 rho = test_support::random_density<4>(rng);
        const auto es = hermitian_eigensystem(rho);
        double sum = 0.0;
        for (double l : es.eigenvalues) sum += l;
        CHECK(sum == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("non-Hermitian input is rejected with the violation magnitude") {
    Mat2 bad = pauli_z();
    bad(0, 1) = cplx(0.5, 0.0);  // no conjugate partner
    REQUIRE_THROWS_AS(hermitian_eigensystem(bad), std::invalid_argument);
    try {
        hermitian_eigensystem(bad);
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("0.5") != std::string::npos);
    }
}

TEST_CASE("deterministic output for identical input") {
    Rng rng(505);
    const Mat4 h = test_support::random_hermitian<4>(rng);
    const auto a = hermitian_eigensystem(h);
    const auto b = hermitian_eigensystem(h);
    CHECK(a.eigenvalues == b.eigenvalues);
    CHECK(a.eigenvectors.m == b.eigenvectors.m);
}

TEST_CASE("partial trace of a product state returns the kept factor") {
    Rng rng(606);
    const Mat2 rho_a = test_support::random_density<2>(rng);
    const Mat2 rho_b = test_support::random_density<2>(rng);
    const Mat4 prod = kron(rho_a, rho_b);
    CHECK(max_abs(partial_trace(prod, Subsystem::A) - rho_a) < 1e-14);
    CHECK(max_abs(partial_trace(prod, Subsystem::B) - rho_b) < 1e-14);
}

TEST_CASE("partial trace of a Bell state is maximally mixed") {
    Mat4 bell;  // |Phi+> = (|00> + |11>)/sqrt(2)
    bell(0, 0) = bell(0, 3) = bell(3, 0) = bell(3, 3) = 0.5;
    const Mat2 half = 0.5 * Mat2::identity();
    CHECK(max_abs(partial_trace(bell, Subsystem::A) - half) < 1e-15);
    CHECK(max_abs(partial_trace(bell, Subsystem::B) - half) < 1e-15);
}

TEST_CASE("partial trace agrees with the explicit index-sum oracle and is linear") {
    Rng rng(707);
    for (int trial = 0; trial < 200; ++trial) {
        const Mat4 rho = test_support::random_density<4>(rng);
        CHECK(max_abs(partial_trace(rho, Subsystem::A) -
                      test_support::partial_trace_index_sum(rho, true)) < 1e-14);
        CHECK(max_abs(partial_trace(rho, Subsystem::B) -
                      test_support::partial_trace_index_sum(rho, false)) < 1e-14);
        CHECK(std::real(partial_trace(rho, Subsystem::A).trace()) == Catch::Approx(1.0).margin(1e-13));
        CHECK(std::real(partial_trace(rho, Subsystem::B).trace()) == Catch::Approx(1.0).margin(1e-13));
        CHECK(hermiticity_violation(partial_trace(rho, Subsystem::A)) < 1e-14);
    }
    // linearity
    const Mat4 x = test_support::random_hermitian<4>(rng);
    const Mat4 y = test_support::random_hermitian<4>(rng);
    const Mat2 lhs = partial_trace(x + 2.0 * y, Subsystem::A);
    const Mat2 rhs = partial_trace(x, Subsystem::A) + 2.0 * partial_trace(y, Subsystem::A);
    CHECK(max_abs(lhs - rhs) < 1e-13);
}

TEST_CASE("kron basics and the mixed-product identity") {
    CHECK(max_abs(kron(Mat2::identity(), Mat2::identity()) - Mat4::identity()) == 0.0);

    const Mat4 zi = kron(pauli_z(), Mat2::identity());
    CHECK(std::real(zi(0, 0)) == 1.0);
    CHECK(std::real(zi(1, 1)) == 1.0);
    CHECK(std::real(zi(2, 2)) == -1.0);
    CHECK(std::real(zi(3, 3)) == -1.0);

    Rng rng(808);
    for (int trial = 0; trial < 100; ++trial) {
        const Mat2 a = test_support::random_hermitian<2>(rng);
        const Mat2 b = test_support::random_hermitian<2>(rng);
        const Mat2 c = test_support::random_hermitian<2>(rng);
        const Mat2 d = test_support::random_hermitian<2>(rng);
        CHECK(max_abs(kron(a, b) * kron(c, d) - kron(a * c, b * d)) < 1e-12);
    }
}

TEST_CASE("matrix functions through the spectral decomposition") {
    Mat2 diag;
    diag(0, 0) = 0.0;
    diag(1, 1) = std::log(2.0);
    const Mat2 exped = matrix_fn_hermitian(diag, [](double x) { return std::exp(x); });
    CHECK(std::real(exped(0, 0)) == Catch::Approx(1.0).margin(1e-15));
    CHECK(std::real(exped(1, 1)) == Catch::Approx(2.0).margin(1e-15));
    CHECK(std::abs(exped(0, 1)) < 1e-15);

    const Mat2 logged =
        matrix_fn_hermitian(0.5 * Mat2::identity(), [](double x) { return std::log(x); });
    CHECK(max_abs(logged - (-std::log(2.0)) * Mat2::identity()) < 1e-14);

    Rng rng(909);
    for (int trial = 0; trial < 100; ++trial) {
        const Mat4 h = test_support::random_hermitian<4>(rng);
        const Mat4 sq = matrix_fn_hermitian(h, [](double x) { return x * x; });
        CHECK(max_abs(sq - h * h) < 1e-9);
    }
}

TEST_CASE("matrix function rejects eigenvalues outside the domain of f") {
    Mat2 indefinite;
    indefinite(0, 0) = 1.0;
    indefinite(1, 1) = -0.25;
    REQUIRE_THROWS_AS(matrix_fn_hermitian(indefinite, [](double x) { return std::log(x); }),
                      std::domain_error);
    try {
        matrix_fn_hermitian(indefinite, [](double x) { return std::log(x); });
    } catch (const std::domain_error& e) {
        CHECK(std::string(e.what()).find("-0.25") != std::string::npos);
    }
}
