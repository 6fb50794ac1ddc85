#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <thread>
#include <vector>

#include "blochtherm/dynamics.hpp"
#include "blochtherm/ledger.hpp"
#include "test_support.hpp"

using namespace blochtherm;
using test_support::Rng;

namespace {

Mat4 singlet_projector() {
    Mat4 rho;
    rho(1, 1) = rho(2, 2) = 0.5;
    rho(1, 2) = rho(2, 1) = -0.5;
    return rho;
}

/// <sigma_z> of a qubit state.
double sz_of(const Mat2& rho) { return std::real(rho(0, 0) - rho(1, 1)); }

}  // namespace

TEST_CASE("Planck occupation") {
    CHECK(planck_occupation(std::log(2.0), 1.0) == Catch::Approx(1.0).epsilon(1e-14));
    CHECK(planck_occupation(1.0, 1.0) == Catch::Approx(0.5819767068693264).epsilon(1e-14));
    CHECK(planck_occupation(1.0, 1e-2) < 1e-40);  // vacuum limit
    CHECK_THROWS_AS(planck_occupation(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(planck_occupation(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("thermal master equation: Gibbs state is stationary, derivative is traceless") {
    const SingleQubitThermal spec{1.0, 2.0, 10.0};
    const Mat2 rho_th = gibbs_density(spec.thermo_field(), spec.t_env);
    CHECK(max_abs(rhs_single_qubit_thermal(rho_th, spec)) < 1e-12);

    Rng rng(21);
    for (int trial = 0; trial < 100; ++trial) {
        const Mat2 rho = test_support::random_density<2>(rng);
        const Mat2 d = rhs_single_qubit_thermal(rho, spec);
        CHECK(std::abs(d.trace()) < 1e-14);
        CHECK(hermiticity_violation(d) < 1e-14);
    }
}

TEST_CASE("spontaneous emission matches the analytic decay law") {
    // t_env small enough that the thermal occupation vanishes to double precision
    const SingleQubitThermal spec{1.0, 2.0, 1e-2};
    Mat2 excited;  // sigma_z = +1 eigenstate: the excited state of H = +(w0/2) sz
    excited(0, 0) = 1.0;

    IntegratorConfig cfg;
    cfg.t_end = 5.0;
    cfg.sample_interval = 0.05;
    const auto traj = integrate(spec, excited, cfg);
    for (const auto& p : traj.points) {
        const double expected = -1.0 + 2.0 * std::exp(-spec.gamma0 * p.t);
        CHECK(sz_of(p.rho) == Catch::Approx(expected).margin(1e-8));
    }
}

TEST_CASE("coherences decay at gamma0 (2N+1)/2") {
    const SingleQubitThermal spec{1.0, 2.0, 10.0};
    const double n = spec.planck();
    const Mat2 rho0 = density_from_bloch(BlochVector(0.6, 0.0, 0.2));

    IntegratorConfig cfg;
    cfg.t_end = 0.2;
    cfg.sample_interval = 0.02;
    const auto traj = integrate(spec, rho0, cfg);
    for (const auto& p : traj.points) {
        const double expected = 0.3 * std::exp(-0.5 * spec.gamma0 * (2.0 * n + 1.0) * p.t);
        CHECK(std::abs(p.rho(0, 1)) == Catch::Approx(expected).margin(1e-8));
    }
}

TEST_CASE("collective decay: ground pair is stationary, singlet is dark at g = 1") {
    const TwoAtomDissipative spec{1.0, 0.5, 2.0};
    Mat4 ground;  // both atoms in the state annihilated by sigma_-
    ground(3, 3) = 1.0;
    CHECK(max_abs(rhs_two_atom(ground, spec)) < 1e-14);

    const TwoAtomDissipative merged{1.0, 1.0, 2.0};
    CHECK(max_abs(rhs_two_atom(singlet_projector(), merged)) < 1e-14);
    // at g < 1 the singlet does decay
    CHECK(max_abs(rhs_two_atom(singlet_projector(), spec)) > 0.1);
}

TEST_CASE("uncoupled atoms factorize into independent decays") {
    const TwoAtomDissipative spec{1.0, 0.0, 2.0};
    Rng rng(22);
    const Mat2 rho_a0 = test_support::random_density<2>(rng);
    const Mat2 rho_b0 = test_support::random_density<2>(rng);

    IntegratorConfig cfg;
    cfg.t_end = 2.0;
    cfg.sample_interval = 0.1;
    const auto joint = integrate(spec, kron(rho_a0, rho_b0), cfg);

    const SingleQubitThermal lone{1.0, 2.0, 1e-2};  // thermal occupation ~ 0
    const auto solo_a = integrate(lone, rho_a0, cfg);
    const auto solo_b = integrate(lone, rho_b0, cfg);

    for (std::size_t i = 0; i < joint.points.size(); ++i) {
        CHECK(max_abs(partial_trace(joint.points[i].rho, Subsystem::A) - solo_a.points[i].rho) <
              1e-8);
        CHECK(max_abs(partial_trace(joint.points[i].rho, Subsystem::B) - solo_b.points[i].rho) <
              1e-8);
    }
}

TEST_CASE("closed pair: commuting states are stationary; spectrum and entropy conserved") {
    const ClosedPairExchange spec{0.5, 1.0, 1.0};
    const Mat4 h = spec.hamiltonian();
    const Mat4 rho_h = matrix_fn_hermitian(h, [](double x) { return std::exp(-x); });
    const Mat4 rho_comm = rho_h * (1.0 / std::real(rho_h.trace()));
    CHECK(max_abs(rhs_unitary_pair(rho_comm, spec)) < 1e-12);

    Rng rng(23);
    const Mat4 rho0 = kron(test_support::random_density<2>(rng),
                           test_support::random_density<2>(rng));
    const auto ref = hermitian_eigensystem(rho0);
    const double s0 = state_entropy(rho0);

    IntegratorConfig cfg;
    cfg.t_end = 5.0;
    cfg.sample_interval = 0.25;
    const auto traj = integrate(spec, rho0, cfg);
    for (const auto& p : traj.points) {
        const auto es = hermitian_eigensystem(p.rho);
        for (int k = 0; k < 4; ++k)
            CHECK(es.eigenvalues[k] == Catch::Approx(ref.eigenvalues[k]).margin(1e-9));
        CHECK(state_entropy(p.rho) == Catch::Approx(s0).margin(1e-9));
    }
}

TEST_CASE("integrate: a stationary thermal state stays put") {
    const SingleQubitThermal spec{1.0, 2.0, 5.0};
    const Mat2 rho_th = gibbs_density(spec.thermo_field(), spec.t_env);
    IntegratorConfig cfg;
    cfg.t_end = 10.0;
    cfg.sample_interval = 0.5;
    const auto traj = integrate(spec, rho_th, cfg);
    for (const auto& p : traj.points) CHECK(max_abs(p.rho - rho_th) < 1e-10);
}

TEST_CASE("integrate: trace, hermiticity, and positivity bounds on all samples") {
    Rng rng(24);
    IntegratorConfig cfg;
    cfg.t_end = 4.0;
    cfg.sample_interval = 0.05;

    const TwoAtomDissipative two{1.0, 0.5, 2.0};
    const auto t4 = integrate(two, kron(test_support::random_density<2>(rng),
                                        test_support::random_density<2>(rng)), cfg);
    CHECK(t4.stats.max_trace_drift < 1e-10);
    CHECK(t4.stats.max_hermiticity_drift < 1e-12);
    CHECK(t4.stats.min_eigenvalue > -1e-9);
    for (const auto& p : t4.points) {
        CHECK(std::abs(p.rho.trace() - cplx(1.0)) < 1e-12);
        CHECK(hermiticity_violation(p.rho) < 1e-12);
    }

    const SingleQubitThermal one{1.0, 2.0, 10.0};
    const auto t2 = integrate(one, test_support::random_density<2>(rng), cfg);
    CHECK(t2.stats.max_trace_drift < 1e-10);
    CHECK(t2.stats.min_eigenvalue > -1e-9);
}

TEST_CASE("integrate: error shrinks as tolerances tighten") {
    const SingleQubitThermal spec{1.0, 2.0, 1e-2};
    Mat2 excited;
    excited(0, 0) = 1.0;

    const auto max_err = [&](double rel_tol) {
        IntegratorConfig cfg;
        cfg.rel_tol = rel_tol;
        cfg.abs_tol = rel_tol * 1e-3;
        cfg.t_end = 5.0;
        cfg.sample_interval = 0.25;
        const auto traj = integrate(spec, excited, cfg);
        double worst = 0.0;
        for (const auto& p : traj.points) {
            const double expected = -1.0 + 2.0 * std::exp(-p.t);
            worst = std::max(worst, std::abs(sz_of(p.rho) - expected));
        }
        return worst;
    };

    const double e6 = max_err(1e-6);
    const double e8 = max_err(1e-8);
    const double e10 = max_err(1e-10);
    CHECK(e8 < e6);
    CHECK(e10 < e8);
    CHECK(e6 / e10 > 50.0);
}

TEST_CASE("single-qubit relaxation reaches the bath temperature by t = 20/gamma0") {
    const SingleQubitThermal spec{1.0, 2.0, 10.0};
    IntegratorConfig cfg;
    cfg.t_end = 20.0;
    cfg.sample_interval = 1.0;

    Rng rng(25);
    for (int trial = 0; trial < 5; ++trial) {
        const auto traj = integrate(spec, test_support::random_density<2>(rng), cfg);
        const auto series = accumulate(traj, EnvironmentSpec::unspecified());
        const auto t_final = series.records.back().temp;
        REQUIRE(t_final.tag == TempClass::finite);
        CHECK(t_final.value == Catch::Approx(spec.t_env).epsilon(1e-6));
    }
}

TEST_CASE("two-atom model loses energy monotonically") {
    const TwoAtomDissipative spec{1.0, 0.5, 2.0};
    const FieldVector v = spec.thermo_field();
    const Mat2 rho_a = density_from_bloch(bloch_in_field_frame(0.0, 0.0, 1.0, v));
    const Mat2 rho_b = density_from_bloch(bloch_in_field_frame(0.2, 0.2, 0.8, v));

    IntegratorConfig cfg;
    cfg.t_end = 20.0;
    cfg.sample_interval = 0.01;
    const auto traj = integrate(spec, kron(rho_a, rho_b), cfg);

    double prev = 1e300;
    for (const auto& p : traj.points) {
        const QubitThermoState sa{bloch_from_density(partial_trace(p.rho, Subsystem::A)), v};
        const QubitThermoState sb{bloch_from_density(partial_trace(p.rho, Subsystem::B)), v};
        const double e_tot = internal_energy(sa) + internal_energy(sb);
        CHECK(e_tot <= prev + 1e-12);
        prev = e_tot;
    }
    // asymptotically both atoms approach their ground states
    const auto& last = traj.points.back();
    const QubitThermoState sa{bloch_from_density(partial_trace(last.rho, Subsystem::A)), v};
    const QubitThermoState sb{bloch_from_density(partial_trace(last.rho, Subsystem::B)), v};
    CHECK(internal_energy(sa) == Catch::Approx(-v.epsilon()).margin(1e-3));
    CHECK(internal_energy(sb) == Catch::Approx(-v.epsilon()).margin(1e-3));
}

TEST_CASE("reduced view of a product trajectory returns the factor dynamics") {
    const TwoAtomDissipative spec{1.0, 0.0, 2.0};
    Rng rng(26);
    const Mat2 rho_a0 = test_support::random_density<2>(rng);
    const Mat2 rho_b0 = test_support::random_density<2>(rng);

    IntegratorConfig cfg;
    cfg.t_end = 1.0;
    cfg.sample_interval = 0.1;
    const auto joint = integrate(spec, kron(rho_a0, rho_b0), cfg);
    const auto view_a = reduced_thermo_view(joint, Subsystem::A, spec.thermo_field());
    for (std::size_t i = 0; i < joint.points.size(); ++i) {
        CHECK(max_abs(view_a.points[i].rho - partial_trace(joint.points[i].rho, Subsystem::A)) ==
              0.0);
        CHECK(view_a.points[i].field.z == spec.thermo_field().z);
    }
}

TEST_CASE("equilibrium temperature under thermal radiation") {
    // omega0/t_env = ln 4 makes the exponential term 1/2
    CHECK(jc_equilibrium_temperature(1.0, 1.0 / std::log(4.0)) ==
          Catch::Approx(1.8204784532536748).epsilon(1e-14));

    // vacuum limit: T_eq -> 0 monotonically from above (asymptotically 2 T_env)
    double prev = 0.0;
    for (double t_env = 0.05; t_env < 1.0; t_env += 0.05) {
        const double t_eq = jc_equilibrium_temperature(1.0, t_env);
        CHECK(t_eq > prev);
        prev = t_eq;
    }
    CHECK(jc_equilibrium_temperature(1.0, 0.04) == Catch::Approx(0.08).epsilon(0.01));
    CHECK(jc_equilibrium_temperature(1.0, 1e-6) == 0.0);

    // outside the low-temperature domain the formula is rejected
    CHECK_THROWS_AS(jc_equilibrium_temperature(1.0, 10.0), std::invalid_argument);
}

TEST_CASE("independent integrations are safe to run concurrently") {
    const SingleQubitThermal spec{1.0, 2.0, 10.0};
    IntegratorConfig cfg;
    cfg.t_end = 2.0;
    cfg.sample_interval = 0.1;

    Rng rng(27);
    std::vector<Mat2> starts;
    for (int i = 0; i < 4; ++i) starts.push_back(test_support::random_density<2>(rng));

    std::vector<Trajectory<2>> serial;
    for (const auto& rho0 : starts) serial.push_back(integrate(spec, rho0, cfg));

    std::vector<Trajectory<2>> parallel(4);
    {
        std::vector<std::thread> workers;
        for (int i = 0; i < 4; ++i)
            workers.emplace_back(
                [&, i] { parallel[i] = integrate(spec, starts[i], cfg); });
        for (auto& w : workers) w.join();
    }
    for (int i = 0; i < 4; ++i) {
        REQUIRE(parallel[i].points.size() == serial[i].points.size());
        for (std::size_t k = 0; k < serial[i].points.size(); ++k)
            CHECK(max_abs(parallel[i].points[k].rho - serial[i].points[k].rho) == 0.0);
    }
}

TEST_CASE("model parameter validation") {
    CHECK_THROWS_AS(integrate(SingleQubitThermal{-1.0, 2.0, 1.0}, 0.5 * Mat2::identity(), {}),
                    std::invalid_argument);
    CHECK_THROWS_AS(integrate(TwoAtomDissipative{1.0, 1.5, 2.0}, 0.25 * Mat4::identity(), {}),
                    std::invalid_argument);
    CHECK_THROWS_AS(integrate(ClosedPairExchange{0.5, -1.0, 1.0}, 0.25 * Mat4::identity(), {}),
                    std::invalid_argument);

    IntegratorConfig bad;
    bad.t_end = -1.0;
    CHECK_THROWS_AS(integrate(SingleQubitThermal{1.0, 2.0, 1.0}, 0.5 * Mat2::identity(), bad),
                    std::invalid_argument);

    Mat2 not_a_state;
    not_a_state(0, 0) = 2.0;
    CHECK_THROWS_AS(integrate(SingleQubitThermal{1.0, 2.0, 1.0}, not_a_state, {}),
                    std::invalid_argument);
}
