#include "rydlat/errors.hpp"
#include "rydlat/exactdyn.hpp"
#include "rydlat/perturbation.hpp"

#include <doctest.h>

#include <cmath>

using namespace rydlat;

namespace {

Lattice square(int side) { return build_lattice({LatticeKind::Square, side}); }

ModelParams params(double omega, double delta = 0.0) {
    ModelParams p;
    p.omega = omega;
    p.delta = delta;
    return p;
}

}  // namespace

TEST_SUITE("exactdyn") {

TEST_CASE("single spin") {
    const ExactSpectrum s = exact_spectrum(square(1), params(20.0), 2);
    CHECK(s.energies(0) == doctest::Approx(-20.0));
    CHECK(s.energies(1) == doctest::Approx(20.0));
    const Eigen::VectorXd minus = prepare_minus(1);
    CHECK(minus(0) == doctest::Approx(std::sqrt(0.5)));
    CHECK(minus(1) == doctest::Approx(-std::sqrt(0.5)));
    CHECK(std::abs(std::abs(s.states.col(0).dot(minus)) - 1.0) < 1e-12);
}

TEST_CASE("hamiltonian is symmetric and counts ordered pairs") {
    const SpinHamiltonian h = spin_hamiltonian(square(2), params(3.0, 0.5));
    const Eigen::MatrixXd m = h.dense();
    CHECK((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0);
    // Sites 0 and 1 excited: 2 V_01 + 2 delta.
    CHECK(m(3, 3) == doctest::Approx(2.0 * 1.0 + 2.0 * 0.5));
    // All four excited: sum over ordered pairs.
    CHECK(m(15, 15) == doctest::Approx(2.0 * (4.0 + 2.0 / 8.0) + 4.0 * 0.5));
    Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(16, -1.0, 2.0);
    Eigen::VectorXd y;
    h.apply(x, y);
    CHECK((y - m * x).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("block Lanczos agrees with the dense solver") {
    for (int side : {2, 3}) {
        const SpinHamiltonian h = spin_hamiltonian(square(side), params(5.0));
        const std::size_t n = h.sites + 2;
        const ExactSpectrum d = exact_spectrum(h, n, SpectrumMethod::Dense);
        const ExactSpectrum l = exact_spectrum(h, n, SpectrumMethod::Lanczos);
        CHECK((d.energies - l.energies).cwiseAbs().maxCoeff() < 1e-8);
        for (Eigen::Index c = 0; c < l.states.cols(); ++c) {
            Eigen::VectorXd hx;
            const Eigen::VectorXd x = l.states.col(c);
            h.apply(x, hx);
            CHECK((hx - l.energies(c) * x).norm() < 1e-7);
        }
    }
}

TEST_CASE("prepared state is normalised and close to the ground state") {
    for (std::size_t n : {1u, 4u, 9u}) CHECK(prepare_minus(n).norm() == doctest::Approx(1.0));
    const ExactSpectrum s = exact_spectrum(square(2), params(20.0));
    CHECK(std::pow(s.states.col(0).dot(prepare_minus(4)), 2) > 0.99);
}

TEST_CASE("one-excitation gaps follow the spin-wave energies") {
    const Lattice l = square(2);
    const EigenSystem es = eigensystem(coupling_matrix(l));
    const ExactSpectrum s = exact_spectrum(l, params(20.0));
    for (Eigen::Index i = 0; i < 4; ++i) {
        const double eps = 40.0 + 0.5 * es.d(i);
        CHECK(std::abs(s.energies(i + 1) - s.energies(0) - eps) / eps < 0.01);
    }
}

TEST_CASE("second-order ground energy improves on the quadratic one") {
    const Lattice l = square(2);
    const EigenSystem es = eigensystem(coupling_matrix(l));
    for (double omega : {5.0, 20.0}) {
        const ModelParams p = params(omega);
        const double exact = exact_spectrum(l, p, 1).energies(0);
        const double e0 = ground_energy(p, es);
        CHECK(std::abs(exact - e0 - shift_ground_closed_form(es, omega)) < std::abs(exact - e0));
    }
}

TEST_CASE("no drive leaves populations unchanged and conserves energy") {
    DriveProtocol p;
    p.delta0 = 0.0;
    p.t_final = 5.0;
    p.dt = 0.005;
    p.samples = 10;
    const DriveResult r = evolve_with_drive(square(2), params(20.0, 0.2), p);
    for (Eigen::Index s = 0; s < r.populations.cols(); ++s) {
        CHECK((r.populations.col(s).array() - r.populations(0, s)).abs().maxCoeff() < 1e-10);
    }
    CHECK(r.energy_drift < 1e-8);
    CHECK(r.norm_drift < 1e-8);
}

TEST_CASE("drive selects the totally symmetric state") {
    const Lattice l = square(2);
    const ModelParams p = params(20.0);
    const ExactSpectrum s = exact_spectrum(l, p);
    // Of the four one-excitation states only the top one is A1; 2 and 3 are a degenerate pair.
    DriveProtocol d;
    d.delta0 = 0.1;
    d.t_final = 40.0;
    d.dt = 0.0025;
    d.samples = 80;
    d.omega_drive = s.energies(4) - s.energies(0);
    const DriveResult res = evolve_with_drive(l, p, d);
    CHECK(res.populations.col(4).maxCoeff() > 0.5);
    CHECK(res.step_change < 1e-6);

    d.omega_drive = s.energies(2) - s.energies(0);
    const DriveResult other = evolve_with_drive(l, p, d);
    CHECK(other.populations.col(2).maxCoeff() < 1e-4);
    CHECK(other.populations.col(3).maxCoeff() < 1e-4);
}

TEST_CASE("coarse steps fail the halving check") {
    DriveProtocol d;
    d.delta0 = 0.1;
    d.t_final = 10.0;
    d.dt = 0.05;
    d.omega_drive = 40.0;
    CHECK_THROWS_AS(evolve_with_drive(square(2), params(20.0), d), NumericError);
}

TEST_CASE("size guards") {
    CHECK_THROWS_AS(prepare_minus(15), InputError);
    CHECK_THROWS_AS(exact_spectrum(square(4), params(20.0), 2, SpectrumMethod::Dense), InputError);
    DriveProtocol d;
    d.t_final = -1.0;
    CHECK_THROWS_AS(evolve_with_drive(square(2), params(20.0), d), InputError);
}

}
