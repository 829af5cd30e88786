#include "rydlat/errors.hpp"
#include "rydlat/photon.hpp"
#include "rydlat/symmetry.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace rydlat;

namespace {

constexpr double kPi = std::numbers::pi;

Lattice pair_lattice(double distance) {
    Lattice l = build_lattice({LatticeKind::Square, 1});
    l.positions.push_back({distance, 0.0, 0.0});
    l.centers = l.positions;
    return l;
}

struct Setup {
    Lattice lattice;
    EigenSystem eigen;
    RadiativeDecomposition rd;
};

Setup setup(LatticeKind kind, int side, double ratio) {
    Setup s{build_lattice({kind, side}), {}, {}};
    s.eigen = side > 1 ? classify_modes(eigensystem(coupling_matrix(s.lattice)), build_group(s.lattice)).eigen
                       : eigensystem(coupling_matrix(s.lattice));
    s.rd = radiative_eigen(radiative_matrix(s.lattice, ratio));
    return s;
}

}  // namespace

TEST_SUITE("photon") {

TEST_CASE("single atom decays at half the rate") {
    const Setup s = setup(LatticeKind::Square, 1, 0.9);
    CHECK(s.rd.a(0, 0) == Complex(-0.5, 0.0));
    CHECK(s.rd.kappa(0).real() == doctest::Approx(-0.5));
    CHECK(std::abs(s.rd.chi(0, 0)) == doctest::Approx(1.0));
}

TEST_CASE("kernels: contact limit and far-field falloff") {
    CHECK(decay_kernel(1e-6) == doctest::Approx(1.0));
    CHECK(decay_kernel(1e-3) == doctest::Approx(1.0).epsilon(1e-6));
    for (double xi : {100.0, 1000.0, 10000.0}) {
        CHECK(std::abs(decay_kernel(xi)) <= 1.5 * (1.0 / xi + 1.0 / (xi * xi)) + 1e-15);
        CHECK(std::abs(shift_kernel(xi)) <= 0.75 * (1.0 / xi + 2.0 / (xi * xi)) + 1e-15);
    }
    // Series branch joins the closed form smoothly.
    const double xi = 0.06;
    const double s = std::sin(xi), c = std::cos(xi);
    const double closed = 1.5 * (s / xi + c / (xi * xi) - s / (xi * xi * xi));
    CHECK(std::abs(decay_kernel(xi) - closed) < 1e-12);
    const double below = 0.0499;
    const double closed_below =
        1.5 * (std::sin(below) / below + std::cos(below) / (below * below) - std::sin(below) / (below * below * below));
    CHECK(std::abs(decay_kernel(below) - closed_below) < 1e-11);
}

TEST_CASE("two atoms split into symmetric and antisymmetric modes") {
    const Lattice l = pair_lattice(1.0);
    const Eigen::MatrixXcd a = radiative_matrix(l, 0.9);
    const RadiativeDecomposition rd = radiative_eigen(a);
    const Complex off = a(0, 1);
    const Complex plus = Complex(-0.5, 0.0) + off;
    const Complex minus = Complex(-0.5, 0.0) - off;
    const bool plus_first = plus.real() < minus.real();
    CHECK(std::abs(rd.kappa(0) - (plus_first ? plus : minus)) < 1e-12);
    CHECK(std::abs(rd.kappa(1) - (plus_first ? minus : plus)) < 1e-12);
    for (Eigen::Index n = 0; n < 2; ++n) {
        const Complex ratio = rd.chi(1, n) / rd.chi(0, n);
        CHECK(std::abs(std::abs(ratio) - 1.0) < 1e-12);
        CHECK(std::abs(ratio.imag()) < 1e-12);
    }
    CHECK(rd.kappa(0).real() <= rd.kappa(1).real());
}

TEST_CASE("radiative invariants on 7x7") {
    const Lattice l = build_lattice({LatticeKind::Square, 7});
    const RadiativeDecomposition rd = radiative_eigen(radiative_matrix(l, 0.9));
    CHECK((rd.a - rd.a.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(rd.kappa.real().maxCoeff() <= 1e-10);
    CHECK(std::abs(rd.kappa.sum() - Complex(-24.5, 0.0)) < 1e-10 * 24.5);
    CHECK((rd.chi * rd.chi_inv - Eigen::MatrixXcd::Identity(49, 49)).cwiseAbs().maxCoeff() < 1e-8);
    for (Eigen::Index n = 1; n < 49; ++n) CHECK(rd.kappa(n).real() >= rd.kappa(n - 1).real());
}

TEST_CASE("single atom emits a sin^2 pattern") {
    const Setup s = setup(LatticeKind::Square, 1, 0.9);
    const AngularDistribution d = angular_distribution(s.eigen, 0, s.rd, s.lattice, 0.9, {1.0, 1.0});
    const double norm = 3.0 / (8.0 * kPi);
    for (Eigen::Index r = 0; r < d.values.rows(); ++r) {
        const double st = std::sin(d.grid.theta_deg(std::size_t(r)) * kPi / 180.0);
        for (Eigen::Index c = 0; c < d.values.cols(); ++c) CHECK(std::abs(d.values(r, c) - norm * st * st) < 1e-6 * norm);
    }
}

TEST_CASE("emitted photon number is one") {
    for (auto [kind, side, ratio] : {std::tuple{LatticeKind::Square, 3, 0.9}, {LatticeKind::Square, 7, 0.25},
                                     {LatticeKind::Triangular, 6, 0.9}}) {
        const Setup s = setup(kind, side, ratio);
        for (std::size_t mode : {std::size_t(0), s.eigen.size() - 1}) {
            const AngularDistribution d = angular_distribution(s.eigen, mode, s.rd, s.lattice, ratio, {1.0, 1.0});
            CHECK(std::abs(d.integral() - 1.0) < 1e-4);
            CHECK(d.values.minCoeff() >= 0.0);
        }
    }
}

TEST_CASE("closed form agrees with the frequency quadrature") {
    const Setup s = setup(LatticeKind::Square, 3, 0.9);
    for (std::size_t mode : {std::size_t(0), std::size_t(4), std::size_t(8)}) {
        const AngularGrid grid{3.0, 3.0};
        const AngularDistribution a = angular_distribution(s.eigen, mode, s.rd, s.lattice, 0.9, grid);
        const QuadratureResult q = angular_distribution_quadrature(s.eigen, mode, s.rd, s.lattice, 0.9, grid);
        CHECK((a.values - q.distribution.values).cwiseAbs().maxCoeff() <= 1e-4 * a.values.maxCoeff());
    }
    const Setup one = setup(LatticeKind::Square, 1, 0.9);
    const QuadratureResult q = angular_distribution_quadrature(one.eigen, 0, one.rd, one.lattice, 0.9, {2.0, 2.0});
    const double norm = 3.0 / (8.0 * kPi);
    for (Eigen::Index r = 0; r < q.distribution.values.rows(); ++r) {
        const double st = std::sin(q.distribution.grid.theta_deg(std::size_t(r)) * kPi / 180.0);
        CHECK(std::abs(q.distribution.values(r, 0) - norm * st * st) < 1e-6 * norm);
    }
}

TEST_CASE("under-resolved quadrature is reported") {
    const Setup s = setup(LatticeKind::Square, 3, 0.9);
    const QuadratureResult fine = angular_distribution_quadrature(s.eigen, 8, s.rd, s.lattice, 0.9, {10.0, 10.0});
    CHECK(fine.convergence < 1e-8);
    QuadratureSettings coarse;
    coarse.panels_per_pole = 3;
    CHECK_THROWS_AS(angular_distribution_quadrature(s.eigen, 8, s.rd, s.lattice, 0.9, {10.0, 10.0}, coarse),
                    NumericError);
    QuadratureSettings narrow;
    narrow.window = 10.0;
    CHECK_THROWS_AS(angular_distribution_quadrature(s.eigen, 8, s.rd, s.lattice, 0.9, {10.0, 10.0}, narrow),
                    InputError);
}

TEST_CASE("A1 pattern keeps the point-group symmetry") {
    const Setup s = setup(LatticeKind::Square, 5, 0.9);
    const AngularDistribution d = angular_distribution(s.eigen, s.eigen.size() - 1, s.rd, s.lattice, 0.9, {1.0, 1.0});
    const Eigen::Index cols = d.values.cols();
    double worst = 0.0;
    for (Eigen::Index r = 0; r < d.values.rows(); ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            worst = std::max(worst, std::abs(d.values(r, c) - d.values(r, (c + 90) % cols)));   // C4
            worst = std::max(worst, std::abs(d.values(r, c) - d.values(r, (cols - c) % cols)));  // y -> -y
        }
    }
    CHECK(worst < 1e-6 * d.values.maxCoeff());

    const Setup t = setup(LatticeKind::Triangular, 5, 0.9);
    const AngularDistribution e = angular_distribution(t.eigen, t.eigen.size() - 1, t.rd, t.lattice, 0.9, {1.0, 1.0});
    worst = 0.0;
    for (Eigen::Index r = 0; r < e.values.rows(); ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            worst = std::max(worst, std::abs(e.values(r, c) - e.values(r, (c + 120) % cols)));  // C3
            worst = std::max(worst, std::abs(e.values(r, c) - e.values(r, (180 + cols - c) % cols)));  // x -> -x
        }
    }
    CHECK(worst < 1e-6 * e.values.maxCoeff());
}

TEST_CASE("A1 pattern does not depend on the basis of other degenerate clusters") {
    Setup s = setup(LatticeKind::Square, 4, 0.9);
    const std::size_t top = s.eigen.size() - 1;
    const AngularDistribution before = angular_distribution(s.eigen, top, s.rd, s.lattice, 0.9, {2.0, 2.0});
    for (const auto& c : s.eigen.clusters) {
        if (c.count < 2) continue;
        auto block = s.eigen.m.middleCols(Eigen::Index(c.first), 2);
        const Eigen::MatrixXd mixed = block * (Eigen::Matrix2d() << 0.6, -0.8, 0.8, 0.6).finished();
        block = mixed;
    }
    const AngularDistribution after = angular_distribution(s.eigen, top, s.rd, s.lattice, 0.9, {2.0, 2.0});
    CHECK((before.values - after.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("beam finder") {
    AngularDistribution ring;
    ring.grid = {1.0, 1.0};
    ring.values.resize(181, 360);
    for (Eigen::Index r = 0; r < 181; ++r) ring.values.row(r).setConstant(std::pow(std::sin(double(r) * kPi / 180.0), 2));
    const auto beams = find_beams(ring, 1000);
    CHECK(beams.size() == 360);
    for (const auto& b : beams) CHECK(b.theta_deg == 90.0);

    const Setup s = setup(LatticeKind::Square, 7, 0.9);
    const AngularDistribution d = angular_distribution(s.eigen, 48, s.rd, s.lattice, 0.9, {1.0, 1.0});
    const auto top = find_beams(d, 4);
    REQUIRE(top.size() == 4);
    std::vector<double> phis;
    for (const auto& b : top) {
        CHECK(b.theta_deg == doctest::Approx(90.0));
        phis.push_back(b.phi_deg);
    }
    std::sort(phis.begin(), phis.end());
    CHECK(phis == std::vector<double>{0.0, 90.0, 180.0, 270.0});

    AngularDistribution coarse = d;
    coarse.grid = {5.0, 5.0};
    CHECK_THROWS_AS(find_beams(coarse, 4), InputError);
}

TEST_CASE("input checks") {
    const Setup s = setup(LatticeKind::Square, 3, 0.9);
    const Lattice jittered = apply_disorder(s.lattice, 0.02, 0, 1);
    CHECK_THROWS_AS(angular_distribution(s.eigen, 0, s.rd, jittered, 0.9, {1.0, 1.0}), InputError);
    CHECK_THROWS_AS(angular_distribution(s.eigen, 9, s.rd, s.lattice, 0.9, {1.0, 1.0}), InputError);
    CHECK_THROWS_AS(angular_distribution(s.eigen, 0, s.rd, s.lattice, 0.9, {7.0, 1.0}), InputError);
    CHECK_THROWS_AS(radiative_matrix(s.lattice, 0.0), InputError);
    Lattice twin = pair_lattice(1.0);
    twin.positions[1] = twin.positions[0];
    CHECK_THROWS_AS(radiative_matrix(twin, 0.9), NumericError);
}

}
