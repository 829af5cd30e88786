#include "rydlat/errors.hpp"
#include "rydlat/hamiltonian.hpp"
#include "rydlat/lattice.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace rydlat;

namespace {

using Big = boost::multiprecision::cpp_bin_float_50;

// Cyclic Jacobi eigenvalues in 50-digit arithmetic, V built from scratch.
std::vector<double> jacobi_eigenvalues(const Lattice& lattice) {
    const std::size_t n = lattice.size();
    std::vector<std::vector<Big>> a(n, std::vector<Big>(n, Big(0)));
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t m = 0; m < n; ++m) {
            if (k == m) continue;
            Big r2 = 0;
            for (int c = 0; c < 3; ++c) {
                const Big d = Big(lattice.positions[k](c)) - Big(lattice.positions[m](c));
                r2 += d * d;
            }
            a[k][m] = 1 / (r2 * r2 * r2);
        }
    }
    for (int sweep = 0; sweep < 60; ++sweep) {
        Big off = 0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        if (off < Big("1e-80")) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (a[p][q] == 0) continue;
                const Big theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
                const Big t = (theta >= 0 ? Big(1) : Big(-1)) / (abs(theta) + sqrt(theta * theta + 1));
                const Big c = 1 / sqrt(t * t + 1);
                const Big s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const Big akp = a[k][p];
                    const Big akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const Big apk = a[p][k];
                    const Big aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev;
    for (std::size_t k = 0; k < n; ++k) ev.push_back(static_cast<double>(a[k][k]));
    std::sort(ev.begin(), ev.end());
    return ev;
}

}  // namespace

TEST_SUITE("hamiltonian") {

TEST_CASE("coupling matrix is symmetric with 1/r^6 entries") {
    const Lattice l = build_lattice({LatticeKind::Square, 3});
    const CouplingMatrix v = coupling_matrix(l);
    CHECK(v.v(0, 1) == 1.0);
    CHECK(v.v(0, 4) == doctest::Approx(1.0 / 8.0));
    CHECK(v.v(0, 2) == doctest::Approx(1.0 / 64.0));
    CHECK(v.v(0, 0) == 0.0);
    CHECK((v.v - v.v.transpose()).norm() == 0.0);
}

TEST_CASE("coincident sites are a numeric error") {
    Lattice l = build_lattice({LatticeKind::Square, 2});
    l.positions[1] = l.positions[0];
    CHECK_THROWS_AS(coupling_matrix(l), NumericError);
}

TEST_CASE("two sites give D = -1, +1 with (1, -1) and (1, 1) modes") {
    Lattice pair = build_lattice({LatticeKind::Square, 1});
    pair.positions.push_back({1.0, 0.0, 0.0});
    pair.centers = pair.positions;
    const EigenSystem two = eigensystem(coupling_matrix(pair));
    CHECK(two.d(0) == doctest::Approx(-1.0));
    CHECK(two.d(1) == doctest::Approx(1.0));
    CHECK(two.m(0, 1) == doctest::Approx(std::sqrt(0.5)));
    CHECK(two.m(1, 1) == doctest::Approx(std::sqrt(0.5)));
    CHECK(two.m(0, 0) == doctest::Approx(std::sqrt(0.5)));
    CHECK(two.m(1, 0) == doctest::Approx(-std::sqrt(0.5)));
}

TEST_CASE("3x3 spectrum matches an extended-precision Jacobi oracle") {
    const Lattice l = build_lattice({LatticeKind::Square, 3});
    const EigenSystem es = eigensystem(coupling_matrix(l));
    const std::vector<double> ref = jacobi_eigenvalues(l);
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(es.d(Eigen::Index(i)) - ref[i]) < 1e-12);
}

TEST_CASE("triangular spectrum matches the Jacobi oracle") {
    const Lattice l = build_lattice({LatticeKind::Triangular, 5});
    const EigenSystem es = eigensystem(coupling_matrix(l));
    const std::vector<double> ref = jacobi_eigenvalues(l);
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(es.d(Eigen::Index(i)) - ref[i]) < 1e-12);
}

TEST_CASE("eigenvectors are orthonormal and gauge fixed") {
    for (auto kind : {LatticeKind::Square, LatticeKind::Triangular}) {
        const EigenSystem es = eigensystem(coupling_matrix(build_lattice({kind, 6})));
        const auto n = es.m.cols();
        CHECK((es.m.transpose() * es.m - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
        const Eigen::VectorXd s = es.mode_sums();
        for (Eigen::Index i = 0; i < n; ++i) {
            CHECK(s(i) >= -1e-12);
            if (std::abs(s(i)) < 1e-10) {
                Eigen::Index first = 0;
                while (std::abs(es.m(first, i)) < 1e-10) ++first;
                CHECK(es.m(first, i) > 0.0);
            }
        }
        for (Eigen::Index i = 1; i < n; ++i) CHECK(es.d(i) >= es.d(i - 1));
    }
}

TEST_CASE("top mode is the entrywise positive Perron vector") {
    const EigenSystem es = eigensystem(coupling_matrix(build_lattice({LatticeKind::Square, 7})));
    CHECK(es.m.col(es.m.cols() - 1).minCoeff() > 0.0);
}

TEST_CASE("degenerate clusters are detected") {
    const EigenSystem es = eigensystem(coupling_matrix(build_lattice({LatticeKind::Square, 4})));
    std::size_t covered = 0;
    bool has_pair = false;
    for (const auto& c : es.clusters) {
        covered += c.count;
        has_pair = has_pair || c.count == 2;
        for (std::size_t k = 1; k < c.count; ++k) {
            CHECK(std::abs(es.d(Eigen::Index(c.first + k)) - es.d(Eigen::Index(c.first))) < 1e-8);
        }
    }
    CHECK(covered == es.size());
    CHECK(has_pair);
}

TEST_CASE("ground energy agrees between direct and spectral sums") {
    ModelParams p;
    p.omega = 20.0;
    p.delta = 0.3;
    for (int L : {2, 3, 5}) {
        const CouplingMatrix v = coupling_matrix(build_lattice({LatticeKind::Square, L}));
        const EigenSystem es = eigensystem(v);
        CHECK(ground_energy(p, v) == doctest::Approx(ground_energy(p, es)).epsilon(1e-13));
        CHECK(ground_energy(p, v) == doctest::Approx(-double(L * L) * (20.0 - 0.15) + 0.25 * v.v.sum()));
    }
}

TEST_CASE("manifold energies") {
    ModelParams p;
    const EigenSystem es = eigensystem(coupling_matrix(build_lattice({LatticeKind::Square, 3})));
    const ManifoldEnergies me = manifold_energies(es, p);
    for (Eigen::Index i = 0; i < 9; ++i) {
        CHECK(me.epsilon(i) == doctest::Approx(40.0 + es.d(i) / 2.0));
        CHECK(me.one_boson(i) == doctest::Approx(me.e0 + me.epsilon(i)));
        for (Eigen::Index j = i; j < 9; ++j) {
            CHECK(me.two_boson(i, j) == doctest::Approx(me.e0 + me.epsilon(i) + me.epsilon(j)));
        }
    }
}

TEST_CASE("boson densities hold one or two excitations") {
    const EigenSystem es = eigensystem(coupling_matrix(build_lattice({LatticeKind::Square, 3})));
    CHECK(boson_density(es, OneBosonState{4}).sum() == doctest::Approx(1.0));
    CHECK(boson_density(es, TwoBosonState{2, 2}).sum() == doctest::Approx(2.0));
    CHECK(boson_density(es, TwoBosonState{1, 7}).sum() == doctest::Approx(2.0));
    CHECK(boson_density(es, TwoBosonState{1, 7}).minCoeff() >= 0.0);
}

TEST_CASE("invalid parameters") {
    ModelParams p;
    p.omega = -1.0;
    CHECK_THROWS_AS(p.validate(), InputError);
    p.omega = 20.0;
    CHECK(p.in_regime());
}

}
