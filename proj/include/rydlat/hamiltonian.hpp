#pragma once

// Van-der-Waals coupling matrix and the quadratic spin-wave Hamiltonian.
//
// Energies are in units of the nearest-neighbour interaction C6/a^6.
// Mode and site indices in this API are 0-based; CSV outputs are 1-based.

#include "rydlat/lattice.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <variant>
#include <vector>

namespace rydlat {

struct CouplingMatrix {
    // V_km = (a / |r_k - r_m|)^6, zero diagonal.
    Eigen::MatrixXd v;

    std::size_t size() const { return static_cast<std::size_t>(v.rows()); }
};

// Eigenvalues that agree within the degeneracy tolerance.
struct EigenCluster {
    std::size_t first = 0;
    std::size_t count = 1;
};

struct EigenSystem {
    // Eigenvalues D_i in ascending order.
    Eigen::VectorXd d;
    // Orthonormal eigenvectors as columns, gauge-fixed: each column sum is
    // >= 0, and columns with vanishing sum have a positive first nonzero entry.
    Eigen::MatrixXd m;
    std::vector<EigenCluster> clusters;

    std::size_t size() const { return static_cast<std::size_t>(d.size()); }
    // S_i = sum_k M_ki for every mode.
    Eigen::VectorXd mode_sums() const;
};

struct ModelParams {
    double omega = 20.0;  // Rabi frequency
    double delta = 0.0;   // static detuning
    double delta0 = 1.0;  // amplitude of the oscillating detuning

    void validate() const;
    // Strong-driving regime |delta| << 1 << omega; informational only.
    bool in_regime() const;
};

struct ManifoldEnergies {
    double e0 = 0.0;
    Eigen::VectorXd epsilon;    // epsilon_i = 2*omega + D_i/2
    Eigen::VectorXd one_boson;  // E0 + epsilon_i
    Eigen::MatrixXd two_boson;  // (i, j) with j >= i holds E0 + epsilon_i + epsilon_j
};

struct OneBosonState {
    std::size_t mode;
};
struct TwoBosonState {
    std::size_t first;
    std::size_t second;
};
using BosonState = std::variant<OneBosonState, TwoBosonState>;

CouplingMatrix coupling_matrix(const Lattice& lattice);

// Tolerance below which two eigenvalues are treated as degenerate.
double degeneracy_tolerance(const Eigen::VectorXd& d);
std::vector<EigenCluster> find_clusters(const Eigen::VectorXd& d);

// Applies the reporting gauge to each column of `m` in place.
void fix_gauge(Eigen::MatrixXd& m);

EigenSystem eigensystem(const CouplingMatrix& coupling);

// E0 = -N(omega - delta/2) + 1/4 sum_{k != m} V_km, by direct summation.
double ground_energy(const ModelParams& params, const CouplingMatrix& coupling);
// Same quantity from the spectral data: sum_{k,m} V_km = sum_i D_i S_i^2.
double ground_energy(const ModelParams& params, const EigenSystem& eigen);

ManifoldEnergies manifold_energies(const EigenSystem& eigen, const ModelParams& params);

// Per-site boson number <a_n^dag a_n> in a one- or two-boson eigenstate.
Eigen::VectorXd boson_density(const EigenSystem& eigen, const BosonState& state);

}  // namespace rydlat
