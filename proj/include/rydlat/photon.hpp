#pragma once

// Mapping of a collective excitation onto a single emitted photon: collective
// radiative operator of the lattice and the angular emission density.
//
// Dipoles point along z, the lattice lies in the xy-plane and the mapping
// laser propagates along z. Rates are in units of the single-atom rate.

#include "rydlat/hamiltonian.hpp"
#include "rydlat/lattice.hpp"

#include <Eigen/Core>

#include <complex>
#include <cstddef>
#include <vector>

namespace rydlat {

using Complex = std::complex<double>;

struct RadiativeDecomposition {
    Eigen::MatrixXcd a;        // complex symmetric radiative operator
    Eigen::VectorXcd kappa;    // eigenvalues, Re ascending
    Eigen::MatrixXcd chi;      // eigenvectors as columns
    Eigen::MatrixXcd chi_inv;  // inverse of chi
};

// A_kk = -1/2, A_km = -G(xi)/2 - i O(xi) with xi = 2 pi ratio |r_k - r_m|.
Eigen::MatrixXcd radiative_matrix(const Lattice& lattice, double ratio);

// Collective decay-rate kernel G(xi) (= 1 at xi = 0) and shift kernel O(xi).
double decay_kernel(double xi);
double shift_kernel(double xi);

RadiativeDecomposition radiative_eigen(const Eigen::MatrixXcd& a);

struct AngularGrid {
    double theta_step_deg = 1.0;
    double phi_step_deg = 1.0;

    void validate() const;
    std::size_t theta_count() const;  // 0..180 inclusive
    std::size_t phi_count() const;    // 0..360 exclusive
    double theta_deg(std::size_t row) const { return theta_step_deg * double(row); }
    double phi_deg(std::size_t col) const { return phi_step_deg * double(col); }
};

struct AngularDistribution {
    AngularGrid grid;
    Eigen::MatrixXd values;  // (theta row, phi column), photons per steradian

    // Solid-angle integral with sin(theta) weights.
    double integral() const;
};

struct QuadratureSettings {
    double window = 400.0;  // frequency window width, units of the atomic rate
    int panels_per_pole = 12;
};

struct QuadratureResult {
    AngularDistribution distribution;
    // max over the grid of |I(window) - I(window / 2)|, relative to max I.
    double convergence = 0.0;
};

// Residue closed form of the emission density of collective mode `mode`.
AngularDistribution angular_distribution(const EigenSystem& eigen, std::size_t mode,
                                         const RadiativeDecomposition& rd, const Lattice& lattice,
                                         double ratio, const AngularGrid& grid);

// Same density by direct frequency integration of the emission amplitude.
// Throws NumericError when the window does not converge to 1e-4.
QuadratureResult angular_distribution_quadrature(const EigenSystem& eigen, std::size_t mode,
                                                 const RadiativeDecomposition& rd,
                                                 const Lattice& lattice, double ratio,
                                                 const AngularGrid& grid,
                                                 const QuadratureSettings& settings = {});

struct Beam {
    double theta_deg = 0.0;
    double phi_deg = 0.0;
    double value = 0.0;
};

// Grid local maxima (>= every neighbour, > at least one), strongest first.
std::vector<Beam> find_beams(const AngularDistribution& dist, std::size_t count);

}  // namespace rydlat
