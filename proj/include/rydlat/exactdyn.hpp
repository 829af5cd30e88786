#pragma once

// Exact treatment of the driven spin lattice on the full 2^N space. Basis
// state s has bit k set when site k is in the Rydberg state.

#include "rydlat/hamiltonian.hpp"
#include "rydlat/lattice.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>

namespace rydlat {

inline constexpr std::size_t kMaxSpectrumSites = 14;
inline constexpr std::size_t kMaxEvolutionSites = 12;

// H = sum_k [omega sigma_x^k + detuning n_k + sum_{m != k} V_km n_k n_m].
struct SpinHamiltonian {
    std::size_t sites = 0;
    double omega = 0.0;
    double detuning = 0.0;
    Eigen::VectorXd interaction;  // diagonal interaction energy of each basis state
    Eigen::VectorXd occupation;   // number of Rydberg excitations of each basis state

    std::size_t dimension() const { return std::size_t{1} << sites; }

    // y = (H + extra_detuning * sum_k n_k) x
    template <typename Vec>
    void apply(const Vec& x, Vec& y, double extra_detuning = 0.0) const {
        const auto dim = static_cast<Eigen::Index>(dimension());
        y.resize(dim);
        const double det = detuning + extra_detuning;
        for (Eigen::Index s = 0; s < dim; ++s) {
            auto acc = (interaction(s) + det * occupation(s)) * x(s);
            for (std::size_t k = 0; k < sites; ++k) acc += omega * x(s ^ (Eigen::Index{1} << k));
            y(s) = acc;
        }
    }

    Eigen::MatrixXd dense() const;
};

SpinHamiltonian spin_hamiltonian(const Lattice& lattice, const ModelParams& params);

enum class SpectrumMethod { Auto, Dense, Lanczos };

struct ExactSpectrum {
    Eigen::VectorXd energies;  // ascending
    Eigen::MatrixXd states;    // columns, unit norm
};

// Lowest `count` eigenpairs (default N + 2). Auto uses a dense solve up to
// 10 sites and block Lanczos above.
ExactSpectrum exact_spectrum(const Lattice& lattice, const ModelParams& params, std::size_t count = 0,
                             SpectrumMethod method = SpectrumMethod::Auto);
ExactSpectrum exact_spectrum(const SpinHamiltonian& h, std::size_t count,
                             SpectrumMethod method = SpectrumMethod::Auto);

// Product state of (|g> - |r>)/sqrt(2) on every site.
Eigen::VectorXd prepare_minus(std::size_t sites);

struct DriveProtocol {
    double delta0 = 0.1;        // drive amplitude
    double omega_drive = 0.0;   // drive frequency
    double t_final = 10.0;
    double dt = 0.01;
    std::size_t samples = 200;  // time-series rows besides t = 0

    void validate() const;
};

struct DriveResult {
    Eigen::VectorXd times;
    Eigen::MatrixXd populations;  // (sample, eigenstate)
    Eigen::VectorXd energies;     // energies of the projected eigenstates
    double step_change = 0.0;     // max |final population(dt) - final population(dt/2)|
    double norm_drift = 0.0;      // max |norm - 1| over the run
    double energy_drift = 0.0;    // relative drift of <H> (static part) over the run
};

// Evolves prepare_minus under H with detuning delta + delta0 cos(omega_drive t)
// and records populations of the lowest `states` eigenstates (default N + 2).
DriveResult evolve_with_drive(const Lattice& lattice, const ModelParams& params,
                              const DriveProtocol& protocol, std::size_t states = 0);

}  // namespace rydlat
