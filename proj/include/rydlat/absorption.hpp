#pragma once

// Transition intensities driven by an oscillating detuning, and the
// absorption profiles built from them.

#include "rydlat/hamiltonian.hpp"
#include "rydlat/lattice.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace rydlat {

struct Stick {
    std::size_t mode = 0;                 // final one-boson mode, or first mode of a pair
    std::optional<std::size_t> partner;   // second mode of a two-boson pair (partner >= mode)
    double gap = 0.0;                     // energy supplied by the drive
    double intensity = 0.0;
};

struct AbsorptionStickSet {
    std::vector<Stick> sticks;

    double total_intensity() const;
    // Sticks with intensity above `threshold`.
    std::size_t count_nonzero(double threshold) const;
};

struct EnergyGrid {
    double min = 0.0;
    double max = 1.0;
    std::size_t bins = 100;

    void validate() const;
    double bin_width() const { return (max - min) / static_cast<double>(bins); }
    double center(std::size_t bin) const { return min + (static_cast<double>(bin) + 0.5) * bin_width(); }
};

struct AbsorptionProfile {
    EnergyGrid grid;
    std::vector<double> values;  // max-normalized when any stick lands on the grid
};

// I1(i) = (delta0^2 / 16) (sum_k M_ki)^2 at gap epsilon_i.
AbsorptionStickSet intensity_one(const EigenSystem& eigen, const ModelParams& params);

// Sticks (j, k), j <= k, from the one-boson state |1_i>, at gap
// epsilon_j + epsilon_k - epsilon_i, with
//   I2 = [d_ik I1(j) + d_ij I1(k) + d_ij d_ik sqrt(I1(j) I1(k))] / (1 + d_jk).
AbsorptionStickSet intensity_two(const EigenSystem& eigen, const ModelParams& params,
                                 std::size_t initial_mode);

// width == 0 bins stick intensities; width > 0 sums Gaussian kernels of that
// standard deviation evaluated at bin centers. Max-normalized afterwards.
AbsorptionProfile render_profile(const AbsorptionStickSet& sticks, const EnergyGrid& grid,
                                 double width);

struct DisorderSummary {
    double sigma = 0.0;
    double mean_gap = 0.0;  // average over realizations of sum(I1 * gap) / sum(I1)
    double std_gap = 0.0;   // intensity-weighted spread of all sticks pooled over realizations
    int realizations = 0;
};

struct DisorderSweep {
    std::vector<AbsorptionProfile> profiles;
    std::vector<DisorderSummary> summary;
};

// For each sigma, averages the I1 absorption profile over `config.realizations`
// jittered lattices. Realization r of every sigma uses the stream of
// (config.master_seed, r). config.sigma is ignored in favour of `sigmas`.
DisorderSweep disordered_profile(const LatticeSpec& spec, const ModelParams& params,
                                 const DisorderConfig& config, std::span<const double> sigmas,
                                 const EnergyGrid& grid, double width);

}  // namespace rydlat
