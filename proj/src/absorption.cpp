#include "rydlat/absorption.hpp"

#include "rydlat/errors.hpp"
#include "rydlat/parallel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace rydlat {
namespace {

// Realizations are summed in fixed-size blocks, then the blocks in order,
// which keeps results identical for any thread count.
constexpr int kRealizationBlock = 16;

void accumulate(std::vector<double>& values, const AbsorptionStickSet& sticks,
                const EnergyGrid& grid, double width) {
    const double bin = grid.bin_width();
    for (const auto& stick : sticks.sticks) {
        if (stick.intensity == 0.0) continue;
        if (width == 0.0) {
            const double pos = (stick.gap - grid.min) / bin;
            if (pos < 0.0 || pos >= static_cast<double>(grid.bins)) continue;
            values[static_cast<std::size_t>(pos)] += stick.intensity;
        } else {
            for (std::size_t b = 0; b < grid.bins; ++b) {
                const double x = (grid.center(b) - stick.gap) / width;
                values[b] += stick.intensity * std::exp(-0.5 * x * x);
            }
        }
    }
}

void normalize_max(std::vector<double>& values) {
    const double peak = values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
    if (peak > 0.0) {
        for (double& v : values) v /= peak;
    }
}

struct BlockTotals {
    std::vector<double> histogram;
    double mean_gap_sum = 0.0;  // sum over realizations of the per-realization mean
    double weight = 0.0;        // pooled sum of I1
    double weighted_gap = 0.0;
    double weighted_gap_sq = 0.0;
};

}  // namespace

double AbsorptionStickSet::total_intensity() const {
    double total = 0.0;
    for (const auto& s : sticks) total += s.intensity;
    return total;
}

std::size_t AbsorptionStickSet::count_nonzero(double threshold) const {
    return static_cast<std::size_t>(std::count_if(
        sticks.begin(), sticks.end(), [threshold](const Stick& s) { return s.intensity > threshold; }));
}

void EnergyGrid::validate() const {
    if (bins < 2) throw InputError("energy grid needs at least 2 bins");
    if (!(max > min) || !std::isfinite(min) || !std::isfinite(max)) {
        throw InputError("energy grid is empty (max must exceed min)");
    }
}

AbsorptionStickSet intensity_one(const EigenSystem& eigen, const ModelParams& params) {
    const Eigen::VectorXd s = eigen.mode_sums();
    const double scale = params.delta0 * params.delta0 / 16.0;
    AbsorptionStickSet out;
    out.sticks.reserve(eigen.size());
    for (std::size_t i = 0; i < eigen.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        out.sticks.push_back({i, std::nullopt, 2.0 * params.omega + 0.5 * eigen.d(ii),
                              scale * s(ii) * s(ii)});
    }
    return out;
}

AbsorptionStickSet intensity_two(const EigenSystem& eigen, const ModelParams& params,
                                 std::size_t initial_mode) {
    const std::size_t n = eigen.size();
    if (initial_mode >= n) {
        throw InputError(fmt::format("initial mode {} out of range (N = {})", initial_mode, n));
    }
    const AbsorptionStickSet one = intensity_one(eigen, params);
    const std::size_t i = initial_mode;
    AbsorptionStickSet out;
    out.sticks.reserve(n * (n + 1) / 2);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = j; k < n; ++k) {
            const double dij = i == j ? 1.0 : 0.0;
            const double dik = i == k ? 1.0 : 0.0;
            const double djk = j == k ? 1.0 : 0.0;
            const double i1j = one.sticks[j].intensity;
            const double i1k = one.sticks[k].intensity;
            const double value =
                (dik * i1j + dij * i1k + dij * dik * std::sqrt(i1j * i1k)) / (1.0 + djk);
            const double gap = one.sticks[j].gap + one.sticks[k].gap - one.sticks[i].gap;
            out.sticks.push_back({j, k, gap, value});
        }
    }
    return out;
}

AbsorptionProfile render_profile(const AbsorptionStickSet& sticks, const EnergyGrid& grid,
                                 double width) {
    grid.validate();
    if (!(width >= 0.0)) throw InputError("profile width must be >= 0");
    AbsorptionProfile profile{grid, std::vector<double>(grid.bins, 0.0)};
    accumulate(profile.values, sticks, grid, width);
    normalize_max(profile.values);
    return profile;
}

DisorderSweep disordered_profile(const LatticeSpec& spec, const ModelParams& params,
                                 const DisorderConfig& config, std::span<const double> sigmas,
                                 const EnergyGrid& grid, double width) {
    config.validate();
    params.validate();
    grid.validate();
    if (!(width >= 0.0)) throw InputError("profile width must be >= 0");
    const Lattice ideal = build_lattice(spec);
    const int blocks = (config.realizations + kRealizationBlock - 1) / kRealizationBlock;

    DisorderSweep sweep;
    for (const double sigma : sigmas) {
        if (!(sigma >= 0.0)) throw InputError("disorder sigma must be >= 0");
        std::vector<BlockTotals> partial(static_cast<std::size_t>(blocks));

        parallel_for(blocks, [&](std::ptrdiff_t b) {
            BlockTotals& totals = partial[static_cast<std::size_t>(b)];
            totals.histogram.assign(grid.bins, 0.0);
            const int first = static_cast<int>(b) * kRealizationBlock;
            const int last = std::min(config.realizations, first + kRealizationBlock);
            for (int r = first; r < last; ++r) {
                const Lattice jittered = apply_disorder(ideal, sigma, static_cast<std::uint64_t>(r),
                                                        config.master_seed, config.model);
                const EigenSystem eigen = eigensystem(coupling_matrix(jittered));
                const AbsorptionStickSet sticks = intensity_one(eigen, params);
                accumulate(totals.histogram, sticks, grid, width);
                double w = 0.0, wg = 0.0, wg2 = 0.0;
                for (const auto& s : sticks.sticks) {
                    // Offsets from 2*omega keep the variance free of cancellation.
                    const double x = s.gap - 2.0 * params.omega;
                    w += s.intensity;
                    wg += s.intensity * x;
                    wg2 += s.intensity * x * x;
                }
                if (w > 0.0) totals.mean_gap_sum += 2.0 * params.omega + wg / w;
                totals.weight += w;
                totals.weighted_gap += wg;
                totals.weighted_gap_sq += wg2;
            }
        });

        AbsorptionProfile profile{grid, std::vector<double>(grid.bins, 0.0)};
        BlockTotals total;
        for (const auto& part : partial) {
            for (std::size_t i = 0; i < grid.bins; ++i) profile.values[i] += part.histogram[i];
            total.mean_gap_sum += part.mean_gap_sum;
            total.weight += part.weight;
            total.weighted_gap += part.weighted_gap;
            total.weighted_gap_sq += part.weighted_gap_sq;
        }
        normalize_max(profile.values);

        DisorderSummary summary;
        summary.sigma = sigma;
        summary.realizations = config.realizations;
        summary.mean_gap = total.mean_gap_sum / config.realizations;
        if (total.weight > 0.0) {
            const double mean = total.weighted_gap / total.weight;
            const double var = total.weighted_gap_sq / total.weight - mean * mean;
            summary.std_gap = std::sqrt(std::max(0.0, var));
        }
        sweep.profiles.push_back(std::move(profile));
        sweep.summary.push_back(summary);
    }
    return sweep;
}

}  // namespace rydlat
