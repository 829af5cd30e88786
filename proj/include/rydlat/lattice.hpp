#pragma once

// Lattice geometry. All lengths are in units of the lattice spacing a.

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace rydlat {

enum class LatticeKind { Square, Triangular };

// How disorder displaces atoms: isotropically in 3D, or only within the plane.
enum class DisplacementModel { Spatial, Planar };

struct LatticeSpec {
    LatticeKind kind = LatticeKind::Square;
    int side = 1;

    // N = L^2 for square, L(L+1)/2 for triangular.
    std::size_t site_count() const;
    void validate() const;
};

struct Lattice {
    LatticeSpec spec;
    std::vector<Eigen::Vector3d> positions;
    // Ideal site positions; kept unchanged under disorder.
    std::vector<Eigen::Vector3d> centers;

    std::size_t size() const { return positions.size(); }
    // True when every atom sits exactly on its site center.
    bool is_ideal() const;
    Eigen::Vector3d centroid() const;
};

struct DisorderConfig {
    double sigma = 0.0;
    int realizations = 1;
    std::uint64_t master_seed = 0;
    DisplacementModel model = DisplacementModel::Spatial;

    void validate() const;
};

// Square sites are (i, j, 0) in row-major order (site = i * L + j).
// Triangular sites fill rows r = 0..L-1 from the base edge, with L - r sites
// in row r at (c + r/2, r*sqrt(3)/2, 0).
Lattice build_lattice(const LatticeSpec& spec);

// Jitters every atom around its center with an independent Gaussian of
// standard deviation sigma per displaced axis. The draws for a site depend
// only on (master_seed, realization, site). sigma == 0 returns the input.
Lattice apply_disorder(const Lattice& lattice, double sigma, std::uint64_t realization,
                       std::uint64_t master_seed,
                       DisplacementModel model = DisplacementModel::Spatial);

double min_pair_distance(const Lattice& lattice);

std::string to_string(LatticeKind kind);
LatticeKind parse_lattice_kind(std::string_view name);
std::string to_string(DisplacementModel model);
DisplacementModel parse_displacement_model(std::string_view name);

// CSV with header `site,x,y,z`; sites are 1-based.
void write_lattice_csv(std::ostream& out, const Lattice& lattice);

}  // namespace rydlat
