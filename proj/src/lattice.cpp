#include "rydlat/lattice.hpp"

#include "rydlat/csv.hpp"
#include "rydlat/errors.hpp"
#include "rydlat/random.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace rydlat {

std::size_t LatticeSpec::site_count() const {
    const auto l = static_cast<std::size_t>(side);
    return kind == LatticeKind::Square ? l * l : l * (l + 1) / 2;
}

void LatticeSpec::validate() const {
    if (side < 1) {
        throw InputError("lattice side must be >= 1, got " + std::to_string(side));
    }
}

bool Lattice::is_ideal() const {
    for (std::size_t k = 0; k < positions.size(); ++k) {
        if (positions[k] != centers[k]) return false;
    }
    return true;
}

Eigen::Vector3d Lattice::centroid() const {
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    for (const auto& c : centers) sum += c;
    return positions.empty() ? sum : Eigen::Vector3d(sum / static_cast<double>(centers.size()));
}

void DisorderConfig::validate() const {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw InputError("disorder sigma must be finite and >= 0");
    }
    if (realizations < 1) {
        throw InputError("disorder realizations must be >= 1");
    }
}

Lattice build_lattice(const LatticeSpec& spec) {
    spec.validate();
    Lattice lattice;
    lattice.spec = spec;
    lattice.centers.reserve(spec.site_count());
    if (spec.kind == LatticeKind::Square) {
        for (int i = 0; i < spec.side; ++i) {
            for (int j = 0; j < spec.side; ++j) {
                lattice.centers.emplace_back(i, j, 0.0);
            }
        }
    } else {
        const double row_height = std::sqrt(3.0) / 2.0;
        for (int r = 0; r < spec.side; ++r) {
            for (int c = 0; c < spec.side - r; ++c) {
                lattice.centers.emplace_back(c + 0.5 * r, r * row_height, 0.0);
            }
        }
    }
    lattice.positions = lattice.centers;
    return lattice;
}

Lattice apply_disorder(const Lattice& lattice, double sigma, std::uint64_t realization,
                       std::uint64_t master_seed, DisplacementModel model) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw InputError("disorder sigma must be finite and >= 0");
    }
    Lattice out = lattice;
    if (sigma == 0.0) return out;
    for (std::size_t k = 0; k < out.size(); ++k) {
        CounterStream stream(stream_key(master_seed, realization, k));
        Eigen::Vector3d shift;
        shift.x() = stream.next_normal();
        shift.y() = stream.next_normal();
        shift.z() = stream.next_normal();
        if (model == DisplacementModel::Planar) shift.z() = 0.0;
        out.positions[k] = out.centers[k] + sigma * shift;
    }
    return out;
}

double min_pair_distance(const Lattice& lattice) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < lattice.size(); ++k) {
        for (std::size_t m = k + 1; m < lattice.size(); ++m) {
            best = std::min(best, (lattice.positions[k] - lattice.positions[m]).norm());
        }
    }
    return best;
}

std::string to_string(LatticeKind kind) {
    return kind == LatticeKind::Square ? "square" : "triangular";
}

LatticeKind parse_lattice_kind(std::string_view name) {
    if (name == "square") return LatticeKind::Square;
    if (name == "triangular") return LatticeKind::Triangular;
    throw InputError("unknown geometry '" + std::string(name) + "' (expected square|triangular)");
}

std::string to_string(DisplacementModel model) {
    return model == DisplacementModel::Spatial ? "spatial" : "planar";
}

DisplacementModel parse_displacement_model(std::string_view name) {
    if (name == "spatial") return DisplacementModel::Spatial;
    if (name == "planar") return DisplacementModel::Planar;
    throw InputError("unknown displacement model '" + std::string(name) +
                     "' (expected spatial|planar)");
}

void write_lattice_csv(std::ostream& out, const Lattice& lattice) {
    out << "site,x,y,z\n";
    for (std::size_t k = 0; k < lattice.size(); ++k) {
        const auto& p = lattice.positions[k];
        out << (k + 1) << ',' << csv::number(p.x()) << ',' << csv::number(p.y()) << ','
            << csv::number(p.z()) << '\n';
    }
}

}  // namespace rydlat
