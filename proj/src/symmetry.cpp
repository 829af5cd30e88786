#include "rydlat/symmetry.hpp"

#include "rydlat/errors.hpp"

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rydlat {
namespace {

constexpr double kMatchTolerance = 1e-9;

Eigen::Matrix2d rotation(double angle) {
    Eigen::Matrix2d r;
    r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    return r;
}

// Reflection across the line through the origin at polar angle `angle`.
Eigen::Matrix2d reflection(double angle) {
    Eigen::Matrix2d f;
    f << std::cos(2 * angle), std::sin(2 * angle), std::sin(2 * angle), -std::cos(2 * angle);
    return f;
}

Permutation permutation_for(const Lattice& lattice, const Eigen::Matrix2d& action,
                            const std::string& name) {
    const Eigen::Vector3d c = lattice.centroid();
    const std::size_t n = lattice.size();
    Permutation image(n);
    std::vector<bool> used(n, false);
    for (std::size_t k = 0; k < n; ++k) {
        const Eigen::Vector2d rel = (lattice.centers[k] - c).head<2>();
        const Eigen::Vector2d moved = action * rel;
        std::size_t best = n;
        double best_distance = std::numeric_limits<double>::infinity();
        for (std::size_t m = 0; m < n; ++m) {
            const double dist = (moved - (lattice.centers[m] - c).head<2>()).norm();
            if (dist < best_distance) {
                best_distance = dist;
                best = m;
            }
        }
        if (best_distance > kMatchTolerance || used[best]) {
            throw NumericError(fmt::format(
                "symmetry element {} does not map site {} onto the lattice (residual {:.3e})",
                name, k + 1, best_distance));
        }
        used[best] = true;
        image[k] = best;
    }
    return image;
}

void verify_group(const SymmetryGroup& group) {
    const std::size_t n = group.elements.front().size();
    Permutation identity(n);
    for (std::size_t k = 0; k < n; ++k) identity[k] = k;
    if (!group.find(identity)) {
        throw NumericError("symmetry group lacks the identity");
    }
    for (const auto& a : group.elements) {
        for (const auto& b : group.elements) {
            if (!group.find(compose(a, b))) {
                throw NumericError("symmetry group is not closed under composition");
            }
        }
    }
}

}  // namespace

std::optional<std::size_t> SymmetryGroup::find(const Permutation& p) const {
    for (std::size_t g = 0; g < elements.size(); ++g) {
        if (elements[g] == p) return g;
    }
    return std::nullopt;
}

Permutation compose(const Permutation& a, const Permutation& b) {
    Permutation out(b.size());
    for (std::size_t k = 0; k < b.size(); ++k) out[k] = a[b[k]];
    return out;
}

std::vector<std::size_t> ModeClassification::a1_modes() const {
    std::vector<std::size_t> modes;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == ModeLabel::A1) modes.push_back(i);
    }
    return modes;
}

SymmetryGroup build_group(const Lattice& lattice) {
    if (!lattice.is_ideal()) {
        throw InputError("point-group symmetry requires an ideal (undisordered) lattice");
    }
    constexpr double pi = std::numbers::pi;
    SymmetryGroup group;
    if (lattice.spec.kind == LatticeKind::Square) {
        for (int n = 0; n < 4; ++n) {
            group.names.push_back(fmt::format("C4_{}", n));
            group.actions.push_back(rotation(n * pi / 2));
        }
        group.names.insert(group.names.end(), {"Fx", "Fy", "Fu", "Fv"});
        // Fx: mirror x -> -x (vertical axis); Fy: y -> -y; Fu/Fv: the diagonals.
        group.actions.push_back(reflection(pi / 2));
        group.actions.push_back(reflection(0.0));
        group.actions.push_back(reflection(pi / 4));
        group.actions.push_back(reflection(-pi / 4));
    } else {
        for (int n = 0; n < 3; ++n) {
            group.names.push_back(fmt::format("C3_{}", n));
            group.actions.push_back(rotation(2 * n * pi / 3));
        }
        // Axes through the apex and the two base vertices.
        group.names.insert(group.names.end(), {"Fa", "Fb", "Fc"});
        group.actions.push_back(reflection(pi / 2));
        group.actions.push_back(reflection(pi / 6));
        group.actions.push_back(reflection(5 * pi / 6));
    }
    for (std::size_t g = 0; g < group.actions.size(); ++g) {
        group.elements.push_back(permutation_for(lattice, group.actions[g], group.names[g]));
    }
    verify_group(group);
    return group;
}

Eigen::MatrixXd a1_projector(const SymmetryGroup& group) {
    const auto n = static_cast<Eigen::Index>(group.elements.front().size());
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
    for (const auto& element : group.elements) {
        for (Eigen::Index k = 0; k < n; ++k) {
            p(static_cast<Eigen::Index>(element[static_cast<std::size_t>(k)]), k) += 1.0;
        }
    }
    return p / static_cast<double>(group.order());
}

ClassifiedModes classify_modes(const EigenSystem& eigen, const SymmetryGroup& group) {
    if (group.elements.front().size() != eigen.size()) {
        throw InputError("symmetry group and eigensystem have different sizes");
    }
    const Eigen::MatrixXd p = a1_projector(group);
    ClassifiedModes out{eigen, {}};
    auto& cls = out.classification;
    cls.labels.assign(eigen.size(), ModeLabel::Other);
    cls.cluster_id.assign(eigen.size(), 0);
    cls.clusters = eigen.clusters;

    for (std::size_t c = 0; c < eigen.clusters.size(); ++c) {
        const auto [first, count] = eigen.clusters[c];
        const auto f = static_cast<Eigen::Index>(first);
        const auto w = static_cast<Eigen::Index>(count);
        for (std::size_t i = first; i < first + count; ++i) cls.cluster_id[i] = c;

        if (count == 1) {
            const Eigen::VectorXd v = eigen.m.col(f);
            if ((p * v - v).norm() < 1e-6) cls.labels[first] = ModeLabel::A1;
            continue;
        }
        // Diagonalize P restricted to the cluster span; eigenvalues come out
        // ascending, so A1 vectors land at the top of the cluster.
        const Eigen::MatrixXd basis = eigen.m.middleCols(f, w);
        const Eigen::MatrixXd restricted = basis.transpose() * p * basis;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(restricted);
        if (solver.info() != Eigen::Success) {
            throw NumericError("projector diagonalization failed within a degenerate cluster");
        }
        for (Eigen::Index q = 0; q < w; ++q) {
            const double lambda = solver.eigenvalues()(q);
            if (std::abs(lambda) > 1e-6 && std::abs(lambda - 1.0) > 1e-6) {
                throw NumericError(fmt::format(
                    "A1 projector eigenvalue {:.6f} in cluster at mode {} is neither 0 nor 1 "
                    "(symmetry group does not match the lattice)",
                    lambda, first + 1));
            }
            if (lambda > 1.0 - 1e-6) cls.labels[first + static_cast<std::size_t>(q)] = ModeLabel::A1;
        }
        Eigen::MatrixXd rotated = basis * solver.eigenvectors();
        fix_gauge(rotated);
        out.eigen.m.middleCols(f, w) = rotated;
    }

    const double trace = p.trace();
    const double rounded = std::round(trace);
    if (std::abs(trace - rounded) > 1e-8) {
        throw NumericError(fmt::format("A1 projector trace {:.12f} is not an integer", trace));
    }
    cls.a1_dimension = static_cast<std::size_t>(rounded);
    const auto found = static_cast<std::size_t>(
        std::count(cls.labels.begin(), cls.labels.end(), ModeLabel::A1));
    if (found != cls.a1_dimension) {
        throw NumericError(fmt::format("found {} A1 modes but the projector has rank {}", found,
                                       cls.a1_dimension));
    }
    return out;
}

ClassifiedModes classify_without_symmetry(const EigenSystem& eigen) {
    ClassifiedModes out{eigen, {}};
    auto& cls = out.classification;
    cls.labels.assign(eigen.size(), ModeLabel::Other);
    cls.cluster_id.assign(eigen.size(), 0);
    cls.clusters = eigen.clusters;
    for (std::size_t c = 0; c < eigen.clusters.size(); ++c) {
        for (std::size_t i = 0; i < eigen.clusters[c].count; ++i) {
            cls.cluster_id[eigen.clusters[c].first + i] = c;
        }
    }
    return out;
}

std::string to_string(ModeLabel label) { return label == ModeLabel::A1 ? "A1" : "Other"; }

}  // namespace rydlat
