#pragma once

// Point-group symmetry of ideal lattices as site permutations, and the
// selection of totally symmetric (A1) collective modes.

#include "rydlat/hamiltonian.hpp"
#include "rydlat/lattice.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace rydlat {

// image[k] is the site that site k is carried to.
using Permutation = std::vector<std::size_t>;

struct SymmetryGroup {
    std::vector<Permutation> elements;
    // C4_0..C4_3, Fx, Fy, Fu, Fv for square; C3_0..C3_2, Fa, Fb, Fc for triangular.
    std::vector<std::string> names;
    // 2x2 in-plane matrix of each element about the centroid.
    std::vector<Eigen::Matrix2d> actions;

    std::size_t order() const { return elements.size(); }
    std::optional<std::size_t> find(const Permutation& p) const;
};

// (a ∘ b)[k] = a[b[k]]
Permutation compose(const Permutation& a, const Permutation& b);

enum class ModeLabel { A1, Other };

struct ModeClassification {
    std::vector<ModeLabel> labels;
    std::vector<std::size_t> cluster_id;
    std::vector<EigenCluster> clusters;
    std::size_t a1_dimension = 0;

    std::vector<std::size_t> a1_modes() const;
};

struct ClassifiedModes {
    // Eigenvectors with degenerate clusters rotated onto A1 / non-A1 parts.
    EigenSystem eigen;
    ModeClassification classification;
};

// Builds C4v (square) or C3v (triangular) by acting on the ideal positions
// about their centroid and verifies the group axioms.
SymmetryGroup build_group(const Lattice& lattice);

// P = (1/|G|) sum_g R(g) with R(g)_{g(k), k} = 1.
Eigen::MatrixXd a1_projector(const SymmetryGroup& group);

ClassifiedModes classify_modes(const EigenSystem& eigen, const SymmetryGroup& group);

// Disordered lattices carry no symmetry: every mode is labelled Other.
ClassifiedModes classify_without_symmetry(const EigenSystem& eigen);

std::string to_string(ModeLabel label);

}  // namespace rydlat
