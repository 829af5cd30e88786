#include "rydlat/hamiltonian.hpp"

#include "rydlat/errors.hpp"

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include <cmath>

namespace rydlat {

Eigen::VectorXd EigenSystem::mode_sums() const { return m.colwise().sum().transpose(); }

void ModelParams::validate() const {
    if (!(omega > 0.0) || !std::isfinite(omega)) {
        throw InputError("omega must be finite and > 0");
    }
    if (!std::isfinite(delta) || !std::isfinite(delta0)) {
        throw InputError("detuning parameters must be finite");
    }
}

bool ModelParams::in_regime() const { return omega > 1.0 && std::abs(delta) < 1.0; }

CouplingMatrix coupling_matrix(const Lattice& lattice) {
    const auto n = static_cast<Eigen::Index>(lattice.size());
    CouplingMatrix coupling{Eigen::MatrixXd::Zero(n, n)};
    for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index m = k + 1; m < n; ++m) {
            const double r2 = (lattice.positions[k] - lattice.positions[m]).squaredNorm();
            if (!(r2 > 0.0)) {
                throw NumericError(fmt::format("sites {} and {} coincide", k + 1, m + 1));
            }
            const double value = 1.0 / (r2 * r2 * r2);
            coupling.v(k, m) = value;
            coupling.v(m, k) = value;
        }
    }
    return coupling;
}

double degeneracy_tolerance(const Eigen::VectorXd& d) {
    const double scale = d.size() ? d.cwiseAbs().maxCoeff() : 0.0;
    return 1e-9 * std::max(1.0, scale);
}

std::vector<EigenCluster> find_clusters(const Eigen::VectorXd& d) {
    std::vector<EigenCluster> clusters;
    const double tol = degeneracy_tolerance(d);
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (!clusters.empty() && d(i) - d(i - 1) <= tol) {
            ++clusters.back().count;
        } else {
            clusters.push_back({static_cast<std::size_t>(i), 1});
        }
    }
    return clusters;
}

void fix_gauge(Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.cols(); ++i) {
        auto column = m.col(i);
        const double sum = column.sum();
        const double scale = column.cwiseAbs().sum();
        bool flip = false;
        if (std::abs(sum) > 1e-12 * std::max(1.0, scale)) {
            flip = sum < 0.0;
        } else {
            for (Eigen::Index k = 0; k < column.size(); ++k) {
                if (std::abs(column(k)) > 1e-12) {
                    flip = column(k) < 0.0;
                    break;
                }
            }
        }
        if (flip) column = -column;
    }
}

EigenSystem eigensystem(const CouplingMatrix& coupling) {
    const auto& v = coupling.v;
    if (v.rows() != v.cols()) {
        throw InputError("coupling matrix must be square");
    }
    const double asym = (v - v.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * std::max(1.0, v.cwiseAbs().maxCoeff())) {
        throw InputError(fmt::format("coupling matrix is not symmetric (max |V - V^T| = {:.3e})", asym));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(v);
    if (solver.info() != Eigen::Success) {
        throw NumericError(fmt::format(
            "symmetric eigensolver did not converge (N = {}, ||V||_F = {:.6e}, max|V| = {:.6e})",
            v.rows(), v.norm(), v.cwiseAbs().maxCoeff()));
    }
    EigenSystem es;
    es.d = solver.eigenvalues();
    es.m = solver.eigenvectors();
    fix_gauge(es.m);
    es.clusters = find_clusters(es.d);
    return es;
}

double ground_energy(const ModelParams& params, const CouplingMatrix& coupling) {
    const auto n = static_cast<double>(coupling.size());
    double pair_sum = 0.0;
    for (Eigen::Index k = 0; k < coupling.v.rows(); ++k) {
        for (Eigen::Index m = 0; m < coupling.v.cols(); ++m) {
            if (k != m) pair_sum += coupling.v(k, m);
        }
    }
    return -n * (params.omega - params.delta / 2.0) + pair_sum / 4.0;
}

double ground_energy(const ModelParams& params, const EigenSystem& eigen) {
    const auto n = static_cast<double>(eigen.size());
    const Eigen::VectorXd s = eigen.mode_sums();
    const double pair_sum = (eigen.d.array() * s.array().square()).sum();
    return -n * (params.omega - params.delta / 2.0) + pair_sum / 4.0;
}

ManifoldEnergies manifold_energies(const EigenSystem& eigen, const ModelParams& params) {
    const auto n = static_cast<Eigen::Index>(eigen.size());
    ManifoldEnergies out;
    out.e0 = ground_energy(params, eigen);
    out.epsilon = (2.0 * params.omega + 0.5 * eigen.d.array()).matrix();
    out.one_boson = (out.e0 + out.epsilon.array()).matrix();
    out.two_boson = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            out.two_boson(i, j) = out.e0 + out.epsilon(i) + out.epsilon(j);
        }
    }
    return out;
}

Eigen::VectorXd boson_density(const EigenSystem& eigen, const BosonState& state) {
    const std::size_t n = eigen.size();
    auto check = [n](std::size_t index) {
        if (index >= n) {
            throw InputError(fmt::format("mode index {} out of range (N = {})", index, n));
        }
    };
    if (const auto* one = std::get_if<OneBosonState>(&state)) {
        check(one->mode);
        return eigen.m.col(static_cast<Eigen::Index>(one->mode)).array().square();
    }
    const auto& two = std::get<TwoBosonState>(state);
    check(two.first);
    check(two.second);
    const Eigen::ArrayXd a = eigen.m.col(static_cast<Eigen::Index>(two.first)).array().square();
    const Eigen::ArrayXd b = eigen.m.col(static_cast<Eigen::Index>(two.second)).array().square();
    return (a + b).matrix();  // j == k gives 2 M_nj^2
}

}  // namespace rydlat
