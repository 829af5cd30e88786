#include "rydlat/exactdyn.hpp"

#include "rydlat/errors.hpp"
#include "rydlat/random.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>

namespace rydlat {
namespace {

using Complex = std::complex<double>;

constexpr std::size_t kDenseSites = 10;
constexpr Eigen::Index kBlock = 4;
constexpr Eigen::Index kMaxBasis = 640;

void require_sites(std::size_t sites, std::size_t limit) {
    if (sites == 0) throw InputError("lattice has no sites");
    if (sites > limit) {
        throw InputError(fmt::format("exact treatment limited to {} sites (got {})", limit, sites));
    }
}

// Orthonormalizes the columns of `block` against `basis` (two passes) and
// among themselves; columns that vanish are refilled from `rng`.
void orthonormalize(Eigen::MatrixXd& block, const Eigen::MatrixXd& basis, Eigen::Index used,
                    CounterStream& rng) {
    for (int pass = 0; pass < 2; ++pass) {
        if (used > 0) {
            const auto q = basis.leftCols(used);
            block -= q * (q.transpose() * block);
        }
    }
    for (Eigen::Index c = 0; c < block.cols(); ++c) {
        for (int attempt = 0; attempt < 4; ++attempt) {
            for (int pass = 0; pass < 2; ++pass) {
                if (used > 0) {
                    const auto q = basis.leftCols(used);
                    block.col(c) -= q * (q.transpose() * block.col(c));
                }
                for (Eigen::Index p = 0; p < c; ++p) block.col(c) -= block.col(p).dot(block.col(c)) * block.col(p);
            }
            const double norm = block.col(c).norm();
            if (norm > 1e-10) {
                block.col(c) /= norm;
                break;
            }
            for (Eigen::Index s = 0; s < block.rows(); ++s) block(s, c) = rng.next_normal();
        }
    }
}

ExactSpectrum dense_spectrum(const SpinHamiltonian& h, std::size_t count) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.dense());
    if (solver.info() != Eigen::Success) throw NumericError("dense spin eigensolver did not converge");
    ExactSpectrum out;
    const auto n = static_cast<Eigen::Index>(count);
    out.energies = solver.eigenvalues().head(n);
    out.states = solver.eigenvectors().leftCols(n);
    return out;
}

ExactSpectrum lanczos_spectrum(const SpinHamiltonian& h, std::size_t count) {
    const auto dim = static_cast<Eigen::Index>(h.dimension());
    const auto want = static_cast<Eigen::Index>(count);
    const Eigen::Index limit = std::min<Eigen::Index>(kMaxBasis, dim);
    Eigen::MatrixXd q(dim, limit);
    Eigen::MatrixXd hq(dim, limit);
    CounterStream rng(stream_key(0x5eed, 0, 0));

    Eigen::MatrixXd block(dim, kBlock);
    for (Eigen::Index c = 0; c < kBlock; ++c) {
        for (Eigen::Index s = 0; s < dim; ++s) block(s, c) = rng.next_normal();
    }
    Eigen::Index used = 0;
    const double scale = h.interaction.cwiseAbs().maxCoeff() + double(h.sites) * (std::abs(h.omega) + std::abs(h.detuning)) + 1.0;
    const double tol = 1e-10 * scale;
    double worst = 0.0;
    while (true) {
        const Eigen::Index take = std::min<Eigen::Index>(kBlock, limit - used);
        orthonormalize(block, q, used, rng);
        for (Eigen::Index c = 0; c < take; ++c) {
            q.col(used + c) = block.col(c);
            Eigen::VectorXd y;
            const Eigen::VectorXd x = block.col(c);
            h.apply(x, y);
            hq.col(used + c) = y;
        }
        used += take;
        if (used >= want + kBlock || used == limit) {
            const Eigen::MatrixXd t = q.leftCols(used).transpose() * hq.leftCols(used);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(0.5 * (t + t.transpose()));
            const Eigen::MatrixXd y = ritz.eigenvectors().leftCols(want);
            const Eigen::MatrixXd x = q.leftCols(used) * y;
            const Eigen::MatrixXd r = hq.leftCols(used) * y - x * ritz.eigenvalues().head(want).asDiagonal();
            worst = r.colwise().norm().maxCoeff();
            if (worst < tol || used == limit) {
                if (worst >= tol && used < dim) {
                    throw NumericError(fmt::format(
                        "block Lanczos did not converge: residual {:.3g} with {} basis vectors", worst, used));
                }
                ExactSpectrum out;
                out.energies = ritz.eigenvalues().head(want);
                out.states = x;
                for (Eigen::Index c = 0; c < want; ++c) out.states.col(c).normalize();
                return out;
            }
        }
        block = hq.middleCols(used - take, take);
        if (take < kBlock) block.conservativeResize(dim, take);
    }
}

// exp(-i tau (scale * H + g * Nop)) v by Lanczos on the Krylov space of v.
Eigen::VectorXcd krylov_exp(const SpinHamiltonian& h, double scale, double g, double tau,
                            const Eigen::VectorXcd& v) {
    constexpr int kMaxDim = 48;
    const double beta0 = v.norm();
    const auto dim = v.size();
    const int max_m = static_cast<int>(std::min<Eigen::Index>(kMaxDim, dim));
    std::vector<Eigen::VectorXcd> basis;
    basis.reserve(std::size_t(max_m));
    basis.push_back(v / beta0);
    Eigen::VectorXd alpha(max_m);
    Eigen::VectorXd beta(max_m);
    Eigen::VectorXcd w;
    const Eigen::VectorXcd& occ = h.occupation.cast<Complex>();
    for (int j = 0; j < max_m; ++j) {
        h.apply(basis[std::size_t(j)], w);
        w = scale * w + g * occ.cwiseProduct(basis[std::size_t(j)]);
        alpha(j) = std::real(basis[std::size_t(j)].dot(w));
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& b : basis) w -= b.dot(w) * b;
        }
        beta(j) = w.norm();
        const int m = j + 1;
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            t(i, i) = alpha(i);
            if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta(i);
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
        const Eigen::VectorXcd phase =
            (es.eigenvalues().cast<Complex>() * Complex(0.0, -tau)).array().exp().matrix();
        const Eigen::VectorXcd coeff =
            es.eigenvectors().cast<Complex>() * phase.cwiseProduct(es.eigenvectors().row(0).transpose().cast<Complex>());
        const double err = beta(j) * std::abs(coeff(m - 1));
        if (err < 1e-14 || beta(j) < 1e-13 || m == max_m) {
            if (m == max_m && err >= 1e-14 && beta(j) >= 1e-13) {
                throw NumericError(fmt::format("Krylov exponential not converged (error {:.3g}); reduce dt", err));
            }
            Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim);
            for (int i = 0; i < m; ++i) out += coeff(i) * basis[std::size_t(i)];
            return beta0 * out;
        }
        basis.push_back(w / beta(j));
    }
    return v;
}

struct RunOutput {
    Eigen::VectorXcd final_state;
    Eigen::VectorXd times;
    Eigen::MatrixXd populations;
    double norm_drift = 0.0;
    double energy_drift = 0.0;
};

RunOutput run(const SpinHamiltonian& h, const DriveProtocol& p, const Eigen::MatrixXd& proj,
              std::size_t steps, bool record) {
    const double dt = p.t_final / double(steps);
    const double a1 = (3.0 - 2.0 * std::sqrt(3.0)) / 12.0;
    const double a2 = (3.0 + 2.0 * std::sqrt(3.0)) / 12.0;
    const double c1 = 0.5 - std::sqrt(3.0) / 6.0;
    const double c2 = 0.5 + std::sqrt(3.0) / 6.0;
    auto drive = [&](double t) { return p.delta0 * std::cos(p.omega_drive * t); };

    RunOutput out;
    Eigen::VectorXcd psi = prepare_minus(h.sites).cast<Complex>();
    Eigen::VectorXcd hpsi;
    h.apply(psi, hpsi);
    const double e_start = std::real(psi.dot(hpsi));

    const std::size_t stride = record ? std::max<std::size_t>(1, steps / std::max<std::size_t>(1, p.samples)) : steps;
    std::vector<double> times;
    std::vector<Eigen::VectorXd> pops;
    auto sample = [&](double t) {
        times.push_back(t);
        pops.push_back((proj.transpose().cast<Complex>() * psi).cwiseAbs2());
    };
    if (record) sample(0.0);
    for (std::size_t s = 0; s < steps; ++s) {
        const double t = dt * double(s);
        const double g1 = drive(t + c1 * dt);
        const double g2 = drive(t + c2 * dt);
        psi = krylov_exp(h, 0.5, a2 * g1 + a1 * g2, dt, psi);
        psi = krylov_exp(h, 0.5, a1 * g1 + a2 * g2, dt, psi);
        out.norm_drift = std::max(out.norm_drift, std::abs(psi.norm() - 1.0));
        if (record && ((s + 1) % stride == 0 || s + 1 == steps)) sample(dt * double(s + 1));
    }
    h.apply(psi, hpsi);
    const double e_end = std::real(psi.dot(hpsi));
    out.energy_drift = std::abs(e_end - e_start) / std::max(1.0, std::abs(e_start));
    out.final_state = psi;
    if (record) {
        out.times = Eigen::Map<Eigen::VectorXd>(times.data(), Eigen::Index(times.size()));
        out.populations.resize(Eigen::Index(pops.size()), proj.cols());
        for (std::size_t i = 0; i < pops.size(); ++i) out.populations.row(Eigen::Index(i)) = pops[i].transpose();
    }
    return out;
}

}  // namespace

Eigen::MatrixXd SpinHamiltonian::dense() const {
    const auto dim = static_cast<Eigen::Index>(dimension());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index s = 0; s < dim; ++s) {
        m(s, s) = interaction(s) + detuning * occupation(s);
        for (std::size_t k = 0; k < sites; ++k) m(s ^ (Eigen::Index{1} << k), s) += omega;
    }
    return m;
}

SpinHamiltonian spin_hamiltonian(const Lattice& lattice, const ModelParams& params) {
    require_sites(lattice.size(), kMaxSpectrumSites);
    params.validate();
    const CouplingMatrix coupling = coupling_matrix(lattice);
    SpinHamiltonian h;
    h.sites = lattice.size();
    h.omega = params.omega;
    h.detuning = params.delta;
    const auto dim = static_cast<Eigen::Index>(h.dimension());
    h.interaction = Eigen::VectorXd::Zero(dim);
    h.occupation = Eigen::VectorXd::Zero(dim);
    for (Eigen::Index s = 0; s < dim; ++s) {
        const auto bits = static_cast<std::uint64_t>(s);
        h.occupation(s) = double(std::popcount(bits));
        double e = 0.0;
        for (std::size_t k = 0; k < h.sites; ++k) {
            if (!((bits >> k) & 1u)) continue;
            for (std::size_t m = 0; m < h.sites; ++m) {
                if (m != k && ((bits >> m) & 1u)) e += coupling.v(Eigen::Index(k), Eigen::Index(m));
            }
        }
        h.interaction(s) = e;
    }
    return h;
}

ExactSpectrum exact_spectrum(const SpinHamiltonian& h, std::size_t count, SpectrumMethod method) {
    require_sites(h.sites, kMaxSpectrumSites);
    if (count == 0) count = h.sites + 2;
    count = std::min(count, h.dimension());
    const bool dense = method == SpectrumMethod::Dense || (method == SpectrumMethod::Auto && h.sites <= kDenseSites);
    return dense ? dense_spectrum(h, count) : lanczos_spectrum(h, count);
}

ExactSpectrum exact_spectrum(const Lattice& lattice, const ModelParams& params, std::size_t count,
                             SpectrumMethod method) {
    return exact_spectrum(spin_hamiltonian(lattice, params), count, method);
}

Eigen::VectorXd prepare_minus(std::size_t sites) {
    require_sites(sites, kMaxSpectrumSites);
    const auto dim = Eigen::Index{1} << sites;
    Eigen::VectorXd psi(dim);
    const double amp = std::pow(2.0, -0.5 * double(sites));
    for (Eigen::Index s = 0; s < dim; ++s) {
        psi(s) = (std::popcount(static_cast<std::uint64_t>(s)) % 2 == 0) ? amp : -amp;
    }
    return psi;
}

void DriveProtocol::validate() const {
    if (!std::isfinite(delta0) || !std::isfinite(omega_drive)) throw InputError("drive parameters must be finite");
    if (!(t_final > 0.0)) throw InputError("t_final must be > 0");
    if (!(dt > 0.0) || dt > t_final) throw InputError("dt must be in (0, t_final]");
    if (samples == 0) throw InputError("samples must be >= 1");
}

DriveResult evolve_with_drive(const Lattice& lattice, const ModelParams& params,
                              const DriveProtocol& protocol, std::size_t states) {
    require_sites(lattice.size(), kMaxEvolutionSites);
    protocol.validate();
    const SpinHamiltonian h = spin_hamiltonian(lattice, params);
    const ExactSpectrum spec = exact_spectrum(h, states == 0 ? h.sites + 2 : states);

    const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(protocol.t_final / protocol.dt - 1e-9)));
    RunOutput coarse = run(h, protocol, spec.states, steps, true);
    RunOutput fine = run(h, protocol, spec.states, 2 * steps, false);

    DriveResult out;
    out.times = coarse.times;
    out.populations = coarse.populations;
    out.energies = spec.energies;
    const Eigen::VectorXd pc = (spec.states.transpose().cast<Complex>() * coarse.final_state).cwiseAbs2();
    const Eigen::VectorXd pf = (spec.states.transpose().cast<Complex>() * fine.final_state).cwiseAbs2();
    out.step_change = (pc - pf).cwiseAbs().maxCoeff();
    out.norm_drift = std::max(coarse.norm_drift, fine.norm_drift);
    out.energy_drift = coarse.energy_drift;
    if (!(out.step_change < 1e-6)) {
        throw NumericError(fmt::format(
            "time step too coarse: halving dt changes final populations by {:.3g}", out.step_change));
    }
    if (!(out.norm_drift < 1e-8)) {
        throw NumericError(fmt::format("norm drift {:.3g} exceeds 1e-8", out.norm_drift));
    }
    return out;
}

}  // namespace rydlat
