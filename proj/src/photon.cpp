#include "rydlat/photon.hpp"

#include "rydlat/errors.hpp"
#include "rydlat/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <boost/math/quadrature/gauss.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace rydlat {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;
constexpr int kGaussOrder = 20;

void require_ideal(const Lattice& lattice) {
    if (!lattice.is_ideal()) throw InputError("angular distribution requires an ideal lattice");
}

void require_ratio(double ratio) {
    if (!(ratio > 0.0) || !std::isfinite(ratio)) throw InputError("ratio a/lambda must be > 0");
}

// Per-direction mode weights c_n = (phase^T chi)_n (chi^-1 M_i)_n.
Eigen::VectorXcd mode_weights(const Eigen::RowVectorXcd& phase_chi, const Eigen::VectorXcd& proj) {
    return phase_chi.transpose().cwiseProduct(proj);
}

// Phase factors exp(-i 2 pi ratio q.r_k) times chi for one direction.
Eigen::RowVectorXcd phased_chi(const Lattice& lattice, const Eigen::MatrixXcd& chi, double ratio,
                               double theta, double phi) {
    const double qx = std::sin(theta) * std::cos(phi);
    const double qy = std::sin(theta) * std::sin(phi);
    const double qz = std::cos(theta);
    Eigen::RowVectorXcd phase(static_cast<Eigen::Index>(lattice.size()));
    for (std::size_t k = 0; k < lattice.size(); ++k) {
        const auto& r = lattice.positions[k];
        const double arg = -2.0 * kPi * ratio * (qx * r.x() + qy * r.y() + qz * r.z());
        phase(static_cast<Eigen::Index>(k)) = std::polar(1.0, arg);
    }
    return phase * chi;
}

Eigen::VectorXcd projected_mode(const EigenSystem& eigen, std::size_t mode,
                                const RadiativeDecomposition& rd) {
    if (mode >= eigen.size()) {
        throw InputError(fmt::format("mode index {} out of range (N = {})", mode, eigen.size()));
    }
    if (static_cast<std::size_t>(rd.kappa.size()) != eigen.size()) {
        throw InputError("radiative decomposition and eigensystem sizes differ");
    }
    return rd.chi_inv * eigen.m.col(static_cast<Eigen::Index>(mode)).cast<Complex>();
}

// Normalization of the emitted photon number to one: 3 / (8 pi) for a
// z-dipole pattern.
constexpr double kPatternNorm = 3.0 / (8.0 * kPi);

std::vector<double> theta_weights(const AngularGrid& grid) {
    const std::size_t n = grid.theta_count();
    const double h = grid.theta_step_deg * kDeg;
    std::vector<double> w(n, 0.0);
    const std::size_t intervals = n - 1;
    if (intervals % 2 == 0) {
        for (std::size_t i = 0; i < n; ++i) {
            const double c = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
            w[i] = c * h / 3.0;
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) w[i] = (i == 0 || i == intervals) ? h / 2.0 : h;
    }
    for (std::size_t i = 0; i < n; ++i) w[i] *= std::sin(grid.theta_deg(i) * kDeg);
    return w;
}

struct FrequencyRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Composite Gauss-Legendre rule on [-half, half], with panel edges graded
// geometrically around each resonance.
FrequencyRule frequency_rule(const Eigen::VectorXcd& kappa, double half, int panels_per_pole) {
    std::vector<double> edges{-half, half};
    for (Eigen::Index n = 0; n < kappa.size(); ++n) {
        const double center = kappa(n).imag();
        const double width = std::max(-kappa(n).real(), 1e-6);
        edges.push_back(center);
        double step = width / 4.0;
        for (int p = 0; p < panels_per_pole; ++p) {
            edges.push_back(center - step);
            edges.push_back(center + step);
            step *= 2.0;
        }
    }
    std::erase_if(edges, [half](double e) { return e < -half || e > half; });
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [](double x, double y) { return std::abs(x - y) < 1e-12; }),
                edges.end());

    using Rule = boost::math::quadrature::gauss<double, kGaussOrder>;
    const auto& x = Rule::abscissa();
    const auto& w = Rule::weights();
    FrequencyRule rule;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const double mid = 0.5 * (edges[p] + edges[p + 1]);
        const double rad = 0.5 * (edges[p + 1] - edges[p]);
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (x[j] == 0.0) {
                rule.nodes.push_back(mid);
                rule.weights.push_back(w[j] * rad);
                continue;
            }
            rule.nodes.push_back(mid - rad * x[j]);
            rule.weights.push_back(w[j] * rad);
            rule.nodes.push_back(mid + rad * x[j]);
            rule.weights.push_back(w[j] * rad);
        }
    }
    return rule;
}

// (1 / 2 pi) integral over the real line of |sum_n c_n / (i w - kappa_n)|^2:
// the quadrature over [-half, half] plus the asymptotic tails.
double spectral_integral(const Eigen::MatrixXcd& resolvent, const std::vector<double>& weights,
                         const Eigen::VectorXcd& c, const Eigen::VectorXcd& kappa, double half) {
    const Eigen::VectorXcd amp = resolvent * c;
    double sum = 0.0;
    for (std::size_t j = 0; j < weights.size(); ++j) sum += weights[j] * std::norm(amp(Eigen::Index(j)));
    const Complex s0 = c.sum();
    const Complex s1 = c.cwiseProduct(kappa).sum();
    const Complex s2 = c.cwiseProduct(kappa.cwiseProduct(kappa)).sum();
    const double tail = 2.0 * std::norm(s0) / half +
                        2.0 / (3.0 * half * half * half) * (std::norm(s1) - 2.0 * std::real(s0 * std::conj(s2)));
    return (sum + tail) / (2.0 * kPi);
}

Eigen::MatrixXcd resolvent_matrix(const FrequencyRule& rule, const Eigen::VectorXcd& kappa) {
    Eigen::MatrixXcd r(static_cast<Eigen::Index>(rule.nodes.size()), kappa.size());
    for (Eigen::Index j = 0; j < r.rows(); ++j) {
        for (Eigen::Index n = 0; n < kappa.size(); ++n) {
            r(j, n) = 1.0 / (Complex(0.0, rule.nodes[std::size_t(j)]) - kappa(n));
        }
    }
    return r;
}

}  // namespace

double decay_kernel(double xi) {
    if (xi < 0.05) {
        const double x2 = xi * xi;
        return 1.0 - x2 / 5.0 + x2 * x2 * 3.0 / 280.0 - x2 * x2 * x2 / 3780.0;
    }
    const double s = std::sin(xi);
    const double c = std::cos(xi);
    return 1.5 * (s / xi + c / (xi * xi) - s / (xi * xi * xi));
}

double shift_kernel(double xi) {
    if (!(xi > 0.0)) throw NumericError("shift kernel evaluated at coincident sites");
    const double s = std::sin(xi);
    const double c = std::cos(xi);
    return 0.75 * (-c / xi + s / (xi * xi) + c / (xi * xi * xi));
}

Eigen::MatrixXcd radiative_matrix(const Lattice& lattice, double ratio) {
    require_ratio(ratio);
    const auto n = static_cast<Eigen::Index>(lattice.size());
    Eigen::MatrixXcd a(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        a(k, k) = Complex(-0.5, 0.0);
        for (Eigen::Index m = k + 1; m < n; ++m) {
            const double r =
                (lattice.positions[std::size_t(k)] - lattice.positions[std::size_t(m)]).norm();
            if (r < 1e-12) {
                throw NumericError(fmt::format("sites {} and {} coincide", k + 1, m + 1));
            }
            const double xi = 2.0 * kPi * ratio * r;
            a(k, m) = Complex(-0.5 * decay_kernel(xi), -shift_kernel(xi));
            a(m, k) = a(k, m);
        }
    }
    return a;
}

RadiativeDecomposition radiative_eigen(const Eigen::MatrixXcd& a) {
    if (a.rows() != a.cols() || a.rows() == 0) throw InputError("radiative matrix must be square");
    if (!a.allFinite()) throw InputError("radiative matrix has non-finite entries");
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(a, true);
    if (solver.info() != Eigen::Success) throw NumericError("radiative eigensolver did not converge");
    const auto n = a.rows();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    const auto& ev = solver.eigenvalues();
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
        if (ev(x).real() != ev(y).real()) return ev(x).real() < ev(y).real();
        return ev(x).imag() < ev(y).imag();
    });
    RadiativeDecomposition rd;
    rd.a = a;
    rd.kappa.resize(n);
    rd.chi.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        rd.kappa(j) = ev(order[std::size_t(j)]);
        rd.chi.col(j) = solver.eigenvectors().col(order[std::size_t(j)]);
    }
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(rd.chi);
    rd.chi_inv = lu.inverse();
    const double residual =
        (rd.chi * rd.chi_inv - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
    if (!(residual < 1e-8)) {
        const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXcd>(rd.chi).singularValues();
        throw NumericError(fmt::format(
            "radiative matrix is (nearly) defective: inversion residual {:.3g}, condition {:.3g}",
            residual, sv(0) / sv(sv.size() - 1)));
    }
    return rd;
}

void AngularGrid::validate() const {
    for (double step : {theta_step_deg, phi_step_deg}) {
        if (!(step > 0.0) || step > 90.0) throw InputError("angular step must be in (0, 90] degrees");
    }
    const double nt = 180.0 / theta_step_deg;
    const double np = 360.0 / phi_step_deg;
    if (std::abs(nt - std::round(nt)) > 1e-9 || std::abs(np - std::round(np)) > 1e-9) {
        throw InputError("angular steps must divide 180 (theta) and 360 (phi) degrees");
    }
}

std::size_t AngularGrid::theta_count() const {
    return static_cast<std::size_t>(std::lround(180.0 / theta_step_deg)) + 1;
}

std::size_t AngularGrid::phi_count() const {
    return static_cast<std::size_t>(std::lround(360.0 / phi_step_deg));
}

double AngularDistribution::integral() const {
    const std::vector<double> wt = theta_weights(grid);
    const double wp = grid.phi_step_deg * kDeg;
    double total = 0.0;
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        total += wt[std::size_t(r)] * wp * values.row(r).sum();
    }
    return total;
}

AngularDistribution angular_distribution(const EigenSystem& eigen, std::size_t mode,
                                         const RadiativeDecomposition& rd, const Lattice& lattice,
                                         double ratio, const AngularGrid& grid) {
    require_ideal(lattice);
    require_ratio(ratio);
    grid.validate();
    const Eigen::VectorXcd proj = projected_mode(eigen, mode, rd);
    const auto n = rd.kappa.size();
    Eigen::MatrixXcd kernel(n, n);
    for (Eigen::Index p = 0; p < n; ++p) {
        for (Eigen::Index q = 0; q < n; ++q) kernel(p, q) = 1.0 / (-rd.kappa(p) - std::conj(rd.kappa(q)));
    }
    AngularDistribution dist;
    dist.grid = grid;
    const auto rows = static_cast<std::ptrdiff_t>(grid.theta_count());
    const auto cols = static_cast<Eigen::Index>(grid.phi_count());
    dist.values.resize(rows, cols);
    parallel_for(rows, [&](std::ptrdiff_t row) {
        const double theta = grid.theta_deg(std::size_t(row)) * kDeg;
        const double pattern = std::sin(theta) * std::sin(theta);
        for (Eigen::Index col = 0; col < cols; ++col) {
            const double phi = grid.phi_deg(std::size_t(col)) * kDeg;
            const Eigen::VectorXcd c = mode_weights(phased_chi(lattice, rd.chi, ratio, theta, phi), proj);
            const double value = std::real(c.conjugate().dot(kernel * c.conjugate()));
            dist.values(row, col) = kPatternNorm * pattern * std::max(value, 0.0);
        }
    });
    return dist;
}

QuadratureResult angular_distribution_quadrature(const EigenSystem& eigen, std::size_t mode,
                                                 const RadiativeDecomposition& rd,
                                                 const Lattice& lattice, double ratio,
                                                 const AngularGrid& grid,
                                                 const QuadratureSettings& settings) {
    require_ideal(lattice);
    require_ratio(ratio);
    grid.validate();
    if (!(settings.window >= 40.0)) throw InputError("frequency window must be at least 40 rates wide");
    if (settings.panels_per_pole < 1) throw InputError("panels_per_pole must be >= 1");
    const Eigen::VectorXcd proj = projected_mode(eigen, mode, rd);

    const double full = settings.window / 2.0;
    const double half = settings.window / 4.0;
    const FrequencyRule rule_full = frequency_rule(rd.kappa, full, settings.panels_per_pole);
    const FrequencyRule rule_half = frequency_rule(rd.kappa, half, settings.panels_per_pole);
    const Eigen::MatrixXcd res_full = resolvent_matrix(rule_full, rd.kappa);
    const Eigen::MatrixXcd res_half = resolvent_matrix(rule_half, rd.kappa);

    QuadratureResult out;
    out.distribution.grid = grid;
    const auto rows = static_cast<std::ptrdiff_t>(grid.theta_count());
    const auto cols = static_cast<Eigen::Index>(grid.phi_count());
    out.distribution.values.resize(rows, cols);
    Eigen::MatrixXd coarse(rows, cols);
    parallel_for(rows, [&](std::ptrdiff_t row) {
        const double theta = grid.theta_deg(std::size_t(row)) * kDeg;
        const double pattern = kPatternNorm * std::sin(theta) * std::sin(theta);
        for (Eigen::Index col = 0; col < cols; ++col) {
            const double phi = grid.phi_deg(std::size_t(col)) * kDeg;
            const Eigen::VectorXcd c = mode_weights(phased_chi(lattice, rd.chi, ratio, theta, phi), proj);
            out.distribution.values(row, col) =
                pattern * spectral_integral(res_full, rule_full.weights, c, rd.kappa, full);
            coarse(row, col) = pattern * spectral_integral(res_half, rule_half.weights, c, rd.kappa, half);
        }
    });
    const double peak = out.distribution.values.cwiseAbs().maxCoeff();
    out.convergence = peak > 0.0 ? (out.distribution.values - coarse).cwiseAbs().maxCoeff() / peak : 0.0;
    if (!(out.convergence <= 1e-4)) {
        throw NumericError(fmt::format(
            "frequency quadrature not converged: window {:.6g} gives change {:.3g} > 1e-4",
            settings.window, out.convergence));
    }
    return out;
}

std::vector<Beam> find_beams(const AngularDistribution& dist, std::size_t count) {
    const AngularGrid& grid = dist.grid;
    if (grid.theta_step_deg > 2.0 + 1e-12 || grid.phi_step_deg > 2.0 + 1e-12) {
        throw InputError("beam search needs an angular resolution of 2 degrees or finer");
    }
    const auto rows = static_cast<Eigen::Index>(grid.theta_count());
    const auto cols = static_cast<Eigen::Index>(grid.phi_count());
    const Eigen::MatrixXd& v = dist.values;
    std::vector<Beam> beams;

    // Each pole is a single point whose neighbours are the whole adjacent ring.
    auto pole = [&](Eigen::Index row, Eigen::Index ring) {
        const double value = v(row, 0);
        const double ring_max = v.row(ring).maxCoeff();
        const double ring_min = v.row(ring).minCoeff();
        if (value >= ring_max && value > ring_min) beams.push_back({grid.theta_deg(std::size_t(row)), 0.0, value});
    };
    if (rows >= 2) {
        pole(0, 1);
        pole(rows - 1, rows - 2);
    }
    for (Eigen::Index r = 1; r + 1 < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            const double value = v(r, c);
            bool at_least = true;
            bool above_one = false;
            for (Eigen::Index dr = -1; dr <= 1 && at_least; ++dr) {
                const Eigen::Index rr = r + dr;
                const bool is_pole = rr == 0 || rr == rows - 1;
                for (Eigen::Index dc = -1; dc <= 1; ++dc) {
                    if (dr == 0 && dc == 0) continue;
                    if (is_pole && dc != 0) continue;
                    const double other = is_pole ? v(rr, 0) : v(rr, (c + dc + cols) % cols);
                    if (other > value) {
                        at_least = false;
                        break;
                    }
                    if (other < value) above_one = true;
                }
            }
            if (at_least && above_one) {
                beams.push_back({grid.theta_deg(std::size_t(r)), grid.phi_deg(std::size_t(c)), value});
            }
        }
    }
    std::stable_sort(beams.begin(), beams.end(),
                     [](const Beam& x, const Beam& y) { return x.value > y.value; });
    if (beams.size() > count) beams.resize(count);
    return beams;
}

}  // namespace rydlat
