#include "rydlat/perturbation.hpp"

#include "rydlat/errors.hpp"
#include "rydlat/lattice.hpp"
#include "rydlat/parallel.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>

namespace rydlat {
namespace {

double quartic_factor(QuarticSign sign) { return sign == QuarticSign::Derived ? 1.0 : -1.0; }

Eigen::VectorXd epsilons(const EigenSystem& eigen, double omega) {
    return (2.0 * omega + 0.5 * eigen.d.array()).matrix();
}

double vacuum_energy(const EigenSystem& eigen, double omega) {
    ModelParams params;
    params.omega = omega;
    return ground_energy(params, eigen);
}

void require_ground_regime(const EigenSystem& eigen, double omega) {
    if (!(omega > 0.0)) throw InputError("omega must be > 0");
    for (Eigen::Index i = 0; i < eigen.d.size(); ++i) {
        if (!(4.0 * omega + eigen.d(i) > 0.0)) {
            throw NumericError(fmt::format(
                "perturbative regime violated: 4*omega + D_{} = {:.6g} is not positive", i + 1,
                4.0 * omega + eigen.d(i)));
        }
    }
}

// Every one-boson level must lie strictly below every two-boson level.
void require_manifold_gap(const Eigen::VectorXd& eps) {
    const double gap = 2.0 * eps.minCoeff() - eps.maxCoeff();
    if (!(gap > 0.0)) {
        throw NumericError(fmt::format(
            "perturbative regime violated: one- and two-boson manifolds overlap (gap {:.6g})", gap));
    }
}

}  // namespace

std::string to_string(QuarticSign sign) { return sign == QuarticSign::Derived ? "derived" : "reversed"; }

QuarticSign parse_quartic_sign(std::string_view name) {
    if (name == "derived") return QuarticSign::Derived;
    if (name == "reversed") return QuarticSign::Reversed;
    throw InputError("unknown quartic sign '" + std::string(name) + "' (expected derived|reversed)");
}

PerturbationTerms perturbation_terms(const CouplingMatrix& coupling, double delta, QuarticSign sign) {
    PerturbationTerms terms;
    terms.delta = delta;
    terms.field = coupling.v.rowwise().sum();
    terms.linear = (-0.5 * (delta + terms.field.array())).matrix();
    terms.pair = 0.25 * coupling.v;
    terms.cubic = (0.5 * (delta + terms.field.array())).matrix();
    terms.quartic = -0.5 * quartic_factor(sign) * coupling.v;
    return terms;
}

Eigen::VectorXd collective_linear(const PerturbationTerms& terms, const EigenSystem& eigen) {
    return eigen.m.transpose() * terms.linear;
}

Eigen::MatrixXd collective_pair(const PerturbationTerms& terms, const EigenSystem& eigen) {
    return eigen.m.transpose() * terms.pair * eigen.m;
}

double shift_ground_closed_form(const EigenSystem& eigen, double omega) {
    require_ground_regime(eigen, omega);
    const Eigen::VectorXd s = eigen.mode_sums();
    double total = 0.0;
    for (Eigen::Index i = 0; i < eigen.d.size(); ++i) {
        const double d = eigen.d(i);
        total += d * d * (1.0 + 4.0 * s(i) * s(i)) / (4.0 * omega + d);
    }
    return -total / 8.0;
}

double shift_ground_sum_over_states(const EigenSystem& eigen, double omega) {
    require_ground_regime(eigen, omega);
    // Rebuild V from the spectral data so this route never touches the
    // closed-form matrix elements.
    const CouplingMatrix coupling{eigen.m * eigen.d.asDiagonal() * eigen.m.transpose()};
    PerturbationTerms terms = perturbation_terms(coupling, 0.0);
    terms.pair.diagonal().setZero();
    const Eigen::VectorXd h1 = collective_linear(terms, eigen);
    const Eigen::MatrixXd h2 = collective_pair(terms, eigen);
    const Eigen::VectorXd eps = epsilons(eigen, omega);
    const auto n = eigen.d.size();

    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        total += h1(i) * h1(i) / -eps(i);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            // b_i^dag b_j^dag |0> = sqrt(1 + d_ij) |2_ij>
            const double amp = i == j ? std::sqrt(2.0) * h2(i, i) : h2(i, j) + h2(j, i);
            total += amp * amp / -(eps(i) + eps(j));
        }
    }
    return total;
}

OneBosonShift shift_one_boson_parts(const EigenSystem& eigen, double omega, std::size_t alpha,
                                    QuarticSign sign) {
    const auto n = static_cast<Eigen::Index>(eigen.size());
    if (alpha >= eigen.size()) {
        throw InputError(fmt::format("mode index {} out of range (N = {})", alpha, eigen.size()));
    }
    require_ground_regime(eigen, omega);
    const auto a = static_cast<Eigen::Index>(alpha);
    const Eigen::MatrixXd& m = eigen.m;
    const Eigen::VectorXd& d = eigen.d;
    const Eigen::VectorXd s = eigen.mode_sums();
    const Eigen::VectorXd eps = epsilons(eigen, omega);
    require_manifold_gap(eps);
    // c_k = sum_m V_km = (M (D o S))_k
    const Eigen::VectorXd field = m * (d.array() * s.array()).matrix();
    const Eigen::VectorXd m_alpha = m.col(a);

    OneBosonShift out;

    // <0| H1 |1_a> = -D_a S_a / 2, denominator E_1a - E_0 = eps_a.
    const double down = -0.5 * d(a) * s(a);
    out.to_vacuum = down * down / eps(a);

    // |2> amplitudes: H1 gives -D_i S_i / 2 b_i^dag b_a^dag, the cubic term
    // 1/2 sum_ij (sum_k c_k M_ka M_ki M_kj) b_i^dag b_j^dag.
    Eigen::MatrixXd pair_coeff =
        0.5 * m.transpose() * (field.array() * m_alpha.array()).matrix().asDiagonal() * m;
    pair_coeff.col(a) += (-0.5 * d.array() * s.array()).matrix();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            const double amp = i == j ? std::sqrt(2.0) * pair_coeff(i, i)
                                      : pair_coeff(i, j) + pair_coeff(j, i);
            out.to_two += amp * amp / (eps(a) - eps(i) - eps(j));
        }
    }

    // |3_ijl> amplitudes. The quartic term contributes
    //   q sum_{ijl} T_ijl D_l b_i^dag b_j^dag b_l^dag, T_ijl = sum_k M_ka M_ki M_kj M_kl,
    // and H2 contributes D_x / 4 b_x^dag b_x^dag b_a^dag.
    const double q = -0.5 * quartic_factor(sign);
    const double sqrt2 = std::numbers::sqrt2;
    const double sqrt6 = std::sqrt(6.0);
    std::vector<double> partial(static_cast<std::size_t>(n), 0.0);
    parallel_for(n, [&](std::ptrdiff_t ii) {
        const auto i = static_cast<Eigen::Index>(ii);
        const Eigen::VectorXd w = (m_alpha.array() * m.col(i).array()).matrix();
        const Eigen::MatrixXd t = m.transpose() * w.asDiagonal() * m;  // T_i..
        double sum = 0.0;
        for (Eigen::Index j = i; j < n; ++j) {
            for (Eigen::Index l = j; l < n; ++l) {
                // Product of occupation factorials of the multiset {i, j, l}.
                const int fact = (i == j && j == l) ? 6 : (i == j || j == l) ? 2 : 1;
                double amp = 2.0 * q * t(j, l) * (d(i) + d(j) + d(l)) / std::sqrt(double(fact));
                if (i == j && j == l) {
                    if (i == a) amp += sqrt6 * d(a) / 4.0;
                } else if (i == j && l == a) {
                    amp += sqrt2 * d(i) / 4.0;
                } else if (j == l && i == a) {
                    amp += sqrt2 * d(j) / 4.0;
                }
                sum += amp * amp / (eps(a) - eps(i) - eps(j) - eps(l));
            }
        }
        partial[static_cast<std::size_t>(ii)] = sum;
    });
    for (double p : partial) out.to_three += p;
    return out;
}

double shift_one_boson(const EigenSystem& eigen, double omega, std::size_t alpha, QuarticSign sign) {
    return shift_one_boson_parts(eigen, omega, alpha, sign).total();
}

ShiftReport shift_report(const EigenSystem& eigen, double omega, std::span<const std::size_t> modes,
                         QuarticSign sign) {
    ShiftReport report;
    report.e0 = vacuum_energy(eigen, omega);
    report.e0_shift = shift_ground_closed_form(eigen, omega);
    report.e0_percent = std::abs(report.e0_shift / report.e0) * 100.0;
    if (modes.empty()) {
        for (std::size_t i = 0; i < eigen.size(); ++i) report.modes.push_back(i);
    } else {
        report.modes.assign(modes.begin(), modes.end());
    }
    const auto count = static_cast<Eigen::Index>(report.modes.size());
    report.e1.resize(count);
    report.e1_shifts.resize(count);
    report.e1_percent.resize(count);
    const Eigen::VectorXd eps = epsilons(eigen, omega);
    for (Eigen::Index r = 0; r < count; ++r) {
        const std::size_t alpha = report.modes[static_cast<std::size_t>(r)];
        if (alpha >= eigen.size()) {
            throw InputError(fmt::format("mode index {} out of range (N = {})", alpha, eigen.size()));
        }
        report.e1(r) = report.e0 + eps(static_cast<Eigen::Index>(alpha));
        report.e1_shifts(r) = shift_one_boson(eigen, omega, alpha, sign);
        report.e1_percent(r) = std::abs(report.e1_shifts(r) / report.e1(r)) * 100.0;
    }
    return report;
}

std::string ErrorTable::displayed(std::size_t row, std::size_t col) const {
    return display_significant(percent(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)));
}

ErrorTable error_table(ShiftKind kind, std::span<const int> sides, std::span<const double> omegas,
                       QuarticSign sign) {
    ErrorTable table;
    table.kind = kind;
    table.sides.assign(sides.begin(), sides.end());
    table.omegas.assign(omegas.begin(), omegas.end());
    table.percent.resize(static_cast<Eigen::Index>(omegas.size()), static_cast<Eigen::Index>(sides.size()));
    for (std::size_t c = 0; c < sides.size(); ++c) {
        const EigenSystem eigen =
            eigensystem(coupling_matrix(build_lattice({LatticeKind::Square, sides[c]})));
        const std::size_t top = eigen.size() - 1;
        for (std::size_t r = 0; r < omegas.size(); ++r) {
            const double omega = omegas[r];
            double value = 0.0;
            if (kind == ShiftKind::Ground) {
                value = std::abs(shift_ground_closed_form(eigen, omega) / vacuum_energy(eigen, omega));
            } else {
                const double e1 = vacuum_energy(eigen, omega) + 2.0 * omega +
                                  0.5 * eigen.d(static_cast<Eigen::Index>(top));
                value = std::abs(shift_one_boson(eigen, omega, top, sign) / e1);
            }
            table.percent(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = 100.0 * value;
        }
    }
    return table;
}

std::string display_significant(double value, int digits) {
    if (value == 0.0 || !std::isfinite(value)) return fmt::format("{}", value);
    const double magnitude = std::abs(value);
    int exponent = static_cast<int>(std::floor(std::log10(magnitude)));
    double unit = std::pow(10.0, exponent - digits + 1);
    double scaled = std::nearbyint(magnitude / unit);  // ties to even in the default rounding mode
    if (scaled >= std::pow(10.0, digits)) {
        ++exponent;
        unit *= 10.0;
        scaled = std::nearbyint(magnitude / unit);
    }
    const int decimals = std::max(0, digits - 1 - exponent);
    return fmt::format("{}{:.{}f}", value < 0 ? "-" : "", scaled * unit, decimals);
}

}  // namespace rydlat
