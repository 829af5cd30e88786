#pragma once

// Second-order energy shifts of the vacuum and the one-boson states caused by
// the excitation-number-changing and beyond-quadratic terms that the
// quadratic spin-wave Hamiltonian leaves out. Static detuning is zero here.

#include "rydlat/hamiltonian.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace rydlat {

// Relative sign of the quartic, excitation-raising correction
//   -1/2 sum_{k != m} V_km a_k^dag a_k^dag a_m^dag a_k
// with respect to the pair-creation term 1/4 sum V_km a_k^dag a_m^dag.
//
// Derived keeps the sign obtained by expanding the spin Hamiltonian and agrees
// with exact diagonalization. Reversed flips it; that is the convention under
// which the published one-boson error table is reproduced.
enum class QuarticSign { Derived, Reversed };

std::string to_string(QuarticSign sign);
QuarticSign parse_quartic_sign(std::string_view name);

// Site-basis coefficients of the perturbation H1 + H2 + H_HP.
struct PerturbationTerms {
    double delta = 0.0;
    Eigen::VectorXd field;    // c_k = sum_{m != k} V_km
    Eigen::VectorXd linear;   // H1:   -(delta + c_k)/2            (a_k^dag + a_k)
    Eigen::MatrixXd pair;     // H2:   V_km / 4                    (a_k^dag a_m^dag + a_k a_m)
    Eigen::VectorXd cubic;    // H_HP: (delta + c_k)/2             (a^dag a^dag a + a^dag a a)_k
    Eigen::MatrixXd quartic;  // H_HP: -V_km / 2, sign-adjusted    (four quartic monomials)
};

PerturbationTerms perturbation_terms(const CouplingMatrix& coupling, double delta,
                                     QuarticSign sign = QuarticSign::Derived);

// b-mode coefficient of the single-boson term: M^T linear (= -(delta + D)S / 2).
Eigen::VectorXd collective_linear(const PerturbationTerms& terms, const EigenSystem& eigen);
// b-mode coefficients of the pair term: M^T pair M (= diag(D) / 4).
Eigen::MatrixXd collective_pair(const PerturbationTerms& terms, const EigenSystem& eigen);

// E0^(2) = -1/8 sum_i D_i^2 (1 + 4 S_i^2) / (4 omega + D_i).
double shift_ground_closed_form(const EigenSystem& eigen, double omega);

// E0^(2) as an explicit sum over the one- and two-boson states, with matrix
// elements taken from the transformed coefficients rather than their closed forms.
double shift_ground_sum_over_states(const EigenSystem& eigen, double omega);

struct OneBosonShift {
    double to_vacuum = 0.0;  // via H1
    double to_two = 0.0;     // via H1 + cubic H_HP
    double to_three = 0.0;   // via H2 + quartic H_HP

    double total() const { return to_vacuum + to_two + to_three; }
};

OneBosonShift shift_one_boson_parts(const EigenSystem& eigen, double omega, std::size_t alpha,
                                    QuarticSign sign = QuarticSign::Derived);
double shift_one_boson(const EigenSystem& eigen, double omega, std::size_t alpha,
                       QuarticSign sign = QuarticSign::Derived);

struct ShiftReport {
    double e0 = 0.0;
    double e0_shift = 0.0;
    double e0_percent = 0.0;
    std::vector<std::size_t> modes;
    Eigen::VectorXd e1;
    Eigen::VectorXd e1_shifts;
    Eigen::VectorXd e1_percent;
};

// Shifts and |E^(2)/E| * 100 for the vacuum and the requested one-boson modes
// (all modes when `modes` is empty).
ShiftReport shift_report(const EigenSystem& eigen, double omega, std::span<const std::size_t> modes,
                         QuarticSign sign = QuarticSign::Derived);

enum class ShiftKind { Ground, OneBoson };

struct ErrorTable {
    ShiftKind kind = ShiftKind::Ground;
    std::vector<int> sides;
    std::vector<double> omegas;
    Eigen::MatrixXd percent;  // rows follow omegas, columns follow sides

    // Value at (row, col) rounded to two significant figures.
    std::string displayed(std::size_t row, std::size_t col) const;
};

// Square lattices of the given sides; OneBoson uses the top mode |1_N>.
ErrorTable error_table(ShiftKind kind, std::span<const int> sides, std::span<const double> omegas,
                       QuarticSign sign = QuarticSign::Derived);

// Rounds half-to-even to `digits` significant figures and keeps trailing
// zeros, e.g. 0.0899 -> "0.090", 4.96 -> "5.0".
std::string display_significant(double value, int digits = 2);

}  // namespace rydlat
