#include "cli.hpp"

#include "rydlat/absorption.hpp"
#include "rydlat/csv.hpp"
#include "rydlat/errors.hpp"
#include "rydlat/exactdyn.hpp"
#include "rydlat/hamiltonian.hpp"
#include "rydlat/lattice.hpp"
#include "rydlat/parallel.hpp"
#include "rydlat/perturbation.hpp"
#include "rydlat/photon.hpp"
#include "rydlat/symmetry.hpp"

#include <CLI11.hpp>
#include <Eigen/Core>
#include <boost/version.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace rydlat::cli {
namespace {

namespace fs = std::filesystem;

constexpr const char* kToolVersion = "0.1.0";

struct Options {
    // lattice and model
    std::string geometry = "square";
    int side = 7;
    double omega = 20.0;
    double delta = 0.0;
    double delta0 = 1.0;
    // absorption profiles
    double width = 0.05;
    int bins = 400;
    std::string grid_min = "auto";
    std::string grid_max = "auto";
    int initial = 0;
    // perturbation tables
    std::string kind = "ground";
    std::string sides = "3,4,5,6,7,8,9";
    std::string omegas = "5,10,20,50";
    std::string quartic_sign = "reversed";
    // photon
    double ratio = 0.9;
    int mode = 0;
    double theta_step = 1.0;
    double phi_step = 1.0;
    int beams = 8;
    bool quadrature = false;
    double window = 400.0;
    // disorder
    std::string sigmas = "0,0.025,0.05";
    int realizations = 500;
    std::uint64_t seed = 1;
    std::string displacement = "spatial";
    // exact
    int states = 0;
    int target = 0;
    double omega_drive = 0.0;
    double t_final = 80.0;
    double dt = 0.0025;
    int samples = 400;
    // run control
    std::string out = "out";
    int threads = 0;
};

std::string format_value(double v) { return csv::number(v); }
std::string format_value(int v) { return std::to_string(v); }
std::string format_value(std::uint64_t v) { return std::to_string(v); }
std::string format_value(const std::string& v) { return v; }
std::string format_value(bool v) { return v ? "true" : "false"; }

// Records every option of a subcommand so the resolved configuration can be
// echoed in a canonical order.
class Registry {
public:
    template <class T>
    void add(CLI::App* sub, const std::string& name, T& ref, const std::string& help) {
        sub->add_option("--" + name, ref, help)->capture_default_str();
        entries_[sub->get_name()].push_back({name, [&ref] { return format_value(ref); }});
    }
    void flag(CLI::App* sub, const std::string& name, bool& ref, const std::string& help) {
        sub->add_flag("--" + name, ref, help);
        entries_[sub->get_name()].push_back({name, [&ref] { return format_value(ref); }});
    }
    std::string config_text(const std::string& sub) const {
        std::string text = "[" + sub + "]\n";
        for (const auto& [name, value] : entries_.at(sub)) text += name + "=" + quote(value()) + "\n";
        return text;
    }

private:
    static std::string quote(const std::string& v) {
        const bool plain = std::all_of(v.begin(), v.end(), [](char c) {
            return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '+' || c == '_';
        });
        return plain ? v : "\"" + v + "\"";
    }
    std::map<std::string, std::vector<std::pair<std::string, std::function<std::string()>>>> entries_;
};

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<double> parse_list(const std::string& text, const std::string& name) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        double v = 0.0;
        const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
        if (item.empty() || res.ec != std::errc() || res.ptr != item.data() + item.size() || !std::isfinite(v)) {
            throw InputError(fmt::format("{}: cannot parse '{}' as a number", name, item));
        }
        values.push_back(v);
    }
    if (values.empty()) throw InputError(name + " must not be empty");
    return values;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& name) {
    std::vector<int> out;
    for (double v : parse_list(text, name)) {
        if (v != std::floor(v) || v < 1 || v > 1000) throw InputError(name + " must hold positive integers");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

std::string escape(std::string text) {
    std::string out;
    for (char c : text) {
        if (c == '"' || c == '\\') out += '\\';
        out += c == '\n' ? ' ' : c;
    }
    return out;
}

LatticeSpec lattice_spec(const Options& o) {
    LatticeSpec spec{parse_lattice_kind(o.geometry), o.side};
    spec.validate();
    return spec;
}

ModelParams model(const Options& o) {
    ModelParams p;
    p.omega = o.omega;
    p.delta = o.delta;
    p.delta0 = o.delta0;
    p.validate();
    return p;
}

std::size_t mode_index(int one_based, std::size_t n, const std::string& name) {
    if (one_based == 0) return n - 1;
    if (one_based < 0 || static_cast<std::size_t>(one_based) > n) {
        throw InputError(fmt::format("{} must be in 1..{} (0 selects the top mode)", name, n));
    }
    return static_cast<std::size_t>(one_based - 1);
}

EnergyGrid energy_grid(const Options& o, double lo, double hi) {
    const double margin = std::max(0.5, 5.0 * o.width);
    EnergyGrid grid;
    grid.min = o.grid_min == "auto" ? lo - margin : parse_list(o.grid_min, "grid-min").front();
    grid.max = o.grid_max == "auto" ? hi + margin : parse_list(o.grid_max, "grid-max").front();
    if (o.bins < 2) throw InputError("bins must be >= 2");
    grid.bins = static_cast<std::size_t>(o.bins);
    if (o.width < 0.0) throw InputError("width must be >= 0");
    grid.validate();
    return grid;
}

// Collects output files and writes the manifest.
class Run {
public:
    Run(fs::path dir, std::ostream& out) : dir_(std::move(dir)), out_(out) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw InputError(fmt::format("cannot create output directory '{}': {}", dir_.string(), ec.message()));
    }
    void write(const std::string& name, const std::string& text) {
        csv::write_file(dir_ / name, text);
        files_.push_back(name);
    }
    void write(const std::string& name, const csv::Table& table) { write(name, table.str()); }
    std::ostream& out() { return out_; }

    void finish(const std::string& sub, const std::string& config, const Options& o) {
        csv::write_file(dir_ / "config.ini", config);
        std::string outputs;
        for (const auto& f : files_) outputs += (outputs.empty() ? "" : ",") + f;
        const std::string manifest = fmt::format(
            "tool=rydlat\nversion={}\nsubcommand={}\nconfig_hash={:016x}\nseed={}\nthreads={}\n"
            "eigen={}.{}.{}\nboost={}\ncli11={}\noutputs={}\n",
            kToolVersion, sub, fnv1a(config), o.seed, thread_count(), EIGEN_WORLD_VERSION,
            EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION, BOOST_LIB_VERSION, CLI11_VERSION, outputs);
        csv::write_file(dir_ / "manifest.txt", manifest);
    }

private:
    fs::path dir_;
    std::ostream& out_;
    std::vector<std::string> files_;
};

using csv::number;

csv::Table stick_table(const AbsorptionStickSet& sticks, bool pairs) {
    csv::Table t;
    t.header = pairs ? std::vector<std::string>{"mode_i", "mode_j", "gap", "intensity"}
                     : std::vector<std::string>{"mode_i", "gap", "intensity"};
    for (const auto& s : sticks.sticks) {
        std::vector<std::string> row{std::to_string(s.mode + 1)};
        if (pairs) row.push_back(std::to_string(s.partner.value_or(s.mode) + 1));
        row.push_back(number(s.gap));
        row.push_back(number(s.intensity));
        t.rows.push_back(std::move(row));
    }
    return t;
}

csv::Table profile_table(const AbsorptionProfile& p) {
    csv::Table t;
    t.header = {"energy", "value"};
    for (std::size_t b = 0; b < p.values.size(); ++b) t.rows.push_back({number(p.grid.center(b)), number(p.values[b])});
    return t;
}

std::pair<double, double> gap_range(const AbsorptionStickSet& sticks) {
    double lo = INFINITY;
    double hi = -INFINITY;
    for (const auto& s : sticks.sticks) {
        lo = std::min(lo, s.gap);
        hi = std::max(hi, s.gap);
    }
    return {lo, hi};
}

// Eigensystem with degenerate clusters resolved into A1 / non-A1 parts when
// the lattice is symmetric.
EigenSystem resolved_eigensystem(const Lattice& lattice) {
    EigenSystem es = eigensystem(coupling_matrix(lattice));
    if (lattice.size() > 1 && lattice.is_ideal()) return classify_modes(es, build_group(lattice)).eigen;
    return es;
}

void cmd_spectrum(const Options& o, Run& run) {
    const Lattice lattice = build_lattice(lattice_spec(o));
    const ModelParams params = model(o);
    const EigenSystem es = eigensystem(coupling_matrix(lattice));
    const ManifoldEnergies me = manifold_energies(es, params);
    std::ostringstream lat;
    write_lattice_csv(lat, lattice);
    run.write("lattice.csv", lat.str());

    csv::Table spec{{"i", "D", "epsilon", "E1"}, {}};
    for (std::size_t i = 0; i < es.size(); ++i) {
        const auto k = Eigen::Index(i);
        spec.rows.push_back({std::to_string(i + 1), number(es.d(k)), number(me.epsilon(k)), number(me.one_boson(k))});
    }
    run.write("spectrum.csv", spec);

    csv::Table vec;
    vec.header.push_back("site");
    for (std::size_t i = 0; i < es.size(); ++i) vec.header.push_back(fmt::format("M_{}", i + 1));
    for (Eigen::Index s = 0; s < es.m.rows(); ++s) {
        std::vector<std::string> row{std::to_string(s + 1)};
        for (Eigen::Index i = 0; i < es.m.cols(); ++i) row.push_back(number(es.m(s, i)));
        vec.rows.push_back(std::move(row));
    }
    run.write("eigenvectors.csv", vec);

    csv::Table two{{"i", "j", "E2"}, {}};
    for (Eigen::Index i = 0; i < me.two_boson.rows(); ++i) {
        for (Eigen::Index j = i; j < me.two_boson.cols(); ++j) {
            two.rows.push_back({std::to_string(i + 1), std::to_string(j + 1), number(me.two_boson(i, j))});
        }
    }
    run.write("two_boson.csv", two);
    run.out() << "sites=" << es.size() << " E0=" << number(me.e0) << "\n";
}

void cmd_symmetry(const Options& o, Run& run) {
    const Lattice lattice = build_lattice(lattice_spec(o));
    const EigenSystem es = eigensystem(coupling_matrix(lattice));
    const ClassifiedModes cm = classify_modes(es, build_group(lattice));
    csv::Table t{{"i", "D", "label", "clusterId"}, {}};
    std::string a1;
    for (std::size_t i = 0; i < es.size(); ++i) {
        t.rows.push_back({std::to_string(i + 1), number(cm.eigen.d(Eigen::Index(i))),
                          to_string(cm.classification.labels[i]), std::to_string(cm.classification.cluster_id[i] + 1)});
    }
    for (std::size_t i : cm.classification.a1_modes()) a1 += (a1.empty() ? "" : ",") + std::to_string(i + 1);
    run.write("classification.csv", t);
    run.out() << "a1_modes=" << a1 << "\n";
}

void cmd_absorb1(const Options& o, Run& run) {
    const Lattice lattice = build_lattice(lattice_spec(o));
    const AbsorptionStickSet sticks = intensity_one(resolved_eigensystem(lattice), model(o));
    const auto [lo, hi] = gap_range(sticks);
    run.write("sticks_one.csv", stick_table(sticks, false));
    run.write("profile_one.csv", profile_table(render_profile(sticks, energy_grid(o, lo, hi), o.width)));
    run.out() << "total_intensity=" << number(sticks.total_intensity()) << "\n";
}

void cmd_absorb2(const Options& o, Run& run) {
    const Lattice lattice = build_lattice(lattice_spec(o));
    const EigenSystem es = resolved_eigensystem(lattice);
    const std::size_t initial = mode_index(o.initial, es.size(), "initial");
    const AbsorptionStickSet sticks = intensity_two(es, model(o), initial);
    const auto [lo, hi] = gap_range(sticks);
    run.write("sticks_two.csv", stick_table(sticks, true));
    run.write("profile_two.csv", profile_table(render_profile(sticks, energy_grid(o, lo, hi), o.width)));
    run.out() << "initial_mode=" << initial + 1 << " nonzero_sticks=" << sticks.count_nonzero(1e-12) << "\n";
}

void cmd_perturb(const Options& o, Run& run) {
    ShiftKind kind;
    if (o.kind == "ground") {
        kind = ShiftKind::Ground;
    } else if (o.kind == "excited") {
        kind = ShiftKind::OneBoson;
    } else {
        throw InputError("kind must be ground or excited");
    }
    const std::vector<int> sides = parse_int_list(o.sides, "sides");
    const std::vector<double> omegas = parse_list(o.omegas, "omegas");
    const ErrorTable table = error_table(kind, sides, omegas, parse_quartic_sign(o.quartic_sign));
    csv::Table shown;
    csv::Table raw;
    shown.header.push_back("omega");
    for (int L : sides) shown.header.push_back(fmt::format("L{}", L));
    raw.header = shown.header;
    for (std::size_t r = 0; r < omegas.size(); ++r) {
        std::vector<std::string> row{number(omegas[r])};
        std::vector<std::string> raw_row{number(omegas[r])};
        for (std::size_t c = 0; c < sides.size(); ++c) {
            row.push_back(table.displayed(r, c));
            raw_row.push_back(number(table.percent(Eigen::Index(r), Eigen::Index(c))));
        }
        shown.rows.push_back(std::move(row));
        raw.rows.push_back(std::move(raw_row));
    }
    run.write(fmt::format("perturb_{}.csv", o.kind), shown);
    run.write(fmt::format("perturb_{}_raw.csv", o.kind), raw);
    run.out() << shown.str();
}

void cmd_photon(const Options& o, Run& run) {
    const Lattice lattice = build_lattice(lattice_spec(o));
    const EigenSystem es = resolved_eigensystem(lattice);
    const std::size_t mode = mode_index(o.mode, es.size(), "mode");
    const RadiativeDecomposition rd = radiative_eigen(radiative_matrix(lattice, o.ratio));
    const AngularGrid grid{o.theta_step, o.phi_step};
    const AngularDistribution dist = angular_distribution(es, mode, rd, lattice, o.ratio, grid);

    csv::Table kappa{{"n", "re_kappa", "im_kappa"}, {}};
    for (Eigen::Index n = 0; n < rd.kappa.size(); ++n) {
        kappa.rows.push_back({std::to_string(n + 1), number(rd.kappa(n).real()), number(rd.kappa(n).imag())});
    }
    run.write("radiative.csv", kappa);

    auto dist_table = [&](const AngularDistribution& d) {
        csv::Table t{{"theta_deg", "phi_deg", "intensity"}, {}};
        for (Eigen::Index r = 0; r < d.values.rows(); ++r) {
            for (Eigen::Index c = 0; c < d.values.cols(); ++c) {
                t.rows.push_back({number(grid.theta_deg(std::size_t(r))), number(grid.phi_deg(std::size_t(c))),
                                  number(d.values(r, c))});
            }
        }
        return t;
    };
    run.write("distribution.csv", dist_table(dist));
    if (o.beams < 0) throw InputError("beams must be >= 0");
    csv::Table beams{{"rank", "theta_deg", "phi_deg", "value"}, {}};
    if (o.beams > 0) {
        const auto found = find_beams(dist, static_cast<std::size_t>(o.beams));
        for (std::size_t b = 0; b < found.size(); ++b) {
            beams.rows.push_back({std::to_string(b + 1), number(found[b].theta_deg), number(found[b].phi_deg),
                                  number(found[b].value)});
        }
    }
    run.write("beams.csv", beams);
    run.out() << "mode=" << mode + 1 << " integral=" << number(dist.integral()) << "\n";
    if (o.quadrature) {
        QuadratureSettings settings;
        settings.window = o.window;
        const QuadratureResult q = angular_distribution_quadrature(es, mode, rd, lattice, o.ratio, grid, settings);
        run.write("distribution_quadrature.csv", dist_table(q.distribution));
        const double peak = dist.values.maxCoeff();
        const double diff = (dist.values - q.distribution.values).cwiseAbs().maxCoeff() / peak;
        run.out() << "quadrature_convergence=" << fmt::format("{:.3g}", q.convergence)
                  << " closed_form_difference=" << fmt::format("{:.3g}", diff) << "\n";
    }
}

void cmd_disorder(const Options& o, Run& run) {
    const LatticeSpec spec = lattice_spec(o);
    const ModelParams params = model(o);
    const std::vector<double> sigmas = parse_list(o.sigmas, "sigmas");
    DisorderConfig config;
    config.realizations = o.realizations;
    config.master_seed = o.seed;
    config.model = parse_displacement_model(o.displacement);
    config.validate();
    for (double s : sigmas) {
        if (s < 0.0) throw InputError("sigmas must be >= 0");
    }
    const AbsorptionStickSet ideal = intensity_one(eigensystem(coupling_matrix(build_lattice(spec))), params);
    const auto [lo, hi] = gap_range(ideal);
    Options widened = o;
    widened.width = std::max(o.width, 0.2);
    const EnergyGrid grid = energy_grid(widened, lo, hi);
    const DisorderSweep sweep = disordered_profile(spec, params, config, sigmas, grid, o.width);

    csv::Table summary{{"sigma", "mean_gap", "std_gap", "realizations"}, {}};
    for (const auto& s : sweep.summary) {
        summary.rows.push_back({number(s.sigma), number(s.mean_gap), number(s.std_gap), std::to_string(s.realizations)});
    }
    run.write("disorder_summary.csv", summary);
    for (std::size_t k = 0; k < sweep.profiles.size(); ++k) {
        run.write(fmt::format("profile_sigma_{}.csv", k + 1), profile_table(sweep.profiles[k]));
    }
    run.out() << summary.str();
}

void cmd_exact(const Options& o, Run& run) {
    const Lattice lattice = build_lattice(lattice_spec(o));
    const ModelParams params = model(o);
    if (o.states < 0) throw InputError("states must be >= 0");
    const std::size_t count = o.states == 0 ? lattice.size() + 2 : std::size_t(o.states);
    const ExactSpectrum spec = exact_spectrum(lattice, params, count);
    csv::Table t{{"state", "energy", "gap"}, {}};
    for (Eigen::Index s = 0; s < spec.energies.size(); ++s) {
        t.rows.push_back({std::to_string(s + 1), number(spec.energies(s)), number(spec.energies(s) - spec.energies(0))});
    }
    run.write("exact_spectrum.csv", t);

    if (o.target == 0 && o.omega_drive == 0.0) return;
    DriveProtocol protocol;
    protocol.delta0 = o.delta0;
    protocol.t_final = o.t_final;
    protocol.dt = o.dt;
    if (o.samples < 1) throw InputError("samples must be >= 1");
    protocol.samples = std::size_t(o.samples);
    if (o.target != 0) {
        if (o.target < 2 || o.target > spec.energies.size()) {
            throw InputError(fmt::format("target must be in 2..{}", spec.energies.size()));
        }
        protocol.omega_drive = spec.energies(o.target - 1) - spec.energies(0);
    } else {
        protocol.omega_drive = o.omega_drive;
    }
    const DriveResult res = evolve_with_drive(lattice, params, protocol, count);
    csv::Table ts;
    ts.header.push_back("t");
    for (Eigen::Index s = 0; s < res.populations.cols(); ++s) ts.header.push_back(fmt::format("pop_state_{}", s + 1));
    for (Eigen::Index r = 0; r < res.populations.rows(); ++r) {
        std::vector<std::string> row{number(res.times(r))};
        for (Eigen::Index s = 0; s < res.populations.cols(); ++s) row.push_back(number(res.populations(r, s)));
        ts.rows.push_back(std::move(row));
    }
    run.write("timeseries.csv", ts);
    run.out() << "omega_drive=" << number(protocol.omega_drive) << " step_change=" << fmt::format("{:.3g}", res.step_change)
              << "\n";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Options o;
    Registry reg;
    CLI::App app{"Collective excitations of driven Rydberg lattices", "rydlat"};
    app.set_version_flag("--version", kToolVersion);
    app.set_config("--config", "", "INI file with one section per subcommand");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--out", o.out, "Output directory")->capture_default_str();
    app.add_option("--threads", o.threads, "Worker threads (0 = all cores)")->capture_default_str();

    auto lattice_opts = [&](CLI::App* sub) {
        reg.add(sub, "geometry", o.geometry, "square | triangular");
        reg.add(sub, "side", o.side, "Sites per lattice side");
    };
    auto model_opts = [&](CLI::App* sub) {
        reg.add(sub, "omega", o.omega, "Rabi frequency (units of the nearest-neighbour interaction)");
        reg.add(sub, "delta", o.delta, "Static detuning");
        reg.add(sub, "delta0", o.delta0, "Oscillating detuning amplitude");
    };
    auto profile_opts = [&](CLI::App* sub) {
        reg.add(sub, "width", o.width, "Gaussian width of each stick (0 = histogram)");
        reg.add(sub, "bins", o.bins, "Profile bins");
        reg.add(sub, "grid-min", o.grid_min, "Lower profile energy or auto");
        reg.add(sub, "grid-max", o.grid_max, "Upper profile energy or auto");
    };

    std::map<std::string, std::function<void(const Options&, Run&)>> commands;
    auto* spectrum = app.add_subcommand("spectrum", "Collective modes and manifold energies");
    lattice_opts(spectrum);
    model_opts(spectrum);
    commands["spectrum"] = cmd_spectrum;

    auto* symmetry = app.add_subcommand("symmetry", "Totally symmetric mode classification");
    lattice_opts(symmetry);
    commands["symmetry"] = cmd_symmetry;

    auto* absorb1 = app.add_subcommand("absorb1", "Ground to one-boson intensities and profile");
    lattice_opts(absorb1);
    model_opts(absorb1);
    profile_opts(absorb1);
    commands["absorb1"] = cmd_absorb1;

    auto* absorb2 = app.add_subcommand("absorb2", "One- to two-boson intensities and profile");
    lattice_opts(absorb2);
    model_opts(absorb2);
    profile_opts(absorb2);
    reg.add(absorb2, "initial", o.initial, "Initial one-boson mode, 1-based (0 = top mode)");
    commands["absorb2"] = cmd_absorb2;

    auto* perturb = app.add_subcommand("perturb", "Second-order relative energy shifts on square lattices");
    reg.add(perturb, "kind", o.kind, "ground | excited");
    reg.add(perturb, "sides", o.sides, "Comma-separated lattice sides");
    reg.add(perturb, "omegas", o.omegas, "Comma-separated Rabi frequencies");
    reg.add(perturb, "quartic-sign", o.quartic_sign, "derived | reversed sign of the quartic raising term");
    commands["perturb"] = cmd_perturb;

    auto* photon = app.add_subcommand("photon", "Angular distribution of the emitted photon");
    lattice_opts(photon);
    reg.add(photon, "ratio", o.ratio, "Lattice spacing over laser wavelength");
    reg.add(photon, "mode", o.mode, "Collective mode, 1-based (0 = top mode)");
    reg.add(photon, "theta-step", o.theta_step, "Polar grid step in degrees");
    reg.add(photon, "phi-step", o.phi_step, "Azimuthal grid step in degrees");
    reg.add(photon, "beams", o.beams, "Number of local maxima to report");
    reg.flag(photon, "quadrature", o.quadrature, "Also evaluate by frequency quadrature");
    reg.add(photon, "window", o.window, "Quadrature frequency window in decay rates");
    commands["photon"] = cmd_photon;

    auto* disorder = app.add_subcommand("disorder", "Disorder-averaged one-boson absorption");
    lattice_opts(disorder);
    model_opts(disorder);
    profile_opts(disorder);
    reg.add(disorder, "sigmas", o.sigmas, "Comma-separated position spreads (lattice units)");
    reg.add(disorder, "realizations", o.realizations, "Realizations per spread");
    reg.add(disorder, "seed", o.seed, "Master seed");
    reg.add(disorder, "displacement", o.displacement, "spatial | planar");
    commands["disorder"] = cmd_disorder;

    auto* exact = app.add_subcommand("exact", "Exact spectrum and driven dynamics on the full spin space");
    o.side = 2;
    o.delta0 = 0.1;
    lattice_opts(exact);
    model_opts(exact);
    reg.add(exact, "states", o.states, "Eigenstates to compute (0 = sites + 2)");
    reg.add(exact, "target", o.target, "Drive at the gap of this eigenstate, 1-based (0 = use omega-drive)");
    reg.add(exact, "omega-drive", o.omega_drive, "Drive frequency (0 with target 0 = no evolution)");
    reg.add(exact, "t-final", o.t_final, "Evolution time");
    reg.add(exact, "dt", o.dt, "Time step");
    reg.add(exact, "samples", o.samples, "Time-series rows");
    commands["exact"] = cmd_exact;
    o.side = 7;
    o.delta0 = 1.0;

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error kind=config message=\"" << escape(e.what()) << "\"\n";
        return kConfigError;
    }

    // Subcommand defaults that differ from the shared ones.
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "exact") {
        if (exact->get_option("--side")->count() == 0) o.side = 2;
        if (exact->get_option("--delta0")->count() == 0) o.delta0 = 0.1;
    }

    try {
        if (o.threads < 0) throw InputError("threads must be >= 0");
        set_thread_count(o.threads);
        Run run_ctx(o.out, out);
        commands.at(name)(o, run_ctx);
        run_ctx.finish(name, reg.config_text(name), o);
        return kOk;
    } catch (const InputError& e) {
        err << "error kind=config message=\"" << escape(e.what()) << "\"\n";
        return kConfigError;
    } catch (const NumericError& e) {
        err << "error kind=numeric message=\"" << escape(e.what()) << "\"\n";
        return kNumericError;
    } catch (const std::exception& e) {
        err << "error kind=internal message=\"" << escape(e.what()) << "\"\n";
        return kFailure;
    }
}

}  // namespace rydlat::cli
