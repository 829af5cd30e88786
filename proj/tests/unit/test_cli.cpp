#include "cli_support.hpp"

#include "rydlat/csv.hpp"

#include <doctest.h>

using support::run_cli;

TEST_SUITE("cli") {

TEST_CASE("symmetry reports the A1 modes") {
    const auto dir = support::scratch_dir("sym");
    const auto r = run_cli({"--out", dir.string(), "symmetry", "--geometry", "square", "--side", "3"});
    CHECK(r.code == 0);
    CHECK(r.out == "a1_modes=1,5,9\n");
    const auto t = rydlat::csv::read(dir / "classification.csv");
    CHECK(t.header == std::vector<std::string>{"i", "D", "label", "clusterId"});
    CHECK(t.rows.size() == 9);
    CHECK(t.rows[4][2] == "A1");
}

TEST_CASE("manifest records the run") {
    const auto dir = support::scratch_dir("manifest");
    REQUIRE(run_cli({"--out", dir.string(), "spectrum", "--side", "3"}).code == 0);
    const std::string m = support::slurp(dir / "manifest.txt");
    for (const char* key : {"tool=rydlat\n", "subcommand=spectrum\n", "config_hash=", "seed=", "threads=", "outputs="}) {
        CHECK(m.find(key) != std::string::npos);
    }
    CHECK(m.find("lattice.csv,spectrum.csv,eigenvectors.csv,two_boson.csv") != std::string::npos);
    const auto spec = rydlat::csv::read(dir / "spectrum.csv");
    CHECK(spec.header == std::vector<std::string>{"i", "D", "epsilon", "E1"});
}

TEST_CASE("recorded config reproduces the outputs") {
    const auto a = support::scratch_dir("cfg_a");
    const auto b = support::scratch_dir("cfg_b");
    REQUIRE(run_cli({"--out", a.string(), "absorb2", "--side", "4", "--initial", "3", "--width", "0.1"}).code == 0);
    REQUIRE(run_cli({"--config", (a / "config.ini").string(), "--out", b.string(), "absorb2"}).code == 0);
    CHECK(support::same_csvs(a, b));
    CHECK(support::slurp(a / "config.ini") == support::slurp(b / "config.ini"));
}

TEST_CASE("flags override config values") {
    const auto a = support::scratch_dir("override_a");
    const auto b = support::scratch_dir("override_b");
    REQUIRE(run_cli({"--out", a.string(), "symmetry", "--side", "4"}).code == 0);
    REQUIRE(run_cli({"--config", (a / "config.ini").string(), "--out", b.string(), "symmetry", "--side", "3"}).code == 0);
    CHECK(support::slurp(b / "config.ini").find("side=3") != std::string::npos);
}

TEST_CASE("outputs do not depend on the thread count") {
    const auto a = support::scratch_dir("threads_a");
    const auto b = support::scratch_dir("threads_b");
    for (auto [dir, threads] : {std::pair{a, "1"}, std::pair{b, "3"}}) {
        REQUIRE(run_cli({"--out", dir.string(), "--threads", threads, "disorder", "--side", "4", "--realizations", "40",
                         "--seed", "9"})
                    .code == 0);
    }
    CHECK(support::same_csvs(a, b));
    auto hash = [](const std::filesystem::path& d) {
        const std::string m = support::slurp(d / "manifest.txt");
        const auto p = m.find("config_hash=");
        return m.substr(p, m.find('\n', p) - p);
    };
    CHECK(hash(a) == hash(b));
}

TEST_CASE("exit codes and diagnostics") {
    const auto dir = support::scratch_dir("errors");
    const auto unknown = run_cli({"--out", dir.string(), "teleport"});
    CHECK(unknown.code == 2);
    CHECK(unknown.err.rfind("error kind=config message=", 0) == 0);

    const auto bad_value = run_cli({"--out", dir.string(), "spectrum", "--side", "0"});
    CHECK(bad_value.code == 2);

    std::filesystem::create_directories(dir);
    { std::ofstream(dir / "bad.ini") << "[photon]\nratio=0.9\nspeed=3\n"; }
    const auto bad_key = run_cli({"--config", (dir / "bad.ini").string(), "--out", dir.string(), "photon"});
    CHECK(bad_key.code == 2);

    const auto numeric = run_cli({"--out", dir.string(), "perturb", "--omegas", "0.2", "--sides", "4"});
    CHECK(numeric.code == 3);
    CHECK(numeric.err.rfind("error kind=numeric message=", 0) == 0);
    CHECK(numeric.err.find('\n') == numeric.err.size() - 1);

    CHECK(run_cli({"--help"}).code == 0);
}

TEST_CASE("photon outputs") {
    const auto dir = support::scratch_dir("photon");
    const auto r = run_cli({"--out", dir.string(), "photon", "--side", "3", "--theta-step", "2", "--phi-step", "2",
                            "--beams", "4", "--quadrature"});
    REQUIRE(r.code == 0);
    const auto beams = rydlat::csv::read(dir / "beams.csv");
    CHECK(beams.header == std::vector<std::string>{"rank", "theta_deg", "phi_deg", "value"});
    CHECK(beams.rows.size() == 4);
    const auto dist = rydlat::csv::read(dir / "distribution.csv");
    CHECK(dist.rows.size() == 91 * 180);
    CHECK(r.out.find("quadrature_convergence=") != std::string::npos);
}

TEST_CASE("exact drive writes a time series") {
    const auto dir = support::scratch_dir("exact");
    const auto r = run_cli({"--out", dir.string(), "exact", "--target", "5", "--t-final", "5", "--samples", "10"});
    REQUIRE(r.code == 0);
    const auto ts = rydlat::csv::read(dir / "timeseries.csv");
    CHECK(ts.header.front() == "t");
    CHECK(ts.header.size() == 7);
    CHECK(ts.rows.size() == 11);
}

}
