// Drives the installed command-line binary end to end: exit codes, file
// I/O, determinism of emitted CSV.
#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef BELLFEAS_CLI_PATH
#error "BELLFEAS_CLI_PATH must point at the built binary"
#endif

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int exit_code = -1;
    std::string output; // stdout + stderr
};

fs::path temp_file(const std::string& stem) {
    return fs::temp_directory_path() / ("bellfeas_test_" + stem);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

RunResult run_cli(const std::string& args) {
    fs::path capture = temp_file("capture.txt");
    std::string command =
        std::string(BELLFEAS_CLI_PATH) + " " + args + " > " + capture.string() + " 2>&1";
    int status = std::system(command.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.output = slurp(capture);
    fs::remove(capture);
    return result;
}

} // namespace

TEST_CASE("cli: happy paths exit zero") {
    CHECK(run_cli("budget").exit_code == 0);
    CHECK(run_cli("chsh").exit_code == 0);
    CHECK(run_cli("schedule").exit_code == 0);
    CHECK(run_cli("required-events").exit_code == 0);

    RunResult budget = run_cli("budget");
    CHECK(budget.output.find("atom_atom_visibility") != std::string::npos);
    CHECK(budget.output.find("[reference 0.925]") != std::string::npos);
}

TEST_CASE("cli: csv format") {
    RunResult r = run_cli("budget --format csv");
    CHECK(r.exit_code == 0);
    CHECK(r.output.rfind("key,value,reference\n", 0) == 0);
}

TEST_CASE("cli: scenario file loading and overrides") {
    fs::path scenario = temp_file("scenario.cfg");
    {
        std::ofstream out(scenario);
        out << "[detection]\nmodel = ionization\n[budget]\ne_bsm = 0.02\n";
    }
    RunResult r = run_cli("chsh --scenario " + scenario.string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("ionization") != std::string::npos);

    RunResult overridden =
        run_cli("chsh --scenario " + scenario.string() + " --set detection.model=fluorescence");
    CHECK(overridden.exit_code == 0);
    CHECK(overridden.output.find("fluorescence") != std::string::npos);

    // --set is repeatable and applies left to right after the file
    RunResult stacked = run_cli("budget --scenario " + scenario.string() +
                                " --set budget.e_bsm=0.05 --set budget.e_bsm=0.03 "
                                "--set budget.e_exc=0.005 --format csv");
    CHECK(stacked.exit_code == 0);
    CHECK(stacked.output.find("swap_fidelity,0.955910348") != std::string::npos);
    fs::remove(scenario);
}

TEST_CASE("cli: bad input exits 2") {
    CHECK(run_cli("budget --scenario /no/such/file.cfg").exit_code == 2);
    CHECK(run_cli("budget --set budget.e_pol=1.5").exit_code == 2);
    CHECK(run_cli("budget --set nosuch.key=1").exit_code == 2);
    CHECK(run_cli("nosuchcommand").exit_code == 2);

    fs::path bad = temp_file("bad.cfg");
    {
        std::ofstream out(bad);
        out << "[budget]\nmystery = 1\n";
    }
    RunResult r = run_cli("budget --scenario " + bad.string());
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("unknown key") != std::string::npos);
    fs::remove(bad);
}

TEST_CASE("cli: no violation exits 3") {
    RunResult r = run_cli("required-events --set chsh.atom_atom_visibility=0.5");
    CHECK(r.exit_code == 3);
    CHECK(r.output.find("no finite event count") != std::string::npos);
}

TEST_CASE("cli: --out writes the file verbatim") {
    fs::path out_path = temp_file("sweep.csv");
    std::string args = "sweep --variable observable_visibility --from 0.72 --to 0.95 "
                       "--steps 12 --out " + out_path.string();
    RunResult r = run_cli(args);
    CHECK(r.exit_code == 0);
    std::string content = slurp(out_path);
    CHECK(content.rfind("observable_visibility,", 0) == 0);

    // identical invocation, byte-identical file
    fs::path out_path2 = temp_file("sweep2.csv");
    run_cli("sweep --variable observable_visibility --from 0.72 --to 0.95 --steps 12 --out " +
            out_path2.string());
    CHECK(slurp(out_path2) == content);
    fs::remove(out_path);
    fs::remove(out_path2);
}

TEST_CASE("cli: montecarlo is reproducible for a fixed seed") {
    std::string args = "montecarlo --events 20000 --replicas 4 --seed 31415";
    RunResult a = run_cli(args);
    RunResult b = run_cli(args);
    CHECK(a.exit_code == 0);
    CHECK(a.output == b.output);
    CHECK(a.output.find("s_empirical") != std::string::npos);

    RunResult c = run_cli("montecarlo --events 20000 --replicas 4 --seed 31416");
    CHECK(c.output != a.output);
}

TEST_CASE("cli: shipped scenario samples parse and stay current") {
    fs::path dir = fs::path(BELLFEAS_SCENARIO_DIR);
    RunResult plain = run_cli("budget");
    RunResult from_file = run_cli("budget --scenario " + (dir / "default.cfg").string());
    CHECK(from_file.exit_code == 0);
    // the fully written-out sample must equal the built-in defaults
    CHECK(from_file.output == plain.output);

    CHECK(run_cli("chsh --scenario " + (dir / "ionization.cfg").string()).exit_code == 0);
    CHECK(run_cli("chsh --scenario " + (dir / "ionization-curve.cfg").string()).exit_code == 0);
}

TEST_CASE("cli: full report contains every section") {
    RunResult r = run_cli("report --events 8000 --replicas 2 --seed 5");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("budget.") != std::string::npos);
    CHECK(r.output.find("chsh.") != std::string::npos);
    CHECK(r.output.find("schedule.") != std::string::npos);
    CHECK(r.output.find("montecarlo.") != std::string::npos);
}
