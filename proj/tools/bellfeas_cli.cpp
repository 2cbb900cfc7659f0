// bellfeas: feasibility numbers for a heralded two-atom Bell test.
//
// Subcommands chain the library modules: budget (error propagation to the
// atom-atom state), chsh (S and its uncertainty), required-events (sample
// size for a k-sigma violation), sweep (feasibility curves as CSV),
// montecarlo (seeded event-level cross-check), schedule (rates and
// measurement time), report (all of the above).
//
// Exit codes: 0 success, 2 parse or validation failure, 3 no violation
// (S <= 2) from required-events.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bellfeas/bellfeas.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadInput = 2;
constexpr int kExitNoViolation = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw bellfeas::scenario_error("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + out_path);
    out << content;
}

struct CommonOptions {
    std::string scenario_path;
    std::vector<std::string> overrides;
    std::string out_path;
    std::string format = "text";
    std::uint64_t seed = 0;
    std::uint64_t events = 0;
    std::uint64_t replicas = 0;
    bool seed_set = false;
    bool events_set = false;
    bool replicas_set = false;
};

bellfeas::Scenario load_scenario(const CommonOptions& opts) {
    bellfeas::Scenario scenario;
    if (!opts.scenario_path.empty()) {
        scenario = bellfeas::parse_scenario(read_file(opts.scenario_path));
    }
    for (const auto& assignment : opts.overrides) {
        bellfeas::apply_override(scenario, assignment);
    }
    if (opts.seed_set) scenario.montecarlo.seed = opts.seed;
    if (opts.events_set) scenario.montecarlo.events = opts.events;
    if (opts.replicas_set) scenario.montecarlo.replicas = opts.replicas;
    scenario.validate();
    return scenario;
}

bellfeas::ReportFormat report_format(const CommonOptions& opts) {
    return opts.format == "csv" ? bellfeas::ReportFormat::Csv : bellfeas::ReportFormat::Text;
}

void add_common_options(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--scenario", opts.scenario_path, "scenario document to load");
    cmd->add_option("--set", opts.overrides,
                    "override one key, e.g. --set budget.e_bsm=0.02 (repeatable)");
    cmd->add_option("--out", opts.out_path, "write the result here instead of stdout");
    cmd->add_option("--format", opts.format, "text or csv")
        ->check(CLI::IsMember({"text", "csv"}));
    cmd->add_option("--seed", opts.seed, "Monte Carlo seed")
        ->each([&](const std::string&) { opts.seed_set = true; });
    cmd->add_option("--events", opts.events, "Monte Carlo heralded events per replica")
        ->each([&](const std::string&) { opts.events_set = true; });
    cmd->add_option("--replicas", opts.replicas, "Monte Carlo replica count")
        ->each([&](const std::string&) { opts.replicas_set = true; });
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"feasibility engine for a heralded two-atom Bell test"};
    app.require_subcommand(1);

    CommonOptions opts;
    std::string sweep_variable;
    double sweep_from = 0.0, sweep_to = 1.0;
    std::uint64_t sweep_steps = 2;

    CLI::App* budget = app.add_subcommand("budget", "error-budget chain to the atom-atom state");
    CLI::App* chsh = app.add_subcommand("chsh", "S parameter, uncertainty, required events");
    CLI::App* required =
        app.add_subcommand("required-events", "events needed for a k-sigma violation");
    CLI::App* sweep = app.add_subcommand("sweep", "one-dimensional feasibility curve as CSV");
    CLI::App* montecarlo =
        app.add_subcommand("montecarlo", "seeded event-level simulation vs analytic values");
    CLI::App* schedule = app.add_subcommand("schedule", "rates, measurement time, locality");
    CLI::App* report = app.add_subcommand("report", "all sections in one document");

    for (CLI::App* cmd : {budget, chsh, required, sweep, montecarlo, schedule, report}) {
        add_common_options(cmd, opts);
    }
    sweep->add_option("--variable", sweep_variable,
                      "observable_visibility, p_d, or a scenario key like budget.e_bsm")
        ->required();
    sweep->add_option("--from", sweep_from, "lower end of the swept range")->required();
    sweep->add_option("--to", sweep_to, "upper end of the swept range")->required();
    sweep->add_option("--steps", sweep_steps, "number of rows, endpoints inclusive")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitBadInput;
    }

    try {
        bellfeas::Scenario scenario = load_scenario(opts);
        std::string output;

        if (budget->parsed()) {
            output = bellfeas::run_budget(scenario).render(report_format(opts));
        } else if (chsh->parsed()) {
            output = bellfeas::run_chsh(scenario).render(report_format(opts));
        } else if (required->parsed()) {
            output = bellfeas::run_required_events(scenario).render(report_format(opts));
        } else if (sweep->parsed()) {
            bellfeas::SweepSpec spec{sweep_variable, sweep_from, sweep_to, sweep_steps,
                                     scenario};
            output = bellfeas::to_csv(bellfeas::run_sweep(spec));
        } else if (montecarlo->parsed()) {
            output = bellfeas::run_montecarlo(scenario).render(report_format(opts));
        } else if (schedule->parsed()) {
            output = bellfeas::run_schedule(scenario).render(report_format(opts));
        } else if (report->parsed()) {
            output = bellfeas::run_full_report(scenario).render(report_format(opts));
        }

        write_output(opts.out_path, output);
        return kExitOk;
    } catch (const bellfeas::no_violation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoViolation;
    } catch (const bellfeas::scenario_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
