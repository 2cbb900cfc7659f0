#pragma once

#include <cstdio>
#include <string>
#include <thread>
#include <vector>

#include "bellfeas/montecarlo.hpp"
#include "bellfeas/scenario.hpp"
#include "bellfeas/schedule.hpp"
#include "bellfeas/sweep.hpp"

namespace bellfeas {

/// Published design figures for the default configuration. Report lines
/// that compute one of these quantities show the reference value next to
/// the computed one so drift is visible at a glance.
namespace reference {
inline constexpr const char* v_at_ph = "0.985";
inline constexpr const char* swap_fidelity = "0.956";
inline constexpr const char* p_true = "2.34e-07";
inline constexpr const char* p_dark = "3.96e-09";
inline constexpr const char* p_double_dark = "4e-12";
inline constexpr const char* e_dc = "0.0168";
inline constexpr const char* f_at_at = "0.944";
inline constexpr const char* v_at_at = "0.925";
inline constexpr const char* s_fluorescence = "2.12";
inline constexpr const char* s_ionization = "2.10";
inline constexpr const char* n_fluorescence = "2600";
inline constexpr const char* n_ionization = "3470";
inline constexpr const char* cycle_us = "17";
inline constexpr const char* rate_full_khz = "58.8";
inline constexpr const char* rate_eff_khz = "14.7";
inline constexpr const char* per_event = "about 5 min";
inline constexpr const char* total_days = "9 to 12 days";
inline constexpr const char* readout_ns = "below 1000";
} // namespace reference

enum class ReportFormat { Text, Csv };

/// key/value lines with an optional reference figure, renderable as an
/// aligned text block or as key,value,reference CSV.
class Report {
public:
    void add(std::string key, std::string value, std::string ref = "") {
        lines_.push_back({std::move(key), std::move(value), std::move(ref)});
    }

    void add(std::string key, double value, std::string ref = "") {
        add(std::move(key), detail::format_g9(value), std::move(ref));
    }

    void add_count(std::string key, std::uint64_t value, std::string ref = "") {
        add(std::move(key), std::to_string(value), std::move(ref));
    }

    void blank() { lines_.push_back({"", "", ""}); }

    /// Appends another report's lines with their keys prefixed.
    void append_prefixed(const Report& other, const std::string& prefix) {
        for (const auto& l : other.lines_) {
            if (l.key.empty() && l.value.empty()) {
                blank();
            } else {
                lines_.push_back({prefix + "." + l.key, l.value, l.ref});
            }
        }
    }

    std::string render(ReportFormat format) const {
        return format == ReportFormat::Text ? to_text() : to_csv();
    }

    std::string to_text() const {
        size_t key_width = 0, value_width = 0;
        for (const auto& l : lines_) {
            key_width = std::max(key_width, l.key.size());
            value_width = std::max(value_width, l.value.size());
        }
        std::string out;
        for (const auto& l : lines_) {
            if (l.key.empty() && l.value.empty()) {
                out += "\n";
                continue;
            }
            out += l.key;
            out.append(key_width - l.key.size() + 2, ' ');
            out += l.value;
            if (!l.ref.empty()) {
                out.append(value_width - l.value.size() + 2, ' ');
                out += "[reference " + l.ref + "]";
            }
            out += "\n";
        }
        return out;
    }

    std::string to_csv() const {
        std::string out = "key,value,reference\n";
        for (const auto& l : lines_) {
            if (l.key.empty() && l.value.empty()) continue;
            out += l.key + "," + l.value + "," + l.ref + "\n";
        }
        return out;
    }

private:
    struct Line {
        std::string key;
        std::string value;
        std::string ref;
    };
    std::vector<Line> lines_;
};

/// Error-budget chain from emission to the heralded atom-atom state, with
/// every intermediate quantity.
inline Report run_budget(const Scenario& scenario) {
    auto chain = swap_chain_breakdown(scenario.error_budget(), scenario.link_model());
    Report r;
    r.add("atom_photon_visibility", chain.v_at_ph.value(), reference::v_at_ph);
    r.add("swap_fidelity", chain.f_swap.value(), reference::swap_fidelity);
    r.add("herald_p_true", chain.herald.p_true, reference::p_true);
    r.add("herald_p_dark", chain.herald.p_dark, reference::p_dark);
    r.add("herald_p_double_dark", chain.herald.p_double_dark, reference::p_double_dark);
    r.add("dark_fraction_of_all", chain.herald.e_dc, reference::e_dc);
    r.add("dark_to_true_ratio",
          chain.herald.dark_fraction(DarkFractionConvention::RatioToTrue));
    r.add("atom_atom_fidelity", chain.f_at_at.value(), reference::f_at_at);
    r.add("atom_atom_visibility", chain.v_at_at.value(), reference::v_at_at);
    return r;
}

/// S through both routes, its uncertainty scaling, and the event count
/// needed for the scenario's k-sigma target.
inline Report run_chsh(const Scenario& scenario) {
    Report r;
    WernerState state = scenario.resolved_state();
    DetectionModel model = scenario.detection_model();
    double k = scenario.chsh.k_sigma;
    r.add("detection_model", scenario.detection.model);
    r.add("atom_atom_visibility", state.visibility.value(),
          scenario.chsh.atom_atom_visibility ? "" : reference::v_at_at);

    auto dists = chsh_distributions(state, model, scenario.chsh_settings());
    double s = s_from_distributions(dists);
    bool fluorescence = scenario.detection.model == "fluorescence";
    if (fluorescence) {
        double a = scenario.detection.a_det;
        double contrast = (2.0 * a - 1.0) * (2.0 * a - 1.0);
        r.add("readout_accuracy", a);
        r.add("observable_visibility", state.visibility.value() * contrast);
        r.add("s_closed_form", s_fluorescence_closed(state.visibility, a),
              reference::s_fluorescence);
    } else {
        double p_d = effective_p_d(scenario.ionization_model());
        r.add("effective_p_d", p_d);
        if (ionization_closed_form_valid(state.visibility, scenario.detection.a_stirap, p_d)) {
            r.add("s_closed_form",
                  s_ionization_closed(state.visibility, scenario.detection.a_stirap, p_d),
                  reference::s_ionization);
        } else {
            r.add("s_closed_form", "outside validity range, see s_general");
        }
    }
    r.add("s_general", s);
    r.add("delta_s_coefficient", delta_s_coefficient(dists));
    r.add("k_sigma", k);
    if (s > 2.0) {
        std::uint64_t n = required_events(dists, k);
        r.add_count("n_required", n,
                    fluorescence ? reference::n_fluorescence : reference::n_ionization);
        r.add("delta_s_at_n_required", delta_s(dists, n));
    } else {
        r.add("n_required", "none, S <= 2");
    }
    return r;
}

/// Just the required-event solve; throws no_violation_error when S <= 2.
inline Report run_required_events(const Scenario& scenario) {
    Report r;
    WernerState state = scenario.resolved_state();
    auto dists = chsh_distributions(state, scenario.detection_model(),
                                    scenario.chsh_settings());
    double k = scenario.chsh.k_sigma;
    std::uint64_t n = required_events(dists, k);
    r.add("detection_model", scenario.detection.model);
    r.add("s_general", s_from_distributions(dists));
    r.add("k_sigma", k);
    r.add_count("n_required", n,
                scenario.detection.model == "fluorescence" ? reference::n_fluorescence
                                                           : reference::n_ionization);
    return r;
}

/// Rates, per-event time, total measurement time for both readout
/// methods, and the space-time locality margin.
inline Report run_schedule(const Scenario& scenario) {
    Report r;
    CycleModel cycle = scenario.cycle_model();
    double t_cycle = cycle_time(cycle);
    double rate_full = 1.0 / t_cycle;
    double rate = effective_rate(cycle);
    HeraldStats herald = herald_stats(scenario.link_model());

    r.add("cycle_time_us", t_cycle * 1e6, reference::cycle_us);
    r.add("repetition_rate_khz", rate_full / 1e3, reference::rate_full_khz);
    r.add("effective_rate_khz", rate / 1e3, reference::rate_eff_khz);
    r.add("herald_probability", herald.p_true, reference::p_true);

    RunPlan one_event{herald.p_true, 1, scenario.run.second_bell_state};
    double per_event = measurement_time(one_event, rate);
    r.add("seconds_per_event", per_event, reference::per_event);
    r.blank();

    WernerState state = scenario.resolved_state();
    struct ModelRow {
        const char* name;
        DetectionModel model;
    };
    std::vector<ModelRow> models = {{"fluorescence", scenario.fluorescence_model()},
                                    {"ionization", scenario.ionization_model()}};
    for (const auto& m : models) {
        auto dists = chsh_distributions(state, m.model, scenario.chsh_settings());
        std::string prefix = std::string(m.name) + "_";
        double s = s_from_distributions(dists);
        if (s > 2.0) {
            std::uint64_t n = required_events(dists, scenario.chsh.k_sigma);
            RunPlan plan{herald.p_true, n, scenario.run.second_bell_state};
            double total = measurement_time(plan, rate);
            r.add_count(prefix + "n_required", n);
            r.add(prefix + "measurement_days", seconds_to_days(total), reference::total_days);
        } else {
            r.add(prefix + "n_required", "none, S <= 2");
        }
    }
    r.blank();

    DetectionTimeline timeline = scenario.detection_timeline();
    r.add("readout_total_ns", timeline.total_s() * 1e9, reference::readout_ns);
    r.add("separation_m", scenario.timeline.separation_m);
    double margin = locality_margin(timeline, scenario.timeline.separation_m);
    r.add("locality_margin_ns", margin * 1e9);
    r.add("locality_closed", margin > 0.0 ? "yes" : "no");
    return r;
}

/// Seeded event-level simulation against the analytic expectations.
/// Always includes the herald dark-fraction mixing, so the simulated
/// pre-readout state is the swap output and the dark heralds themselves
/// reproduce the e_dc depolarization of the analytic chain.
inline Report run_montecarlo(const Scenario& scenario, unsigned n_threads = 0) {
    if (n_threads == 0) n_threads = std::max(1u, std::thread::hardware_concurrency());

    auto chain = swap_chain_breakdown(scenario.error_budget(), scenario.link_model());
    WernerState pre_dark(fidelity_to_visibility(chain.f_swap), BellStateLabel::PsiMinus);
    WernerState analytic_state = scenario.chsh.atom_atom_visibility
                                     ? scenario.resolved_state()
                                     : WernerState(chain.v_at_at, BellStateLabel::PsiMinus);

    SimulationPlan plan;
    plan.seed = scenario.montecarlo.seed;
    plan.n_events = scenario.montecarlo.events;
    plan.settings = scenario.chsh_settings();
    plan.detection = scenario.detection_model();
    if (scenario.chsh.atom_atom_visibility) {
        // explicit visibility override: simulate that state directly
        plan.state = analytic_state;
    } else {
        plan.state = pre_dark;
        plan.herald = chain.herald;
    }

    auto dists = chsh_distributions(analytic_state, plan.detection, plan.settings);
    double s_analytic = s_from_distributions(dists);

    Report r;
    r.add("seed", std::to_string(plan.seed));
    r.add_count("events", plan.n_events);
    r.add("detection_model", scenario.detection.model);
    r.add("dark_mixing", plan.herald ? "on" : "off");
    if (plan.herald) r.add("dark_fraction_analytic", plan.herald->e_dc, reference::e_dc);

    SimulationReport sim = simulate(plan);
    r.blank();
    const char* names[4] = {"a_b", "ap_b", "a_bp", "ap_bp"};
    for (int i = 0; i < 4; ++i) {
        const SettingCounts& c = sim.counts[size_t(i)];
        double n = static_cast<double>(c.total());
        r.add(std::string("p_same_analytic_") + names[i], dists[size_t(i)].p_same());
        r.add(std::string("p_same_empirical_") + names[i],
              n > 0 ? static_cast<double>(c.n_uu + c.n_dd) / n : 0.0);
    }
    r.blank();
    r.add("s_analytic", s_analytic);
    r.add("s_empirical", sim.s_empirical);
    r.add("s_difference", sim.s_empirical - s_analytic);
    if (plan.herald) r.add("dark_fraction_empirical", sim.dark_fraction_empirical);

    if (scenario.montecarlo.replicas >= 2) {
        ReplicaScatter scatter = replicate(plan, scenario.montecarlo.replicas, n_threads);
        r.blank();
        r.add_count("replicas", scatter.n_replicas);
        r.add("s_mean_across_replicas", scatter.mean_s);
        r.add("s_std_across_replicas", scatter.std_s);
        if (plan.n_events % 4 == 0) {
            double ds_scaled = delta_s(dists, plan.n_events, CountDeviation::CountScaled);
            double ds_binomial = delta_s(dists, plan.n_events, CountDeviation::Binomial);
            r.add("delta_s_count_scaled", ds_scaled);
            r.add("delta_s_binomial", ds_binomial);
            r.add("std_ratio_to_count_scaled", scatter.std_s / ds_scaled);
            r.add("std_ratio_to_binomial", scatter.std_s / ds_binomial);
        }
    }
    return r;
}

/// Everything in one document.
inline Report run_full_report(const Scenario& scenario, unsigned n_threads = 0) {
    Report all;
    all.append_prefixed(run_budget(scenario), "budget");
    all.blank();
    all.append_prefixed(run_chsh(scenario), "chsh");
    all.blank();
    all.append_prefixed(run_schedule(scenario), "schedule");
    all.blank();
    all.append_prefixed(run_montecarlo(scenario, n_threads), "montecarlo");
    return all;
}

} // namespace bellfeas
