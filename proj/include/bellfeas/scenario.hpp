#pragma once

#include <charconv>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bellfeas/chsh.hpp"
#include "bellfeas/detection.hpp"
#include "bellfeas/schedule.hpp"
#include "bellfeas/swap_chain.hpp"

namespace bellfeas {

class scenario_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Full experiment configuration. Every default is the design value of
/// the 300 m two-trap setup this tool models; keys carry their unit in
/// the name so a scenario file is unambiguous on its own.
struct Scenario {
    struct Budget {
        double e_exc = 0.005;
        double e_pol = 0.01;
        double e_bsm = 0.03;
    } budget;

    struct Link {
        double eta_1 = 0.78e-3;
        double eta_2 = 1.2e-3;
        double dark_rate_cps = 50.0;
        double window_ns = 40.0;
    } link;

    struct Detection {
        std::string model = "fluorescence"; // fluorescence | ionization
        double a_det = 0.95;
        double a_stirap = 0.9725;
        double a_hf = 0.978;
        double p_ionize = 0.99;
        double p_e = 0.85;
        double p_ion = 0.65;
    } detection;

    struct Chsh {
        double alpha_deg = 0.0;
        double alpha_prime_deg = 45.0;
        double beta_deg = 22.5;
        double beta_prime_deg = -22.5;
        double k_sigma = 3.0;
        /// When set, bypasses the error-budget chain and fixes the
        /// atom-atom visibility used by the CHSH and sweep commands.
        std::optional<double> atom_atom_visibility;
    } chsh;

    struct Cycle {
        double prep_us = 5.0;
        double cooling_per_cycle_us = 10.0;
        double fiber_length_m = 200.0;
        double fiber_speed_fraction = 2.0 / 3.0;
        double occupancy_1 = 0.5;
        double occupancy_2 = 0.5;
    } cycle;

    struct Timeline {
        double basis_choice_ns = 100.0;
        double stirap_ns = 120.0;
        double decoherence_ns = 200.0;
        double fragment_flight_ns = 500.0;
        double separation_m = 300.0;
    } timeline;

    struct Run {
        bool second_bell_state = false;
    } run;

    struct MonteCarlo {
        std::uint64_t seed = 1;
        std::uint64_t events = 1000000;
        std::uint64_t replicas = 16;
    } montecarlo;

    // ---- conversions to the library types ----

    ErrorBudget error_budget() const { return {budget.e_exc, budget.e_pol, budget.e_bsm}; }

    LinkModel link_model() const {
        return {link.eta_1, link.eta_2, link.dark_rate_cps, link.window_ns * 1e-9};
    }

    FluorescenceModel fluorescence_model() const {
        return {detection.a_stirap, detection.a_hf, detection.a_det};
    }

    IonizationModel ionization_model() const {
        return {detection.a_stirap, detection.p_ionize, detection.p_e, detection.p_ion};
    }

    DetectionModel detection_model() const {
        if (detection.model == "fluorescence") return fluorescence_model();
        return ionization_model();
    }

    ChshSettings chsh_settings() const {
        return {chsh.alpha_deg, chsh.alpha_prime_deg, chsh.beta_deg, chsh.beta_prime_deg};
    }

    CycleModel cycle_model() const {
        return {cycle.prep_us * 1e-6,  cycle.cooling_per_cycle_us * 1e-6,
                cycle.fiber_length_m,  cycle.fiber_speed_fraction,
                cycle.occupancy_1,     cycle.occupancy_2};
    }

    DetectionTimeline detection_timeline() const {
        return {timeline.basis_choice_ns * 1e-9, timeline.stirap_ns * 1e-9,
                timeline.decoherence_ns * 1e-9, timeline.fragment_flight_ns * 1e-9};
    }

    /// Atom-atom visibility: the explicit override when present, else the
    /// output of the full error-budget chain.
    Visibility resolved_atom_atom_visibility(
        DarkFractionConvention convention = DarkFractionConvention::FractionOfAll) const {
        if (chsh.atom_atom_visibility) return Visibility(*chsh.atom_atom_visibility);
        return atom_atom_state(error_budget(), link_model(), convention).visibility;
    }

    WernerState resolved_state(
        DarkFractionConvention convention = DarkFractionConvention::FractionOfAll) const {
        return WernerState(resolved_atom_atom_visibility(convention), BellStateLabel::PsiMinus);
    }

    /// Checks every invariant; messages name the offending key.
    void validate() const;
};

namespace detail {

enum class FieldKind { Real, Count, Flag, Name, OptionalReal };

struct FieldDesc {
    const char* section;
    const char* key;
    FieldKind kind;
    std::function<std::string(const Scenario&)> get;
    std::function<void(Scenario&, double)> set_real;
    std::function<void(Scenario&, std::uint64_t)> set_count;
    std::function<void(Scenario&, bool)> set_flag;
    std::function<void(Scenario&, const std::string&)> set_name;

    std::string full_key() const { return std::string(section) + "." + key; }
};

inline std::string format_real(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    (void)ec;
    return std::string(buf, ptr);
}

template <typename Sub>
FieldDesc real_field(const char* section, const char* key, Sub Scenario::*sub,
                     double Sub::*member) {
    FieldDesc f;
    f.section = section;
    f.key = key;
    f.kind = FieldKind::Real;
    f.get = [=](const Scenario& s) { return format_real(s.*sub.*member); };
    f.set_real = [=](Scenario& s, double v) { s.*sub.*member = v; };
    return f;
}

template <typename Sub>
FieldDesc count_field(const char* section, const char* key, Sub Scenario::*sub,
                      std::uint64_t Sub::*member) {
    FieldDesc f;
    f.section = section;
    f.key = key;
    f.kind = FieldKind::Count;
    f.get = [=](const Scenario& s) { return std::to_string(s.*sub.*member); };
    f.set_count = [=](Scenario& s, std::uint64_t v) { s.*sub.*member = v; };
    return f;
}

inline const std::vector<FieldDesc>& scenario_fields() {
    static const std::vector<FieldDesc> fields = [] {
        std::vector<FieldDesc> v;
        v.push_back(real_field("budget", "e_exc", &Scenario::budget, &Scenario::Budget::e_exc));
        v.push_back(real_field("budget", "e_pol", &Scenario::budget, &Scenario::Budget::e_pol));
        v.push_back(real_field("budget", "e_bsm", &Scenario::budget, &Scenario::Budget::e_bsm));

        v.push_back(real_field("link", "eta_1", &Scenario::link, &Scenario::Link::eta_1));
        v.push_back(real_field("link", "eta_2", &Scenario::link, &Scenario::Link::eta_2));
        v.push_back(real_field("link", "dark_rate_cps", &Scenario::link,
                               &Scenario::Link::dark_rate_cps));
        v.push_back(real_field("link", "window_ns", &Scenario::link, &Scenario::Link::window_ns));

        FieldDesc model;
        model.section = "detection";
        model.key = "model";
        model.kind = FieldKind::Name;
        model.get = [](const Scenario& s) { return s.detection.model; };
        model.set_name = [](Scenario& s, const std::string& v) { s.detection.model = v; };
        v.push_back(model);
        v.push_back(real_field("detection", "a_det", &Scenario::detection,
                               &Scenario::Detection::a_det));
        v.push_back(real_field("detection", "a_stirap", &Scenario::detection,
                               &Scenario::Detection::a_stirap));
        v.push_back(real_field("detection", "a_hf", &Scenario::detection,
                               &Scenario::Detection::a_hf));
        v.push_back(real_field("detection", "p_ionize", &Scenario::detection,
                               &Scenario::Detection::p_ionize));
        v.push_back(real_field("detection", "p_e", &Scenario::detection,
                               &Scenario::Detection::p_e));
        v.push_back(real_field("detection", "p_ion", &Scenario::detection,
                               &Scenario::Detection::p_ion));

        v.push_back(real_field("chsh", "alpha_deg", &Scenario::chsh,
                               &Scenario::Chsh::alpha_deg));
        v.push_back(real_field("chsh", "alpha_prime_deg", &Scenario::chsh,
                               &Scenario::Chsh::alpha_prime_deg));
        v.push_back(real_field("chsh", "beta_deg", &Scenario::chsh, &Scenario::Chsh::beta_deg));
        v.push_back(real_field("chsh", "beta_prime_deg", &Scenario::chsh,
                               &Scenario::Chsh::beta_prime_deg));
        v.push_back(real_field("chsh", "k_sigma", &Scenario::chsh, &Scenario::Chsh::k_sigma));
        FieldDesc vis;
        vis.section = "chsh";
        vis.key = "atom_atom_visibility";
        vis.kind = FieldKind::OptionalReal;
        vis.get = [](const Scenario& s) {
            return s.chsh.atom_atom_visibility ? format_real(*s.chsh.atom_atom_visibility)
                                               : std::string();
        };
        vis.set_real = [](Scenario& s, double x) { s.chsh.atom_atom_visibility = x; };
        v.push_back(vis);

        v.push_back(real_field("cycle", "prep_us", &Scenario::cycle, &Scenario::Cycle::prep_us));
        v.push_back(real_field("cycle", "cooling_per_cycle_us", &Scenario::cycle,
                               &Scenario::Cycle::cooling_per_cycle_us));
        v.push_back(real_field("cycle", "fiber_length_m", &Scenario::cycle,
                               &Scenario::Cycle::fiber_length_m));
        v.push_back(real_field("cycle", "fiber_speed_fraction", &Scenario::cycle,
                               &Scenario::Cycle::fiber_speed_fraction));
        v.push_back(real_field("cycle", "occupancy_1", &Scenario::cycle,
                               &Scenario::Cycle::occupancy_1));
        v.push_back(real_field("cycle", "occupancy_2", &Scenario::cycle,
                               &Scenario::Cycle::occupancy_2));

        v.push_back(real_field("timeline", "basis_choice_ns", &Scenario::timeline,
                               &Scenario::Timeline::basis_choice_ns));
        v.push_back(real_field("timeline", "stirap_ns", &Scenario::timeline,
                               &Scenario::Timeline::stirap_ns));
        v.push_back(real_field("timeline", "decoherence_ns", &Scenario::timeline,
                               &Scenario::Timeline::decoherence_ns));
        v.push_back(real_field("timeline", "fragment_flight_ns", &Scenario::timeline,
                               &Scenario::Timeline::fragment_flight_ns));
        v.push_back(real_field("timeline", "separation_m", &Scenario::timeline,
                               &Scenario::Timeline::separation_m));

        FieldDesc second;
        second.section = "run";
        second.key = "second_bell_state";
        second.kind = FieldKind::Flag;
        second.get = [](const Scenario& s) {
            return std::string(s.run.second_bell_state ? "true" : "false");
        };
        second.set_flag = [](Scenario& s, bool b) { s.run.second_bell_state = b; };
        v.push_back(second);

        v.push_back(count_field("montecarlo", "seed", &Scenario::montecarlo,
                                &Scenario::MonteCarlo::seed));
        v.push_back(count_field("montecarlo", "events", &Scenario::montecarlo,
                                &Scenario::MonteCarlo::events));
        v.push_back(count_field("montecarlo", "replicas", &Scenario::montecarlo,
                                &Scenario::MonteCarlo::replicas));
        return v;
    }();
    return fields;
}

inline const FieldDesc* find_field(std::string_view full_key) {
    for (const auto& f : scenario_fields()) {
        if (f.full_key() == full_key) return &f;
    }
    return nullptr;
}

inline std::string_view trim(std::string_view s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_real(std::string_view text, const std::string& where) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw scenario_error(where + ": expected a number, got '" + std::string(text) + "'");
    }
    return value;
}

inline std::uint64_t parse_count(std::string_view text, const std::string& where) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw scenario_error(where + ": expected a nonnegative integer, got '" +
                             std::string(text) + "'");
    }
    return value;
}

inline void assign_field(Scenario& scenario, const FieldDesc& field, std::string_view value,
                         const std::string& where) {
    switch (field.kind) {
        case FieldKind::Real:
        case FieldKind::OptionalReal:
            field.set_real(scenario, parse_real(value, where));
            break;
        case FieldKind::Count:
            field.set_count(scenario, parse_count(value, where));
            break;
        case FieldKind::Flag:
            if (value == "true") {
                field.set_flag(scenario, true);
            } else if (value == "false") {
                field.set_flag(scenario, false);
            } else {
                throw scenario_error(where + ": expected true or false, got '" +
                                     std::string(value) + "'");
            }
            break;
        case FieldKind::Name:
            if (value != "fluorescence" && value != "ionization") {
                throw scenario_error(where + ": expected fluorescence or ionization, got '" +
                                     std::string(value) + "'");
            }
            field.set_name(scenario, std::string(value));
            break;
    }
}

} // namespace detail

/// Parses a scenario document: '[section]' headers, 'key = value' lines,
/// '#' comments. Unknown sections or keys and duplicate keys are errors;
/// anything omitted keeps its default.
inline Scenario parse_scenario(const std::string& text) {
    Scenario scenario;
    std::set<std::string> seen;
    std::string section;
    int line_no = 0;
    std::istringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line(raw);
        if (size_t hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = detail::trim(line);
        if (line.empty()) continue;
        std::string where = "line " + std::to_string(line_no);

        if (line.front() == '[') {
            if (line.back() != ']') throw scenario_error(where + ": unterminated section header");
            section = std::string(detail::trim(line.substr(1, line.size() - 2)));
            bool known = false;
            for (const auto& f : detail::scenario_fields()) {
                if (section == f.section) { known = true; break; }
            }
            if (!known) throw scenario_error(where + ": unknown section [" + section + "]");
            continue;
        }

        size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw scenario_error(where + ": expected 'key = value'");
        }
        std::string key(detail::trim(line.substr(0, eq)));
        std::string_view value = detail::trim(line.substr(eq + 1));
        if (section.empty()) throw scenario_error(where + ": key outside any [section]");
        std::string full_key = section + "." + key;
        const detail::FieldDesc* field = detail::find_field(full_key);
        if (!field) throw scenario_error(where + ": unknown key " + full_key);
        if (!seen.insert(full_key).second) {
            throw scenario_error(where + ": duplicate key " + full_key);
        }
        detail::assign_field(scenario, *field, value, where + " (" + full_key + ")");
    }
    scenario.validate();
    return scenario;
}

/// Applies one 'section.key=value' override.
inline void apply_override(Scenario& scenario, const std::string& assignment) {
    size_t eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw scenario_error("override '" + assignment + "' must have the form section.key=value");
    }
    std::string key(detail::trim(std::string_view(assignment).substr(0, eq)));
    std::string_view value = detail::trim(std::string_view(assignment).substr(eq + 1));
    const detail::FieldDesc* field = detail::find_field(key);
    if (!field) throw scenario_error("override: unknown key " + key);
    detail::assign_field(scenario, *field, value, "override " + key);
}

/// Emits the document form: fixed section and key order, shortest
/// round-trip number formatting, LF endings. parse(emit(s)) == s.
inline std::string emit_scenario(const Scenario& scenario) {
    std::string out;
    const char* current_section = "";
    for (const auto& f : detail::scenario_fields()) {
        if (f.kind == detail::FieldKind::OptionalReal && f.get(scenario).empty()) continue;
        if (std::string_view(current_section) != f.section) {
            if (*current_section != '\0') out += "\n";
            out += "[";
            out += f.section;
            out += "]\n";
            current_section = f.section;
        }
        out += f.key;
        out += " = ";
        out += f.get(scenario);
        out += "\n";
    }
    return out;
}

inline void Scenario::validate() const {
    auto probability = [](double x, const char* key) {
        if (!(x >= 0.0 && x <= 1.0)) {
            throw scenario_error(std::string(key) + ": probability out of range [0, 1]");
        }
    };
    auto accuracy = [](double x, const char* key) {
        if (!(x >= 0.5 && x <= 1.0)) {
            throw scenario_error(std::string(key) + ": accuracy out of range [0.5, 1]");
        }
    };
    auto nonnegative = [](double x, const char* key) {
        if (!(x >= 0.0)) throw scenario_error(std::string(key) + ": must be >= 0");
    };

    probability(budget.e_exc, "budget.e_exc");
    probability(budget.e_pol, "budget.e_pol");
    probability(budget.e_bsm, "budget.e_bsm");

    probability(link.eta_1, "link.eta_1");
    probability(link.eta_2, "link.eta_2");
    nonnegative(link.dark_rate_cps, "link.dark_rate_cps");
    if (!(link.window_ns > 0.0)) throw scenario_error("link.window_ns: must be > 0");

    if (detection.model != "fluorescence" && detection.model != "ionization") {
        throw scenario_error("detection.model: expected fluorescence or ionization");
    }
    accuracy(detection.a_det, "detection.a_det");
    accuracy(detection.a_stirap, "detection.a_stirap");
    accuracy(detection.a_hf, "detection.a_hf");
    probability(detection.p_ionize, "detection.p_ionize");
    probability(detection.p_e, "detection.p_e");
    probability(detection.p_ion, "detection.p_ion");

    try {
        chsh_settings().validate();
    } catch (const std::domain_error& e) {
        throw scenario_error(std::string("chsh angles: ") + e.what());
    }
    if (!(chsh.k_sigma > 0.0)) throw scenario_error("chsh.k_sigma: must be > 0");
    if (chsh.atom_atom_visibility) {
        probability(*chsh.atom_atom_visibility, "chsh.atom_atom_visibility");
    }

    nonnegative(cycle.prep_us, "cycle.prep_us");
    nonnegative(cycle.cooling_per_cycle_us, "cycle.cooling_per_cycle_us");
    nonnegative(cycle.fiber_length_m, "cycle.fiber_length_m");
    if (!(cycle.fiber_speed_fraction > 0.0 && cycle.fiber_speed_fraction <= 1.0)) {
        throw scenario_error("cycle.fiber_speed_fraction: must lie in (0, 1]");
    }
    probability(cycle.occupancy_1, "cycle.occupancy_1");
    probability(cycle.occupancy_2, "cycle.occupancy_2");

    nonnegative(timeline.basis_choice_ns, "timeline.basis_choice_ns");
    nonnegative(timeline.stirap_ns, "timeline.stirap_ns");
    nonnegative(timeline.decoherence_ns, "timeline.decoherence_ns");
    nonnegative(timeline.fragment_flight_ns, "timeline.fragment_flight_ns");
    if (!(timeline.separation_m > 0.0)) throw scenario_error("timeline.separation_m: must be > 0");
}

} // namespace bellfeas
