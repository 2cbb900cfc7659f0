#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "bellfeas/chsh.hpp"
#include "bellfeas/scenario.hpp"

namespace bellfeas {

/// One-dimensional sweep of a CHSH feasibility curve. Besides any scalar
/// scenario key (swept through the full error-budget chain), two derived
/// axes are supported:
///   observable_visibility — the visibility actually seen through a
///     symmetric readout; it fully determines the fluorescence statistics,
///     so S = 2 sqrt(2) v regardless of how V and a_det compose it.
///   p_d — the combined ionization fragment probability, swept with the
///     pre-readout contrast V (2 a_stirap - 1)^2 held fixed at the
///     scenario's value.
struct SweepSpec {
    std::string variable;
    double lo = 0.0;
    double hi = 1.0;
    std::uint64_t steps = 2;
    Scenario scenario;

    void validate() const {
        if (!(lo < hi)) throw std::invalid_argument("sweep range needs lo < hi");
        if (steps < 2) throw std::invalid_argument("sweep needs at least 2 steps");
        if (variable != "observable_visibility" && variable != "p_d" &&
            detail::find_field(variable) == nullptr) {
            throw std::invalid_argument("sweep variable '" + variable +
                                        "' is neither a derived axis nor a scenario key");
        }
    }
};

struct SweepRow {
    double value = 0.0;
    double s = 0.0;
    double delta_s_coefficient = 0.0; // dS = coeff / sqrt(N)
    std::optional<std::uint64_t> n_required;
};

struct SweepResult {
    std::string variable;
    std::vector<SweepRow> rows;
};

namespace detail {

inline std::array<JointDistribution, 4> sweep_distributions(const SweepSpec& spec,
                                                            double value) {
    const Scenario& sc = spec.scenario;
    if (spec.variable == "observable_visibility") {
        WernerState state(Visibility(value), BellStateLabel::PsiMinus);
        FluorescenceModel ideal{1.0, 1.0, 1.0};
        return chsh_distributions(state, ideal, sc.chsh_settings());
    }
    if (spec.variable == "p_d") {
        double contrast = 2.0 * sc.detection.a_stirap - 1.0;
        double v_fixed = sc.resolved_atom_atom_visibility().value() * contrast * contrast;
        WernerState state(Visibility(v_fixed), BellStateLabel::PsiMinus);
        const auto settings = sc.chsh_settings().settings();
        return {ionization_joint(state, 1.0, value, settings[0]),
                ionization_joint(state, 1.0, value, settings[1]),
                ionization_joint(state, 1.0, value, settings[2]),
                ionization_joint(state, 1.0, value, settings[3])};
    }
    Scenario varied = sc;
    const FieldDesc* field = find_field(spec.variable);
    if (field->kind != FieldKind::Real && field->kind != FieldKind::OptionalReal) {
        throw std::invalid_argument("sweep variable '" + spec.variable + "' is not a real scalar");
    }
    field->set_real(varied, value);
    varied.validate();
    return chsh_distributions(varied.resolved_state(), varied.detection_model(),
                              varied.chsh_settings());
}

} // namespace detail

inline SweepResult run_sweep(const SweepSpec& spec,
                             CountDeviation deviation = CountDeviation::CountScaled) {
    spec.validate();
    SweepResult result;
    result.variable = spec.variable;
    double k = spec.scenario.chsh.k_sigma;
    for (std::uint64_t i = 0; i < spec.steps; ++i) {
        double value = spec.lo + (spec.hi - spec.lo) * static_cast<double>(i) /
                                     static_cast<double>(spec.steps - 1);
        auto dists = detail::sweep_distributions(spec, value);
        SweepRow row;
        row.value = value;
        row.s = s_from_distributions(dists);
        row.delta_s_coefficient = delta_s_coefficient(dists, deviation);
        if (row.s > 2.0) {
            row.n_required = required_events(dists, k, deviation);
        }
        result.rows.push_back(row);
    }
    return result;
}

namespace detail {

inline std::string format_g9(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

} // namespace detail

/// CSV form: header row, one row per step, LF endings, 9 significant
/// digits. Rows where the model does not violate the inequality carry an
/// empty n_required and status no_violation.
inline std::string to_csv(const SweepResult& result) {
    std::string out = result.variable + ",s,delta_s_coefficient,n_required,status\n";
    for (const auto& row : result.rows) {
        out += detail::format_g9(row.value);
        out += ",";
        out += detail::format_g9(row.s);
        out += ",";
        out += detail::format_g9(row.delta_s_coefficient);
        out += ",";
        if (row.n_required) out += std::to_string(*row.n_required);
        out += ",";
        out += row.n_required ? "ok" : "no_violation";
        out += "\n";
    }
    return out;
}

} // namespace bellfeas
