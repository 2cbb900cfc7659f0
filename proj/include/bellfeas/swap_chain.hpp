#pragma once

#include <stdexcept>

#include "bellfeas/quantum_state.hpp"

namespace bellfeas {

/// Error probabilities accumulated between photon emission and the
/// Bell-state measurement.
struct ErrorBudget {
    double e_exc = 0.0; // excited-state preparation error
    double e_pol = 0.0; // residual fiber polarization error
    double e_bsm = 0.0; // two-photon interference mismatch

    void validate() const {
        detail::require_probability(e_exc, "e_exc");
        detail::require_probability(e_pol, "e_pol");
        detail::require_probability(e_bsm, "e_bsm");
    }
};

/// Photon collection/transport efficiencies and detector noise of the
/// heralding link. The eta values are already-composed products of
/// generation and transmission efficiency per arm.
struct LinkModel {
    double eta1 = 0.0;          // photon arrival-and-detection probability, arm 1
    double eta2 = 0.0;          // photon arrival-and-detection probability, arm 2
    double dark_rate_cps = 0.0; // dark counts per second per detector
    double window_s = 1.0;      // coincidence time window, seconds

    void validate() const {
        detail::require_probability(eta1, "eta1");
        detail::require_probability(eta2, "eta2");
        if (dark_rate_cps < 0.0) throw std::domain_error("dark count rate must be >= 0");
        if (!(window_s > 0.0)) throw std::domain_error("coincidence window must be > 0");
    }
};

/// Two readings of the wrong-herald fraction. FractionOfAll is
/// p_dark / (p_true + p_dark), the fraction of wrong events among all
/// heralds; RatioToTrue is p_dark / p_true. They differ at the third
/// decimal for realistic inputs and both are exposed so either reading
/// can be reproduced.
enum class DarkFractionConvention {
    FractionOfAll,
    RatioToTrue,
};

/// Per-attempt herald probabilities and the dark-contamination fraction.
struct HeraldStats {
    double p_true = 0.0;        // two-photon coincidence from real photons
    double p_dark = 0.0;        // one real photon plus one dark count
    double p_double_dark = 0.0; // two dark counts; computed only to confirm negligibility
    double e_dc = 0.0;          // wrong-herald fraction, FractionOfAll convention

    double dark_fraction(DarkFractionConvention convention) const {
        return convention == DarkFractionConvention::FractionOfAll ? e_dc : p_dark / p_true;
    }
};

/// Atom-photon visibility after preparation and fiber transport:
/// V = (1 - e_exc)(1 - e_pol).
inline Visibility atom_photon_visibility(const ErrorBudget& budget) {
    budget.validate();
    return Visibility((1.0 - budget.e_exc) * (1.0 - budget.e_pol));
}

/// Fidelity of the heralded atom-atom state produced by the swap:
/// (1 - e_bsm)(1/4 + 3 V^2 / 4) + e_bsm / 4. Equal to converting V^2 to a
/// fidelity and depolarizing it by e_bsm.
inline Fidelity swap_fidelity(Visibility v_at_ph, double e_bsm) {
    detail::require_probability(e_bsm, "e_bsm");
    double v = v_at_ph.value();
    return Fidelity((1.0 - e_bsm) * (0.25 + 0.75 * v * v) + e_bsm / 4.0);
}

/// Herald probabilities per attempt. Only one of the four photonic Bell
/// states is detected, hence the factor 1/4 on the true coincidence.
/// A wrong herald pairs one real photon with one dark count inside the
/// coincidence window.
inline HeraldStats herald_stats(const LinkModel& link) {
    link.validate();
    HeraldStats h;
    h.p_true = link.eta1 * link.eta2 / 4.0;
    double dc = link.dark_rate_cps * link.window_s;
    h.p_dark = (link.eta1 + link.eta2) * dc;
    h.p_double_dark = dc * dc;
    if (h.p_true + h.p_dark <= 0.0) {
        throw std::domain_error("herald_stats: p_true + p_dark is zero, dark fraction undefined");
    }
    h.e_dc = h.p_dark / (h.p_true + h.p_dark);
    return h;
}

/// Stage-by-stage record of the error-budget chain, kept for reporting.
struct SwapChainBreakdown {
    Visibility v_at_ph;
    Fidelity f_swap;
    HeraldStats herald;
    double e_dc_applied = 0.0;
    Fidelity f_at_at;
    Visibility v_at_at;
};

/// Full chain from emission errors to the heralded atom-atom state:
/// atom-photon visibility, swap fidelity, dark-count depolarization,
/// back to visibility. The result is always a Psi- Werner state.
inline SwapChainBreakdown swap_chain_breakdown(
    const ErrorBudget& budget, const LinkModel& link,
    DarkFractionConvention convention = DarkFractionConvention::FractionOfAll) {
    Visibility v_at_ph = atom_photon_visibility(budget);
    Fidelity f_swap = swap_fidelity(v_at_ph, budget.e_bsm);
    HeraldStats herald = herald_stats(link);
    double e_dc = herald.dark_fraction(convention);
    Fidelity f_at_at = depolarize(f_swap, e_dc);
    return SwapChainBreakdown{v_at_ph, f_swap, herald, e_dc,
                              f_at_at, fidelity_to_visibility(f_at_at)};
}

inline WernerState atom_atom_state(
    const ErrorBudget& budget, const LinkModel& link,
    DarkFractionConvention convention = DarkFractionConvention::FractionOfAll) {
    return WernerState(swap_chain_breakdown(budget, link, convention).v_at_at,
                       BellStateLabel::PsiMinus);
}

} // namespace bellfeas
