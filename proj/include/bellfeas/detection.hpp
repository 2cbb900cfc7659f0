#pragma once

#include <stdexcept>
#include <variant>

#include "bellfeas/quantum_state.hpp"

namespace bellfeas {

namespace detail {

inline void require_accuracy(double a, const char* name) {
    if (!(a >= 0.5 && a <= 1.0)) {
        throw std::domain_error(std::string(name) + " must lie in [0.5, 1], got " +
                                std::to_string(a));
    }
}

} // namespace detail

/// Readout via state-selective atom removal and fluorescence counting.
/// The composite accuracy a_det is the symmetric probability of
/// identifying the analyzed spin state correctly. It is carried as an
/// independent field rather than recomputed from a_stirap and a_hf: the
/// quoted composite (0.95) does not follow from either obvious
/// composition rule, so it is never silently overridden. Two candidate
/// composition helpers are provided below.
struct FluorescenceModel {
    double a_stirap = 0.9725; // state-transfer accuracy
    double a_hf = 0.978;      // hyperfine-readout accuracy
    double a_det = 0.95;      // composite readout accuracy actually used

    void validate() const {
        detail::require_accuracy(a_stirap, "a_stirap");
        detail::require_accuracy(a_hf, "a_hf");
        detail::require_accuracy(a_det, "a_det");
    }
};

/// Both stages correct, or both wrong (the two flips cancel).
inline double composed_accuracy_symmetric(double a_stirap, double a_hf) {
    detail::require_accuracy(a_stirap, "a_stirap");
    detail::require_accuracy(a_hf, "a_hf");
    return a_stirap * a_hf + (1.0 - a_stirap) * (1.0 - a_hf);
}

/// Both stages correct; a double flip counts as wrong.
inline double composed_accuracy_product(double a_stirap, double a_hf) {
    detail::require_accuracy(a_stirap, "a_stirap");
    detail::require_accuracy(a_hf, "a_hf");
    return a_stirap * a_hf;
}

/// Readout via state-selective ionization with fragment detection.
/// A registered fragment always means an ionization happened; a missing
/// fragment is reported as "down" even when the atom was ionized, which
/// makes the readout channel asymmetric.
struct IonizationModel {
    double a_stirap = 0.9725; // state-transfer accuracy
    double p_ionize = 0.99;   // ionization probability given transfer
    double p_e = 0.85;        // electron-detector efficiency
    double p_ion = 0.65;      // ion-detector efficiency

    void validate() const {
        detail::require_accuracy(a_stirap, "a_stirap");
        detail::require_probability(p_ionize, "p_ionize");
        detail::require_probability(p_e, "p_e");
        detail::require_probability(p_ion, "p_ion");
    }
};

using DetectionModel = std::variant<FluorescenceModel, IonizationModel>;

/// Probability that at least one ionization fragment is registered:
/// 1 - (1 - p_e)(1 - p_ion). Symmetric in its arguments.
inline double fragment_detection_efficiency(double p_e, double p_ion) {
    detail::require_probability(p_e, "p_e");
    detail::require_probability(p_ion, "p_ion");
    return 1.0 - (1.0 - p_e) * (1.0 - p_ion);
}

/// Combined probability that an "up" atom produces a registered fragment:
/// p_d = p_ionize * p_det.
inline double effective_p_d(const IonizationModel& model) {
    model.validate();
    return model.p_ionize * fragment_detection_efficiency(model.p_e, model.p_ion);
}

namespace detail {

inline void require_psi_minus(const WernerState& state, const char* op) {
    if (state.target_bell_state != BellStateLabel::PsiMinus) {
        throw std::invalid_argument(std::string(op) +
                                    " supports only Psi- target states");
    }
}

} // namespace detail

/// Observable joint distribution under symmetric readout of accuracy
/// a_det. Same-outcome entries: (1 - V (2 a_det - 1)^2 cos(2(beta-alpha)))/4.
/// Opposite-outcome entries follow from normalization and symmetry.
inline JointDistribution fluorescence_joint(const WernerState& state,
                                            const FluorescenceModel& model,
                                            const AnalysisSetting& setting) {
    detail::require_psi_minus(state, "fluorescence_joint");
    model.validate();
    double contrast = 2.0 * model.a_det - 1.0;
    double vc = state.visibility.value() * contrast * contrast * setting.cos_two_delta();
    JointDistribution d;
    d.p_uu = d.p_dd = (1.0 - vc) / 4.0;
    d.p_ud = d.p_du = (1.0 + vc) / 4.0;
    return d;
}

/// Observable joint distribution under ionization readout with combined
/// fragment probability p_d, taken directly. The symmetric-accuracy
/// distribution (a_stirap) is pushed through the per-particle loss
/// channel up->up with probability p_d, up->down otherwise, down fixed.
/// Closed forms, with q = V (2 a_st - 1)^2 cos(2(beta-alpha)):
///   p_uu = p_d^2 (1 - q) / 4
///   p_dd = ((2 - p_d)^2 - p_d^2 q) / 4
///   p_ud = p_du = (p_d (2 - p_d) + p_d^2 q) / 4
/// The off-diagonal entries are not independent postulates: they are the
/// loss-channel image of the symmetric distribution, which also
/// reproduces both diagonal entries above.
inline JointDistribution ionization_joint(const WernerState& state, double a_stirap,
                                          double p_d, const AnalysisSetting& setting) {
    detail::require_psi_minus(state, "ionization_joint");
    detail::require_accuracy(a_stirap, "a_stirap");
    detail::require_probability(p_d, "p_d");
    double contrast = 2.0 * a_stirap - 1.0;
    double q = state.visibility.value() * contrast * contrast * setting.cos_two_delta();
    JointDistribution d;
    d.p_uu = p_d * p_d * (1.0 - q) / 4.0;
    d.p_dd = ((2.0 - p_d) * (2.0 - p_d) - p_d * p_d * q) / 4.0;
    d.p_ud = d.p_du = (p_d * (2.0 - p_d) + p_d * p_d * q) / 4.0;
    return d;
}

inline JointDistribution ionization_joint(const WernerState& state,
                                          const IonizationModel& model,
                                          const AnalysisSetting& setting) {
    return ionization_joint(state, model.a_stirap, effective_p_d(model), setting);
}

/// Dispatch on the detection model variant.
inline JointDistribution joint_distribution(const WernerState& state,
                                            const DetectionModel& model,
                                            const AnalysisSetting& setting) {
    if (const auto* flr = std::get_if<FluorescenceModel>(&model)) {
        return fluorescence_joint(state, *flr, setting);
    }
    return ionization_joint(state, std::get<IonizationModel>(model), setting);
}

} // namespace bellfeas
