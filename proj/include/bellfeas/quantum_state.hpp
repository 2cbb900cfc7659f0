#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace bellfeas {

inline constexpr double kPi = 3.14159265358979323846;

namespace detail {

inline void require_probability(double x, const char* name) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw std::domain_error(std::string(name) + " must be a probability in [0, 1], got " +
                                std::to_string(x));
    }
}

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }

} // namespace detail

/// Fringe contrast of a two-particle correlation measurement. A state with
/// visibility 1 is the pure target Bell state, visibility 0 the fully mixed
/// state.
class Visibility {
public:
    explicit Visibility(double v) : value_(v) {
        detail::require_probability(v, "visibility");
    }

    double value() const { return value_; }

private:
    double value_;
};

/// Overlap probability of the actual two-qubit state with the target Bell
/// state. Related to visibility by F = 1/4 + 3V/4, hence confined to
/// [0.25, 1].
class Fidelity {
public:
    explicit Fidelity(double f) : value_(f) {
        if (!(f >= 0.25 && f <= 1.0)) {
            throw std::domain_error("fidelity must lie in [0.25, 1], got " + std::to_string(f));
        }
    }

    double value() const { return value_; }

private:
    double value_;
};

enum class BellStateLabel {
    PsiPlus,  // (|du> + |ud>)/sqrt(2)
    PsiMinus, // (|du> - |ud>)/sqrt(2), the singlet
};

/// Mixture of a maximally entangled state with the fully mixed state,
/// parameterized by a single visibility. The visibility together with the
/// Bell-state label is a sufficient statistic for every correlation
/// quantity computed here; the 4x4 density matrix is never materialized.
struct WernerState {
    WernerState(Visibility v, BellStateLabel label) : visibility(v), target_bell_state(label) {}

    Visibility visibility;
    BellStateLabel target_bell_state;
};

/// One pair of spin-analysis directions, in degrees of light polarization.
/// All observable quantities depend on the angles only through
/// cos(2(beta - alpha)), i.e. modulo 180 degrees.
struct AnalysisSetting {
    double alpha_deg = 0.0;
    double beta_deg = 0.0;

    double cos_two_delta() const {
        return std::cos(2.0 * detail::deg_to_rad(beta_deg - alpha_deg));
    }
};

/// The four outcome probabilities of a joint spin measurement at one
/// setting. Entries are nonnegative and sum to 1.
struct JointDistribution {
    double p_uu = 0.0;
    double p_ud = 0.0;
    double p_du = 0.0;
    double p_dd = 0.0;

    double sum() const { return p_uu + p_ud + p_du + p_dd; }

    // probability that both particles give the same outcome
    double p_same() const { return p_uu + p_dd; }
};

/// F = 1/4 + 3V/4.
inline Fidelity visibility_to_fidelity(Visibility v) {
    return Fidelity(0.25 + 0.75 * v.value());
}

/// V = (4F - 1)/3, the exact inverse of visibility_to_fidelity.
inline Visibility fidelity_to_visibility(Fidelity f) {
    return Visibility((4.0 * f.value() - 1.0) / 3.0);
}

/// An error event of probability e replaces the state by the fully mixed
/// state: V -> (1-e)V.
inline Visibility depolarize(Visibility v, double error_probability) {
    detail::require_probability(error_probability, "error probability");
    return Visibility((1.0 - error_probability) * v.value());
}

/// Fidelity form of the same map: F -> (1-e)F + e/4. Commutes with the
/// visibility/fidelity conversions.
inline Fidelity depolarize(Fidelity f, double error_probability) {
    detail::require_probability(error_probability, "error probability");
    return Fidelity((1.0 - error_probability) * f.value() + error_probability / 4.0);
}

inline WernerState depolarize(const WernerState& state, double error_probability) {
    return WernerState(depolarize(state.visibility, error_probability), state.target_bell_state);
}

/// Joint outcome probabilities of a Werner state under ideal (perfectly
/// accurate) spin readout. For the singlet the same-outcome entries are
/// (1 - V cos(2(beta-alpha)))/4; for Psi+ the sign of the cosine term flips.
/// The opposite-outcome entries are fixed by normalization and the
/// up/down exchange symmetry of both Bell states.
inline JointDistribution ideal_joint(const WernerState& state, const AnalysisSetting& setting) {
    double sign = (state.target_bell_state == BellStateLabel::PsiMinus) ? 1.0 : -1.0;
    double vc = sign * state.visibility.value() * setting.cos_two_delta();
    JointDistribution d;
    d.p_uu = d.p_dd = (1.0 - vc) / 4.0;
    d.p_ud = d.p_du = (1.0 + vc) / 4.0;
    return d;
}

} // namespace bellfeas
