#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "bellfeas/detection.hpp"
#include "bellfeas/quantum_state.hpp"

namespace bellfeas {

inline constexpr double kTsirelsonBound = 2.82842712474619009760; // 2 sqrt(2)

/// Raised when a model predicts S <= 2, so no event count can certify a
/// violation.
class no_violation_error : public std::runtime_error {
public:
    explicit no_violation_error(double s)
        : std::runtime_error("model predicts S = " + std::to_string(s) +
                             " <= 2; no finite event count gives a violation"),
          s_(s) {}

    double s() const { return s_; }

private:
    double s_;
};

/// The four analysis directions of a CHSH measurement, in degrees.
/// alpha/alpha_prime belong to one particle, beta/beta_prime to the other.
/// Directions on the same particle must be distinct modulo 180.
struct ChshSettings {
    double alpha_deg = 0.0;
    double alpha_prime_deg = 45.0;
    double beta_deg = 22.5;
    double beta_prime_deg = -22.5;

    void validate() const {
        auto same_direction = [](double a, double b) {
            double d = std::remainder(a - b, 180.0);
            return std::fabs(d) < 1e-12;
        };
        if (same_direction(alpha_deg, alpha_prime_deg) ||
            same_direction(beta_deg, beta_prime_deg)) {
            throw std::domain_error(
                "CHSH settings need two distinct directions per particle");
        }
    }

    /// Setting order used throughout: (a,b), (a',b), (a,b'), (a',b').
    std::array<AnalysisSetting, 4> settings() const {
        return {AnalysisSetting{alpha_deg, beta_deg},
                AnalysisSetting{alpha_prime_deg, beta_deg},
                AnalysisSetting{alpha_deg, beta_prime_deg},
                AnalysisSetting{alpha_prime_deg, beta_prime_deg}};
    }
};

/// Event counts accumulated at one setting.
struct SettingCounts {
    std::uint64_t n_uu = 0;
    std::uint64_t n_dd = 0;
    std::uint64_t n_ud = 0;
    std::uint64_t n_du = 0;

    std::uint64_t total() const { return n_uu + n_dd + n_ud + n_du; }
};

/// E = 2 (N_uu + N_dd) / N_s - 1.
inline double correlator(const SettingCounts& counts) {
    std::uint64_t n = counts.total();
    if (n == 0) throw std::invalid_argument("correlator: no events at this setting");
    return 2.0 * static_cast<double>(counts.n_uu + counts.n_dd) / static_cast<double>(n) - 1.0;
}

/// Model-side correlator: E = 2 (p_uu + p_dd) - 1.
inline double correlator(const JointDistribution& dist) {
    return 2.0 * dist.p_same() - 1.0;
}

/// S = |E1 + E2| + |E3 - E4| over distributions ordered (a,b), (a',b),
/// (a,b'), (a',b'). Evaluated branch-free exactly as written, so it stays
/// valid in regimes where the closed forms below do not apply.
inline double s_from_distributions(const std::array<JointDistribution, 4>& dists) {
    double e1 = correlator(dists[0]);
    double e2 = correlator(dists[1]);
    double e3 = correlator(dists[2]);
    double e4 = correlator(dists[3]);
    return std::fabs(e1 + e2) + std::fabs(e3 - e4);
}

/// Counts-side S, same combination rule.
inline double s_from_counts(const std::array<SettingCounts, 4>& counts) {
    double e1 = correlator(counts[0]);
    double e2 = correlator(counts[1]);
    double e3 = correlator(counts[2]);
    double e4 = correlator(counts[3]);
    return std::fabs(e1 + e2) + std::fabs(e3 - e4);
}

/// Closed form for symmetric fluorescence readout at the standard angles:
/// S = 2 sqrt(2) V (2 a_det - 1)^2.
inline double s_fluorescence_closed(Visibility v, double a_det) {
    detail::require_accuracy(a_det, "a_det");
    double contrast = 2.0 * a_det - 1.0;
    return kTsirelsonBound * v.value() * contrast * contrast;
}

/// Lower edge of the p_d region where the ionization closed form equals
/// the branch-free evaluation. With the correlator
/// E = (1-p_d)^2 - p_d^2 V (2 a_st - 1)^2 cos(2(beta-alpha)) at the
/// standard angles, the first absolute value in S folds unless
/// 2 (1-p_d)^2 <= sqrt(2) p_d^2 V (2 a_st - 1)^2, so the boundary depends
/// on the state and the transfer accuracy, not on p_d alone:
/// p_d >= 1 / (1 + sqrt(V (2 a_st - 1)^2 / sqrt 2)).
inline double ionization_closed_form_threshold(Visibility v, double a_stirap) {
    detail::require_accuracy(a_stirap, "a_stirap");
    double contrast = 2.0 * a_stirap - 1.0;
    double observable = v.value() * contrast * contrast;
    return 1.0 / (1.0 + std::sqrt(observable / std::sqrt(2.0)));
}

inline bool ionization_closed_form_valid(Visibility v, double a_stirap, double p_d) {
    double contrast = 2.0 * a_stirap - 1.0;
    double observable = v.value() * contrast * contrast;
    return 2.0 * (1.0 - p_d) * (1.0 - p_d) <= std::sqrt(2.0) * p_d * p_d * observable;
}

/// Closed form for ionization readout at the standard angles:
/// S = 2 sqrt(2) V p_d^2 (2 a_st - 1)^2 - 2 (1 - p_d)^2.
/// Exact only on the domain above; below it the call is refused and
/// s_from_distributions must be used.
inline double s_ionization_closed(Visibility v, double a_stirap, double p_d) {
    detail::require_accuracy(a_stirap, "a_stirap");
    detail::require_probability(p_d, "p_d");
    if (!ionization_closed_form_valid(v, a_stirap, p_d)) {
        throw std::domain_error(
            "s_ionization_closed: p_d below the closed-form validity threshold; "
            "use s_from_distributions");
    }
    double contrast = 2.0 * a_stirap - 1.0;
    return kTsirelsonBound * v.value() * p_d * p_d * contrast * contrast -
           2.0 * (1.0 - p_d) * (1.0 - p_d);
}

/// Choice of the per-outcome count deviation entering the S uncertainty.
/// CountScaled takes sigma(N_x) = sqrt(N_x p_x (1 - p_x)) with N_x = N_s p_x,
/// i.e. sqrt(N_s p_x^2 (1 - p_x)); Binomial takes the standard deviation of
/// a binomial count, sqrt(N_s p_x (1 - p_x)). Both are propagated the same
/// way; the Monte Carlo module measures which one tracks actual scatter.
enum class CountDeviation {
    CountScaled,
    Binomial,
};

/// Gaussian-propagated uncertainty of S for n_total events split equally
/// over the four settings:
///   dE = (2/N_s) sqrt(dN_uu^2 + dN_dd^2),  dS = sqrt(sum dE^2).
/// The per-setting signs enter through the actual probability values, so
/// non-default angle sets are handled without special cases.
inline double delta_s(const std::array<JointDistribution, 4>& dists, std::uint64_t n_total,
                      CountDeviation deviation = CountDeviation::CountScaled) {
    if (n_total == 0 || n_total % 4 != 0) {
        throw std::invalid_argument("delta_s: n_total must be a positive multiple of 4");
    }
    double ns = static_cast<double>(n_total) / 4.0;
    double sum_de2 = 0.0;
    for (const auto& d : dists) {
        auto count_var = [&](double p) {
            double base = p * (1.0 - p);
            return deviation == CountDeviation::CountScaled ? ns * p * base : ns * base;
        };
        double de2 = 4.0 / (ns * ns) * (count_var(d.p_uu) + count_var(d.p_dd));
        sum_de2 += de2;
    }
    return std::sqrt(sum_de2);
}

/// Per-event uncertainty coefficient C with dS(N) = C / sqrt(N).
inline double delta_s_coefficient(const std::array<JointDistribution, 4>& dists,
                                  CountDeviation deviation = CountDeviation::CountScaled) {
    return 2.0 * delta_s(dists, 4, deviation);
}

/// Closed form of delta_s for symmetric fluorescence statistics at the
/// standard angles, as a function of the observable visibility
/// v = V (2 a_det - 1)^2:
///   dS = sqrt(3 (1-v/sqrt 2)^2 (3+v/sqrt 2) + (1+v/sqrt 2)^2 (3-v/sqrt 2))
///        / (sqrt(2) sqrt(N)).
inline double delta_s_fluorescence_closed(double v_observable, std::uint64_t n_total) {
    detail::require_probability(v_observable, "observable visibility");
    if (n_total == 0 || n_total % 4 != 0) {
        throw std::invalid_argument(
            "delta_s_fluorescence_closed: n_total must be a positive multiple of 4");
    }
    double v = v_observable / std::sqrt(2.0);
    double bracket = 3.0 * (1.0 - v) * (1.0 - v) * (3.0 + v) +
                     (1.0 + v) * (1.0 + v) * (3.0 - v);
    return std::sqrt(bracket) / (std::sqrt(2.0) * std::sqrt(static_cast<double>(n_total)));
}

/// A k-standard-deviation violation target for a given state and readout.
struct SignificanceQuery {
    double k = 3.0;
    DetectionModel detection = FluorescenceModel{};
    WernerState state{Visibility(0.0), BellStateLabel::PsiMinus};
    ChshSettings settings{};

    void validate() const {
        if (!(k > 0.0)) throw std::domain_error("k must be > 0");
        settings.validate();
    }
};

/// The four observable distributions of a CHSH measurement.
inline std::array<JointDistribution, 4> chsh_distributions(const WernerState& state,
                                                           const DetectionModel& model,
                                                           const ChshSettings& settings) {
    const auto s = settings.settings();
    return {joint_distribution(state, model, s[0]), joint_distribution(state, model, s[1]),
            joint_distribution(state, model, s[2]), joint_distribution(state, model, s[3])};
}

/// Smallest total event count, a multiple of 4, with (S - 2)/dS(N) >= k.
/// Solved in closed form from dS = C/sqrt(N), then nudged to the exact
/// integer boundary.
inline std::uint64_t required_events(const std::array<JointDistribution, 4>& dists, double k,
                                     CountDeviation deviation = CountDeviation::CountScaled) {
    if (!(k > 0.0)) throw std::domain_error("k must be > 0");
    double s = s_from_distributions(dists);
    if (!(s > 2.0)) throw no_violation_error(s);
    double coeff = delta_s_coefficient(dists, deviation);
    double n_real = k * coeff / (s - 2.0);
    n_real *= n_real;
    if (!(n_real < 4.0e18)) {
        throw std::overflow_error("required_events: count exceeds the representable range");
    }
    auto satisfied = [&](std::uint64_t n) {
        return (s - 2.0) * std::sqrt(static_cast<double>(n)) / coeff >= k;
    };
    std::uint64_t n = static_cast<std::uint64_t>(n_real / 4.0) * 4;
    if (n < 4) n = 4;
    while (n > 4 && satisfied(n - 4)) n -= 4;
    while (!satisfied(n)) n += 4;
    return n;
}

inline std::uint64_t required_events(const SignificanceQuery& query,
                                     CountDeviation deviation = CountDeviation::CountScaled) {
    query.validate();
    return required_events(chsh_distributions(query.state, query.detection, query.settings),
                           query.k, deviation);
}

} // namespace bellfeas
