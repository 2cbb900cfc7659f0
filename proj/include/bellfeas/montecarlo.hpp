#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "bellfeas/chsh.hpp"
#include "bellfeas/detection.hpp"
#include "bellfeas/rng.hpp"
#include "bellfeas/swap_chain.hpp"

namespace bellfeas {

/// Event-level simulation of one CHSH data-taking run. When herald stats
/// are given, each heralded event is a dark herald with probability e_dc;
/// a dark herald carries the fully mixed state instead of the Werner
/// state, matching the depolarization treatment of the analytic chain.
/// The seed fully determines the output.
struct SimulationPlan {
    std::uint64_t seed = 1;
    std::uint64_t n_events = 0;
    ChshSettings settings{};
    WernerState state{Visibility(0.0), BellStateLabel::PsiMinus};
    DetectionModel detection = FluorescenceModel{};
    std::optional<HeraldStats> herald;
    /// Per-setting event counts. Empty means equal allocation, which then
    /// requires n_events to be a multiple of 4.
    std::optional<std::array<std::uint64_t, 4>> allocation;

    std::array<std::uint64_t, 4> resolved_allocation() const {
        if (allocation) {
            const auto& a = *allocation;
            if (a[0] + a[1] + a[2] + a[3] != n_events) {
                throw std::invalid_argument(
                    "simulation allocation must sum to n_events");
            }
            return a;
        }
        if (n_events % 4 != 0) {
            throw std::invalid_argument(
                "equal allocation requires n_events to be a multiple of 4");
        }
        std::uint64_t per = n_events / 4;
        return {per, per, per, per};
    }
};

struct SimulationReport {
    std::array<SettingCounts, 4> counts{};
    /// S combined from the empirical counts; NaN when some setting has no
    /// events.
    double s_empirical = 0.0;
    std::uint64_t n_dark = 0;
    double dark_fraction_empirical = 0.0;
};

/// Mean and sample scatter of S across independent replicas.
struct ReplicaScatter {
    std::uint64_t n_replicas = 0;
    double mean_s = 0.0;
    double std_s = 0.0; // sample standard deviation, n-1 divisor
    double mean_dark_fraction = 0.0;
};

namespace detail {

inline int sample_outcome(const JointDistribution& d, double u) {
    // fixed CDF order: uu, ud, du, dd
    double c = d.p_uu;
    if (u < c) return 0;
    c += d.p_ud;
    if (u < c) return 1;
    c += d.p_du;
    if (u < c) return 2;
    return 3;
}

inline void add_outcome(SettingCounts& counts, int outcome) {
    switch (outcome) {
        case 0: ++counts.n_uu; break;
        case 1: ++counts.n_ud; break;
        case 2: ++counts.n_du; break;
        default: ++counts.n_dd; break;
    }
}

// One setting of one replica, on its own RNG stream.
inline SettingCounts simulate_setting(const SimulationPlan& plan, int setting_index,
                                      std::uint64_t n_events, std::uint64_t stream,
                                      std::uint64_t& n_dark) {
    const AnalysisSetting setting = plan.settings.settings()[size_t(setting_index)];
    const JointDistribution true_dist =
        joint_distribution(plan.state, plan.detection, setting);
    const double e_dc = plan.herald ? plan.herald->e_dc : 0.0;
    const JointDistribution dark_dist =
        plan.herald ? joint_distribution(
                          WernerState(Visibility(0.0), plan.state.target_bell_state),
                          plan.detection, setting)
                    : JointDistribution{};

    Pcg32 rng(plan.seed, stream);
    SettingCounts counts;
    for (std::uint64_t i = 0; i < n_events; ++i) {
        bool dark = plan.herald && rng.uniform01() < e_dc;
        if (dark) ++n_dark;
        const JointDistribution& d = dark ? dark_dist : true_dist;
        add_outcome(counts, sample_outcome(d, rng.uniform01()));
    }
    return counts;
}

inline SimulationReport simulate_with_stream_base(const SimulationPlan& plan,
                                                  std::uint64_t stream_base) {
    plan.settings.validate();
    auto allocation = plan.resolved_allocation();
    SimulationReport report;
    for (int s = 0; s < 4; ++s) {
        report.counts[size_t(s)] = simulate_setting(
            plan, s, allocation[size_t(s)], stream_base + std::uint64_t(s), report.n_dark);
    }
    bool all_populated = allocation[0] > 0 && allocation[1] > 0 && allocation[2] > 0 &&
                         allocation[3] > 0;
    report.s_empirical = all_populated ? s_from_counts(report.counts)
                                       : std::numeric_limits<double>::quiet_NaN();
    report.dark_fraction_empirical =
        plan.n_events > 0
            ? static_cast<double>(report.n_dark) / static_cast<double>(plan.n_events)
            : 0.0;
    return report;
}

} // namespace detail

inline SimulationReport simulate(const SimulationPlan& plan) {
    return detail::simulate_with_stream_base(plan, 0);
}

/// Runs n_replicas independent simulations; replica r uses streams
/// 4r..4r+3 of the plan seed, so replica 0 is bit-identical to a plain
/// simulate() call and the aggregate does not depend on n_threads.
inline ReplicaScatter replicate(const SimulationPlan& plan, std::uint64_t n_replicas,
                                unsigned n_threads = 1) {
    if (n_replicas < 2) throw std::invalid_argument("replicate needs n_replicas >= 2");
    if (n_threads == 0) n_threads = 1;

    std::vector<double> s_values(n_replicas);
    std::vector<double> dark_values(n_replicas);
    auto run_range = [&](std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t r = begin; r < end; ++r) {
            SimulationReport rep = detail::simulate_with_stream_base(plan, 4 * r);
            s_values[r] = rep.s_empirical;
            dark_values[r] = rep.dark_fraction_empirical;
        }
    };

    if (n_threads == 1) {
        run_range(0, n_replicas);
    } else {
        std::vector<std::future<void>> workers;
        std::uint64_t chunk = (n_replicas + n_threads - 1) / n_threads;
        for (std::uint64_t begin = 0; begin < n_replicas; begin += chunk) {
            std::uint64_t end = std::min(begin + chunk, n_replicas);
            workers.push_back(
                std::async(std::launch::async, [=]() { run_range(begin, end); }));
        }
        for (auto& w : workers) w.get();
    }

    ReplicaScatter scatter;
    scatter.n_replicas = n_replicas;
    double sum = 0.0, sum_dark = 0.0;
    for (std::uint64_t r = 0; r < n_replicas; ++r) {
        sum += s_values[r];
        sum_dark += dark_values[r];
    }
    scatter.mean_s = sum / static_cast<double>(n_replicas);
    scatter.mean_dark_fraction = sum_dark / static_cast<double>(n_replicas);
    double ss = 0.0;
    for (std::uint64_t r = 0; r < n_replicas; ++r) {
        double d = s_values[r] - scatter.mean_s;
        ss += d * d;
    }
    scatter.std_s = std::sqrt(ss / static_cast<double>(n_replicas - 1));
    return scatter;
}

} // namespace bellfeas
