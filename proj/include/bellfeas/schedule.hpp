#pragma once

#include <stdexcept>

#include "bellfeas/quantum_state.hpp"

namespace bellfeas {

inline constexpr double kSpeedOfLight = 299792458.0; // m/s
inline constexpr double kSecondsPerDay = 86400.0;

/// Timing and occupancy of one entanglement-generation attempt. Cooling
/// enters as the amortized per-cycle share of the periodic cooling burst.
/// The photon round trip to the swap station runs at fiber_speed_fraction
/// of c.
struct CycleModel {
    double prep_time_s = 5e-6;
    double cooling_amortized_s = 10e-6;
    double fiber_length_m = 200.0;
    double fiber_speed_fraction = 2.0 / 3.0;
    double occupancy_1 = 0.5;
    double occupancy_2 = 0.5;

    void validate() const {
        if (prep_time_s < 0 || cooling_amortized_s < 0 || fiber_length_m < 0) {
            throw std::domain_error("cycle times and fiber length must be >= 0");
        }
        if (!(fiber_speed_fraction > 0.0 && fiber_speed_fraction <= 1.0)) {
            throw std::domain_error("fiber_speed_fraction must lie in (0, 1]");
        }
        detail::require_probability(occupancy_1, "occupancy_1");
        detail::require_probability(occupancy_2, "occupancy_2");
    }
};

/// Components of the atomic readout that must all finish inside the
/// light cone: basis choice, state transfer, irreversible decoherence or
/// ionization, and fragment flight to the detectors.
struct DetectionTimeline {
    double basis_choice_s = 100e-9;
    double stirap_s = 120e-9;
    double decoherence_s = 200e-9;
    double fragment_flight_s = 500e-9;

    void validate() const {
        if (basis_choice_s < 0 || stirap_s < 0 || decoherence_s < 0 ||
            fragment_flight_s < 0) {
            throw std::domain_error("timeline components must be >= 0");
        }
    }

    double total_s() const {
        return basis_choice_s + stirap_s + decoherence_s + fragment_flight_s;
    }
};

/// How long to run: events to collect at a given herald probability.
/// Detecting a second photonic Bell state doubles the herald rate and
/// halves the measurement time.
struct RunPlan {
    double herald_probability = 0.0;
    std::uint64_t events_needed = 1;
    bool second_bell_state = false;

    void validate() const {
        if (!(herald_probability > 0.0 && herald_probability <= 1.0)) {
            throw std::domain_error("herald_probability must lie in (0, 1]");
        }
        if (events_needed < 1) throw std::domain_error("events_needed must be >= 1");
    }
};

/// Preparation + amortized cooling + photon round trip over the fiber.
inline double cycle_time(const CycleModel& model) {
    model.validate();
    return model.prep_time_s + model.cooling_amortized_s +
           2.0 * model.fiber_length_m / (model.fiber_speed_fraction * kSpeedOfLight);
}

/// Attempt rate discounted by the probability that both traps hold an atom.
inline double effective_rate(const CycleModel& model) {
    double t = cycle_time(model);
    if (!(t > 0.0)) throw std::domain_error("effective_rate: cycle time is zero");
    return model.occupancy_1 * model.occupancy_2 / t;
}

/// Wall-clock seconds to accumulate the planned events.
inline double measurement_time(const RunPlan& plan, double rate_per_s) {
    plan.validate();
    if (!(rate_per_s > 0.0)) throw std::domain_error("measurement_time: rate must be > 0");
    double t = static_cast<double>(plan.events_needed) / (rate_per_s * plan.herald_probability);
    return plan.second_bell_state ? t / 2.0 : t;
}

inline double seconds_to_days(double seconds) { return seconds / kSecondsPerDay; }

/// distance/c minus the full readout duration. Positive means the readout
/// finishes before any light-speed signal from the other station could
/// arrive, closing the locality loophole at that separation.
inline double locality_margin(const DetectionTimeline& timeline, double distance_m) {
    timeline.validate();
    if (!(distance_m > 0.0)) throw std::domain_error("distance must be > 0");
    return distance_m / kSpeedOfLight - timeline.total_s();
}

} // namespace bellfeas
