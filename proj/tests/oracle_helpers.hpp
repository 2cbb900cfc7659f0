// Brute-force reference routes used to cross-check the library. These
// deliberately avoid the closed forms under test: distributions are built
// by enumerating per-particle channels, and event counts by searching the
// significance condition directly.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "bellfeas/quantum_state.hpp"

namespace oracle {

// outcome index 0 = up, 1 = down
struct Dist {
    double p[2][2] = {{0, 0}, {0, 0}};

    double total() const { return p[0][0] + p[0][1] + p[1][0] + p[1][1]; }
};

inline Dist ideal_werner(double v, bool psi_minus, double alpha_deg, double beta_deg) {
    double c = std::cos(2.0 * (beta_deg - alpha_deg) * bellfeas::kPi / 180.0);
    double sign = psi_minus ? 1.0 : -1.0;
    Dist d;
    d.p[0][0] = d.p[1][1] = (1.0 - sign * v * c) / 4.0;
    d.p[0][1] = d.p[1][0] = (1.0 + sign * v * c) / 4.0;
    return d;
}

// per-particle symmetric flip: report the true outcome with probability a
inline Dist apply_symmetric_accuracy(const Dist& in, double a) {
    Dist out;
    for (int o1 = 0; o1 < 2; ++o1) {
        for (int o2 = 0; o2 < 2; ++o2) {
            double acc = 0.0;
            for (int s1 = 0; s1 < 2; ++s1) {
                for (int s2 = 0; s2 < 2; ++s2) {
                    double f1 = (o1 == s1) ? a : 1.0 - a;
                    double f2 = (o2 == s2) ? a : 1.0 - a;
                    acc += in.p[s1][s2] * f1 * f2;
                }
            }
            out.p[o1][o2] = acc;
        }
    }
    return out;
}

// per-particle loss: up stays up with probability p_d, else reads down;
// down always reads down
inline Dist apply_loss_channel(const Dist& in, double p_d) {
    auto flip = [p_d](int truth, int readout) {
        if (truth == 0) return readout == 0 ? p_d : 1.0 - p_d;
        return readout == 1 ? 1.0 : 0.0;
    };
    Dist out;
    for (int o1 = 0; o1 < 2; ++o1) {
        for (int o2 = 0; o2 < 2; ++o2) {
            double acc = 0.0;
            for (int s1 = 0; s1 < 2; ++s1) {
                for (int s2 = 0; s2 < 2; ++s2) {
                    acc += in.p[s1][s2] * flip(s1, o1) * flip(s2, o2);
                }
            }
            out.p[o1][o2] = acc;
        }
    }
    return out;
}

inline Dist fluorescence(double v, double a_det, double alpha_deg, double beta_deg) {
    return apply_symmetric_accuracy(ideal_werner(v, true, alpha_deg, beta_deg), a_det);
}

inline Dist ionization(double v, double a_st, double p_d, double alpha_deg, double beta_deg) {
    return apply_loss_channel(
        apply_symmetric_accuracy(ideal_werner(v, true, alpha_deg, beta_deg), a_st), p_d);
}

inline double correlator(const Dist& d) { return 2.0 * (d.p[0][0] + d.p[1][1]) - 1.0; }

inline double s_value(const std::array<Dist, 4>& ds) {
    return std::fabs(correlator(ds[0]) + correlator(ds[1])) +
           std::fabs(correlator(ds[2]) - correlator(ds[3]));
}

inline double delta_s(const std::array<Dist, 4>& ds, double n_total, bool count_scaled) {
    double ns = n_total / 4.0;
    double sum = 0.0;
    for (const auto& d : ds) {
        auto var = [&](double p) {
            return count_scaled ? ns * p * p * (1.0 - p) : ns * p * (1.0 - p);
        };
        sum += 4.0 / (ns * ns) * (var(d.p[0][0]) + var(d.p[1][1]));
    }
    return std::sqrt(sum);
}

// minimal multiple of 4 satisfying (S-2)/dS(N) >= k, found by doubling
// plus bisection rather than an algebraic solve
inline std::uint64_t required_events_search(const std::array<Dist, 4>& ds, double k) {
    double s = s_value(ds);
    auto ok = [&](std::uint64_t n) {
        return (s - 2.0) / delta_s(ds, static_cast<double>(n), true) >= k;
    };
    std::uint64_t hi = 4;
    while (!ok(hi)) hi *= 2;
    std::uint64_t lo = hi / 2;
    while (lo + 4 < hi) {
        std::uint64_t mid = (lo / 4 + hi / 4) / 2 * 4;
        if (mid == lo) mid += 4;
        if (ok(mid)) hi = mid; else lo = mid;
    }
    return ok(lo) ? lo : hi;
}

inline std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out;
    out.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        out.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    return out;
}

} // namespace oracle
