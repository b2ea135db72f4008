#ifndef BLUE_QUEUES_HPP
#define BLUE_QUEUES_HPP

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace blue {

/// Device communication buffer and MEH computation buffer, in bits.
struct QueueState {
    double local_bits = 0.0;   // B_l
    double remote_bits = 0.0;  // B_r
};

struct ServiceConfig {
    double slot_duration_s = 10e-3;   // tau
    double cycles_per_bit = 10.0;     // J
    double mean_arrival_bps = 100e6;  // Abar
    double cpu_max_hz = 0.0;          // f_max; 0 means "derive as margin * J * Abar"
    double cpu_margin = 2.0;          // support of uniform f(t) is [0, cpu_max]
    double packet_size_bits = 1000.0;

    double effective_cpu_max() const {
        return cpu_max_hz > 0.0 ? cpu_max_hz : cpu_margin * cycles_per_bit * mean_arrival_bps;
    }
    double mean_arrivals_per_slot_bits() const { return mean_arrival_bps * slot_duration_s; }
    /// A_max: Poisson packet draw truncated at mean + 10 sigma, in bits.
    double arrival_max_bits() const {
        const double mean_pkts = mean_arrivals_per_slot_bits() / packet_size_bits;
        return std::ceil(mean_pkts + 10.0 * std::sqrt(mean_pkts)) * packet_size_bits;
    }

    void validate() const {
        if (slot_duration_s <= 0.0 || cycles_per_bit <= 0.0 || mean_arrival_bps <= 0.0 ||
            packet_size_bits <= 0.0 || cpu_margin <= 0.0)
            throw std::invalid_argument("ServiceConfig: parameters must be positive");
    }
};

struct LocalStep {
    double new_local_bits;
    double transmitted_bits;  // min(B_l, tau R_u): the remote queue's inflow
};

/// B_l(t+1) = max(0, B_l - tau R_u) + A.
inline LocalStep step_local(const QueueState& state, double rate_bps, double arrivals_bits,
                            const ServiceConfig& cfg) {
    if (rate_bps < 0.0 || arrivals_bits < 0.0)
        throw std::invalid_argument("step_local: negative rate or arrivals");
    const double drain = cfg.slot_duration_s * rate_bps;
    return {std::max(0.0, state.local_bits - drain) + arrivals_bits,
            std::min(state.local_bits, drain)};
}

/// B_r(t+1) = max(0, B_r - tau f / J) + min(B_l, tau R_u).
inline double step_remote(const QueueState& state, double transmitted_bits, double cpu_hz,
                          const ServiceConfig& cfg) {
    if (transmitted_bits < 0.0 || cpu_hz < 0.0)
        throw std::invalid_argument("step_remote: negative inputs");
    const double drain = cfg.slot_duration_s * cpu_hz / cfg.cycles_per_bit;
    return std::max(0.0, state.remote_bits - drain) + transmitted_bits;
}

/// Little's-law E2E delay: tau (Bl_avg + Br_avg) / A_avg, seconds.
inline double e2e_delay(double avg_local_bits, double avg_remote_bits, double avg_arrival_bits_per_slot,
                        const ServiceConfig& cfg) {
    if (avg_arrival_bits_per_slot <= 0.0)
        throw std::invalid_argument("e2e_delay: average arrivals must be > 0");
    return cfg.slot_duration_s * (avg_local_bits + avg_remote_bits) / avg_arrival_bits_per_slot;
}

/// Poisson packet arrivals, truncated at mean + 10 sigma so A_max is finite.
inline double draw_arrivals_bits(const ServiceConfig& cfg, std::mt19937_64& rng) {
    const double mean_pkts = cfg.mean_arrivals_per_slot_bits() / cfg.packet_size_bits;
    std::poisson_distribution<long long> dist(mean_pkts);
    const double cap = std::ceil(mean_pkts + 10.0 * std::sqrt(mean_pkts));
    const double pkts = std::min(static_cast<double>(dist(rng)), cap);
    return pkts * cfg.packet_size_bits;
}

/// Per-slot CPU availability f(t) ~ U[0, f_max].
inline double draw_cpu_hz(const ServiceConfig& cfg, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(0.0, cfg.effective_cpu_max());
    return dist(rng);
}

} // namespace blue

#endif // BLUE_QUEUES_HPP
