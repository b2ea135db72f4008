#ifndef BLUE_SIMULATOR_HPP
#define BLUE_SIMULATOR_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "blue/channel.hpp"
#include "blue/codebook.hpp"
#include "blue/optimizer.hpp"
#include "blue/queues.hpp"
#include "blue/radio_metrics.hpp"

namespace blue {

struct CodebookConfig {
    double beam_min_deg = -60.0, beam_max_deg = 60.0, beam_step_deg = 10.0;
    double ris_min_deg = -30.0, ris_max_deg = 30.0, ris_step_deg = 5.0;
    int ris_quant_bits = 0;
};

struct ScenarioConfig {
    ChannelGeometry geometry;
    ChannelModel channel;
    RadioConfig radio;
    ServiceConfig service;
    std::vector<double> pixel_weights; // aligned with geometry.pixels
    CodebookConfig codebook;
    PolicyKind policy = PolicyKind::boa_with_ris;
    double v_parameter = 1.0;
    long long horizon = 20000;
    long long warmup = 2000;
    std::uint64_t seed = 1;
    bool auto_boresight = true;
    bool collect_trace = false;
    long long calibration_slots = 100;
    double calibration_safety = 2.0;
    double initial_local_bits = 0.0;
    double initial_remote_bits = 0.0;
    double stability_slope_frac = 0.02; // unstable if backlog slope exceeds this x mean arrivals/slot

    PixelSet pixel_set() const {
        PixelSet px;
        px.positions = geometry.pixels;
        px.weights = pixel_weights;
        return px;
    }

    void validate() const {
        channel.validate();
        radio.validate();
        service.validate();
        pixel_set().validate();
        geometry.ue_array.validate();
        geometry.ap_array.validate();
        geometry.ris_array.validate();
        if (horizon <= warmup || warmup < 0) throw std::invalid_argument("ScenarioConfig: need horizon > warmup >= 0");
    }
};

/// Fill in the derived pieces of a config: wavelength-coupled spacing and
/// centroid-facing boresights.
inline void finalize_config(ScenarioConfig& cfg) {
    const double lambda = cfg.channel.wavelength();
    cfg.radio.wavelength_m = lambda;
    for (ArraySpec* a : {&cfg.geometry.ue_array, &cfg.geometry.ap_array, &cfg.geometry.ris_array})
        if (a->element_spacing <= 0.0) a->element_spacing = lambda / 2.0;
    if (cfg.auto_boresight) {
        Position3D c{0, 0, 0};
        double n = 0;
        for (const Position3D* p : {&cfg.geometry.ue, &cfg.geometry.ap, &cfg.geometry.ris}) {
            c.x += p->x; c.y += p->y; c.z += p->z; n += 1;
        }
        for (const auto& p : cfg.geometry.pixels) { c.x += p.x; c.y += p.y; c.z += p.z; n += 1; }
        c.x /= n; c.y /= n; c.z /= n;
        cfg.geometry.ue_array.boresight_azimuth = std::atan2(c.y - cfg.geometry.ue.y, c.x - cfg.geometry.ue.x);
        cfg.geometry.ap_array.boresight_azimuth = std::atan2(c.y - cfg.geometry.ap.y, c.x - cfg.geometry.ap.x);
        cfg.geometry.ris_array.boresight_azimuth = std::atan2(c.y - cfg.geometry.ris.y, c.x - cfg.geometry.ris.x);
    }
}

inline std::vector<double> degree_grid(double min_deg, double max_deg, double step_deg) {
    std::vector<double> g;
    for (double a = min_deg; a <= max_deg + 1e-9; a += step_deg)
        g.push_back(a * std::numbers::pi / 180.0);
    return g;
}

/// Beam and RIS codebooks for a finalized scenario; the RIS gradients are
/// anchored to the UE's LOS incidence azimuth.
inline Codebooks build_codebooks(const ScenarioConfig& cfg) {
    Codebooks books;
    const double lambda = cfg.radio.wavelength_m;
    books.precoder_angles = degree_grid(cfg.codebook.beam_min_deg, cfg.codebook.beam_max_deg, cfg.codebook.beam_step_deg);
    books.combiner_angles = books.precoder_angles;
    books.ris_target_angles = degree_grid(cfg.codebook.ris_min_deg, cfg.codebook.ris_max_deg, cfg.codebook.ris_step_deg);
    books.precoders = build_beam_codebook(cfg.geometry.ue_array, lambda, books.precoder_angles);
    books.combiners = build_beam_codebook(cfg.geometry.ap_array, lambda, books.combiner_angles);
    const double incident = azimuth_between(cfg.geometry.ris, cfg.geometry.ue,
                                            cfg.geometry.ris_array.boresight_azimuth);
    books.ris_profiles = build_ris_codebook(cfg.geometry.ris_array, lambda, incident,
                                            books.ris_target_angles, cfg.codebook.ris_quant_bits);
    return books;
}

struct RunMetrics {
    double avg_emfe_w_m2 = 0.0;
    double avg_local_bits = 0.0;
    double avg_remote_bits = 0.0;
    double avg_delay_s = 0.0;
    double avg_rate_bps = 0.0;
    double avg_power_w = 0.0;
    double avg_arrival_bits_per_slot = 0.0;
    bool stable = true;
    double min_drift_slack = std::numeric_limits<double>::infinity();
    double rate_max_bps = 0.0;
    double drift_constant_c = 0.0;
    // totals for conservation checks
    double total_arrivals_bits = 0.0;
    double total_transmitted_bits = 0.0;
    double total_processed_bits = 0.0;
    double final_local_bits = 0.0;
    double final_remote_bits = 0.0;
    // optional per-slot trace
    std::vector<double> trace_local, trace_remote, trace_rate, trace_power, trace_emfe;
    std::vector<Decision> trace_decisions;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Max effective gain seen over a short pre-run, used to pin R_u^max and C.
inline double calibrate_rate_max(const ScenarioConfig& cfg, const Codebooks& books) {
    std::mt19937_64 rng(splitmix64(cfg.seed ^ 0xCA11B7A7E5EEDULL));
    double max_h2 = 0.0;
    for (long long t = 0; t < cfg.calibration_slots; ++t) {
        const SlotChannels ch = generate_slot_channels(cfg.geometry, cfg.channel, rng);
        for (const auto& prof : books.ris_profiles) {
            const Eigen::MatrixXcd H = compose_e2e(ch, prof);
            const double s = H.jacobiSvd().singularValues()(0);
            max_h2 = std::max(max_h2, s * s);
        }
    }
    const double g = cfg.calibration_safety * max_h2;
    return cfg.radio.bandwidth_hz *
           std::log2(1.0 + g * cfg.radio.max_tx_power_w / cfg.radio.noise_power_w());
}

inline double regression_slope(const std::vector<double>& y) {
    const double n = static_cast<double>(y.size());
    if (y.size() < 2) return 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < y.size(); ++i) {
        const double x = static_cast<double>(i);
        sx += x; sy += y[i]; sxx += x * x; sxy += x * y[i];
    }
    const double denom = n * sxx - sx * sx;
    return denom > 0 ? (n * sxy - sx * sy) / denom : 0.0;
}

} // namespace detail

/// Execute one slot-based run: channels -> arrivals/cpu -> policy decision ->
/// metrics -> queue updates, with post-warmup time averages.
inline RunMetrics run(ScenarioConfig cfg) {
    finalize_config(cfg);
    cfg.validate();
    const Codebooks books = build_codebooks(cfg);
    const PixelSet pixels = cfg.pixel_set();
    const PolicyContext ctx = make_policy_context(cfg.geometry, books, cfg.radio.wavelength_m);

    LyapunovConfig lcfg;
    lcfg.v_parameter = cfg.v_parameter;
    lcfg.rate_max_bps = detail::calibrate_rate_max(cfg, books);
    lcfg.drift_constant = drift_constant(cfg.service.arrival_max_bits(), lcfg.rate_max_bps,
                                         cfg.service.effective_cpu_max(), cfg.service.slot_duration_s);

    std::mt19937_64 rng(detail::splitmix64(cfg.seed));
    QueueState state{cfg.initial_local_bits, cfg.initial_remote_bits};
    RunMetrics m;
    m.rate_max_bps = lcfg.rate_max_bps;
    m.drift_constant_c = lcfg.drift_constant;

    const long long measured = cfg.horizon - cfg.warmup;
    std::vector<double> backlog_tail;
    backlog_tail.reserve(static_cast<size_t>(cfg.horizon / 2 + 1));

    for (long long t = 0; t < cfg.horizon; ++t) {
        const SlotChannels ch = generate_slot_channels(cfg.geometry, cfg.channel, rng);
        const double arrivals = draw_arrivals_bits(cfg.service, rng);
        const double cpu = draw_cpu_hz(cfg.service, rng);

        const Decision dec = baseline_decision(cfg.policy, ch, books, state, lcfg, cfg.radio, pixels, ctx);

        const QueueState pre = state;
        const LocalStep ls = step_local(pre, dec.achieved_rate_bps, arrivals, cfg.service);
        const double remote_drain = std::min(pre.remote_bits,
                                             cfg.service.slot_duration_s * cpu / cfg.service.cycles_per_bit);
        state.local_bits = ls.new_local_bits;
        state.remote_bits = step_remote(pre, ls.transmitted_bits, cpu, cfg.service);

        const DriftCheck dc = drift_bound_check(pre, state, dec.achieved_rate_bps, arrivals, cpu, lcfg,
                                                dec.achieved_emfe_w_m2, cfg.service);
        m.min_drift_slack = std::min(m.min_drift_slack, dc.slack);

        if (t >= cfg.warmup) {
            m.avg_emfe_w_m2 += dec.achieved_emfe_w_m2;
            m.avg_local_bits += pre.local_bits;
            m.avg_remote_bits += pre.remote_bits;
            m.avg_rate_bps += dec.achieved_rate_bps;
            m.avg_power_w += dec.tx_power_w;
            m.avg_arrival_bits_per_slot += arrivals;
        }
        m.total_arrivals_bits += arrivals;
        m.total_transmitted_bits += ls.transmitted_bits;
        m.total_processed_bits += remote_drain;
        // the policy controls the communication queue; the MEH queue is
        // critically loaded by construction (mean service == mean arrivals), so
        // stability is judged on the local backlog alone
        if (t >= cfg.horizon / 2) backlog_tail.push_back(pre.local_bits);
        if (cfg.collect_trace) {
            m.trace_local.push_back(pre.local_bits);
            m.trace_remote.push_back(pre.remote_bits);
            m.trace_rate.push_back(dec.achieved_rate_bps);
            m.trace_power.push_back(dec.tx_power_w);
            m.trace_emfe.push_back(dec.achieved_emfe_w_m2);
            m.trace_decisions.push_back(dec);
        }
    }

    const double inv = 1.0 / static_cast<double>(measured);
    m.avg_emfe_w_m2 *= inv;
    m.avg_local_bits *= inv;
    m.avg_remote_bits *= inv;
    m.avg_rate_bps *= inv;
    m.avg_power_w *= inv;
    m.avg_arrival_bits_per_slot *= inv;
    m.avg_delay_s = m.avg_arrival_bits_per_slot > 0.0
                        ? e2e_delay(m.avg_local_bits, m.avg_remote_bits, m.avg_arrival_bits_per_slot, cfg.service)
                        : 0.0;
    m.final_local_bits = state.local_bits;
    m.final_remote_bits = state.remote_bits;
    const double slope = detail::regression_slope(backlog_tail);
    m.stable = slope <= cfg.stability_slope_frac * cfg.service.mean_arrivals_per_slot_bits();
    return m;
}

struct AggregatedPoint {
    std::vector<std::uint64_t> seeds;
    std::vector<RunMetrics> per_seed;
    double mean_emfe_w_m2 = 0.0, stderr_emfe = 0.0;
    double mean_delay_s = 0.0, stderr_delay = 0.0;
    double mean_rate_bps = 0.0, mean_power_w = 0.0;
    bool all_stable = true;
};

namespace detail {

inline AggregatedPoint aggregate(std::vector<std::uint64_t> seeds, std::vector<RunMetrics> runs) {
    AggregatedPoint a;
    a.seeds = std::move(seeds);
    a.per_seed = std::move(runs);
    const double n = static_cast<double>(a.per_seed.size());
    for (const auto& r : a.per_seed) {
        a.mean_emfe_w_m2 += r.avg_emfe_w_m2;
        a.mean_delay_s += r.avg_delay_s;
        a.mean_rate_bps += r.avg_rate_bps;
        a.mean_power_w += r.avg_power_w;
        a.all_stable = a.all_stable && r.stable;
    }
    a.mean_emfe_w_m2 /= n; a.mean_delay_s /= n; a.mean_rate_bps /= n; a.mean_power_w /= n;
    if (a.per_seed.size() > 1) {
        double ve = 0, vd = 0;
        for (const auto& r : a.per_seed) {
            ve += (r.avg_emfe_w_m2 - a.mean_emfe_w_m2) * (r.avg_emfe_w_m2 - a.mean_emfe_w_m2);
            vd += (r.avg_delay_s - a.mean_delay_s) * (r.avg_delay_s - a.mean_delay_s);
        }
        a.stderr_emfe = std::sqrt(ve / (n - 1.0) / n);
        a.stderr_delay = std::sqrt(vd / (n - 1.0) / n);
    }
    return a;
}

/// Same seeds across sweep points (common random numbers keeps trends clean).
inline AggregatedPoint run_point(const ScenarioConfig& base, const std::vector<std::uint64_t>& seeds) {
    std::vector<std::future<RunMetrics>> futs;
    futs.reserve(seeds.size());
    for (std::uint64_t s : seeds) {
        ScenarioConfig c = base;
        c.seed = s;
        futs.push_back(std::async(std::launch::async, [c]() { return run(c); }));
    }
    std::vector<RunMetrics> runs;
    runs.reserve(seeds.size());
    for (auto& f : futs) runs.push_back(f.get());
    return aggregate(seeds, runs);
}

} // namespace detail

struct SweepVPoint {
    double v = 0.0;
    AggregatedPoint agg;
};

/// Trade-off sweep: independent multi-seed runs per V, output sorted by V.
inline std::vector<SweepVPoint> sweep_v(const ScenarioConfig& base, std::vector<double> v_values,
                                        const std::vector<std::uint64_t>& seeds) {
    if (v_values.empty() || seeds.empty()) throw std::invalid_argument("sweep_v: empty inputs");
    std::sort(v_values.begin(), v_values.end());
    std::vector<SweepVPoint> out;
    out.reserve(v_values.size());
    for (double v : v_values) {
        ScenarioConfig c = base;
        c.v_parameter = v;
        out.push_back({v, detail::run_point(c, seeds)});
    }
    return out;
}

struct VTuneResult {
    bool feasible = false;
    double v_star = 0.0;
    AggregatedPoint at_v_star;
};

/// Largest V whose measured mean delay stays within the bound; bisection on
/// log V, 20 iterations, +-10% delay tolerance band on acceptance.
inline VTuneResult tune_v(const ScenarioConfig& base, double delay_bound_s,
                          const std::vector<std::uint64_t>& seeds, int iterations = 20) {
    auto measure = [&](double v) {
        ScenarioConfig c = base;
        c.v_parameter = v;
        return detail::run_point(c, seeds);
    };

    double v_ok = base.v_parameter > 0.0 ? base.v_parameter : 1.0;
    AggregatedPoint ok_point = measure(v_ok);
    int guard = 0;
    while ((ok_point.mean_delay_s > delay_bound_s || !ok_point.all_stable) && guard++ < 40) {
        v_ok /= 10.0;
        ok_point = measure(v_ok);
    }
    if (ok_point.mean_delay_s > delay_bound_s || !ok_point.all_stable)
        return {}; // no feasible V at all

    double v_bad = v_ok;
    AggregatedPoint bad_point;
    bool have_bad = false;
    guard = 0;
    while (guard++ < 40) {
        const double cand = v_bad * 10.0;
        AggregatedPoint p = measure(cand);
        if (p.mean_delay_s > delay_bound_s || !p.all_stable) { v_bad = cand; bad_point = p; have_bad = true; break; }
        v_ok = cand; ok_point = p; v_bad = cand;
    }
    if (!have_bad) return {true, v_ok, ok_point}; // delay never exceeds the bound

    for (int i = 0; i < iterations; ++i) {
        const double v_mid = std::exp(0.5 * (std::log(v_ok) + std::log(v_bad)));
        AggregatedPoint p = measure(v_mid);
        if (p.mean_delay_s <= delay_bound_s && p.all_stable) { v_ok = v_mid; ok_point = p; }
        else v_bad = v_mid;
    }
    if (ok_point.mean_delay_s > 1.1 * delay_bound_s) return {};
    return {true, v_ok, ok_point};
}

struct RangePoint {
    double distance_m = 0.0;
    PolicyKind policy = PolicyKind::boa_with_ris;
    VTuneResult tune;
};

/// Move the UE along the UE-AP axis to the requested range; the RIS and the
/// pixels keep their original offsets from the UE.
inline ScenarioConfig reposition_for_distance(const ScenarioConfig& base, double distance_m) {
    ScenarioConfig c = base;
    const double dx = base.geometry.ap.x - base.geometry.ue.x;
    const double dy = base.geometry.ap.y - base.geometry.ue.y;
    const double d0 = std::sqrt(dx * dx + dy * dy);
    if (d0 <= 0.0) throw std::invalid_argument("reposition_for_distance: degenerate UE-AP axis");
    const double ux = dx / d0, uy = dy / d0;
    Position3D ue{base.geometry.ap.x - distance_m * ux, base.geometry.ap.y - distance_m * uy,
                  base.geometry.ue.z};
    const double sx = ue.x - base.geometry.ue.x;
    const double sy = ue.y - base.geometry.ue.y;
    c.geometry.ue = ue;
    c.geometry.ris = {base.geometry.ris.x + sx, base.geometry.ris.y + sy, base.geometry.ris.z};
    for (auto& p : c.geometry.pixels) { p.x += sx; p.y += sy; }
    return c;
}

/// Range sweep at a fixed delay bound.
inline std::vector<RangePoint> sweep_range(const ScenarioConfig& base, std::vector<double> distances,
                                           double delay_bound_s, const std::vector<PolicyKind>& policies,
                                           const std::vector<std::uint64_t>& seeds,
                                           int tune_iterations = 20) {
    if (distances.empty() || policies.empty()) throw std::invalid_argument("sweep_range: empty inputs");
    std::sort(distances.begin(), distances.end());
    std::vector<RangePoint> out;
    for (double d : distances) {
        if (d <= 0.0) throw std::invalid_argument("sweep_range: distances must be > 0");
        const ScenarioConfig at_d = reposition_for_distance(base, d);
        for (PolicyKind pk : policies) {
            ScenarioConfig c = at_d;
            c.policy = pk;
            out.push_back({d, pk, tune_v(c, delay_bound_s, seeds, tune_iterations)});
        }
    }
    return out;
}

struct ArrivalPoint {
    double arrival_bps = 0.0;
    PolicyKind policy = PolicyKind::boa_with_ris;
    VTuneResult tune;
    double gain_db_vs_no_ris = 0.0; // filled on boa_with_ris rows when both feasible
};

/// Arrival-rate sweep; reports the RIS gain of BOA over no-RIS BOA.
inline std::vector<ArrivalPoint> sweep_arrival(const ScenarioConfig& base, std::vector<double> rates_bps,
                                               double delay_bound_s,
                                               const std::vector<PolicyKind>& policies,
                                               const std::vector<std::uint64_t>& seeds,
                                               int tune_iterations = 20) {
    if (rates_bps.empty() || policies.empty()) throw std::invalid_argument("sweep_arrival: empty inputs");
    std::sort(rates_bps.begin(), rates_bps.end());
    std::vector<ArrivalPoint> out;
    for (double r : rates_bps) {
        if (r <= 0.0) throw std::invalid_argument("sweep_arrival: rates must be > 0");
        ScenarioConfig at_r = base;
        at_r.service.mean_arrival_bps = r;
        std::vector<ArrivalPoint> row;
        for (PolicyKind pk : policies) {
            ScenarioConfig c = at_r;
            c.policy = pk;
            row.push_back({r, pk, tune_v(c, delay_bound_s, seeds, tune_iterations), 0.0});
        }
        const ArrivalPoint* no_ris = nullptr;
        for (const auto& p : row)
            if (p.policy == PolicyKind::boa_no_ris && p.tune.feasible) no_ris = &p;
        for (auto& p : row)
            if (p.policy == PolicyKind::boa_with_ris && p.tune.feasible && no_ris &&
                p.tune.at_v_star.mean_emfe_w_m2 > 0.0)
                p.gain_db_vs_no_ris = 10.0 * std::log10(no_ris->tune.at_v_star.mean_emfe_w_m2 /
                                                        p.tune.at_v_star.mean_emfe_w_m2);
        for (auto& p : row) out.push_back(std::move(p));
    }
    return out;
}

} // namespace blue

#endif // BLUE_SIMULATOR_HPP
