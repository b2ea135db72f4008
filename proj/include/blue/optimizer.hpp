#ifndef BLUE_OPTIMIZER_HPP
#define BLUE_OPTIMIZER_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "blue/channel.hpp"
#include "blue/codebook.hpp"
#include "blue/queues.hpp"
#include "blue/radio_metrics.hpp"

namespace blue {

/// One slot's resource-allocation outcome.
struct Decision {
    int precoder_index = 0;
    int combiner_index = 0;
    int ris_index = 0;
    double tx_power_w = 0.0;
    double objective_value = 0.0;
    double achieved_rate_bps = 0.0;
    double achieved_emfe_w_m2 = 0.0; // weighted instantaneous pixel sum
};

struct LyapunovConfig {
    double v_parameter = 0.0;     // V
    double drift_constant = 1.0;  // C
    double rate_max_bps = 0.0;    // R_u^max used when building C

    void validate() const {
        if (v_parameter < 0.0) throw std::invalid_argument("LyapunovConfig: v_parameter must be >= 0");
        if (drift_constant <= 0.0) throw std::invalid_argument("LyapunovConfig: drift_constant must be > 0");
    }
};

/// C = (A_max^2 + 2 (tau R_u^max)^2 + (tau f_max)^2) / 2.
inline double drift_constant(double arrival_max_bits, double rate_max_bps, double cpu_max_hz,
                             double slot_duration_s) {
    const double tr = slot_duration_s * rate_max_bps;
    const double tf = slot_duration_s * cpu_max_hz;
    return 0.5 * (arrival_max_bits * arrival_max_bits + 2.0 * tr * tr + tf * tf);
}

enum class PolicyKind { boa_with_ris, boa_no_ris, fixed_ap_no_ris, fixed_ap_with_ris, fixed_ris };

inline std::string to_string(PolicyKind k) {
    switch (k) {
        case PolicyKind::boa_with_ris: return "boa_with_ris";
        case PolicyKind::boa_no_ris: return "boa_no_ris";
        case PolicyKind::fixed_ap_no_ris: return "fixed_ap_no_ris";
        case PolicyKind::fixed_ap_with_ris: return "fixed_ap_with_ris";
        case PolicyKind::fixed_ris: return "fixed_ris";
    }
    throw std::invalid_argument("unknown policy kind");
}

inline PolicyKind policy_from_string(const std::string& s) {
    if (s == "boa_with_ris") return PolicyKind::boa_with_ris;
    if (s == "boa_no_ris") return PolicyKind::boa_no_ris;
    if (s == "fixed_ap_no_ris") return PolicyKind::fixed_ap_no_ris;
    if (s == "fixed_ap_with_ris") return PolicyKind::fixed_ap_with_ris;
    if (s == "fixed_ris") return PolicyKind::fixed_ris;
    throw std::invalid_argument("unknown policy kind: " + s);
}

/// KKT stationary point of the per-slot objective for one codebook triple,
/// clamped to [0, P_max]. Never transmits when the remote backlog dominates.
///   P* = W (B_l - B_r) / (ln2 * V * (4pi/lambda^2) * sum_p w_p |h_p w_u|^2) - N_0 W / |w_a^H H w_u|^2
inline double optimal_power(double local_bits, double remote_bits, double v,
                            double weighted_pixel_gain, double effective_gain,
                            const RadioConfig& cfg) {
    if (weighted_pixel_gain < 0.0 || effective_gain < 0.0)
        throw std::invalid_argument("optimal_power: gains must be >= 0");
    if (remote_bits >= local_bits) return 0.0;
    if (effective_gain <= 0.0) return 0.0; // rate term vanishes; power only adds exposure
    const double penalty_slope =
        v * 4.0 * std::numbers::pi / (cfg.wavelength_m * cfg.wavelength_m) * weighted_pixel_gain;
    if (penalty_slope <= 0.0) return cfg.max_tx_power_w; // pure rate maximization
    const double p = cfg.bandwidth_hz * (local_bits - remote_bits) / (std::numbers::ln2 * penalty_slope) -
                     cfg.noise_power_w() / effective_gain;
    return std::clamp(p, 0.0, cfg.max_tx_power_w);
}

/// Per-slot objective: V * weighted EMFE + (B_r - B_l) * R_u.
inline double slot_objective(double rate_bps, double weighted_emfe_w_m2, double local_bits,
                             double remote_bits, double v) {
    return v * weighted_emfe_w_m2 + (remote_bits - local_bits) * rate_bps;
}

/// Index subsets to enumerate; baselines are restrictions of the full search.
struct SearchSpace {
    std::vector<int> precoders;
    std::vector<int> combiners;
    std::vector<int> ris;        // ignored when ris_enabled is false
    bool ris_enabled = true;
};

inline SearchSpace full_search_space(const Codebooks& books, bool ris_enabled) {
    SearchSpace s;
    s.ris_enabled = ris_enabled;
    for (size_t i = 0; i < books.precoders.size(); ++i) s.precoders.push_back(static_cast<int>(i));
    for (size_t i = 0; i < books.combiners.size(); ++i) s.combiners.push_back(static_cast<int>(i));
    if (ris_enabled)
        for (size_t i = 0; i < books.ris_profiles.size(); ++i) s.ris.push_back(static_cast<int>(i));
    else
        s.ris.push_back(0);
    return s;
}

/// Exhaustive minimization of the per-slot objective over the given index sets,
/// with per-triple closed-form power. Ties resolve to the lowest
/// (precoder, combiner, ris) lexicographic indices.
inline Decision solve_slot_over(const SlotChannels& ch, const Codebooks& books,
                                const QueueState& state, const LyapunovConfig& lcfg,
                                const RadioConfig& cfg, const PixelSet& pixels,
                                const SearchSpace& space) {
    if (books.precoders.empty() || books.combiners.empty() || books.ris_profiles.empty())
        throw std::invalid_argument("solve_slot: empty codebooks");
    if (space.precoders.empty() || space.combiners.empty() || space.ris.empty())
        throw std::invalid_argument("solve_slot: empty search space");

    const size_t n_ris = space.ris.size();
    const size_t n_pix = pixels.weights.size();
    const double emfe_coef = 4.0 * std::numbers::pi / (cfg.wavelength_m * cfg.wavelength_m);

    // Per-RIS-profile composition, reused across all beam pairs.
    std::vector<Eigen::MatrixXcd> H_r(n_ris);
    std::vector<std::vector<Eigen::RowVectorXcd>> h_pr(n_ris);
    for (size_t r = 0; r < n_ris; ++r) {
        if (space.ris_enabled) {
            const RisProfile& prof = books.ris_profiles[static_cast<size_t>(space.ris[r])];
            H_r[r] = compose_e2e(ch, prof);
            h_pr[r].reserve(n_pix);
            for (size_t p = 0; p < n_pix; ++p) h_pr[r].push_back(compose_pixel(ch, prof, p));
        } else {
            H_r[r] = ch.H_direct;
            h_pr[r] = ch.h_direct_pixel;
        }
    }

    // Weighted pixel gain depends on (ris, precoder) only.
    std::vector<std::vector<double>> pix_gain(n_ris, std::vector<double>(space.precoders.size()));
    for (size_t r = 0; r < n_ris; ++r)
        for (size_t ui = 0; ui < space.precoders.size(); ++ui) {
            const Eigen::VectorXcd& w_u = books.precoders[static_cast<size_t>(space.precoders[ui])];
            double g = 0.0;
            for (size_t p = 0; p < n_pix; ++p) {
                const std::complex<double> hp = h_pr[r][p] * w_u;
                g += pixels.weights[p] * std::norm(hp);
            }
            pix_gain[r][ui] = g;
        }

    // w_a^H H_r rows depend on (ris, combiner) only.
    std::vector<std::vector<Eigen::RowVectorXcd>> row_cr(space.combiners.size());
    for (size_t ci = 0; ci < space.combiners.size(); ++ci) {
        row_cr[ci].resize(n_ris);
        const Eigen::VectorXcd& w_a = books.combiners[static_cast<size_t>(space.combiners[ci])];
        for (size_t r = 0; r < n_ris; ++r) row_cr[ci][r] = w_a.adjoint() * H_r[r];
    }

    Decision best;
    double best_obj = std::numeric_limits<double>::infinity();
    bool have = false;
    for (size_t ui = 0; ui < space.precoders.size(); ++ui) {
        const Eigen::VectorXcd& w_u = books.precoders[static_cast<size_t>(space.precoders[ui])];
        for (size_t ci = 0; ci < space.combiners.size(); ++ci)
            for (size_t r = 0; r < n_ris; ++r) {
                const std::complex<double> eff = row_cr[ci][r] * w_u;
                const double g_eff = std::norm(eff);
                const double p = optimal_power(state.local_bits, state.remote_bits, lcfg.v_parameter,
                                               pix_gain[r][ui], g_eff, cfg);
                const double rate = cfg.bandwidth_hz * std::log2(1.0 + g_eff * p / cfg.noise_power_w());
                const double emfe = emfe_coef * p * pix_gain[r][ui];
                const double obj = slot_objective(rate, emfe, state.local_bits, state.remote_bits,
                                                  lcfg.v_parameter);
                if (!have || obj < best_obj) {
                    have = true;
                    best_obj = obj;
                    best.precoder_index = space.precoders[ui];
                    best.combiner_index = space.combiners[ci];
                    best.ris_index = space.ris_enabled ? space.ris[r] : 0;
                    best.tx_power_w = p;
                    best.objective_value = obj;
                    best.achieved_rate_bps = rate;
                    best.achieved_emfe_w_m2 = emfe;
                }
            }
    }
    return best;
}

inline Decision solve_slot(const SlotChannels& ch, const Codebooks& books, const QueueState& state,
                           const LyapunovConfig& lcfg, const RadioConfig& cfg, const PixelSet& pixels) {
    return solve_slot_over(ch, books, state, lcfg, cfg, pixels, full_search_space(books, true));
}

/// Geometry-derived fixed codebook indices for the benchmark policies.
struct PolicyContext {
    int precoder_to_ap = 0;
    int combiner_to_ue = 0;
    int precoder_to_ris = 0;
    int combiner_to_ris = 0;
    int ris_toward_ap = 0;
};

namespace detail {

inline int nearest_angle_index(const std::vector<double>& grid, double target) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < grid.size(); ++i) {
        const double d = std::abs(wrap_angle(grid[i] - target));
        if (d < best_d) { best_d = d; best = static_cast<int>(i); }
    }
    return best;
}

} // namespace detail

inline PolicyContext make_policy_context(const ChannelGeometry& geo, const Codebooks& books,
                                         double wavelength) {
    PolicyContext ctx;
    ctx.precoder_to_ap = detail::nearest_angle_index(
        books.precoder_angles, azimuth_between(geo.ue, geo.ap, geo.ue_array.boresight_azimuth));
    ctx.combiner_to_ue = detail::nearest_angle_index(
        books.combiner_angles, azimuth_between(geo.ap, geo.ue, geo.ap_array.boresight_azimuth));
    ctx.precoder_to_ris = detail::nearest_angle_index(
        books.precoder_angles, azimuth_between(geo.ue, geo.ris, geo.ue_array.boresight_azimuth));
    ctx.combiner_to_ris = detail::nearest_angle_index(
        books.combiner_angles, azimuth_between(geo.ap, geo.ris, geo.ap_array.boresight_azimuth));

    // RIS profile with the strongest LOS UE->RIS->AP cascade.
    const double inc = azimuth_between(geo.ris, geo.ue, geo.ris_array.boresight_azimuth);
    const double dep = azimuth_between(geo.ris, geo.ap, geo.ris_array.boresight_azimuth);
    const Eigen::VectorXcd a_inc = steering_vector(geo.ris_array, wavelength, inc);
    const Eigen::VectorXcd a_dep = steering_vector(geo.ris_array, wavelength, dep);
    double best_g = -1.0;
    for (size_t i = 0; i < books.ris_profiles.size(); ++i) {
        const std::complex<double> c =
            a_dep.adjoint() * ris_diagonal(books.ris_profiles[i]).asDiagonal() * a_inc;
        if (std::norm(c) > best_g) { best_g = std::norm(c); ctx.ris_toward_ap = static_cast<int>(i); }
    }
    return ctx;
}

/// Benchmark policies plus BOA itself, all with the same closed-form power rule.
inline Decision baseline_decision(PolicyKind kind, const SlotChannels& ch, const Codebooks& books,
                                  const QueueState& state, const LyapunovConfig& lcfg,
                                  const RadioConfig& cfg, const PixelSet& pixels,
                                  const PolicyContext& ctx) {
    SearchSpace space;
    switch (kind) {
        case PolicyKind::boa_with_ris:
            space = full_search_space(books, true);
            break;
        case PolicyKind::boa_no_ris:
            space = full_search_space(books, false);
            break;
        case PolicyKind::fixed_ap_no_ris:
            space = {{ctx.precoder_to_ap}, {ctx.combiner_to_ue}, {0}, false};
            break;
        case PolicyKind::fixed_ap_with_ris:
            space = {{ctx.precoder_to_ap}, {ctx.combiner_to_ue}, {ctx.ris_toward_ap}, true};
            break;
        case PolicyKind::fixed_ris:
            space = {{ctx.precoder_to_ris}, {ctx.combiner_to_ris}, {ctx.ris_toward_ap}, true};
            break;
    }
    return solve_slot_over(ch, books, state, lcfg, cfg, pixels, space);
}

struct DriftCheck {
    bool holds = false;
    double slack = 0.0;
};

/// Realized one-slot drift-plus-penalty against the C-bounded right-hand side.
inline DriftCheck drift_bound_check(const QueueState& pre, const QueueState& post, double rate_bps,
                                    double arrivals_bits, double cpu_hz, const LyapunovConfig& lcfg,
                                    double weighted_penalty_w_m2, const ServiceConfig& svc) {
    const double tau = svc.slot_duration_s;
    const double lyap_pre = 0.5 * (pre.local_bits * pre.local_bits + pre.remote_bits * pre.remote_bits);
    const double lyap_post = 0.5 * (post.local_bits * post.local_bits + post.remote_bits * post.remote_bits);
    const double pen = lcfg.v_parameter * weighted_penalty_w_m2;
    const double lhs = lyap_post - lyap_pre + pen;
    const double rhs = lcfg.drift_constant + (pre.remote_bits - pre.local_bits) * tau * rate_bps +
                       arrivals_bits * pre.local_bits - tau * pre.remote_bits * cpu_hz / svc.cycles_per_bit +
                       pen;
    return {lhs <= rhs, rhs - lhs};
}

} // namespace blue

#endif // BLUE_OPTIMIZER_HPP
