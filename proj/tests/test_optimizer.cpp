#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "blue/optimizer.hpp"
#include "blue/simulator.hpp"

using namespace blue;
using Catch::Approx;

namespace {

RadioConfig desk_radio() {
    RadioConfig r;
    r.bandwidth_hz = 8e6;
    r.noise_psd_w_hz = 3.9810717055349565e-21;
    r.wavelength_m = 0.0107;
    r.max_tx_power_w = 0.1;
    return r;
}

ScenarioConfig desk_scenario() {
    ScenarioConfig s;
    s.geometry.ue = {0, 50, 1};
    s.geometry.ap = {50, 50, 1};
    s.geometry.ris = {4, 48, 1};
    s.geometry.pixels = {{1, 50, 1}};
    s.pixel_weights = {1.0};
    s.geometry.ue_array = {8, 0.0, 0.0, 1.0};
    s.geometry.ap_array = {8, 0.0, 0.0, 1.0};
    s.geometry.ris_array = {20, 0.0, 0.0, 1.0};
    RicianParams p;
    p.carrier_frequency_hz = 28e9;
    s.channel = {p, p, p, p, p};
    s.channel.ue_ris.reference_pathloss = 200.0;
    s.channel.ris_ap.reference_pathloss = 200.0;
    s.channel.ris_pixel.reference_pathloss = 200.0;
    s.radio = desk_radio();
    s.service.mean_arrival_bps = 1e8;
    finalize_config(s);
    return s;
}

/// Per-slot objective restricted to one triple, as a function of power only.
double objective_of_power(double p, double v, double pix_gain, double g_eff, double bl, double br,
                          const RadioConfig& cfg) {
    const double emfe = 4.0 * std::numbers::pi / (cfg.wavelength_m * cfg.wavelength_m) * p * pix_gain;
    const double rate = cfg.bandwidth_hz * std::log2(1.0 + g_eff * p / cfg.noise_power_w());
    return v * emfe + (br - bl) * rate;
}

/// Independent brute-force oracle: full enumeration with ternary-searched power
/// (no closed form anywhere on this path).
Decision brute_force_solve(const SlotChannels& ch, const Codebooks& books, const QueueState& st,
                           double v, const RadioConfig& cfg, const PixelSet& pixels) {
    Decision best;
    double best_obj = std::numeric_limits<double>::infinity();
    bool have = false;
    for (size_t ui = 0; ui < books.precoders.size(); ++ui)
        for (size_t ci = 0; ci < books.combiners.size(); ++ci)
            for (size_t ri = 0; ri < books.ris_profiles.size(); ++ri) {
                const auto H = compose_e2e(ch, books.ris_profiles[ri]);
                const std::complex<double> eff =
                    books.combiners[ci].adjoint() * H * books.precoders[ui];
                double pix = 0.0;
                for (size_t p = 0; p < pixels.weights.size(); ++p) {
                    const std::complex<double> hp =
                        compose_pixel(ch, books.ris_profiles[ri], p) * books.precoders[ui];
                    pix += pixels.weights[p] * std::norm(hp);
                }
                // ternary search on the convex restriction
                double lo = 0.0, hi = cfg.max_tx_power_w;
                for (int it = 0; it < 200; ++it) {
                    const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
                    if (objective_of_power(m1, v, pix, std::norm(eff), st.local_bits, st.remote_bits, cfg) <=
                        objective_of_power(m2, v, pix, std::norm(eff), st.local_bits, st.remote_bits, cfg))
                        hi = m2;
                    else
                        lo = m1;
                }
                const double p_star = 0.5 * (lo + hi);
                double obj = objective_of_power(p_star, v, pix, std::norm(eff), st.local_bits,
                                                st.remote_bits, cfg);
                double p_best = p_star;
                for (double pc : {0.0, cfg.max_tx_power_w}) {
                    const double o = objective_of_power(pc, v, pix, std::norm(eff), st.local_bits,
                                                        st.remote_bits, cfg);
                    if (o < obj) { obj = o; p_best = pc; }
                }
                if (!have || obj < best_obj) {
                    have = true;
                    best_obj = obj;
                    best = {int(ui), int(ci), int(ri), p_best, obj, 0.0, 0.0};
                }
            }
    return best;
}

} // namespace

TEST_CASE("no transmission when the remote backlog dominates") {
    auto cfg = desk_radio();
    CHECK(optimal_power(5.0, 5.0, 1e15, 1e-7, 1e-9, cfg) == 0.0);
    CHECK(optimal_power(3.0, 9.0, 1e15, 1e-7, 1e-9, cfg) == 0.0);
}

TEST_CASE("huge V clamps the power to zero") {
    auto cfg = desk_radio();
    CHECK(optimal_power(1e6, 0.0, 1e40, 1e-7, 1e-9, cfg) == 0.0);
}

TEST_CASE("V=0 or zero pixel gain gives full power; zero effective gain gives none") {
    auto cfg = desk_radio();
    CHECK(optimal_power(1e6, 0.0, 0.0, 1e-7, 1e-9, cfg) == cfg.max_tx_power_w);
    CHECK(optimal_power(1e6, 0.0, 1e15, 0.0, 1e-9, cfg) == cfg.max_tx_power_w);
    CHECK(optimal_power(1e6, 0.0, 1e15, 1e-7, 0.0, cfg) == 0.0);
}

TEST_CASE("closed-form power beats a fine grid search on random instances") {
    auto cfg = desk_radio();
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> bl(0.0, 2e6), gain(1e-10, 1e-6), vdist(1e12, 1e17);
    for (int inst = 0; inst < 50; ++inst) {
        const double local = bl(rng), remote = bl(rng) * 0.5;
        const double pix = gain(rng), eff = gain(rng) * 100.0, v = vdist(rng);
        const double p_star = optimal_power(local, remote, v, pix, eff, cfg);
        const double o_star = objective_of_power(p_star, v, pix, eff, local, remote, cfg);
        double o_grid = std::numeric_limits<double>::infinity();
        const double res = 1e-7;
        for (double p = 0.0; p <= cfg.max_tx_power_w + res / 2; p += res)
            o_grid = std::min(o_grid, objective_of_power(p, v, pix, eff, local, remote, cfg));
        const double scale = std::max({std::abs(o_star), std::abs(o_grid), 1.0});
        CHECK(o_star <= o_grid + 1e-9 * scale);
        // interior solutions are stationary points
        if (p_star > 1e-6 && p_star < cfg.max_tx_power_w - 1e-6) {
            const double h = 1e-9;
            const double deriv = (objective_of_power(p_star + h, v, pix, eff, local, remote, cfg) -
                                  objective_of_power(p_star - h, v, pix, eff, local, remote, cfg)) /
                                 (2 * h);
            const double deriv_scale =
                std::abs(objective_of_power(p_star, v, pix, eff, local, remote, cfg)) / p_star + 1.0;
            CHECK(std::abs(deriv) / deriv_scale < 1e-6);
        }
    }
}

TEST_CASE("slot objective arithmetic") {
    CHECK(slot_objective(0.0, 0.0, 5.0, 3.0, 2.0) == 0.0);
    CHECK(slot_objective(7.0, 3.0, 4.0, 4.0, 2.0) == Approx(6.0));
    CHECK(slot_objective(5.0, 3.0, 10.0, 6.0, 2.0) == Approx(6.0 - 20.0));
}

TEST_CASE("solve_slot matches the brute-force oracle on random slots") {
    auto scen = desk_scenario();
    const Codebooks books = build_codebooks(scen);
    const PixelSet pixels = scen.pixel_set();
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> bl(0.0, 3e6), vdist(1e13, 1e17);
    for (int inst = 0; inst < 8; ++inst) {
        const auto ch = generate_slot_channels(scen.geometry, scen.channel, rng);
        QueueState st{bl(rng) + 1e5, bl(rng) * 0.3};
        LyapunovConfig lcfg{vdist(rng), 1.0, 0.0};
        const Decision got = solve_slot(ch, books, st, lcfg, scen.radio, pixels);
        const Decision oracle = brute_force_solve(ch, books, st, lcfg.v_parameter, scen.radio, pixels);
        CHECK(got.precoder_index == oracle.precoder_index);
        CHECK(got.combiner_index == oracle.combiner_index);
        CHECK(got.ris_index == oracle.ris_index);
        const double scale = std::max(std::abs(oracle.objective_value), 1.0);
        CHECK(std::abs(got.objective_value - oracle.objective_value) <= 1e-9 * scale);
        CHECK(got.objective_value <= oracle.objective_value + 1e-9 * scale);
    }
}

TEST_CASE("all-zero tie resolves to the lowest indices") {
    auto scen = desk_scenario();
    const Codebooks books = build_codebooks(scen);
    std::mt19937_64 rng(37);
    const auto ch = generate_slot_channels(scen.geometry, scen.channel, rng);
    LyapunovConfig lcfg{1e15, 1.0, 0.0};
    const Decision d = solve_slot(ch, books, {100.0, 200.0}, lcfg, scen.radio, scen.pixel_set());
    CHECK(d.tx_power_w == 0.0);
    CHECK(d.objective_value == 0.0);
    CHECK(d.precoder_index == 0);
    CHECK(d.combiner_index == 0);
    CHECK(d.ris_index == 0);
}

TEST_CASE("singleton codebooks degenerate to the closed-form power") {
    auto scen = desk_scenario();
    const Codebooks full = build_codebooks(scen);
    Codebooks one;
    one.precoders = {full.precoders[4]};
    one.combiners = {full.combiners[7]};
    one.ris_profiles = {full.ris_profiles[2]};
    one.precoder_angles = {full.precoder_angles[4]};
    one.combiner_angles = {full.combiner_angles[7]};
    one.ris_target_angles = {full.ris_target_angles[2]};
    std::mt19937_64 rng(41);
    const auto ch = generate_slot_channels(scen.geometry, scen.channel, rng);
    const PixelSet pixels = scen.pixel_set();
    QueueState st{2e6, 1e5};
    LyapunovConfig lcfg{1e15, 1.0, 0.0};
    const Decision d = solve_slot(ch, one, st, lcfg, scen.radio, pixels);
    const auto H = compose_e2e(ch, one.ris_profiles[0]);
    const std::complex<double> eff = one.combiners[0].adjoint() * H * one.precoders[0];
    double pix = 0.0;
    for (size_t p = 0; p < pixels.weights.size(); ++p) {
        const std::complex<double> hp = compose_pixel(ch, one.ris_profiles[0], p) * one.precoders[0];
        pix += pixels.weights[p] * std::norm(hp);
    }
    CHECK(d.tx_power_w == Approx(optimal_power(st.local_bits, st.remote_bits, lcfg.v_parameter, pix,
                                               std::norm(eff), scen.radio)));
}

TEST_CASE("boa_no_ris equals the search restricted to precoder x combiner") {
    auto scen = desk_scenario();
    const Codebooks books = build_codebooks(scen);
    const PixelSet pixels = scen.pixel_set();
    const PolicyContext ctx = make_policy_context(scen.geometry, books, scen.radio.wavelength_m);
    std::mt19937_64 rng(43);
    const auto ch = generate_slot_channels(scen.geometry, scen.channel, rng);
    QueueState st{2e6, 3e5};
    LyapunovConfig lcfg{1e15, 1.0, 0.0};
    const Decision got =
        baseline_decision(PolicyKind::boa_no_ris, ch, books, st, lcfg, scen.radio, pixels, ctx);

    // restricted-enumeration oracle over a zeroed-RIS copy of the channels
    SlotChannels blocked = ch;
    blocked.H_ris_ap.setZero();
    for (auto& h : blocked.h_ris_pixel) h.setZero();
    Codebooks no_ris_books = books;
    no_ris_books.ris_profiles = {books.ris_profiles[0]};
    const Decision oracle =
        brute_force_solve(blocked, no_ris_books, st, lcfg.v_parameter, scen.radio, pixels);
    CHECK(got.precoder_index == oracle.precoder_index);
    CHECK(got.combiner_index == oracle.combiner_index);
    const double scale = std::max(std::abs(oracle.objective_value), 1.0);
    CHECK(std::abs(got.objective_value - oracle.objective_value) <= 1e-9 * scale);
}

TEST_CASE("fixed AP policy picks the boresight entry in the collinear deployment") {
    auto scen = desk_scenario();
    // point boresights straight along the UE-AP axis so the LOS is at 0 degrees
    scen.auto_boresight = false;
    scen.geometry.ue_array.boresight_azimuth = 0.0;
    scen.geometry.ap_array.boresight_azimuth = std::numbers::pi;
    const Codebooks books = build_codebooks(scen);
    const PolicyContext ctx = make_policy_context(scen.geometry, books, scen.radio.wavelength_m);
    CHECK(books.precoder_angles[size_t(ctx.precoder_to_ap)] == Approx(0.0).margin(1e-12));
    CHECK(books.combiner_angles[size_t(ctx.combiner_to_ue)] == Approx(0.0).margin(1e-12));
}

TEST_CASE("every policy refuses to transmit when the remote queue dominates") {
    auto scen = desk_scenario();
    const Codebooks books = build_codebooks(scen);
    const PixelSet pixels = scen.pixel_set();
    const PolicyContext ctx = make_policy_context(scen.geometry, books, scen.radio.wavelength_m);
    std::mt19937_64 rng(47);
    const auto ch = generate_slot_channels(scen.geometry, scen.channel, rng);
    LyapunovConfig lcfg{1e15, 1.0, 0.0};
    for (PolicyKind k : {PolicyKind::boa_with_ris, PolicyKind::boa_no_ris, PolicyKind::fixed_ap_no_ris,
                         PolicyKind::fixed_ap_with_ris, PolicyKind::fixed_ris}) {
        const Decision d = baseline_decision(k, ch, books, {50.0, 50.0}, lcfg, scen.radio, pixels, ctx);
        CHECK(d.tx_power_w == 0.0);
    }
}

TEST_CASE("decisions are deterministic") {
    auto scen = desk_scenario();
    const Codebooks books = build_codebooks(scen);
    const PixelSet pixels = scen.pixel_set();
    std::mt19937_64 rng(53);
    const auto ch = generate_slot_channels(scen.geometry, scen.channel, rng);
    QueueState st{1.7e6, 2.2e5};
    LyapunovConfig lcfg{3e15, 1.0, 0.0};
    const Decision a = solve_slot(ch, books, st, lcfg, scen.radio, pixels);
    const Decision b = solve_slot(ch, books, st, lcfg, scen.radio, pixels);
    CHECK(a.precoder_index == b.precoder_index);
    CHECK(a.combiner_index == b.combiner_index);
    CHECK(a.ris_index == b.ris_index);
    CHECK(a.tx_power_w == b.tx_power_w);
    CHECK(a.objective_value == b.objective_value);
}

TEST_CASE("drift constant arithmetic and idle-slot slack") {
    ServiceConfig svc;
    svc.slot_duration_s = 0.01;
    svc.cycles_per_bit = 10.0;
    const double a_max = 1.2e6, r_max = 2e8, f_max = 4e9;
    const double c = drift_constant(a_max, r_max, f_max, svc.slot_duration_s);
    const double expect = 0.5 * (a_max * a_max + 2.0 * std::pow(0.01 * r_max, 2) + std::pow(0.01 * f_max, 2));
    CHECK(c == Approx(expect).epsilon(1e-15));

    LyapunovConfig lcfg{1e15, c, r_max};
    const auto dc = drift_bound_check({0, 0}, {0, 0}, 0.0, 0.0, 0.0, lcfg, 0.0, svc);
    CHECK(dc.holds);
    CHECK(dc.slack == Approx(c));
}

TEST_CASE("drift bound holds along a short simulated trace") {
    auto scen = desk_scenario();
    const Codebooks books = build_codebooks(scen);
    const PixelSet pixels = scen.pixel_set();
    const PolicyContext ctx = make_policy_context(scen.geometry, books, scen.radio.wavelength_m);
    std::mt19937_64 rng(59);
    const double r_max = 1e9; // generous per-slot rate cap for the bound
    LyapunovConfig lcfg{1e15,
                       drift_constant(scen.service.arrival_max_bits(), r_max,
                                      scen.service.effective_cpu_max(), scen.service.slot_duration_s),
                       r_max};
    QueueState st;
    for (int t = 0; t < 300; ++t) {
        const auto ch = generate_slot_channels(scen.geometry, scen.channel, rng);
        const double arr = draw_arrivals_bits(scen.service, rng);
        const double cpu = draw_cpu_hz(scen.service, rng);
        const Decision d =
            baseline_decision(PolicyKind::boa_with_ris, ch, books, st, lcfg, scen.radio, pixels, ctx);
        const QueueState pre = st;
        const auto ls = step_local(pre, d.achieved_rate_bps, arr, scen.service);
        st = {ls.new_local_bits, step_remote(pre, ls.transmitted_bits, cpu, scen.service)};
        const auto dc = drift_bound_check(pre, st, d.achieved_rate_bps, arr, cpu, lcfg,
                                          d.achieved_emfe_w_m2, scen.service);
        CHECK(dc.slack >= 0.0);
    }
}
