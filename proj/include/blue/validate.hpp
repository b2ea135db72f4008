#ifndef BLUE_VALIDATE_HPP
#define BLUE_VALIDATE_HPP

#include <cmath>
#include <string>
#include <vector>

#include "blue/simulator.hpp"

namespace blue {

struct ValidationReport {
    std::vector<std::pair<std::string, bool>> checks;
    std::vector<std::string> warnings;

    bool ok() const {
        for (const auto& [name, pass] : checks)
            if (!pass) return false;
        return true;
    }
};

/// Codebook invariant audit; also used on externally supplied (possibly
/// corrupted) books.
inline void audit_codebooks(const Codebooks& books, ValidationReport& rep) {
    auto check = [&](const std::string& name, bool pass) { rep.checks.emplace_back(name, pass); };
    check("codebook cardinality: precoders non-empty", !books.precoders.empty());
    check("codebook cardinality: combiners non-empty", !books.combiners.empty());
    check("codebook cardinality: ris profiles non-empty", !books.ris_profiles.empty());

    bool pre_ok = true, comb_ok = true;
    for (const auto& w : books.precoders) pre_ok = pre_ok && std::abs(w.squaredNorm() - 1.0) <= 1e-12;
    for (const auto& w : books.combiners) comb_ok = comb_ok && std::abs(w.squaredNorm() - 1.0) <= 1e-12;
    check("precoder unit power", pre_ok);
    check("combiner unit power", comb_ok);

    bool unit_mod = true;
    for (const auto& prof : books.ris_profiles)
        for (double th : prof.phases)
            unit_mod = unit_mod && th >= 0.0 && th < 2.0 * std::numbers::pi;
    check("ris phases in [0, 2pi)", unit_mod);
}

/// Invariant audit plus a short smoke run with the drift bound checked on
/// every slot. Failures are reported, not thrown.
inline ValidationReport validate_scenario(ScenarioConfig cfg) {
    ValidationReport rep;
    auto check = [&](const std::string& name, bool pass) { rep.checks.emplace_back(name, pass); };

    bool config_ok = true;
    std::string config_err;
    try {
        finalize_config(cfg);
        cfg.validate();
    } catch (const std::exception& e) {
        config_ok = false;
        config_err = e.what();
    }
    check(config_ok ? "config invariants" : "config invariants (" + config_err + ")", config_ok);
    if (!config_ok) return rep;

    if (cfg.radio.max_tx_power_w == 0.0)
        rep.warnings.push_back("max_tx_power is 0: only P=0 is feasible, the link can never drain");

    const Codebooks books = build_codebooks(cfg);
    audit_codebooks(books, rep);

    bool steer_mod = true;
    for (const ArraySpec* a : {&cfg.geometry.ue_array, &cfg.geometry.ap_array, &cfg.geometry.ris_array}) {
        const Eigen::VectorXcd v = steering_vector(*a, cfg.radio.wavelength_m, 0.3);
        for (Eigen::Index i = 0; i < v.size(); ++i)
            steer_mod = steer_mod && std::abs(std::abs(v(i)) - 1.0) <= 1e-12;
    }
    check("steering vectors unit modulus", steer_mod);

    // 100-slot smoke run with the drift bound asserted on every slot
    ScenarioConfig smoke = cfg;
    smoke.horizon = 100;
    smoke.warmup = 0;
    bool smoke_ok = true;
    double min_slack = 0.0;
    try {
        const RunMetrics m = run(smoke);
        min_slack = m.min_drift_slack;
        smoke_ok = m.min_drift_slack >= 0.0;
    } catch (const std::exception& e) {
        smoke_ok = false;
        rep.warnings.push_back(std::string("smoke run threw: ") + e.what());
    }
    check("100-slot smoke run, drift bound slack >= 0 (min slack " + std::to_string(min_slack) + ")",
          smoke_ok);
    return rep;
}

} // namespace blue

#endif // BLUE_VALIDATE_HPP
