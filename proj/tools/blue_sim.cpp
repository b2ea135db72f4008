// Command-line harness: single runs, the three sweep experiments, and config
// validation, with CSV and SVG outputs.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "blue/config.hpp"
#include "blue/csv.hpp"
#include "blue/simulator.hpp"
#include "blue/svg_plot.hpp"
#include "blue/validate.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    std::string profile = "desk";
    std::string policy;
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "scenario config file")->required();
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--seeds", o.seeds, "comma-separated run seeds")->delimiter(',');
    cmd->add_option("--set", o.overrides, "config override key=value (repeatable)");
    cmd->add_option("--policy", o.policy, "policy kind override");
    cmd->add_option("--profile", o.profile, "parameter profile")->check(CLI::IsMember({"desk", "paper"}));
}

blue::Config load_config(const CommonOpts& o) {
    blue::Config cfg = blue::Config::profile(o.profile);
    cfg.load_file(o.config_path);
    for (const std::string& ov : o.overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("malformed override (expected key=value): " + ov);
        cfg.set(ov.substr(0, eq), ov.substr(eq + 1));
    }
    if (!o.policy.empty()) cfg.set("sim.policy", o.policy);
    return cfg;
}

std::vector<std::uint64_t> effective_seeds(const CommonOpts& o, const blue::Config& cfg) {
    if (!o.seeds.empty()) return o.seeds;
    return {static_cast<std::uint64_t>(cfg.get_int("sim.seed"))};
}

std::string out_path(const CommonOpts& o, const std::string& name) {
    fs::create_directories(o.out_dir);
    return (fs::path(o.out_dir) / name).string();
}

std::string header_for(const blue::Config& cfg, const std::vector<std::uint64_t>& seeds,
                       const std::vector<std::string>& overrides) {
    std::string h = blue::reproducibility_header(cfg.hash(), seeds);
    for (const auto& ov : overrides) h += "# override " + ov + "\n";
    return h;
}

std::vector<blue::PolicyKind> parse_policies(const blue::Config& cfg) {
    std::vector<blue::PolicyKind> out;
    for (const auto& s : cfg.get_string_list("sweep.policies")) out.push_back(blue::policy_from_string(s));
    return out;
}

int cmd_run(const CommonOpts& o) {
    const blue::Config cfg = load_config(o);
    const auto seeds = effective_seeds(o, cfg);
    blue::ScenarioConfig scen = cfg.to_scenario();
    std::vector<blue::RunMetrics> runs;
    for (std::uint64_t s : seeds) {
        scen.seed = s;
        runs.push_back(blue::run(scen));
    }
    const std::string path = out_path(o, "run.csv");
    blue::write_run_csv(path, header_for(cfg, seeds, o.overrides), seeds, runs);
    std::cout << "wrote " << path << "\n";
    for (size_t i = 0; i < runs.size(); ++i)
        std::cout << "seed " << seeds[i] << ": emfe " << blue::w_to_dbm(runs[i].avg_emfe_w_m2)
                  << " dBm/m^2, delay " << runs[i].avg_delay_s * 1e3 << " ms, rate "
                  << runs[i].avg_rate_bps / 1e6 << " Mbps" << (runs[i].stable ? "" : " [UNSTABLE]") << "\n";
    return 0;
}

int cmd_sweep_v(const CommonOpts& o) {
    const blue::Config cfg = load_config(o);
    const auto seeds = effective_seeds(o, cfg);
    const auto points = blue::sweep_v(cfg.to_scenario(), cfg.get_list("sweep.v_values"), seeds);
    const std::string path = out_path(o, "sweep_v.csv");
    blue::write_sweep_v_csv(path, header_for(cfg, seeds, o.overrides), points);

    blue::PlotSeries tradeoff{"emfe vs delay", {}, {}};
    for (const auto& p : points) {
        tradeoff.x.push_back(p.agg.mean_delay_s);
        tradeoff.y.push_back(p.agg.mean_emfe_w_m2);
    }
    blue::write_svg_plot(out_path(o, "sweep_v.svg"),
                         {"EMFE-delay trade-off", "avg delay [s]", "avg EMFE [W/m^2]", true, true},
                         {tradeoff});
    std::cout << "wrote " << path << "\n";
    return 0;
}

int cmd_sweep_range(const CommonOpts& o) {
    const blue::Config cfg = load_config(o);
    const auto seeds = effective_seeds(o, cfg);
    const auto points = blue::sweep_range(cfg.to_scenario(), cfg.get_list("sweep.distances"),
                                          cfg.get_double("sweep.delay_bound_s"), parse_policies(cfg), seeds);
    const std::string path = out_path(o, "sweep_range.csv");
    blue::write_sweep_range_csv(path, header_for(cfg, seeds, o.overrides), points);

    std::vector<blue::PlotSeries> series;
    for (const auto& p : points) {
        if (!p.tune.feasible) continue;
        auto it = std::find_if(series.begin(), series.end(),
                               [&](const auto& s) { return s.label == blue::to_string(p.policy); });
        if (it == series.end()) { series.push_back({blue::to_string(p.policy), {}, {}}); it = series.end() - 1; }
        it->x.push_back(p.distance_m);
        it->y.push_back(p.tune.at_v_star.mean_emfe_w_m2);
    }
    blue::write_svg_plot(out_path(o, "sweep_range.svg"),
                         {"EMFE vs range", "UE-AP distance [m]", "avg EMFE [W/m^2]", false, true}, series);
    std::cout << "wrote " << path << "\n";
    return 0;
}

int cmd_sweep_arrival(const CommonOpts& o) {
    const blue::Config cfg = load_config(o);
    const auto seeds = effective_seeds(o, cfg);
    const auto points = blue::sweep_arrival(cfg.to_scenario(), cfg.get_list("sweep.arrivals"),
                                            cfg.get_double("sweep.delay_bound_s"), parse_policies(cfg), seeds);
    const std::string path = out_path(o, "sweep_arrival.csv");
    blue::write_sweep_arrival_csv(path, header_for(cfg, seeds, o.overrides), points);

    std::vector<blue::PlotSeries> series;
    for (const auto& p : points) {
        if (!p.tune.feasible) continue;
        auto it = std::find_if(series.begin(), series.end(),
                               [&](const auto& s) { return s.label == blue::to_string(p.policy); });
        if (it == series.end()) { series.push_back({blue::to_string(p.policy), {}, {}}); it = series.end() - 1; }
        it->x.push_back(p.arrival_bps);
        it->y.push_back(blue::w_to_dbm(p.tune.at_v_star.mean_emfe_w_m2));
    }
    blue::write_svg_plot(out_path(o, "sweep_arrival.svg"),
                         {"EMFE vs arrival rate", "arrival rate [bps]", "avg EMFE [dBm/m^2]", true, false},
                         series);
    std::cout << "wrote " << path << "\n";
    return 0;
}

int cmd_validate(const CommonOpts& o) {
    const blue::Config cfg = load_config(o);
    const blue::ValidationReport rep = blue::validate_scenario(cfg.to_scenario());
    for (const auto& [name, pass] : rep.checks)
        std::cout << (pass ? "[PASS] " : "[FAIL] ") << name << "\n";
    for (const auto& w : rep.warnings) std::cout << "[WARN] " << w << "\n";
    return rep.ok() ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"RIS-aided MEC offloading simulator with EMF-exposure-aware control"};
    app.require_subcommand(1);

    CommonOpts run_o, sv_o, sr_o, sa_o, va_o;
    CLI::App* c_run = app.add_subcommand("run", "single scenario run");
    add_common(c_run, run_o);
    CLI::App* c_sv = app.add_subcommand("sweep-v", "EMFE-delay trade-off over a V grid");
    add_common(c_sv, sv_o);
    CLI::App* c_sr = app.add_subcommand("sweep-range", "EMFE vs UE-AP distance at fixed delay bound");
    add_common(c_sr, sr_o);
    CLI::App* c_sa = app.add_subcommand("sweep-arrival", "EMFE vs arrival rate at fixed delay bound");
    add_common(c_sa, sa_o);
    CLI::App* c_va = app.add_subcommand("validate", "config and invariant audit");
    add_common(c_va, va_o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (c_run->parsed()) return cmd_run(run_o);
        if (c_sv->parsed()) return cmd_sweep_v(sv_o);
        if (c_sr->parsed()) return cmd_sweep_range(sr_o);
        if (c_sa->parsed()) return cmd_sweep_arrival(sa_o);
        if (c_va->parsed()) return cmd_validate(va_o);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
