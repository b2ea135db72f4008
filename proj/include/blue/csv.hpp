#ifndef BLUE_CSV_HPP
#define BLUE_CSV_HPP

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "blue/simulator.hpp"

namespace blue {

/// Scientific notation, 9 significant digits, locale-independent.
inline std::string fmt_sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.8e", v);
    return buf;
}

inline std::string reproducibility_header(std::uint64_t config_hash, const std::vector<std::uint64_t>& seeds) {
    std::ostringstream os;
    os << "# config_hash=" << std::hex << config_hash << std::dec << " master_seed=";
    for (size_t i = 0; i < seeds.size(); ++i) os << (i ? "," : "") << seeds[i];
    os << "\n";
    return os.str();
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    return out;
}

inline void write_run_csv(const std::string& path, const std::string& header,
                          const std::vector<std::uint64_t>& seeds, const std::vector<RunMetrics>& runs) {
    if (runs.empty()) throw std::invalid_argument("write_run_csv: empty results");
    auto out = open_out(path);
    out << header << "seed,avg_emfe_w_m2,avg_delay_s,avg_rate_bps,avg_power_w,avg_local_bits,avg_remote_bits,stable\n";
    for (size_t i = 0; i < runs.size(); ++i) {
        const auto& r = runs[i];
        out << seeds[i] << ',' << fmt_sci(r.avg_emfe_w_m2) << ',' << fmt_sci(r.avg_delay_s) << ','
            << fmt_sci(r.avg_rate_bps) << ',' << fmt_sci(r.avg_power_w) << ','
            << fmt_sci(r.avg_local_bits) << ',' << fmt_sci(r.avg_remote_bits) << ','
            << (r.stable ? 1 : 0) << '\n';
    }
}

inline void write_sweep_v_csv(const std::string& path, const std::string& header,
                              const std::vector<SweepVPoint>& points) {
    if (points.empty()) throw std::invalid_argument("write_sweep_v_csv: empty results");
    auto out = open_out(path);
    out << header << "v,seed,avg_emfe_w_m2,avg_delay_s,avg_rate_bps,avg_power_w,stable\n";
    for (const auto& p : points)
        for (size_t i = 0; i < p.agg.per_seed.size(); ++i) {
            const auto& r = p.agg.per_seed[i];
            out << fmt_sci(p.v) << ',' << p.agg.seeds[i] << ',' << fmt_sci(r.avg_emfe_w_m2) << ','
                << fmt_sci(r.avg_delay_s) << ',' << fmt_sci(r.avg_rate_bps) << ','
                << fmt_sci(r.avg_power_w) << ',' << (r.stable ? 1 : 0) << '\n';
        }
}

inline void write_sweep_range_csv(const std::string& path, const std::string& header,
                                  const std::vector<RangePoint>& points) {
    if (points.empty()) throw std::invalid_argument("write_sweep_range_csv: empty results");
    auto out = open_out(path);
    out << header << "distance_m,policy,v_star,avg_emfe_w_m2,avg_emfe_dbm_m2\n";
    for (const auto& p : points) {
        if (!p.tune.feasible) {
            out << "# infeasible: distance_m=" << fmt_sci(p.distance_m) << " policy=" << to_string(p.policy)
                << '\n';
            continue;
        }
        out << fmt_sci(p.distance_m) << ',' << to_string(p.policy) << ',' << fmt_sci(p.tune.v_star) << ','
            << fmt_sci(p.tune.at_v_star.mean_emfe_w_m2) << ','
            << fmt_sci(w_to_dbm(p.tune.at_v_star.mean_emfe_w_m2)) << '\n';
    }
}

inline void write_sweep_arrival_csv(const std::string& path, const std::string& header,
                                    const std::vector<ArrivalPoint>& points) {
    if (points.empty()) throw std::invalid_argument("write_sweep_arrival_csv: empty results");
    auto out = open_out(path);
    out << header << "arrival_bps,policy,avg_emfe_dbm_m2,gain_db_vs_no_ris\n";
    for (const auto& p : points) {
        if (!p.tune.feasible) {
            out << "# infeasible: arrival_bps=" << fmt_sci(p.arrival_bps) << " policy=" << to_string(p.policy)
                << '\n';
            continue;
        }
        out << fmt_sci(p.arrival_bps) << ',' << to_string(p.policy) << ','
            << fmt_sci(w_to_dbm(p.tune.at_v_star.mean_emfe_w_m2)) << ','
            << fmt_sci(p.gain_db_vs_no_ris) << '\n';
    }
}

/// Rows of cells, comment and header lines skipped on request; for round-trip tests.
inline std::vector<std::vector<std::string>> parse_csv(const std::string& path, bool skip_comments = true) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open csv: " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (skip_comments && line.front() == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(std::move(cells));
    }
    return rows;
}

} // namespace blue

#endif // BLUE_CSV_HPP
