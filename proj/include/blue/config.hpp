#ifndef BLUE_CONFIG_HPP
#define BLUE_CONFIG_HPP

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "blue/simulator.hpp"

namespace blue {

/// Flat dotted-key configuration with profile defaults, file overlay, and
/// command-line overrides. Unknown keys are rejected everywhere.
class Config {
public:
    static Config profile(const std::string& name) {
        Config c;
        c.kv_ = defaults();
        if (name == "desk") {
            // paper parameters with bandwidth and arrivals divided by 100
        } else if (name == "paper") {
            c.kv_["radio.bandwidth_hz"] = "800e6";
            c.kv_["service.arrival_bps"] = "1e10";
        } else {
            throw std::invalid_argument("unknown profile: " + name);
        }
        return c;
    }

    void load_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open config file: " + path);
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[' && line.back() == ']') {
                section = trim(line.substr(1, line.size() - 2));
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key = value");
            std::string key = trim(line.substr(0, eq));
            if (!section.empty()) key = section + "." + key;
            set(key, trim(line.substr(eq + 1)));
        }
    }

    void set(const std::string& key, const std::string& value) {
        if (!kv_.count(key)) throw std::invalid_argument("unknown config key: " + key);
        kv_[key] = value;
    }

    const std::string& get(const std::string& key) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) throw std::invalid_argument("unknown config key: " + key);
        return it->second;
    }

    double get_double(const std::string& key) const {
        size_t pos = 0;
        const std::string& s = get(key);
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("config key " + key + ": not a number: " + s);
        return v;
    }
    long long get_int(const std::string& key) const { return static_cast<long long>(get_double(key)); }
    bool get_bool(const std::string& key) const {
        const std::string& s = get(key);
        if (s == "true" || s == "1") return true;
        if (s == "false" || s == "0") return false;
        throw std::invalid_argument("config key " + key + ": not a bool: " + s);
    }
    std::vector<double> get_list(const std::string& key) const {
        std::vector<double> out;
        std::stringstream ss(get(key));
        std::string tok;
        while (std::getline(ss, tok, ',')) out.push_back(std::stod(trim(tok)));
        return out;
    }
    std::vector<std::string> get_string_list(const std::string& key) const {
        std::vector<std::string> out;
        std::stringstream ss(get(key));
        std::string tok;
        while (std::getline(ss, tok, ',')) out.push_back(trim(tok));
        return out;
    }

    /// Sorted "key=value" lines; stable across runs, used for the output header hash.
    std::string canonical() const {
        std::string out;
        for (const auto& [k, v] : kv_) { out += k; out += '='; out += v; out += '\n'; }
        return out;
    }

    std::uint64_t hash() const { // FNV-1a
        std::uint64_t h = 0xCBF29CE484222325ULL;
        for (char c : canonical()) { h ^= static_cast<unsigned char>(c); h *= 0x100000001B3ULL; }
        return h;
    }

    ScenarioConfig to_scenario() const {
        ScenarioConfig s;
        s.geometry.ue = parse_position(get("scenario.ue"));
        s.geometry.ap = parse_position(get("scenario.ap"));
        s.geometry.ris = parse_position(get("scenario.ris"));
        parse_pixels(get("scenario.pixels"), s.geometry.pixels, s.pixel_weights);
        s.auto_boresight = get_bool("scenario.auto_boresight");

        const double spacing_frac = get_double("array.spacing_over_lambda");
        const double q = get_double("array.element_exponent");
        auto make_array = [&](const char* key) {
            ArraySpec a;
            a.num_elements = static_cast<int>(get_int(key));
            a.element_spacing = 0.0; // resolved to spacing_frac * lambda below
            a.element_exponent = q;
            return a;
        };
        s.geometry.ue_array = make_array("array.ue_elements");
        s.geometry.ap_array = make_array("array.ap_elements");
        s.geometry.ris_array = make_array("array.ris_elements");

        const double fc = get_double("channel.carrier_hz");
        const double lambda = kSpeedOfLight / fc;
        for (ArraySpec* a : {&s.geometry.ue_array, &s.geometry.ap_array, &s.geometry.ris_array})
            a->element_spacing = spacing_frac * lambda;

        auto make_link = [&](const char* gain_key) {
            RicianParams p;
            p.carrier_frequency_hz = fc;
            p.k_factor = get_double("channel.k_factor");
            p.pathloss_exponent = get_double("channel.pathloss_exponent");
            p.reference_pathloss = get_double(gain_key);
            return p;
        };
        s.channel.direct = make_link("channel.direct_ref_gain");
        s.channel.ue_ris = make_link("channel.ue_ris_ref_gain");
        s.channel.ris_ap = make_link("channel.ris_ap_ref_gain");
        s.channel.ue_pixel = make_link("channel.ue_pixel_ref_gain");
        s.channel.ris_pixel = make_link("channel.ris_pixel_ref_gain");

        s.radio.bandwidth_hz = get_double("radio.bandwidth_hz");
        s.radio.noise_psd_w_hz = std::pow(10.0, (get_double("radio.noise_psd_dbm_hz") - 30.0) / 10.0);
        s.radio.max_tx_power_w = get_double("radio.max_tx_power_w");
        s.radio.wavelength_m = lambda;

        s.service.slot_duration_s = get_double("service.slot_s");
        s.service.cycles_per_bit = get_double("service.cycles_per_bit");
        s.service.mean_arrival_bps = get_double("service.arrival_bps");
        s.service.cpu_margin = get_double("service.cpu_margin");
        s.service.cpu_max_hz = get_double("service.cpu_max_hz");
        s.service.packet_size_bits = get_double("service.packet_bits");

        s.codebook.beam_min_deg = get_double("codebook.beam_min_deg");
        s.codebook.beam_max_deg = get_double("codebook.beam_max_deg");
        s.codebook.beam_step_deg = get_double("codebook.beam_step_deg");
        s.codebook.ris_min_deg = get_double("codebook.ris_min_deg");
        s.codebook.ris_max_deg = get_double("codebook.ris_max_deg");
        s.codebook.ris_step_deg = get_double("codebook.ris_step_deg");
        s.codebook.ris_quant_bits = static_cast<int>(get_int("codebook.ris_quant_bits"));

        s.policy = policy_from_string(get("sim.policy"));
        s.v_parameter = get_double("lyapunov.v");
        s.horizon = get_int("sim.horizon");
        s.warmup = get_int("sim.warmup");
        s.seed = static_cast<std::uint64_t>(get_int("sim.seed"));
        s.initial_local_bits = get_double("sim.initial_local_bits");
        s.initial_remote_bits = get_double("sim.initial_remote_bits");
        return s;
    }

private:
    std::map<std::string, std::string> kv_;

    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return "";
        const auto e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }

    static Position3D parse_position(const std::string& s) {
        std::stringstream ss(s);
        std::string tok;
        std::vector<double> v;
        while (std::getline(ss, tok, ',')) v.push_back(std::stod(trim(tok)));
        if (v.size() != 3) throw std::invalid_argument("position must be x,y,z: " + s);
        return {v[0], v[1], v[2]};
    }

    static void parse_pixels(const std::string& s, std::vector<Position3D>& pos, std::vector<double>& w) {
        pos.clear();
        w.clear();
        std::stringstream ss(s);
        std::string group;
        while (std::getline(ss, group, ';')) {
            std::stringstream gs(group);
            std::string tok;
            std::vector<double> v;
            while (std::getline(gs, tok, ',')) v.push_back(std::stod(trim(tok)));
            if (v.size() != 4) throw std::invalid_argument("pixel must be x,y,z,weight: " + group);
            pos.push_back({v[0], v[1], v[2]});
            w.push_back(v[3]);
        }
        if (pos.empty()) throw std::invalid_argument("scenario.pixels must name at least one pixel");
    }

    static const std::map<std::string, std::string>& defaults() {
        static const std::map<std::string, std::string> d = {
            {"scenario.ue", "0,50,1"},
            {"scenario.ap", "50,50,1"},
            {"scenario.ris", "4,48,1"},
            {"scenario.pixels", "1,50,1,1"},
            {"scenario.auto_boresight", "true"},
            {"array.ue_elements", "8"},
            {"array.ap_elements", "8"},
            {"array.ris_elements", "20"},
            {"array.spacing_over_lambda", "0.5"},
            {"array.element_exponent", "1"},
            {"channel.carrier_hz", "28e9"},
            {"channel.k_factor", "10"},
            {"channel.pathloss_exponent", "2"},
            {"channel.direct_ref_gain", "1"},
            {"channel.ue_ris_ref_gain", "10000"},
            {"channel.ris_ap_ref_gain", "10000"},
            {"channel.ue_pixel_ref_gain", "1"},
            {"channel.ris_pixel_ref_gain", "1"},
            {"radio.bandwidth_hz", "8e6"},
            {"radio.noise_psd_dbm_hz", "-174"},
            {"radio.max_tx_power_w", "0.1"},
            {"service.slot_s", "0.01"},
            {"service.cycles_per_bit", "10"},
            {"service.arrival_bps", "1e8"},
            // margin 3 keeps the MEH queue strictly stable at desk scale so the
            // measured delay responds to the radio-side trade-off knob
            {"service.cpu_margin", "3"},
            {"service.cpu_max_hz", "0"},
            {"service.packet_bits", "1000"},
            {"codebook.beam_min_deg", "-60"},
            {"codebook.beam_max_deg", "60"},
            {"codebook.beam_step_deg", "10"},
            {"codebook.ris_min_deg", "-30"},
            {"codebook.ris_max_deg", "30"},
            {"codebook.ris_step_deg", "5"},
            {"codebook.ris_quant_bits", "0"},
            {"lyapunov.v", "1e15"},
            {"sim.policy", "boa_with_ris"},
            {"sim.horizon", "20000"},
            {"sim.warmup", "2000"},
            {"sim.seed", "1"},
            {"sim.initial_local_bits", "0"},
            {"sim.initial_remote_bits", "0"},
            {"sweep.v_values", "1e13,1e14,1e15,1e16,1e17,1e18"},
            {"sweep.distances", "25,50,100"},
            {"sweep.arrivals", "2e7,6e7,1.2e8"},
            {"sweep.delay_bound_s", "0.1"},
            {"sweep.policies", "boa_with_ris,boa_no_ris,fixed_ap_no_ris,fixed_ap_with_ris,fixed_ris"},
        };
        return d;
    }
};

} // namespace blue

#endif // BLUE_CONFIG_HPP
