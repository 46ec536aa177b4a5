#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wsnsim/channel.hpp"
#include "wsnsim/energy.hpp"
#include "wsnsim/experiments.hpp"
#include "wsnsim/packet.hpp"
#include "wsnsim/radio.hpp"
#include "wsnsim/shockburst.hpp"
#include "wsnsim/simulation.hpp"

namespace wsnsim {

// ============================================================================
// JSON experiment configs
// ============================================================================
//
// One file describes one experiment run:
//
//   {
//     "experiment": "simulate" | "per" | "fsl" | "curve" | "lifetime",
//     "seed": 42,                      // required for simulate / per; nonzero
//     "packet":    { "address_width": 5, "crc_width": 1, "datarate_bps": 2e6 },
//     "policy":    { "max_retransmits": 3, "retransmit_delay_s": 250e-6 },
//     "channel":   { "frequency_hz": 2.4e9, "range_m": 1, "tx_power_dbm": 0,
//                    "tx_antenna_gain_db": -5, "rx_antenna_gain_db": -5,
//                    "rx_sensitivity_dbm": -75 },
//     "ber_model": { "type": "fixed", "ber": 1e-5 }
//                | { "type": "threshold", "below": 0.5, "above": 0 }
//                | { "type": "table", "points": [[margin_db, ber], ...] },
//     "sim":       { "num_ptx": 1, "packets_per_node": 1, "payload_bytes": 1,
//                    "auto_ack": true, "first_send_s": 0.01,
//                    "send_interval_s": 0.01, "ranges_m": [], "min_duration_s": 0,
//                    "record_trace": true, "tx_power_dbm": 0 },
//     "per":       { "packets_per_point": 1000, "payload_bytes": 1, "ranges_m": [] },
//     "curve":     { "ber_grid": { "lo": 1e-7, "hi": 1e-2, "points": 50 },
//                    "payload_bytes": [1] },           // or "bers": [...]
//     "fsl":       { "ranges_m": [1, ..., 10], "include_reference": true },
//     "lifetime":  { "profile": { ...DutyCycleProfile fields... },
//                    "battery_mAh": 2450,
//                    "tx_levels_mA": [11.6, 10.4, 9.2, 8.0],
//                    "include_reference": true }
//   }
//
// Sections irrelevant to the chosen experiment are ignored; missing fields
// take the defaults shown. Unknown top-level keys are rejected so a typo
// cannot silently turn into a default.

inline TxPowerLevel tx_level_from_dbm(double dbm) {
    for (TxPowerLevel level : kTxPowerLevels)
        if (tx_power_dbm(level) == dbm) return level;
    throw std::invalid_argument("tx_power_dbm must be one of 0, -6, -12, -18");
}

struct ExperimentConfig {
    std::string experiment;
    std::optional<std::uint64_t> seed;

    SimulationConfig sim;
    PerSweepConfig per;
    CurveConfig curve;
    std::vector<double> fsl_ranges = default_fsl_ranges();
    double fsl_frequency_hz = kDefaultFrequencyHz;
    bool fsl_include_reference = true;
    LifetimeOptions lifetime;
};

namespace detail {

using nlohmann::json;

inline const json& section(const json& j, const char* key, const json& empty) {
    auto it = j.find(key);
    return it == j.end() ? empty : *it;
}

inline PacketConfig parse_packet(const json& j) {
    PacketConfig p;
    p.address_width = j.value("address_width", p.address_width);
    p.crc_width = j.value("crc_width", p.crc_width);
    p.datarate_bps = j.value("datarate_bps", p.datarate_bps);
    return p;
}

inline RetransmitPolicy parse_policy(const json& j) {
    RetransmitPolicy p;
    p.max_retransmits = j.value("max_retransmits", p.max_retransmits);
    p.retransmit_delay_s = j.value("retransmit_delay_s", p.retransmit_delay_s);
    return p;
}

inline ChannelParams parse_channel(const json& j) {
    ChannelParams c;
    c.frequency_hz = j.value("frequency_hz", c.frequency_hz);
    c.range_m = j.value("range_m", c.range_m);
    c.tx_power_dbm = j.value("tx_power_dbm", c.tx_power_dbm);
    c.tx_antenna_gain_db = j.value("tx_antenna_gain_db", c.tx_antenna_gain_db);
    c.rx_antenna_gain_db = j.value("rx_antenna_gain_db", c.rx_antenna_gain_db);
    c.rx_sensitivity_dbm = j.value("rx_sensitivity_dbm", c.rx_sensitivity_dbm);
    return c;
}

inline BerModel parse_ber_model(const json& j) {
    if (j.is_null() || j.empty()) return BerModel::fixed(0.0);
    const std::string type = j.value("type", "fixed");
    if (type == "fixed") return BerModel::fixed(j.value("ber", 0.0));
    if (type == "threshold") return BerModel::threshold(j.value("below", 0.5), j.value("above", 0.0));
    if (type == "table") {
        std::vector<std::pair<double, double>> points;
        for (const auto& p : j.at("points"))
            points.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
        return BerModel::table(std::move(points));
    }
    throw std::invalid_argument("ber_model.type must be fixed, threshold, or table");
}

inline DutyCycleProfile parse_profile(const json& j) {
    DutyCycleProfile p;
    p.time_on_air_s = j.value("time_on_air_s", p.time_on_air_s);
    p.time_in_rx_s = j.value("time_in_rx_s", p.time_in_rx_s);
    p.pll_lock_s = j.value("pll_lock_s", p.pll_lock_s);
    p.power_up_s = j.value("power_up_s", p.power_up_s);
    p.period_s = j.value("period_s", p.period_s);
    p.tx_mA = j.value("tx_mA", p.tx_mA);
    p.rx_mA = j.value("rx_mA", p.rx_mA);
    p.pll_lock_tx_mA = j.value("pll_lock_tx_mA", p.pll_lock_tx_mA);
    p.pll_lock_rx_mA = j.value("pll_lock_rx_mA", p.pll_lock_rx_mA);
    p.power_down_mA = j.value("power_down_mA", p.power_down_mA);
    p.power_up_mA = j.value("power_up_mA", p.power_up_mA);
    return p;
}

} // namespace detail

inline ExperimentConfig parse_experiment(const nlohmann::json& j) {
    static const char* known[] = {"experiment", "seed",  "packet", "policy", "channel",
                                  "ber_model",  "sim",   "per",    "curve",  "fsl",
                                  "lifetime"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || (it.key() == k);
        if (!ok) throw std::invalid_argument("config: unknown top-level key '" + it.key() + "'");
    }

    static const nlohmann::json empty = nlohmann::json::object();
    ExperimentConfig cfg;
    cfg.experiment = j.value("experiment", "");
    if (cfg.experiment.empty()) throw std::invalid_argument("config: missing 'experiment'");
    static const char* kinds[] = {"simulate", "per", "fsl", "curve", "lifetime"};
    bool kind_ok = false;
    for (const char* k : kinds) kind_ok = kind_ok || (cfg.experiment == k);
    if (!kind_ok)
        throw std::invalid_argument("config: unknown experiment '" + cfg.experiment +
                                    "' (expected simulate, per, fsl, curve, or lifetime)");
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();

    const PacketConfig packet = detail::parse_packet(detail::section(j, "packet", empty));
    const RetransmitPolicy policy = detail::parse_policy(detail::section(j, "policy", empty));
    const ChannelParams channel = detail::parse_channel(detail::section(j, "channel", empty));
    const BerModel ber = detail::parse_ber_model(detail::section(j, "ber_model", empty));

    {
        const auto& s = detail::section(j, "sim", empty);
        SimulationConfig& sim = cfg.sim;
        sim.packet = packet;
        sim.policy = policy;
        sim.channel = channel;
        sim.ber = ber;
        sim.num_ptx = s.value("num_ptx", sim.num_ptx);
        sim.packets_per_node = s.value("packets_per_node", sim.packets_per_node);
        sim.payload_bytes = s.value("payload_bytes", sim.payload_bytes);
        sim.auto_ack = s.value("auto_ack", sim.auto_ack);
        sim.first_send_s = s.value("first_send_s", sim.first_send_s);
        sim.send_interval_s = s.value("send_interval_s", sim.send_interval_s);
        sim.ranges_m = s.value("ranges_m", sim.ranges_m);
        sim.min_duration_s = s.value("min_duration_s", sim.min_duration_s);
        sim.record_trace = s.value("record_trace", sim.record_trace);
        sim.tx_level = tx_level_from_dbm(s.value("tx_power_dbm", 0.0));
        if (cfg.seed) sim.seed = *cfg.seed;
    }
    {
        const auto& s = detail::section(j, "per", empty);
        PerSweepConfig& per = cfg.per;
        per.packet = packet;
        per.channel = channel;
        per.ber = ber;
        per.packets_per_point = s.value("packets_per_point", per.packets_per_point);
        per.payload_bytes = s.value("payload_bytes", per.payload_bytes);
        per.ranges_m = s.value("ranges_m", per.ranges_m);
        if (cfg.seed) per.seed = *cfg.seed;
    }
    {
        const auto& s = detail::section(j, "curve", empty);
        cfg.curve.packet = packet;
        if (s.contains("bers")) {
            cfg.curve.bers = s.at("bers").get<std::vector<double>>();
        } else {
            const auto& g = detail::section(s, "ber_grid", empty);
            cfg.curve.bers =
                log_grid(g.value("lo", 1e-7), g.value("hi", 1e-2), g.value("points", 50));
        }
        cfg.curve.payload_bytes = s.value("payload_bytes", cfg.curve.payload_bytes);
    }
    {
        const auto& s = detail::section(j, "fsl", empty);
        cfg.fsl_ranges = s.value("ranges_m", cfg.fsl_ranges);
        cfg.fsl_frequency_hz = s.value("frequency_hz", channel.frequency_hz);
        cfg.fsl_include_reference = s.value("include_reference", cfg.fsl_include_reference);
    }
    {
        const auto& s = detail::section(j, "lifetime", empty);
        cfg.lifetime.profile = detail::parse_profile(detail::section(s, "profile", empty));
        cfg.lifetime.battery.capacity_mAh = s.value("battery_mAh", cfg.lifetime.battery.capacity_mAh);
        if (s.contains("tx_levels_mA")) {
            const auto v = s.at("tx_levels_mA").get<std::vector<double>>();
            if (v.size() != 4)
                throw std::invalid_argument("config: lifetime.tx_levels_mA needs exactly 4 entries");
            for (std::size_t i = 0; i < 4; ++i) cfg.lifetime.tx_levels_mA[i] = v[i];
        }
        cfg.lifetime.include_reference = s.value("include_reference", cfg.lifetime.include_reference);
    }
    return cfg;
}

// Run the configured experiment and render every table it produces as one
// CSV document (sections in a fixed order). This is the path behind both the
// CLI's --csv mode and the determinism checks: same config, same seed, same
// bytes.
inline std::string render_experiment_csv(const ExperimentConfig& cfg) {
    if (cfg.experiment == "simulate") {
        const SimulationResult r = run_simulation(cfg.sim);
        return stats_csv(r) + trace_csv(r.trace) + rx_log_csv(r.rx_log);
    }
    if (cfg.experiment == "per") return per_csv(per_sweep(cfg.per));
    if (cfg.experiment == "fsl")
        return fsl_csv(fsl_table(cfg.fsl_ranges, cfg.fsl_frequency_hz, cfg.fsl_include_reference));
    if (cfg.experiment == "curve") return curve_csv(ber_per_curve(cfg.curve));
    if (cfg.experiment == "lifetime") {
        const LifetimeReportResult r = lifetime_report(cfg.lifetime);
        return lifetime_csv(r) + power_sweep_csv(r.power_sweep);
    }
    throw std::invalid_argument("config: unknown experiment '" + cfg.experiment + "'");
}

inline ExperimentConfig load_experiment(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("config: '" + path + "' is not valid JSON: " + e.what());
    }
    try {
        return parse_experiment(j);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("config: '" + path + "': " + e.what());
    }
}

} // namespace wsnsim
