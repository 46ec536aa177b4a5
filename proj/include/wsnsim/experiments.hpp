#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "wsnsim/channel.hpp"
#include "wsnsim/energy.hpp"
#include "wsnsim/packet.hpp"
#include "wsnsim/rng.hpp"
#include "wsnsim/shockburst.hpp"
#include "wsnsim/simulation.hpp"

namespace wsnsim {

// ============================================================================
// Canned experiments and their CSV renderings
// ============================================================================
//
// Everything here is deterministic in (config, seed) and renders through one
// number formatter, so identical runs produce byte-identical files.

// Stable scalar formatting for CSV output: shortest %.10g form.
inline std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return std::string(buf);
}

// ----------------------------------------------------------------------------
// Packet-error-rate sweep
// ----------------------------------------------------------------------------

struct PerSweepConfig {
    PacketConfig packet;
    std::size_t payload_bytes = 1;
    std::uint64_t packets_per_point = 1000;
    BerModel ber = BerModel::fixed(0.0); // evaluated at each point's link margin
    ChannelParams channel;
    std::vector<double> ranges_m; // empty => one point at channel.range_m
    std::uint64_t seed = 0;       // must be set explicitly

    void validate() const {
        packet.validate();
        channel.validate();
        if (payload_bytes < 1 || payload_bytes > kMaxPayloadBytes)
            throw std::invalid_argument("PerSweepConfig: payload must be 1..32 bytes");
        if (packets_per_point == 0)
            throw std::invalid_argument("PerSweepConfig: zero packets per point");
        if (seed == 0)
            throw std::invalid_argument("PerSweepConfig: an explicit nonzero seed is required");
    }
};

struct PerPoint {
    double range_m = 0;
    double margin_db = 0;
    double ber = 0;
    std::size_t frame_bits = 0;
    std::uint64_t packets = 0;
    std::uint64_t received = 0;
    double per_empirical = 0;
    double per_analytic = 0;
};

// Monte-Carlo PER at one BER: every frame runs through the real codec —
// serialize, corrupt bit by bit, deserialize, compare against what was sent.
// "Received" therefore means decoded intact, so undetected CRC escapes (wrong
// payload accepted) land on the error side of the count, same as losses.
inline PerPoint per_point(const PacketConfig& packet, std::size_t payload_bytes,
                          std::uint64_t packets, double ber, SplitMix64& rng) {
    PerPoint point;
    point.ber = ber;
    point.packets = packets;
    std::vector<std::uint8_t> address(static_cast<std::size_t>(packet.address_width), 0xe7);
    for (std::uint64_t k = 0; k < packets; ++k) {
        std::vector<std::uint8_t> payload(payload_bytes);
        for (std::size_t j = 0; j < payload.size(); ++j)
            payload[j] = static_cast<std::uint8_t>(k * 7 + j);
        const Packet sent =
            Packet::data(address, std::move(payload), static_cast<std::uint8_t>(k & 3), true);
        Bitstring bits = serialize(sent, packet);
        point.frame_bits = bits.size();
        for (std::size_t pos : sample_corruption(rng, bits.size(), ber)) bits.flip(pos);
        const auto decoded = deserialize(bits, packet);
        if (decoded.ok() && decoded.value() == sent) ++point.received;
    }
    point.per_empirical =
        1.0 - static_cast<double>(point.received) / static_cast<double>(point.packets);
    point.per_analytic = per_from_ber(ber, point.frame_bits);
    return point;
}

inline std::vector<PerPoint> per_sweep(const PerSweepConfig& cfg) {
    cfg.validate();
    SplitMix64 root(cfg.seed);
    std::vector<double> ranges = cfg.ranges_m;
    if (ranges.empty()) ranges.push_back(cfg.channel.range_m);
    std::vector<PerPoint> points;
    points.reserve(ranges.size());
    for (double range : ranges) {
        ChannelParams link = cfg.channel;
        link.range_m = range;
        const double margin = link_margin_db(link);
        SplitMix64 rng = root.split();
        PerPoint point = per_point(cfg.packet, cfg.payload_bytes, cfg.packets_per_point,
                                   cfg.ber.ber_at_margin(margin), rng);
        point.range_m = range;
        point.margin_db = margin;
        points.push_back(point);
    }
    return points;
}

// ----------------------------------------------------------------------------
// Free-space-loss table
// ----------------------------------------------------------------------------

struct FslRow {
    double range_m = 0;
    double fsl_db = 0;
    std::optional<double> reference_db;
    std::optional<double> delta_db;
};

// Bundled reference attenuation readings for 1..10 m at 2.4 GHz. These come
// from a hand-recorded column that does not follow the free-space formula it
// accompanies (the 1 m entry alone is 30 dB off), so the table report prints
// them side by side with the computed values and shows the deltas instead of
// pretending they agree.
inline constexpr std::array<double, 10> kReferenceAttenuationDb = {
    10.0, 16.0, 19.8, 22.00, 23.02, 23.61, 23.93, 24.1, 24.13, 24.04};

inline std::vector<FslRow> fsl_table(const std::vector<double>& ranges_m,
                                     double frequency_hz = kDefaultFrequencyHz,
                                     bool include_reference = true) {
    std::vector<FslRow> rows;
    rows.reserve(ranges_m.size());
    for (double r : ranges_m) {
        FslRow row;
        row.range_m = r;
        row.fsl_db = free_space_loss_db(r, frequency_hz);
        if (include_reference) {
            // Reference readings exist for whole-metre ranges 1..10 only.
            const double idx = r - 1.0;
            const int i = static_cast<int>(idx);
            if (idx >= 0 && idx == i && i < static_cast<int>(kReferenceAttenuationDb.size())) {
                row.reference_db = kReferenceAttenuationDb[static_cast<std::size_t>(i)];
                row.delta_db = row.fsl_db - *row.reference_db;
            }
        }
        rows.push_back(row);
    }
    return rows;
}

inline std::vector<double> default_fsl_ranges() {
    return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
}

// ----------------------------------------------------------------------------
// Analytic BER/PER curve
// ----------------------------------------------------------------------------

struct CurveConfig {
    PacketConfig packet;
    std::vector<double> bers;                 // grid, each in [0, 1]
    std::vector<std::size_t> payload_bytes = {1};

    void validate() const {
        packet.validate();
        if (bers.empty()) throw std::invalid_argument("CurveConfig: empty BER grid");
        for (std::size_t n : payload_bytes)
            if (n < 1 || n > kMaxPayloadBytes)
                throw std::invalid_argument("CurveConfig: payload must be 1..32 bytes");
    }
};

struct CurvePoint {
    double ber = 0;
    std::size_t payload_bytes = 0;
    std::size_t frame_bits = 0;
    double per = 0;
};

// Logarithmically spaced grid from lo to hi inclusive.
inline std::vector<double> log_grid(double lo, double hi, int points) {
    if (!(lo > 0) || !(hi > lo) || points < 2)
        throw std::invalid_argument("log_grid: need 0 < lo < hi and at least 2 points");
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(points));
    const double step = (std::log10(hi) - std::log10(lo)) / (points - 1);
    for (int i = 0; i < points; ++i) grid.push_back(std::pow(10.0, std::log10(lo) + i * step));
    return grid;
}

inline std::vector<CurvePoint> ber_per_curve(const CurveConfig& cfg) {
    cfg.validate();
    std::vector<CurvePoint> points;
    points.reserve(cfg.bers.size() * cfg.payload_bytes.size());
    for (std::size_t n : cfg.payload_bytes) {
        const std::size_t frame_bits = static_cast<std::size_t>(overhead_bits(cfg.packet)) + 8 * n;
        for (double ber : cfg.bers)
            points.push_back(CurvePoint{ber, n, frame_bits, per_from_ber(ber, frame_bits)});
    }
    return points;
}

// ----------------------------------------------------------------------------
// Lifetime report
// ----------------------------------------------------------------------------

struct LifetimeOptions {
    DutyCycleProfile profile;
    Battery battery;
    std::array<double, 4> tx_levels_mA = {11.6, 10.4, 9.2, 8.0}; // 0, -6, -12, -18 dBm
    bool include_reference = true; // compare against the bundled reference breakdown
};

struct LifetimeRow {
    std::string name;
    double computed = 0;
    std::optional<double> reference;
    std::optional<double> delta;
};

// Bundled reference operating figures for the default profile and a 2450 mAh
// cell. The years entry is internally inconsistent with the hours/days pair:
// it matches days / 364 rather than days / 365.25. We report years on the
// 365.25-day convention and surface the disagreement in the report note.
struct LifetimeReference {
    double average_current_mA = 0.06342619;
    double lifetime_hours = 38627.5768;
    double lifetime_days = 1609.48237;
    double lifetime_years = 4.42165486;
};

struct LifetimeReportResult {
    EnergyReport report;
    std::vector<LifetimeRow> rows;
    std::vector<PowerLevelPoint> power_sweep;
    std::string note;
};

inline LifetimeReportResult lifetime_report(const LifetimeOptions& opt) {
    LifetimeReportResult out;
    out.report = energy_report(opt.profile, opt.battery);
    const LifetimeReference ref;
    auto row = [&](const char* name, double computed, std::optional<double> reference) {
        LifetimeRow r;
        r.name = name;
        r.computed = computed;
        if (opt.include_reference && reference) {
            r.reference = reference;
            r.delta = computed - *reference;
        }
        out.rows.push_back(std::move(r));
    };
    row("average_current_mA", out.report.average_current_mA, ref.average_current_mA);
    row("lifetime_hours", out.report.lifetime_hours, ref.lifetime_hours);
    row("lifetime_days", out.report.lifetime_days, ref.lifetime_days);
    row("lifetime_years", out.report.lifetime_years, ref.lifetime_years);
    row("sleep_time_s", out.report.sleep_time_s, std::nullopt);
    out.power_sweep = lifetime_vs_power(opt.profile, opt.battery, opt.tx_levels_mA);
    if (opt.include_reference)
        out.note = "years computed as days / 365.25; the reference years figure corresponds to "
                   "days / 364 and therefore differs from the computed value by design";
    return out;
}

// ----------------------------------------------------------------------------
// CSV renderings
// ----------------------------------------------------------------------------

inline std::string per_csv(const std::vector<PerPoint>& points) {
    std::string s = "range_m,margin_db,ber,frame_bits,packets,received,per_empirical,per_analytic\n";
    for (const PerPoint& p : points) {
        s += format_number(p.range_m) + ',' + format_number(p.margin_db) + ',' +
             format_number(p.ber) + ',' + std::to_string(p.frame_bits) + ',' +
             std::to_string(p.packets) + ',' + std::to_string(p.received) + ',' +
             format_number(p.per_empirical) + ',' + format_number(p.per_analytic) + '\n';
    }
    return s;
}

inline std::string fsl_csv(const std::vector<FslRow>& rows) {
    std::string s = "range_m,fsl_db,reference_db,delta_db\n";
    for (const FslRow& r : rows) {
        s += format_number(r.range_m) + ',' + format_number(r.fsl_db) + ',';
        if (r.reference_db) s += format_number(*r.reference_db);
        s += ',';
        if (r.delta_db) s += format_number(*r.delta_db);
        s += '\n';
    }
    return s;
}

inline std::string curve_csv(const std::vector<CurvePoint>& points) {
    std::string s = "ber,payload_bytes,frame_bits,per\n";
    for (const CurvePoint& p : points)
        s += format_number(p.ber) + ',' + std::to_string(p.payload_bytes) + ',' +
             std::to_string(p.frame_bits) + ',' + format_number(p.per) + '\n';
    return s;
}

inline std::string lifetime_csv(const LifetimeReportResult& result) {
    std::string s = "quantity,computed,reference,delta\n";
    for (const LifetimeRow& r : result.rows) {
        s += r.name + ',' + format_number(r.computed) + ',';
        if (r.reference) s += format_number(*r.reference);
        s += ',';
        if (r.delta) s += format_number(*r.delta);
        s += '\n';
    }
    return s;
}

inline std::string power_sweep_csv(const std::vector<PowerLevelPoint>& rows) {
    std::string s = "tx_power_dbm,tx_mA,average_current_mA,lifetime_hours\n";
    for (const PowerLevelPoint& r : rows)
        s += format_number(tx_power_dbm(r.level)) + ',' + format_number(r.tx_mA) + ',' +
             format_number(r.average_current_mA) + ',' + format_number(r.lifetime_hours) + '\n';
    return s;
}

inline std::string stats_csv(const SimulationResult& result) {
    std::string s = "node,role,sent,delivered,acked,retransmissions,max_rt_failures,"
                    "received,duplicates_suppressed,crc_drops,address_mismatches,"
                    "charge_mAs,average_current_mA\n";
    for (const NodeResult& n : result.nodes) {
        const LinkStats& st = n.stats;
        s += std::to_string(n.node) + ',' + (n.role == LinkRole::Prx ? "prx" : "ptx") + ',' +
             std::to_string(st.sent) + ',' + std::to_string(st.delivered) + ',' +
             std::to_string(st.acked) + ',' + std::to_string(st.retransmissions) + ',' +
             std::to_string(st.max_rt_failures) + ',' + std::to_string(st.received) + ',' +
             std::to_string(st.duplicates_suppressed) + ',' + std::to_string(st.crc_drops) + ',' +
             std::to_string(st.address_mismatches) + ',' + format_number(n.charge_mAs) + ',' +
             format_number(n.average_current_mA) + '\n';
    }
    return s;
}

inline std::string trace_csv(const std::vector<TraceRecord>& trace) {
    std::string s = "time_s,node,event,detail\n";
    for (const TraceRecord& t : trace)
        s += format_number(t.time_s) + ',' + std::to_string(t.node) + ',' + t.kind + ',' +
             t.detail + '\n';
    return s;
}

inline std::string rx_log_csv(const std::vector<RxLogEntry>& log) {
    std::string s = "time_s,pipe,payload_hex\n";
    static const char* digits = "0123456789abcdef";
    for (const RxLogEntry& e : log) {
        s += format_number(e.time_s) + ',' + std::to_string(e.pipe) + ',';
        for (std::uint8_t b : e.payload) {
            s += digits[b >> 4];
            s += digits[b & 0x0f];
        }
        s += '\n';
    }
    return s;
}

} // namespace wsnsim
