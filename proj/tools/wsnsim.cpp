// wsnsim-cli: command-line front end for the simulator library.
//
//   wsnsim-cli lifetime [--config f.json] [--csv] [--output out.csv]
//   wsnsim-cli fsl      [--config f.json] ...
//   wsnsim-cli curve    [--config f.json] ...
//   wsnsim-cli per       --config f.json  [--seed N] ...
//   wsnsim-cli simulate  --config f.json  [--seed N] ...
//   wsnsim-cli frame    [--payload-hex 2a | --payload-text hi] [...]
//
// Every experiment prints a human summary by default, the exact CSV tables
// with --csv, and writes the same CSV to a file with --output. Exit status is
// 0 on success and 1 with a diagnostic on stderr for config or domain errors.

#include <cstdio>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wsnsim/wsnsim.hpp"

using namespace wsnsim;

namespace {

struct CommonOpts {
    std::string config;
    std::uint64_t seed = 0;
    std::string output;
    bool csv = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool stochastic) {
    // No ExistingFile validator: load_experiment's open failure goes through
    // the same "wsnsim: <reason>" + exit 1 path as every other config error.
    cmd->add_option("--config", o.config, "experiment config file (JSON)");
    if (stochastic)
        cmd->add_option("--seed", o.seed, "override the config's random seed (nonzero)");
    cmd->add_option("--output", o.output, "write the CSV tables to this file");
    cmd->add_flag("--csv", o.csv, "print CSV to stdout instead of the summary");
}

ExperimentConfig load_for(const std::string& name, const CommonOpts& o) {
    ExperimentConfig cfg;
    if (o.config.empty()) {
        cfg = parse_experiment(nlohmann::json{{"experiment", name}});
    } else {
        cfg = load_experiment(o.config);
        if (cfg.experiment != name)
            throw std::runtime_error("config '" + o.config + "' declares experiment '" +
                                     cfg.experiment + "' but the subcommand is '" + name + "'");
    }
    if (o.seed != 0) {
        cfg.seed = o.seed;
        cfg.sim.seed = o.seed;
        cfg.per.seed = o.seed;
    }
    return cfg;
}

// Deliver one experiment's output: CSV file, CSV stdout, or human summary.
void emit(const CommonOpts& o, const std::string& csv, const std::function<void()>& summary) {
    if (!o.output.empty()) {
        std::ofstream out(o.output, std::ios::binary);
        out << csv;
        if (!out) throw std::runtime_error("cannot write '" + o.output + "'");
    }
    if (o.csv)
        std::fputs(csv.c_str(), stdout);
    else
        summary();
}

std::string opt_num(const std::optional<double>& v) { return v ? format_number(*v) : "-"; }

int cmd_lifetime(const CommonOpts& o) {
    const ExperimentConfig cfg = load_for("lifetime", o);
    const LifetimeReportResult r = lifetime_report(cfg.lifetime);
    emit(o, lifetime_csv(r) + power_sweep_csv(r.power_sweep), [&] {
        const DutyCycleProfile& p = cfg.lifetime.profile;
        std::printf("duty-cycle lifetime, %s mAh cell, %s s period (%s s asleep)\n",
                    format_number(cfg.lifetime.battery.capacity_mAh).c_str(),
                    format_number(p.period_s).c_str(), format_number(r.report.sleep_time_s).c_str());
        std::printf("  %-20s %16s %16s %14s\n", "quantity", "computed", "reference", "delta");
        for (const LifetimeRow& row : r.rows)
            std::printf("  %-20s %16s %16s %14s\n", row.name.c_str(),
                        format_number(row.computed).c_str(), opt_num(row.reference).c_str(),
                        opt_num(row.delta).c_str());
        if (!r.note.empty()) std::printf("  note: %s\n", r.note.c_str());
        std::printf("TX output power trade-off:\n");
        for (const PowerLevelPoint& row : r.power_sweep)
            std::printf("  %-7s tx=%s mA  i_avg=%s mA  lifetime=%s h\n", to_string(row.level),
                        format_number(row.tx_mA).c_str(),
                        format_number(row.average_current_mA).c_str(),
                        format_number(row.lifetime_hours).c_str());
    });
    return 0;
}

int cmd_fsl(const CommonOpts& o) {
    const ExperimentConfig cfg = load_for("fsl", o);
    const std::vector<FslRow> rows =
        fsl_table(cfg.fsl_ranges, cfg.fsl_frequency_hz, cfg.fsl_include_reference);
    emit(o, fsl_csv(rows), [&] {
        std::printf("free-space loss at %s Hz; bundled reference readings shown where available\n",
                    format_number(cfg.fsl_frequency_hz).c_str());
        std::printf("  %8s %14s %14s %14s\n", "range_m", "computed_db", "reference_db", "delta_db");
        for (const FslRow& r : rows)
            std::printf("  %8s %14s %14s %14s\n", format_number(r.range_m).c_str(),
                        format_number(r.fsl_db).c_str(), opt_num(r.reference_db).c_str(),
                        opt_num(r.delta_db).c_str());
    });
    return 0;
}

int cmd_curve(const CommonOpts& o) {
    const ExperimentConfig cfg = load_for("curve", o);
    const std::vector<CurvePoint> points = ber_per_curve(cfg.curve);
    emit(o, curve_csv(points), [&] {
        std::printf("analytic PER over %zu BER points\n", cfg.curve.bers.size());
        std::printf("  %14s %13s %10s %14s\n", "ber", "payload_bytes", "frame_bits", "per");
        for (const CurvePoint& p : points)
            std::printf("  %14s %13zu %10zu %14s\n", format_number(p.ber).c_str(), p.payload_bytes,
                        p.frame_bits, format_number(p.per).c_str());
    });
    return 0;
}

int cmd_per(const CommonOpts& o) {
    const ExperimentConfig cfg = load_for("per", o);
    const std::vector<PerPoint> points = per_sweep(cfg.per);
    emit(o, per_csv(points), [&] {
        std::printf("Monte-Carlo PER, %s packets per point, seed %llu\n",
                    format_number(static_cast<double>(cfg.per.packets_per_point)).c_str(),
                    static_cast<unsigned long long>(cfg.per.seed));
        std::printf("  %8s %10s %12s %6s %9s %14s %14s\n", "range_m", "margin_db", "ber", "bits",
                    "received", "per_empirical", "per_analytic");
        for (const PerPoint& p : points)
            std::printf("  %8s %10s %12s %6zu %9llu %14s %14s\n", format_number(p.range_m).c_str(),
                        format_number(p.margin_db).c_str(), format_number(p.ber).c_str(),
                        p.frame_bits, static_cast<unsigned long long>(p.received),
                        format_number(p.per_empirical).c_str(),
                        format_number(p.per_analytic).c_str());
    });
    return 0;
}

int cmd_simulate(const CommonOpts& o) {
    const ExperimentConfig cfg = load_for("simulate", o);
    const SimulationResult r = run_simulation(cfg.sim);
    emit(o, stats_csv(r) + trace_csv(r.trace) + rx_log_csv(r.rx_log), [&] {
        std::printf("simulation ended at t=%s s (seed %llu, %d ptx)\n",
                    format_number(r.end_time_s).c_str(),
                    static_cast<unsigned long long>(cfg.sim.seed), cfg.sim.num_ptx);
        for (const NodeResult& n : r.nodes) {
            const LinkStats& s = n.stats;
            if (n.role == LinkRole::Prx)
                std::printf("  node %d (prx): received=%llu dup_suppressed=%llu crc_drops=%llu "
                            "charge=%s mAs i_avg=%s mA\n",
                            n.node, static_cast<unsigned long long>(s.received),
                            static_cast<unsigned long long>(s.duplicates_suppressed),
                            static_cast<unsigned long long>(s.crc_drops),
                            format_number(n.charge_mAs).c_str(),
                            format_number(n.average_current_mA).c_str());
            else
                std::printf("  node %d (ptx): sent=%llu delivered=%llu retrans=%llu "
                            "failures=%llu charge=%s mAs i_avg=%s mA\n",
                            n.node, static_cast<unsigned long long>(s.sent),
                            static_cast<unsigned long long>(s.delivered),
                            static_cast<unsigned long long>(s.retransmissions),
                            static_cast<unsigned long long>(s.max_rt_failures),
                            format_number(n.charge_mAs).c_str(),
                            format_number(n.average_current_mA).c_str());
        }
        std::printf("  rx log: %zu entries; trace: %zu records\n", r.rx_log.size(),
                    r.trace.size());
    });
    return 0;
}

// ---------------------------------------------------------------------------
// frame: serialize one packet and dump it field by field
// ---------------------------------------------------------------------------

std::vector<std::uint8_t> parse_hex(const std::string& hex, const char* what) {
    if (hex.empty() || hex.size() % 2 != 0)
        throw std::runtime_error(std::string(what) + ": hex string needs an even digit count");
    std::vector<std::uint8_t> bytes;
    bytes.reserve(hex.size() / 2);
    auto nibble = [&](char ch) -> int {
        if (ch >= '0' && ch <= '9') return ch - '0';
        if (ch >= 'a' && ch <= 'f') return ch - 'a' + 10;
        if (ch >= 'A' && ch <= 'F') return ch - 'A' + 10;
        throw std::runtime_error(std::string(what) + ": '" + ch + "' is not a hex digit");
    };
    for (std::size_t i = 0; i < hex.size(); i += 2)
        bytes.push_back(static_cast<std::uint8_t>(nibble(hex[i]) << 4 | nibble(hex[i + 1])));
    return bytes;
}

struct FrameOpts {
    std::string address_hex;
    std::string payload_hex;
    std::string payload_text;
    int address_width = 5;
    int crc_width = 1;
    double datarate = 2e6;
    int pid = 0;
    bool no_ack = false;
};

int cmd_frame(const FrameOpts& o) {
    PacketConfig cfg;
    cfg.address_width = o.address_width;
    cfg.crc_width = o.crc_width;
    cfg.datarate_bps = o.datarate;
    cfg.validate();

    std::vector<std::uint8_t> address =
        o.address_hex.empty()
            ? std::vector<std::uint8_t>(static_cast<std::size_t>(o.address_width), 0xe7)
            : parse_hex(o.address_hex, "--address-hex");

    std::vector<std::uint8_t> payload;
    if (!o.payload_hex.empty())
        payload = parse_hex(o.payload_hex, "--payload-hex");
    else if (!o.payload_text.empty())
        payload.assign(o.payload_text.begin(), o.payload_text.end());
    else
        throw std::runtime_error("frame: give a payload with --payload-hex or --payload-text");

    if (o.pid < 0 || o.pid > 3) throw std::runtime_error("frame: --pid must be 0..3");

    const Packet pkt = Packet::data(address, payload, static_cast<std::uint8_t>(o.pid), o.no_ack);
    const Bitstring bits = serialize(pkt, cfg);
    const std::size_t crc_bits = static_cast<std::size_t>(8 * cfg.crc_width);

    std::printf("frame: %zu bits, %s us on air at %s bps\n", bits.size(),
                format_number(1e6 * air_time_s(bits.size(), cfg)).c_str(),
                format_number(cfg.datarate_bps).c_str());
    std::printf("  preamble: %02x\n", static_cast<unsigned>(bits.extract_u64(0, 8)));
    std::printf("  address:  ");
    for (std::uint8_t b : address) std::printf("%02x", b);
    std::printf(" (%d bytes)\n", o.address_width);
    std::printf("  control:  length=%zu pid=%d no_ack=%d (9 bits)\n", payload.size(), o.pid,
                o.no_ack ? 1 : 0);
    std::printf("  payload:  ");
    for (std::uint8_t b : payload) std::printf("%02x", b);
    std::printf(" (%zu bytes)\n", payload.size());
    std::printf("  crc:      0x%0*llx (%d byte%s over address+control+payload)\n", 2 * cfg.crc_width,
                static_cast<unsigned long long>(bits.extract_u64(bits.size() - crc_bits, crc_bits)),
                cfg.crc_width, cfg.crc_width == 1 ? "" : "s");
    std::printf("  bits, MSB first, zero-padded to bytes: %s\n", bits.to_hex().c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"wireless-sensor-link simulator and planning toolkit"};
    app.require_subcommand(1);

    CommonOpts lifetime_o, fsl_o, curve_o, per_o, sim_o;
    add_common(app.add_subcommand("lifetime", "duty-cycle battery lifetime report"), lifetime_o,
               false);
    add_common(app.add_subcommand("fsl", "free-space-loss range table"), fsl_o, false);
    add_common(app.add_subcommand("curve", "analytic BER-to-PER curve"), curve_o, false);
    add_common(app.add_subcommand("per", "Monte-Carlo packet-error-rate sweep"), per_o, true);
    add_common(app.add_subcommand("simulate", "event-driven link simulation"), sim_o, true);

    FrameOpts frame_o;
    CLI::App* frame = app.add_subcommand("frame", "serialize one packet and dump it");
    frame->add_option("--address-hex", frame_o.address_hex, "destination address (hex)");
    frame->add_option("--payload-hex", frame_o.payload_hex, "payload bytes (hex)");
    frame->add_option("--payload-text", frame_o.payload_text, "payload bytes (text)");
    frame->add_option("--address-width", frame_o.address_width, "address bytes, 3..5")
        ->check(CLI::Range(3, 5));
    frame->add_option("--crc-width", frame_o.crc_width, "CRC bytes, 1..2")->check(CLI::Range(1, 2));
    frame->add_option("--datarate", frame_o.datarate, "air data rate in bit/s");
    frame->add_option("--pid", frame_o.pid, "2-bit packet id")->check(CLI::Range(0, 3));
    frame->add_flag("--no-ack", frame_o.no_ack, "set the NO_ACK control bit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (app.got_subcommand("lifetime")) return cmd_lifetime(lifetime_o);
        if (app.got_subcommand("fsl")) return cmd_fsl(fsl_o);
        if (app.got_subcommand("curve")) return cmd_curve(curve_o);
        if (app.got_subcommand("per")) return cmd_per(per_o);
        if (app.got_subcommand("simulate")) return cmd_simulate(sim_o);
        if (app.got_subcommand("frame")) return cmd_frame(frame_o);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "wsnsim: %s\n", e.what());
        return 1;
    }
    return 0;
}
