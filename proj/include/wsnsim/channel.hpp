#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "wsnsim/rng.hpp"

namespace wsnsim {

constexpr double kSpeedOfLight_m_s = 299'792'458.0;
constexpr double kDefaultFrequencyHz = 2.4e9;
constexpr double kDefaultSensitivityDbm = -75.0;

// Free-space loss between isotropic antennas at range R:
//
//   FSL = -20 log10(lambda / (4 pi R)),   lambda = c / f
//
// Positive dB, growing with range; each doubling of R adds 20 log10(2),
// about 6.02 dB. At 2.4 GHz and one metre this is 40.05 dB.
inline double free_space_loss_db(double range_m, double frequency_hz = kDefaultFrequencyHz) {
    if (!(range_m > 0)) throw std::domain_error("free_space_loss_db: range must be positive");
    if (!(frequency_hz > 0)) throw std::domain_error("free_space_loss_db: frequency must be positive");
    const double lambda = kSpeedOfLight_m_s / frequency_hz;
    const double pi = 3.14159265358979323846;
    return -20.0 * std::log10(lambda / (4.0 * pi * range_m));
}

// One point-to-point link budget. Default antenna gains reflect small
// PCB-trace antennas well below isotropic.
struct ChannelParams {
    double frequency_hz = kDefaultFrequencyHz;
    double range_m = 1.0;
    double tx_power_dbm = 0.0;
    double tx_antenna_gain_db = -5.0;
    double rx_antenna_gain_db = -5.0;
    double rx_sensitivity_dbm = kDefaultSensitivityDbm;

    void validate() const {
        if (!(frequency_hz > 0)) throw std::invalid_argument("ChannelParams: frequency must be positive");
        if (!(range_m > 0)) throw std::invalid_argument("ChannelParams: range must be positive");
    }
};

inline double received_power_dbm(const ChannelParams& p) {
    p.validate();
    return p.tx_power_dbm + p.tx_antenna_gain_db + p.rx_antenna_gain_db -
           free_space_loss_db(p.range_m, p.frequency_hz);
}

// Margin above the receiver's sensitivity floor; negative means the link is
// below threshold at this range.
inline double link_margin_db(const ChannelParams& p) {
    return received_power_dbm(p) - p.rx_sensitivity_dbm;
}

// PER for a frame of `length_bits` independent bit errors at rate `ber`:
//
//   PER = 1 - (1 - BER)^L
//
// evaluated as -expm1(L * log1p(-BER)) so tiny BERs do not cancel away.
inline double per_from_ber(double ber, std::size_t length_bits) {
    if (!(ber >= 0.0) || ber > 1.0) throw std::domain_error("per_from_ber: BER outside [0, 1]");
    if (length_bits == 0) throw std::domain_error("per_from_ber: zero-length frame");
    if (ber == 1.0) return 1.0;
    return -std::expm1(static_cast<double>(length_bits) * std::log1p(-ber));
}

// Inverse of per_from_ber: the bit error rate that yields `per` over
// `length_bits`-bit frames.
inline double ber_from_per(double per, std::size_t length_bits) {
    if (!(per >= 0.0) || per > 1.0) throw std::domain_error("ber_from_per: PER outside [0, 1]");
    if (length_bits == 0) throw std::domain_error("ber_from_per: zero-length frame");
    if (per == 1.0) return 1.0;
    return -std::expm1(std::log1p(-per) / static_cast<double>(length_bits));
}

// Sample the positions flipped by a memoryless binary channel: each of the
// `length_bits` bits independently errors with probability `ber`. Positions
// come back sorted. Draws exactly length_bits variates, so consumption of
// the RNG stream is reproducible regardless of outcome.
inline std::vector<std::size_t> sample_corruption(SplitMix64& rng, std::size_t length_bits, double ber) {
    if (!(ber >= 0.0) || ber > 1.0) throw std::domain_error("sample_corruption: BER outside [0, 1]");
    std::vector<std::size_t> flipped;
    for (std::size_t i = 0; i < length_bits; ++i)
        if (rng.next_double() < ber) flipped.push_back(i);
    return flipped;
}

// ----------------------------------------------------------------------------
// BER models: map a link margin to a bit error rate
// ----------------------------------------------------------------------------

// Fixed: margin ignored. Threshold: clean above the sensitivity floor, noisy
// below. Table: piecewise-linear interpolation over measured (margin, BER)
// points, clamped at both ends.
class BerModel {
public:
    static BerModel fixed(double ber) {
        check_ber(ber);
        return BerModel(Fixed{ber});
    }

    static BerModel threshold(double ber_below = 0.5, double ber_above = 0.0) {
        check_ber(ber_below);
        check_ber(ber_above);
        return BerModel(Threshold{ber_below, ber_above});
    }

    // Points are (margin_db, ber), strictly increasing in margin.
    static BerModel table(std::vector<std::pair<double, double>> points) {
        if (points.empty()) throw std::invalid_argument("BerModel::table: no points");
        for (std::size_t i = 0; i < points.size(); ++i) {
            check_ber(points[i].second);
            if (i > 0 && !(points[i].first > points[i - 1].first))
                throw std::invalid_argument("BerModel::table: margins must be strictly increasing");
        }
        return BerModel(Table{std::move(points)});
    }

    double ber_at_margin(double margin_db) const {
        if (const auto* f = std::get_if<Fixed>(&model_)) return f->ber;
        if (const auto* t = std::get_if<Threshold>(&model_))
            return margin_db >= 0.0 ? t->ber_above_margin : t->ber_below_margin;
        const auto& pts = std::get<Table>(model_).points;
        if (margin_db <= pts.front().first) return pts.front().second;
        if (margin_db >= pts.back().first) return pts.back().second;
        auto hi = std::upper_bound(pts.begin(), pts.end(), margin_db,
                                   [](double m, const auto& p) { return m < p.first; });
        auto lo = hi - 1;
        const double w = (margin_db - lo->first) / (hi->first - lo->first);
        return lo->second + w * (hi->second - lo->second);
    }

private:
    struct Fixed { double ber; };
    struct Threshold { double ber_below_margin, ber_above_margin; };
    struct Table { std::vector<std::pair<double, double>> points; };

    static void check_ber(double ber) {
        if (!(ber >= 0.0) || ber > 1.0) throw std::invalid_argument("BerModel: BER outside [0, 1]");
    }

    explicit BerModel(std::variant<Fixed, Threshold, Table> m) : model_(std::move(m)) {}

    std::variant<Fixed, Threshold, Table> model_;
};

} // namespace wsnsim
