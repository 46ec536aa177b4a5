#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "wsnsim/radio.hpp"

namespace wsnsim {

// ============================================================================
// Duty-cycle battery-lifetime model
// ============================================================================
//
// One reporting period of a sensor node: sleep in PowerDown, wake the crystal,
// lock the PLL, transmit the buffered frames, lock the PLL the other way,
// listen for the acknowledgement, drop back to PowerDown. Average current is
// the charge sum over one period divided by the period; battery life is
// capacity over average current.

// All times in seconds, currents in mA, as drawn at the battery by the whole
// node (MCU plus radio). Defaults describe a node that buffers readings and
// empties its queue in a single 0.3 s burst every 55.7 s.
struct DutyCycleProfile {
    double time_on_air_s = 0.3;       // total transmit airtime per period
    double time_in_rx_s = 0.00003252; // acknowledgement listening window
    double pll_lock_s = 0.00013;      // PLL settling, charged once before TX and once before RX
    double power_up_s = 0.0015;       // crystal start-up out of PowerDown
    double period_s = 55.7;

    double tx_mA = 11.6;         // MCU active + radio transmitting at 0 dBm
    double rx_mA = 12.9;         // MCU active + receiver open
    double pll_lock_tx_mA = 8.0;
    double pll_lock_rx_mA = 8.4;
    double power_down_mA = 0.0009;
    double power_up_mA = 0.285;

    void validate() const {
        if (!(period_s > 0)) throw std::invalid_argument("DutyCycleProfile: period must be positive");
        if (time_on_air_s < 0 || time_in_rx_s < 0 || pll_lock_s < 0 || power_up_s < 0)
            throw std::invalid_argument("DutyCycleProfile: negative phase duration");
        if (!(tx_mA > 0 && rx_mA > 0 && pll_lock_tx_mA > 0 && pll_lock_rx_mA > 0 &&
              power_down_mA > 0 && power_up_mA > 0))
            throw std::invalid_argument("DutyCycleProfile: currents must be positive");
        if (sleep_time_s() < 0)
            throw std::invalid_argument("DutyCycleProfile: active phases exceed the period");
    }

    // Time left for PowerDown after the on-air, RX, and two PLL-lock phases.
    // The crystal start-up is billed as additional charge on top of the sleep
    // window rather than shortening it: during those 1.5 ms the node pays
    // both the power-down floor and the start-up current. This matches the
    // bundled reference current breakdown, which deducts only the four RF
    // phases from the period.
    double sleep_time_s() const {
        const double raw = period_s - time_on_air_s - time_in_rx_s - 2.0 * pll_lock_s;
        // A period set exactly equal to the active phases can land a few ulps
        // negative in floating point; snap that to zero instead of rejecting.
        return std::fabs(raw) <= 4 * std::numeric_limits<double>::epsilon() * period_s ? 0.0 : raw;
    }
};

struct Battery {
    double capacity_mAh = 2450.0;

    void validate() const {
        if (!(capacity_mAh > 0)) throw std::invalid_argument("Battery: capacity must be positive");
    }
};

// Charge per phase over one period, in mA*s.
struct PhaseCharges {
    double tx_mAs = 0;
    double rx_mAs = 0;
    double pll_tx_mAs = 0;
    double pll_rx_mAs = 0;
    double power_up_mAs = 0;
    double sleep_mAs = 0;

    double total_mAs() const {
        return tx_mAs + rx_mAs + pll_tx_mAs + pll_rx_mAs + power_up_mAs + sleep_mAs;
    }
};

inline PhaseCharges phase_charges(const DutyCycleProfile& p) {
    p.validate();
    PhaseCharges q;
    q.tx_mAs = p.time_on_air_s * p.tx_mA;
    q.rx_mAs = p.time_in_rx_s * p.rx_mA;
    q.pll_tx_mAs = p.pll_lock_s * p.pll_lock_tx_mA;
    q.pll_rx_mAs = p.pll_lock_s * p.pll_lock_rx_mA;
    q.power_up_mAs = p.power_up_s * p.power_up_mA;
    q.sleep_mAs = p.sleep_time_s() * p.power_down_mA;
    return q;
}

inline double average_current_mA(const DutyCycleProfile& p) {
    return phase_charges(p).total_mAs() / p.period_s;
}

inline double lifetime_hours(const Battery& b, double average_current_mA) {
    b.validate();
    if (!(average_current_mA > 0))
        throw std::domain_error("lifetime_hours: average current must be positive");
    return b.capacity_mAh / average_current_mA;
}

constexpr double kHoursPerDay = 24.0;
constexpr double kDaysPerYear = 365.25;

struct EnergyReport {
    PhaseCharges charges;
    double sleep_time_s = 0;
    double average_current_mA = 0;
    double lifetime_hours = 0;
    double lifetime_days = 0;
    double lifetime_years = 0;
};

inline EnergyReport energy_report(const DutyCycleProfile& p, const Battery& b) {
    EnergyReport r;
    r.charges = phase_charges(p);
    r.sleep_time_s = p.sleep_time_s();
    r.average_current_mA = r.charges.total_mAs() / p.period_s;
    r.lifetime_hours = lifetime_hours(b, r.average_current_mA);
    r.lifetime_days = r.lifetime_hours / kHoursPerDay;
    r.lifetime_years = r.lifetime_days / kDaysPerYear;
    return r;
}

// One row of the lifetime-versus-output-power trade-off.
struct PowerLevelPoint {
    TxPowerLevel level;
    double tx_mA = 0;
    double average_current_mA = 0;
    double lifetime_hours = 0;
};

// Sweep the TX phase current across the four output-power settings, holding
// every other phase fixed. Since only the largest charge term varies,
// lifetime is strictly decreasing in TX current whenever any airtime exists.
inline std::vector<PowerLevelPoint> lifetime_vs_power(
    const DutyCycleProfile& base, const Battery& battery,
    const std::array<double, 4>& tx_mA_per_level) {
    base.validate();
    battery.validate();
    std::vector<PowerLevelPoint> rows;
    rows.reserve(kTxPowerLevels.size());
    for (std::size_t i = 0; i < kTxPowerLevels.size(); ++i) {
        DutyCycleProfile p = base;
        p.tx_mA = tx_mA_per_level[i];
        PowerLevelPoint row;
        row.level = kTxPowerLevels[i];
        row.tx_mA = p.tx_mA;
        row.average_current_mA = average_current_mA(p);
        row.lifetime_hours = lifetime_hours(battery, row.average_current_mA);
        rows.push_back(row);
    }
    return rows;
}

} // namespace wsnsim
