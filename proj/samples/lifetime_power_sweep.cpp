// How much battery does backing off the TX output power actually buy?
// Sweep the four output-power settings over the default duty cycle and
// print the lifetime each one earns from a 2450 mAh cell.

#include <cstdio>

#include "wsnsim/energy.hpp"
#include "wsnsim/experiments.hpp"

using namespace wsnsim;

int main() {
    const DutyCycleProfile profile; // one 36.5 us burst every 55.7 s
    const Battery battery;          // 2450 mAh

    const EnergyReport base = energy_report(profile, battery);
    std::printf("duty cycle: %s s period, %s s asleep, i_avg=%s mA -> %s h\n",
                format_number(profile.period_s).c_str(),
                format_number(base.sleep_time_s).c_str(),
                format_number(base.average_current_mA).c_str(),
                format_number(base.lifetime_hours).c_str());

    std::printf("%-8s %8s %14s %14s %10s\n", "setting", "tx_mA", "i_avg_mA", "hours", "days");
    double previous_hours = 0;
    bool monotone = true;
    for (const PowerLevelPoint& row :
         lifetime_vs_power(profile, battery, {11.6, 10.4, 9.2, 8.0})) {
        std::printf("%-8s %8s %14s %14s %10s\n", to_string(row.level),
                    format_number(row.tx_mA).c_str(),
                    format_number(row.average_current_mA).c_str(),
                    format_number(row.lifetime_hours).c_str(),
                    format_number(row.lifetime_hours / kHoursPerDay).c_str());
        monotone = monotone && row.lifetime_hours > previous_hours;
        previous_hours = row.lifetime_hours;
    }

    // Dropping from 0 dBm to -18 dBm trims the single biggest charge term,
    // so each step down must add hours. Fail loudly if it ever doesn't.
    if (!monotone) {
        std::fprintf(stderr, "lifetime did not increase as TX power was reduced\n");
        return 1;
    }
    return 0;
}
