#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace wsnsim {

// ============================================================================
// Radio power-mode state machine
// ============================================================================
//
// Modes and the commands that move between them:
//
//                  SetPwrUp (1.5 ms)                CeHighTx (130 us)
//   PowerDown  ---------------------->  StandbyI  ------------------> PllLockTx -> TxActive
//      ^                                  |  ^
//      |        ClearPwrUp (any mode)     |  | CeLow / TxDone / RxDone
//      +----------------------------------+  |
//                                         CeHighRx (130 us) -> PllLockRx -> RxActive
//
// The crystal start-up out of PowerDown costs 1.5 ms; PLL settling before a
// burst or before the receiver opens costs 130 us. ClearPwrUp is accepted in
// every mode and always lands in PowerDown, so "clear, then set" is a reset
// that re-enters StandbyI from anywhere. Configuration (the programmed output
// power) survives PowerDown; only the RF front end stops.

enum class RadioMode { PowerDown, StandbyI, PllLockTx, PllLockRx, TxActive, RxActive };

enum class RadioCommand {
    SetPwrUp,   // PWR_UP := 1, start crystal
    ClearPwrUp, // PWR_UP := 0, drop to PowerDown from anywhere
    CeHighTx,   // chip enable with a pending transmission
    CeHighRx,   // chip enable in receive configuration
    CeLow,      // chip enable released
    TxDone,     // burst finished (radio-internal edge)
    RxDone      // reception window closed (radio-internal edge)
};

// Programmed TX output power.
enum class TxPowerLevel { Dbm0, DbmMinus6, DbmMinus12, DbmMinus18 };

constexpr std::array<TxPowerLevel, 4> kTxPowerLevels = {
    TxPowerLevel::Dbm0, TxPowerLevel::DbmMinus6, TxPowerLevel::DbmMinus12, TxPowerLevel::DbmMinus18};

inline double tx_power_dbm(TxPowerLevel level) {
    switch (level) {
        case TxPowerLevel::Dbm0: return 0.0;
        case TxPowerLevel::DbmMinus6: return -6.0;
        case TxPowerLevel::DbmMinus12: return -12.0;
        case TxPowerLevel::DbmMinus18: return -18.0;
    }
    throw std::invalid_argument("tx_power_dbm: bad level");
}

inline const char* to_string(RadioMode m) {
    switch (m) {
        case RadioMode::PowerDown: return "power-down";
        case RadioMode::StandbyI: return "standby-i";
        case RadioMode::PllLockTx: return "pll-lock-tx";
        case RadioMode::PllLockRx: return "pll-lock-rx";
        case RadioMode::TxActive: return "tx-active";
        case RadioMode::RxActive: return "rx-active";
    }
    return "?";
}

inline const char* to_string(RadioCommand c) {
    switch (c) {
        case RadioCommand::SetPwrUp: return "set-pwr-up";
        case RadioCommand::ClearPwrUp: return "clear-pwr-up";
        case RadioCommand::CeHighTx: return "ce-high-tx";
        case RadioCommand::CeHighRx: return "ce-high-rx";
        case RadioCommand::CeLow: return "ce-low";
        case RadioCommand::TxDone: return "tx-done";
        case RadioCommand::RxDone: return "rx-done";
    }
    return "?";
}

inline const char* to_string(TxPowerLevel level) {
    switch (level) {
        case TxPowerLevel::Dbm0: return "0dBm";
        case TxPowerLevel::DbmMinus6: return "-6dBm";
        case TxPowerLevel::DbmMinus12: return "-12dBm";
        case TxPowerLevel::DbmMinus18: return "-18dBm";
    }
    return "?";
}

// Current draw per mode, in mA. The defaults describe the whole node (MCU
// awake plus radio) as seen at the battery; radio_only() carries the bare
// transceiver numbers for comparison.
struct CurrentProfile {
    double power_down_mA = 0.0009; // MCU asleep, radio off
    double standby_mA = 0.032;     // crystal running, PLL off
    double power_up_mA = 0.285;    // draw while the crystal starts (PowerDown -> StandbyI)
    double pll_lock_tx_mA = 8.0;   // PLL settling before a burst
    double pll_lock_rx_mA = 8.4;   // PLL settling before the RX window opens
    double rx_mA = 12.9;           // receiver open
    std::array<double, 4> tx_mA = {11.6, 10.4, 9.2, 8.0}; // by TxPowerLevel, 0 .. -18 dBm

    void validate() const {
        if (!(power_down_mA > 0 && standby_mA > 0 && power_up_mA > 0 && pll_lock_tx_mA > 0 &&
              pll_lock_rx_mA > 0 && rx_mA > 0))
            throw std::invalid_argument("CurrentProfile: currents must be positive");
        for (double v : tx_mA)
            if (!(v > 0)) throw std::invalid_argument("CurrentProfile: currents must be positive");
        for (std::size_t i = 1; i < tx_mA.size(); ++i)
            if (tx_mA[i] > tx_mA[i - 1])
                throw std::invalid_argument("CurrentProfile: TX current must not rise as output power drops");
        if (power_down_mA >= standby_mA)
            throw std::invalid_argument("CurrentProfile: PowerDown must draw less than StandbyI");
    }

    // Whole-node profile: MCU active alongside the radio in TX/RX.
    static CurrentProfile system_default() { return CurrentProfile{}; }

    // Bare transceiver, MCU excluded.
    static CurrentProfile radio_only() {
        CurrentProfile p;
        p.power_down_mA = 0.0004; // 400 nA
        p.standby_mA = 0.032;
        p.power_up_mA = 0.285;
        p.rx_mA = 12.5;
        p.tx_mA = {11.3, 8.5, 7.5, 7.0};
        return p;
    }
};

// Fixed transition durations, in seconds.
struct TimingProfile {
    double power_up_s = 1.5e-3;  // crystal start-up, PowerDown -> StandbyI
    double pll_lock_s = 130e-6;  // PLL settling, StandbyI -> TxActive / RxActive

    void validate() const {
        if (!(power_up_s > 0) || !(pll_lock_s > 0))
            throw std::invalid_argument("TimingProfile: durations must be positive");
    }
};

inline double mode_current_mA(RadioMode mode, TxPowerLevel level, const CurrentProfile& profile) {
    switch (mode) {
        case RadioMode::PowerDown: return profile.power_down_mA;
        case RadioMode::StandbyI: return profile.standby_mA;
        case RadioMode::PllLockTx: return profile.pll_lock_tx_mA;
        case RadioMode::PllLockRx: return profile.pll_lock_rx_mA;
        case RadioMode::TxActive: return profile.tx_mA[static_cast<std::size_t>(level)];
        case RadioMode::RxActive: return profile.rx_mA;
    }
    throw std::invalid_argument("mode_current_mA: bad mode");
}

// Charge in mA*s accumulated by dwelling in `mode` for `dwell_s`.
inline double charge_for_dwell_mAs(RadioMode mode, TxPowerLevel level, const CurrentProfile& profile,
                                   double dwell_s) {
    if (dwell_s < 0) throw std::invalid_argument("charge_for_dwell_mAs: negative dwell");
    return mode_current_mA(mode, level, profile) * dwell_s;
}

// A command was issued that the current mode cannot accept — a driver bug at
// the modelled layer, so it throws rather than returning an error code.
class ProtocolViolation : public std::logic_error {
public:
    ProtocolViolation(RadioMode mode, RadioCommand cmd)
        : std::logic_error(std::string("radio: command ") + to_string(cmd) + " illegal in mode " +
                           to_string(mode)) {}
};

// Result of accepting a command: where the radio is headed, how long the move
// takes, and what it draws while in transit. Zero-duration moves complete
// immediately; for timed moves the caller advances its clock and then calls
// complete_transition().
struct Transition {
    RadioMode to;
    double duration_s = 0.0;
    double transit_current_mA = 0.0;
};

class RadioStateMachine {
public:
    RadioStateMachine(CurrentProfile currents, TimingProfile timings,
                      TxPowerLevel level = TxPowerLevel::Dbm0)
        : currents_(currents), timings_(timings), level_(level) {
        currents_.validate();
        timings_.validate();
    }

    RadioMode mode() const { return mode_; }
    TxPowerLevel tx_level() const { return level_; }
    const CurrentProfile& currents() const { return currents_; }
    const TimingProfile& timings() const { return timings_; }
    double current_mA() const { return mode_current_mA(mode_, level_, currents_); }

    // Reprogram output power. Plain register state: allowed in any mode and,
    // like the rest of the configuration, retained across PowerDown.
    void set_tx_level(TxPowerLevel level) { level_ = level; }

    Transition apply_command(RadioCommand cmd) {
        const Transition t = plan(mode_, cmd);
        mode_ = t.to;
        return t;
    }

    // Finish a timed transition after its duration has elapsed. PllLock modes
    // settle into the corresponding active mode; anything else is a no-op.
    RadioMode complete_transition() {
        if (mode_ == RadioMode::PllLockTx) mode_ = RadioMode::TxActive;
        else if (mode_ == RadioMode::PllLockRx) mode_ = RadioMode::RxActive;
        return mode_;
    }

private:
    // Timed transitions show up either as a mode of their own (the PLL-lock
    // modes, resolved by complete_transition) or as transit charge (crystal
    // start-up: the machine reports StandbyI at once and the Transition's
    // duration and current carry the cost).
    Transition plan(RadioMode mode, RadioCommand cmd) const {
        // ClearPwrUp is the one globally legal command: hard drop to PowerDown.
        if (cmd == RadioCommand::ClearPwrUp) return {RadioMode::PowerDown, 0.0, 0.0};

        switch (mode) {
            case RadioMode::PowerDown:
                if (cmd == RadioCommand::SetPwrUp)
                    return {RadioMode::StandbyI, timings_.power_up_s, currents_.power_up_mA};
                break;
            case RadioMode::StandbyI:
                switch (cmd) {
                    case RadioCommand::SetPwrUp: return {RadioMode::StandbyI, 0.0, 0.0}; // idempotent
                    case RadioCommand::CeHighTx:
                        return {RadioMode::PllLockTx, timings_.pll_lock_s, currents_.pll_lock_tx_mA};
                    case RadioCommand::CeHighRx:
                        return {RadioMode::PllLockRx, timings_.pll_lock_s, currents_.pll_lock_rx_mA};
                    case RadioCommand::CeLow: return {RadioMode::StandbyI, 0.0, 0.0}; // already low
                    default: break;
                }
                break;
            case RadioMode::PllLockTx:
            case RadioMode::PllLockRx:
                switch (cmd) {
                    case RadioCommand::SetPwrUp: return {mode, 0.0, 0.0};
                    case RadioCommand::CeLow: return {RadioMode::StandbyI, 0.0, 0.0}; // abort lock
                    default: break;
                }
                break;
            case RadioMode::TxActive:
                switch (cmd) {
                    case RadioCommand::SetPwrUp: return {mode, 0.0, 0.0};
                    case RadioCommand::CeLow:
                    case RadioCommand::TxDone: return {RadioMode::StandbyI, 0.0, 0.0};
                    default: break;
                }
                break;
            case RadioMode::RxActive:
                switch (cmd) {
                    case RadioCommand::SetPwrUp: return {mode, 0.0, 0.0};
                    case RadioCommand::CeLow:
                    case RadioCommand::RxDone: return {RadioMode::StandbyI, 0.0, 0.0};
                    default: break;
                }
                break;
        }
        throw ProtocolViolation(mode, cmd);
    }

    CurrentProfile currents_;
    TimingProfile timings_;
    TxPowerLevel level_;
    RadioMode mode_ = RadioMode::PowerDown;
};

} // namespace wsnsim
