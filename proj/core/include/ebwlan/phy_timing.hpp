#pragma once

#include "ebwlan/types.hpp"

#include <optional>

namespace ebwlan {

/// PHY/MAC timing inputs. Durations in seconds, header length in bits.
///
/// ack_s / rts_s / cts_s carry no defaults: slot_times() requires them
/// explicitly for the modes that transmit the corresponding frame.
struct PhyParams {
    double phy_header_s = 20e-6;
    double mac_header_bits = 244;
    double data_rate_bps = 6e6;
    double sifs_s = 16e-6;
    double difs_s = 34e-6;
    std::optional<double> ack_s; // required for DcfBasic and DcfRtsCts
    std::optional<double> rts_s; // required for DcfRtsCts
    std::optional<double> cts_s; // required for DcfRtsCts
    double idle_slot_s = 9e-6;   // sigma
    double prop_delay_s = 0.0;   // delta, added once to t_coll and t_succ

    void validate() const;

    bool operator==(const PhyParams&) const = default;
};

/// Durations of the three backoff-slot kinds. For slotted ALOHA all three are
/// equal; for the DCF modes t_idle <= t_coll <= t_succ.
struct SlotTimes {
    double t_idle = 0.0;
    double t_coll = 0.0;
    double t_succ = 0.0;
};

SlotTimes slot_times(AccessMode mode, const PhyParams& phy, double payload_bits);

/// 802.11a-style OFDM parameters (20 us preamble, 244-bit MAC header, 6 Mb/s,
/// SIFS 16 us, DIFS 34 us, sigma 9 us). Control-frame durations are left
/// unset and must be provided where a mode needs them.
PhyParams table1_phy();

/// Control-frame durations matching table1_phy: preamble plus 112/160 bits at
/// the base rate.
double table1_ack_s();
double table1_rts_s();
double table1_cts_s();

/// All slot kinds exactly 1 s; pairs with payload_bits = 1 for dimensionless
/// studies (throughput in packets per slot).
SlotTimes unit_slot_times();
PhyParams unit_phy();

} // namespace ebwlan
