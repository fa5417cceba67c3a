#include "ebwlan/phy_timing.hpp"

#include <cmath>

namespace ebwlan {

void PhyParams::validate() const {
    if (data_rate_bps <= 0.0) throw std::invalid_argument("data_rate_bps must be > 0");
    auto nonneg = [](double v, const char* name) {
        if (v < 0.0) throw std::invalid_argument(std::string(name) + " must be >= 0");
    };
    nonneg(phy_header_s, "phy_header_s");
    nonneg(mac_header_bits, "mac_header_bits");
    nonneg(sifs_s, "sifs_s");
    nonneg(difs_s, "difs_s");
    nonneg(idle_slot_s, "idle_slot_s");
    nonneg(prop_delay_s, "prop_delay_s");
    if (ack_s && *ack_s < 0.0) throw std::invalid_argument("ack_s must be >= 0");
    if (rts_s && *rts_s < 0.0) throw std::invalid_argument("rts_s must be >= 0");
    if (cts_s && *cts_s < 0.0) throw std::invalid_argument("cts_s must be >= 0");
}

SlotTimes slot_times(AccessMode mode, const PhyParams& phy, double payload_bits) {
    phy.validate();
    if (payload_bits <= 0.0) throw std::invalid_argument("payload_bits must be > 0");

    const double header = phy.phy_header_s + phy.mac_header_bits / phy.data_rate_bps;
    const double data = header + payload_bits / phy.data_rate_bps;
    const double delta = phy.prop_delay_s;

    auto require = [](const std::optional<double>& v, const char* name) {
        if (!v) throw std::invalid_argument(std::string(name) + " is required for this access mode");
        return *v;
    };

    SlotTimes st;
    switch (mode) {
    case AccessMode::SlottedAloha:
        st.t_idle = data;
        st.t_coll = data + delta;
        st.t_succ = data + delta;
        break;
    case AccessMode::DcfBasic: {
        const double ack = require(phy.ack_s, "ack_s");
        st.t_idle = phy.idle_slot_s;
        st.t_coll = data + phy.difs_s + delta;
        st.t_succ = data + phy.sifs_s + ack + phy.difs_s + delta;
        break;
    }
    case AccessMode::DcfRtsCts: {
        const double ack = require(phy.ack_s, "ack_s");
        const double rts = require(phy.rts_s, "rts_s");
        const double cts = require(phy.cts_s, "cts_s");
        st.t_idle = phy.idle_slot_s;
        st.t_coll = rts + phy.difs_s + delta;
        st.t_succ = rts + cts + data + 3.0 * phy.sifs_s + ack + phy.difs_s + delta;
        break;
    }
    }

    if (!(st.t_idle <= st.t_coll && st.t_coll <= st.t_succ))
        throw std::invalid_argument("slot times violate t_idle <= t_coll <= t_succ");
    return st;
}

PhyParams table1_phy() {
    return PhyParams{}; // field defaults are the published parameter set
}

double table1_ack_s() { return 20e-6 + 112.0 / 6e6; }
double table1_cts_s() { return 20e-6 + 112.0 / 6e6; }
double table1_rts_s() { return 20e-6 + 160.0 / 6e6; }

SlotTimes unit_slot_times() { return SlotTimes{1.0, 1.0, 1.0}; }

PhyParams unit_phy() {
    PhyParams p;
    p.phy_header_s = 0.0;
    p.mac_header_bits = 0.0;
    p.data_rate_bps = 1.0; // 1 payload bit == one 1 s slot
    p.sifs_s = 0.0;
    p.difs_s = 0.0;
    p.ack_s = 0.0;
    p.rts_s = 0.0;
    p.cts_s = 0.0;
    p.idle_slot_s = 1.0;
    p.prop_delay_s = 0.0;
    return p;
}

} // namespace ebwlan
