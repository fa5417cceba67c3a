#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ebwlan/config.hpp"

#include <cstdlib>
#include <fstream>

using namespace ebwlan;

TEST_CASE("serialize -> parse is the identity") {
    RunConfig cfg;
    cfg.net.n_stations = 50;
    cfg.net.arrival_rate = 12.3456789012345678;
    cfg.net.payload_bits = 8000.0;
    cfg.net.access_mode = AccessMode::DcfBasic;
    cfg.phy.ack_s = table1_ack_s();
    cfg.sim.seed = 0xDEADBEEFCAFEF00DULL;
    cfg.sim.queue_capacity = 1000;
    cfg.sim.trace_path = "/tmp/trace.csv";
    cfg.optimize.target = CapacityTarget::SBDJ;
    cfg.optimize.sum_limit = PoissonSumLimit::M;
    cfg.sweep.op = "capacity";
    cfg.sweep.modes = {AccessMode::SlottedAloha, AccessMode::DcfRtsCts};
    cfg.sweep.mpr_capability = {1, 2, 4};
    cfg.sweep.backoff_factor = {1.5, 2.0, 2.7182818284590452};

    const std::string text = serialize_config(cfg);
    const RunConfig again = parse_config_text(text);
    CHECK(again == cfg);
    CHECK(serialize_config(again) == text);
}

TEST_CASE("parsing details") {
    SUBCASE("sections, comments, whitespace") {
        const std::string text =
            "# a comment\n"
            "[net]\n"
            "  n_stations = 7  \n"
            "\n"
            "; another comment\n"
            "[sim]\n"
            "queue_capacity = unbounded\n"
            "seed = 99\n";
        auto cfg = parse_config_text(text);
        CHECK(cfg.net.n_stations == 7);
        CHECK(!cfg.sim.queue_capacity.has_value());
        CHECK(cfg.sim.seed == 99);
    }
    SUBCASE("unknown key carries the line number") {
        try {
            parse_config_text("[net]\nn_stations = 5\nbogus = 1\n");
            FAIL("expected a throw");
        } catch (const std::invalid_argument& e) {
            CHECK(std::string(e.what()).find("line 3") != std::string::npos);
        }
    }
    SUBCASE("malformed lines throw") {
        CHECK_THROWS_AS(parse_config_text("[net\n"), std::invalid_argument);
        CHECK_THROWS_AS(parse_config_text("[net]\nn_stations\n"), std::invalid_argument);
        CHECK_THROWS_AS(parse_config_text("n_stations = 5\n"), std::invalid_argument);
        CHECK_THROWS_AS(parse_config_text("[net]\nn_stations = five\n"), std::invalid_argument);
    }
    SUBCASE("unset optionals survive the round trip") {
        RunConfig cfg;
        CHECK(!cfg.phy.ack_s.has_value());
        auto again = parse_config_text(serialize_config(cfg));
        CHECK(!again.phy.ack_s.has_value());
    }
}

TEST_CASE("overrides") {
    RunConfig cfg;
    apply_override(cfg, "net.arrival_rate=42.5");
    CHECK(cfg.net.arrival_rate == 42.5);
    apply_override(cfg, "phy.ack_s=3.2e-5");
    CHECK(cfg.phy.ack_s == doctest::Approx(3.2e-5));
    apply_override(cfg, "sim.queue_capacity=unbounded");
    CHECK(!cfg.sim.queue_capacity.has_value());
    CHECK_THROWS_AS(apply_override(cfg, "no_dot=1"), std::invalid_argument);
    CHECK_THROWS_AS(apply_override(cfg, "net.arrival_rate"), std::invalid_argument);
    CHECK_THROWS_AS(apply_override(cfg, "net.nope=1"), std::invalid_argument);
}

TEST_CASE("presets") {
    SUBCASE("table1 resets the phy section") {
        RunConfig cfg;
        cfg.phy.data_rate_bps = 54e6;
        apply_preset(cfg, "table1");
        CHECK(cfg.phy.data_rate_bps == 6e6);
        CHECK(cfg.phy.phy_header_s == 20e-6);
        CHECK(cfg.phy.sifs_s == 16e-6);
        CHECK(cfg.phy.difs_s == 34e-6);
        CHECK(!cfg.phy.ack_s.has_value()); // control frames stay explicit
    }
    SUBCASE("unit preset gives 1 s slots at unit payload") {
        RunConfig cfg;
        apply_preset(cfg, "unit");
        auto st = slot_times(AccessMode::SlottedAloha, cfg.phy, 1.0);
        CHECK(st.t_succ == 1.0);
    }
    SUBCASE("preset via config key, overridden by later keys") {
        auto cfg = parse_config_text("[phy]\npreset = table1\ndata_rate_bps = 12e6\n");
        CHECK(cfg.phy.data_rate_bps == 12e6);
        CHECK(cfg.phy.phy_header_s == 20e-6);
    }
    SUBCASE("named preset files resolve through the preset directory") {
        const char* dir = "/tmp/ebwlan_presets_test";
        [[maybe_unused]] int rc = std::system(("mkdir -p " + std::string(dir)).c_str());
        {
            std::ofstream out(std::string(dir) + "/myphy.conf");
            out << "[phy]\ndata_rate_bps = 24e6\n[net]\nmin_window = 32\n";
        }
        setenv("EBWLAN_PRESET_DIR", dir, 1);
        auto cfg = parse_config_text("[phy]\npreset = myphy\n");
        CHECK(cfg.phy.data_rate_bps == 24e6);
        CHECK(cfg.net.min_window == 32);
        unsetenv("EBWLAN_PRESET_DIR");
        CHECK_THROWS_AS(parse_config_text("[phy]\npreset = myphy\n"), std::invalid_argument);
    }
}
