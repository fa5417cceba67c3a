#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ebwlan/saturation.hpp"
#include "ebwlan/throughput.hpp"

#include <cmath>

using namespace ebwlan;

namespace {

NetworkConfig unit_cfg(int n, int m, double lambda = 0.0) {
    NetworkConfig c;
    c.n_stations = n;
    c.mpr_capability = m;
    c.arrival_rate = lambda;
    c.payload_bits = 1.0;
    return c;
}

const SlotTimes kUnit{1.0, 1.0, 1.0};

} // namespace

TEST_CASE("throughput endpoints and a hand-evaluated point") {
    auto cfg = unit_cfg(2, 1);
    CHECK(throughput_bps(0.0, cfg, kUnit) == 0.0);
    CHECK(throughput_bps(1.0, cfg, kUnit) == 0.0);
    CHECK(throughput_bps(0.1, cfg, kUnit) == doctest::Approx(0.18).epsilon(1e-12));
}

TEST_CASE("throughput is nonnegative and unimodal for N > M") {
    for (int n : {2, 10, 50}) {
        auto cfg = unit_cfg(n, 1);
        double prev = 0.0;
        int sign_changes = 0;
        int prev_sign = 1;
        for (double tau = 0.0; tau <= 1.0001; tau += 0.005) {
            double s = throughput_bps(std::min(tau, 1.0), cfg, kUnit);
            CHECK(s >= 0.0);
            if (tau > 0.0) {
                int sign = s - prev > 0 ? 1 : -1;
                if (sign != prev_sign && std::abs(s - prev) > 1e-12) {
                    ++sign_changes;
                    prev_sign = sign;
                }
            }
            prev = s;
        }
        CHECK(sign_changes <= 1);
    }
}

TEST_CASE("tau* against the calculus oracle") {
    SUBCASE("N=2 M=1: maximize 2 tau (1-tau) at 1/2") {
        auto ts = find_tau_star(unit_cfg(2, 1), kUnit);
        CHECK(ts.tau_star == doctest::Approx(0.5).epsilon(1e-8));
        CHECK(!ts.degenerate_n_le_m);
    }
    SUBCASE("N=50 M=1 equal slots: argmax of N tau (1-tau)^(N-1) is exactly 1/N") {
        auto ts = find_tau_star(unit_cfg(50, 1), kUnit);
        CHECK(ts.tau_star == doctest::Approx(0.02).epsilon(1e-6));
        CHECK(std::abs(ts.tau_star - 0.02) / 0.02 < 0.10);
    }
    SUBCASE("N <= M is degenerate") {
        auto ts = find_tau_star(unit_cfg(3, 3), kUnit);
        CHECK(ts.degenerate_n_le_m);
        CHECK(ts.tau_star == 1.0);
        CHECK(ts.s_star == doctest::Approx(3.0)); // everyone succeeds every slot
    }
}

TEST_CASE("offered load roots") {
    SUBCASE("zero load roots at the ends") {
        auto cfg = unit_cfg(2, 1, 0.0);
        auto op = offered_load_roots(cfg, kUnit);
        REQUIRE(op.tau_l.has_value());
        CHECK(*op.tau_l == 0.0);
        REQUIRE(op.tau_r.has_value());
        CHECK(*op.tau_r == 1.0);
        CHECK(op.tau_l_operating);
        CHECK(!op.tau_r_operating);
    }
    SUBCASE("quadratic case: 2 tau (1-tau) = 0.18") {
        auto cfg = unit_cfg(2, 1, 0.09); // N*lambda*PL = 0.18
        auto op = offered_load_roots(cfg, kUnit);
        REQUIRE(op.tau_l.has_value());
        REQUIRE(op.tau_r.has_value());
        CHECK(*op.tau_l == doctest::Approx(0.1).epsilon(1e-9));
        CHECK(*op.tau_r == doctest::Approx(0.9).epsilon(1e-9));
    }
    SUBCASE("tangency collapses to a single root") {
        auto base = unit_cfg(2, 1);
        auto ts = find_tau_star(base, kUnit);
        auto cfg = unit_cfg(2, 1, ts.s_star / 2.0); // load == S*
        auto op = offered_load_roots(cfg, kUnit);
        REQUIRE(op.tau_l.has_value());
        CHECK(*op.tau_l == doctest::Approx(ts.tau_star).epsilon(1e-7));
        CHECK(!op.tau_r.has_value());
    }
    SUBCASE("load above S* yields no roots") {
        auto base = unit_cfg(10, 1);
        auto ts = find_tau_star(base, kUnit);
        auto cfg = unit_cfg(10, 1, 1.01 * ts.s_star / 10.0);
        auto op = offered_load_roots(cfg, kUnit);
        CHECK(!op.tau_l.has_value());
        CHECK(!op.tau_r.has_value());
        CHECK(!op.relationship.has_value());
    }
    SUBCASE("roots reproduce the offered load to 1e-9 relative") {
        for (int n : {2, 10, 50}) {
            auto base = unit_cfg(n, 1);
            auto ts = find_tau_star(base, kUnit);
            for (double frac : {0.05, 0.3, 0.7, 0.95}) {
                auto cfg = unit_cfg(n, 1, frac * ts.s_star / n);
                auto op = offered_load_roots(cfg, kUnit);
                REQUIRE(op.tau_l.has_value());
                REQUIRE(op.tau_r.has_value());
                const double load = n * cfg.arrival_rate;
                CHECK(throughput_bps(*op.tau_l, cfg, kUnit)
                      == doctest::Approx(load).epsilon(1e-9));
                CHECK(throughput_bps(*op.tau_r, cfg, kUnit)
                      == doctest::Approx(load).epsilon(1e-9));
            }
        }
    }
    SUBCASE("case classification agrees with the definitions") {
        // ALOHA unit slots: tau_s < tau*; load below S_s is case (i)
        auto cfg = unit_cfg(50, 1, 0.3 * 0.34 / 50.0);
        auto op = offered_load_roots(cfg, kUnit);
        REQUIRE(op.relationship.has_value());
        CHECK(*op.relationship == LoadCase::CaseI);
        CHECK(op.tau_l_operating);
        CHECK(!op.tau_r_operating); // tau_r > tau_s cannot be an operating point
    }
}

TEST_CASE("saturation fixed point") {
    SUBCASE("N=1 closed form") {
        NetworkConfig cfg = unit_cfg(1, 1);
        cfg.min_window = 16;
        auto sat = solve_saturation(cfg, kUnit);
        CHECK(sat.tau_s == doctest::Approx(2.0 / 17.0).epsilon(1e-14));
        CHECK(sat.p_c == 0.0);
        CHECK(sat.residual < 1e-14);
    }
    SUBCASE("M >= N closed form") {
        NetworkConfig cfg = unit_cfg(50, 50);
        cfg.min_window = 16;
        auto sat = solve_saturation(cfg, kUnit);
        CHECK(sat.tau_s == doctest::Approx(2.0 / 17.0).epsilon(1e-14));
        CHECK(sat.p_c == 0.0);
    }
    SUBCASE("M = N-1 at large N is the closed form to within 1e-14") {
        NetworkConfig cfg = unit_cfg(50, 49);
        cfg.min_window = 16;
        auto sat = solve_saturation(cfg, kUnit);
        CHECK(sat.tau_s == doctest::Approx(2.0 / 17.0).epsilon(1e-14));
        CHECK(sat.residual < 1e-10);
    }
    SUBCASE("brute-force scan oracle, N=50 M=1 r=2 W0=16") {
        NetworkConfig cfg = unit_cfg(50, 1);
        cfg.backoff_factor = 2.0;
        cfg.min_window = 16;
        auto window_eq = [&](double tau) {
            double pc = collision_prob_pc(tau, cfg);
            return tau - 2.0 * (1.0 - 2.0 * pc) / (16.0 * (1.0 - pc) + 1.0 - 2.0 * pc);
        };
        double bracket_lo = 0.0, bracket_hi = 0.0;
        double prev_tau = 1e-6, prev_g = window_eq(1e-6);
        for (double tau = 2e-6; tau <= 0.999; tau += 1e-6) {
            double g = window_eq(tau);
            if (prev_g < 0.0 && g >= 0.0) {
                bracket_lo = prev_tau;
                bracket_hi = tau;
                break;
            }
            prev_tau = tau;
            prev_g = g;
        }
        REQUIRE(bracket_hi > 0.0);
        auto sat = solve_saturation(cfg, kUnit);
        CHECK(sat.tau_s >= bracket_lo - 1e-12);
        CHECK(sat.tau_s <= bracket_hi + 1e-12);
        CHECK(sat.residual < 1e-10);
        CHECK(sat.p_c < 0.5);
    }
    SUBCASE("r = 1 is the fixed window") {
        NetworkConfig cfg = unit_cfg(20, 1);
        cfg.backoff_factor = 1.0;
        cfg.min_window = 32;
        auto sat = solve_saturation(cfg, kUnit);
        CHECK(sat.tau_s == doctest::Approx(2.0 / 33.0).epsilon(1e-14));
        CHECK(sat.residual < 1e-12);
    }
}

TEST_CASE("saturation sweep") {
    auto slot_source = [](const NetworkConfig&) { return kUnit; };
    SUBCASE("single element equals the direct solve") {
        NetworkConfig cfg = unit_cfg(10, 1);
        auto rows = saturation_sweep({cfg}, slot_source);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].error.empty());
        CHECK(rows[0].point.tau_s == solve_saturation(cfg, kUnit).tau_s);
    }
    SUBCASE("saturation throughput grows with M (ALOHA)") {
        std::vector<NetworkConfig> cfgs;
        for (int m = 1; m <= 10; ++m) cfgs.push_back(unit_cfg(50, m));
        auto rows = saturation_sweep(cfgs, slot_source);
        for (std::size_t i = 1; i < rows.size(); ++i) {
            CHECK(rows[i].error.empty());
            CHECK(rows[i].point.s_s_bps > rows[i - 1].point.s_s_bps);
        }
    }
    SUBCASE("empty input violates the precondition") {
        CHECK_THROWS_AS(saturation_sweep({}, slot_source), std::invalid_argument);
    }
}
