#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "cosim/occupancy.hpp"
#include "cosim/random_stream.hpp"

using namespace cosim;

TEST_CASE("occupancy_at is a step function over windows") {
    std::map<int, BusyTrace> traces;
    traces[3] = BusyTrace{{{0, 0.2}, {1, 0.5}, {4, 0.9}}};
    OccupancyRegistry reg(std::move(traces));

    CHECK(reg.occupancy_at(3, 0) == doctest::Approx(0.2));
    CHECK(reg.occupancy_at(3, 999'999) == doctest::Approx(0.2));
    CHECK(reg.occupancy_at(3, 1'000'000) == doctest::Approx(0.5));
    CHECK(reg.occupancy_at(3, 1'999'999) == doctest::Approx(0.5));
    CHECK(reg.occupancy_at(3, 4'500'000) == doctest::Approx(0.9));

    SUBCASE("gaps, unknown nodes and out-of-range times read as zero") {
        CHECK(reg.occupancy_at(3, 2'500'000) == 0.0); // window 2 absent
        CHECK(reg.occupancy_at(3, 5'000'000) == 0.0); // beyond the trace
        CHECK(reg.occupancy_at(99, 0) == 0.0);        // no trace at all
        CHECK(reg.occupancy_at(3, -1) == 0.0);
    }
}

TEST_CASE("registry rejects broken traces") {
    std::map<int, BusyTrace> bad_co;
    bad_co[0] = BusyTrace{{{0, 1.5}}};
    CHECK_THROWS_AS(OccupancyRegistry(std::move(bad_co)), ValidationError);

    std::map<int, BusyTrace> bad_order;
    bad_order[0] = BusyTrace{{{3, 0.5}, {3, 0.5}}};
    CHECK_THROWS_AS(OccupancyRegistry(std::move(bad_order)), ValidationError);
}

TEST_CASE("load_registry reads files and reports the node on failure") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "cosim_occupancy_test";
    fs::create_directories(dir);
    {
        std::ofstream out(dir / "n0.csv");
        out << "window,co\n0,0.250000\n1,0.750000\n";
    }

    OccupancyRegistry reg = load_registry({{0, (dir / "n0.csv").string()}});
    CHECK(reg.occupancy_at(0, 500'000) == doctest::Approx(0.25));
    CHECK(reg.occupancy_at(0, 1'200'000) == doctest::Approx(0.75));

    CHECK_THROWS_WITH_AS(load_registry({{7, (dir / "missing.csv").string()}}),
                         doctest::Contains("node 7"), ValidationError);

    {
        std::ofstream out(dir / "bad.csv");
        out << "window,co\n0,2.0\n";
    }
    CHECK_THROWS_WITH_AS(load_registry({{2, (dir / "bad.csv").string()}}),
                         doctest::Contains("node 2"), ValidationError);
    fs::remove_all(dir);
}

TEST_CASE("receiver_rx_power gates on the draw") {
    CHECK(receiver_rx_power(16.0, 0.0, 0.0) == 16.0);
    CHECK(receiver_rx_power(16.0, 0.0, 0.9999) == 16.0);
    CHECK(receiver_rx_power(16.0, 1.0, 0.9999) == kBlockedRxPowerDbm);
    CHECK(receiver_rx_power(16.0, 0.5, 0.4999) == kBlockedRxPowerDbm);
    // boundary: draw == co passes (strict comparison)
    CHECK(receiver_rx_power(16.0, 0.5, 0.5) == 16.0);
    CHECK(receiver_rx_power(-20.0, 0.3, 0.7) == -20.0);
}

TEST_CASE("sender_gate blocks iff draw < co") {
    CHECK(sender_gate(0.5, 0.5).outcome == GateOutcome::Forward);
    CHECK(sender_gate(0.5, 0.49999).outcome == GateOutcome::Blocked);
    CHECK(sender_gate(0.0, 0.0).outcome == GateOutcome::Forward);
    CHECK(sender_gate(1.0, 0.99999).outcome == GateOutcome::Blocked);
    GateDecision d = sender_gate(0.3, 0.2);
    CHECK(d.co == 0.3);
    CHECK(d.draw == 0.2);
    CHECK(d.outcome == GateOutcome::Blocked);
}

TEST_CASE("monotone threshold: for a fixed draw, blocking is monotone in co") {
    for (double draw : {0.0, 0.1, 0.33, 0.5, 0.77, 0.999}) {
        bool blocked_before = false;
        for (int i = 0; i <= 100; ++i) {
            double co = i / 100.0;
            bool blocked = sender_gate(co, draw).outcome == GateOutcome::Blocked;
            CHECK(blocked == (draw < co));
            if (blocked_before)
                CHECK(blocked); // once blocked, stays blocked as co grows
            blocked_before = blocked;
        }
    }
}

TEST_CASE("gate draws hit the configured rate over a million samples") {
    for (double co : {0.1, 0.37, 0.5, 0.9}) {
        RandomStream stream(1234, StreamKind::SenderGate, 0);
        int blocked = 0;
        const int n = 1'000'000;
        for (int i = 0; i < n; ++i)
            if (sender_gate(co, stream.draw()).outcome == GateOutcome::Blocked)
                ++blocked;
        double fraction = static_cast<double>(blocked) / n;
        CHECK(std::abs(fraction - co) < 0.005);
    }
}

TEST_CASE("random streams replay and are independent") {
    RandomStream a(99, StreamKind::ReceiverGate, 4);
    RandomStream b(99, StreamKind::ReceiverGate, 4);
    RandomStream other_node(99, StreamKind::ReceiverGate, 5);
    RandomStream other_kind(99, StreamKind::SenderGate, 4);

    bool node_differs = false;
    bool kind_differs = false;
    for (int i = 0; i < 1000; ++i) {
        double v = a.draw();
        CHECK(v == b.draw());
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
        node_differs |= other_node.draw() != v;
        kind_differs |= other_kind.draw() != v;
    }
    CHECK(node_differs);
    CHECK(kind_differs);

    SUBCASE("integer draws stay in range") {
        RandomStream s(1, StreamKind::Backoff, 0);
        for (int i = 0; i < 10000; ++i)
            CHECK(s.draw_int(15) <= 15);
    }
}
