#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "battlytics/curves.hpp"
#include "battlytics/segmentation.hpp"
#include "battlytics/synthgen.hpp"
#include "helpers.hpp"

using namespace battlytics;

namespace {

std::vector<ChargingEvent> events_of(const std::vector<BatterySample>& s) {
    return segment_events(pair_consecutive(s));
}

std::vector<BatterySample> linear_event(int voltage_offset = 0, double t0 = 0.0, double temp = 29.0) {
    std::vector<BatterySample> s;
    for (int soc = 1; soc <= 100; ++soc) {
        const int v = 3600 + static_cast<int>(std::lround(600.0 * (soc - 1) / 99.0)) + voltage_offset;
        s.push_back(testing::sample(t0 + soc * 72.0, soc, v, temp));
    }
    return s;
}

}  // namespace

TEST_CASE("voltage curve of a single event is the series itself") {
    const auto s = linear_event();
    const auto curve = voltage_curve(events_of(s));
    REQUIRE(curve.points.size() == 100);
    for (const auto& smp : s) CHECK(curve.at(smp.soc) == smp.voltage_mv);
    CHECK(curve.points.at(50).low_confidence());
}

TEST_CASE("median of two events is the midpoint") {
    auto a = events_of(linear_event(0, 0));
    const auto b = events_of(linear_event(20, 1e6));
    a.insert(a.end(), b.begin(), b.end());
    const auto curve = voltage_curve(a);
    const auto base = voltage_curve(events_of(linear_event(10, 0)));
    CHECK(curve == SocCurve{CurveKind::Voltage, [&] {
              auto pts = base.points;
              for (auto& [soc, p] : pts) p.count = 2;
              return pts;
          }()});
}

TEST_CASE("charge-time curve") {
    const auto flat = charge_time_curve(events_of(testing::ramp({10, 11, 12, 13, 14}, 36.0)));
    REQUIRE(flat.points.size() == 4);
    for (const auto& [soc, p] : flat.points) CHECK(p.value == 36.0);

    // Two events crossing level 11 in 30 s and 50 s: even count averages the middle values.
    auto a = events_of(testing::ramp({10, 11}, 30.0, 0.0));
    const auto b = events_of(testing::ramp({10, 11}, 50.0, 1e6));
    a.insert(a.end(), b.begin(), b.end());
    CHECK(charge_time_curve(a).at(11) == 40.0);

    // A two-percent step spreads its time over both levels.
    const auto jump = charge_time_curve(events_of(testing::ramp({10, 12}, 72.0)));
    CHECK(jump.at(11) == 36.0);
    CHECK(jump.at(12) == 36.0);
    CHECK_FALSE(jump.at(10));
}

TEST_CASE("closing step is excluded from rate curves unless asked") {
    const auto steps = testing::steps_with_rates({0.5, 0.5, 0.02, 0.5});
    const auto ev = segment_events(steps);
    CHECK_FALSE(charge_time_curve(ev).at(4));
    CHECK(charge_time_curve(ev, true).at(4) == doctest::Approx(1800.0));
}

TEST_CASE("temperature curve") {
    const auto curve = temperature_curve(events_of(linear_event(0, 0, 29.0)));
    for (const auto& [soc, p] : curve.points) CHECK(p.value == 29.0);

    synth::TraceSpec dlc;
    dlc.technique = Technique::Dlc;
    synth::TraceSpec fast = dlc;
    fast.technique = Technique::Quick;
    const auto cool = temperature_curve(events_of(synth::generate_trace(dlc).samples));
    const auto hot = temperature_curve(events_of(synth::generate_trace(fast).samples));
    for (int soc = 30; soc <= 70; ++soc) {
        const double diff = *hot.at(soc) - *cool.at(soc);
        CHECK(diff >= 8.0);
        CHECK(diff <= 10.0);
    }
}

TEST_CASE("curves pool raw values, never medians of medians") {
    std::mt19937_64 rng(5);
    std::vector<ChargingEvent> all;
    for (int e = 0; e < 9; ++e) {
        auto s = linear_event(std::uniform_int_distribution<int>(-40, 40)(rng), e * 1e6);
        for (auto& smp : s) smp.voltage_mv += std::uniform_int_distribution<int>(-15, 15)(rng);
        const auto ev = events_of(s);
        all.insert(all.end(), ev.begin(), ev.end());
    }
    const auto whole = voltage_curve(all);

    CurveAccumulator left(CurveKind::Voltage), right(CurveKind::Voltage);
    for (std::size_t i = 0; i < all.size(); ++i) (i < 4 ? left : right).add_event(all[i]);
    left.merge(right);
    CHECK(left.build() == whole);

    auto shuffled = all;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(voltage_curve(shuffled) == whole);
}

TEST_CASE("charge-time values are positive") {
    synth::TraceSpec spec;
    spec.fuel_gauge = FuelGauge::VoltageBased;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        spec.seed = seed;
        const auto c = charge_time_curve(events_of(synth::generate_trace(spec).samples));
        for (const auto& [soc, p] : c.points) CHECK(p.value > 0.0);
    }
}

TEST_CASE("grouped curves split by device or model") {
    auto a = linear_event(0, 0);
    auto b = linear_event(20, 0);
    for (auto& s : b) {
        s.user_id = "u2";
        s.model = "m2";
    }
    auto ev = events_of(a);
    const auto evb = events_of(b);
    ev.insert(ev.end(), evb.begin(), evb.end());
    const auto by_device = grouped_curves(ev, CurveKind::Voltage, GroupKey::Device);
    CHECK(by_device.size() == 2);
    CHECK(by_device.count("u1") == 1);
    const auto by_model = grouped_curves(ev, CurveKind::Voltage, GroupKey::Model);
    CHECK(by_model.count("m2") == 1);
    for (auto& s : b) s.model = "m1";
    ev = events_of(a);
    const auto evc = events_of(b);
    ev.insert(ev.end(), evc.begin(), evc.end());
    const auto pooled = grouped_curves(ev, CurveKind::Voltage, GroupKey::Model);
    REQUIRE(pooled.size() == 1);
    CHECK(pooled.at("m1").points.at(1).count == 2);
}

TEST_CASE("rates and curve rows") {
    const auto ev = segment_events(testing::steps_with_rates({0.5, 1.0, 0.02, 0.25, 0.75}));
    const auto steps = collect_rates(ev, false);
    CHECK(steps == std::vector<double>{0.5, 1.0, 0.25, 0.75});
    const auto means = collect_rates(ev, true);
    REQUIRE(means.size() == 2);
    CHECK(means[0] == doctest::Approx(0.75));
    CHECK(means[1] == doctest::Approx(0.5));

    SocCurve c{CurveKind::ChargeTime, {{10, {36.0, 5}}, {11, {40.5, 1}}}};
    std::ostringstream out;
    write_curve_rows(out, "dev", c);
    CHECK(out.str() == "dev,charge_time,10,36,5,false\ndev,charge_time,11,40.5,1,true\n");
}
