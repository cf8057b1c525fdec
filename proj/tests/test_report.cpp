#include <doctest.h>

#include "battlytics/report.hpp"

using namespace battlytics;

TEST_CASE("corpus shares") {
    CorpusSummary s;
    for (int i = 0; i < 10; ++i) {
        DeviceProfile p;
        p.technique = i < 4 ? Technique::CcCv : Technique::Dlc;
        p.fuel_gauge = FuelGauge::CoulombCounter;
        if (i == 0) p.variants.insert(Variant::CvFirst);
        if (i < 8) p.capacity_loss_pct = i < 6 ? 3.0 : 15.0;
        s.add(p);
    }
    CHECK(s.devices == 10);
    CHECK(s.technique_share(Technique::CcCv) == doctest::Approx(0.4));
    CHECK(s.technique_share(Technique::Dlc) == doctest::Approx(0.6));
    CHECK(s.variant_share(Variant::CvFirst) == doctest::Approx(0.1));
    CHECK(s.fuel_gauge_share(FuelGauge::CoulombCounter) == 1.0);
    CHECK(s.loss_share(1.0, 10.0) == doctest::Approx(0.75));

    const auto j = to_json(s, 0.98);
    CHECK(j["techniques"]["dlc"]["count"] == 6);
    const auto md = to_markdown(s, 0.98);
    CHECK(md.find("| dlc | 6 | 60.0% |") != std::string::npos);
}

TEST_CASE("behavior tallies and the fluctuation tail") {
    CorpusSummary s;
    BehaviorReport r;
    for (int lvl : {5, 5, 6, 7, 90}) {
        FluctuationEpisode e;
        e.event_id = lvl;
        e.soc_low = lvl;
        e.active_use = lvl == 90;
        r.fluctuation_episodes.push_back(e);
    }
    FullPluggedEpisode fp;
    fp.maintenance_cycles = 4;
    r.full_plugged_episodes.push_back(fp);
    r.wasted_energy_estimate = 100.0;
    s.add(r, 50);
    CHECK(s.charging_events == 50);
    CHECK(s.events_with_fluctuation == 4);
    CHECK(s.active_use_episodes == 1);
    CHECK(s.maintenance_cycles == 4);
    CHECK(s.wasted_energy_mah == 100.0);
    CHECK(s.fluctuation_tail_level(0.5) == 6);
    CHECK(s.fluctuation_tail_level(1.0) == 90);
    CHECK_FALSE(CorpusSummary{}.fluctuation_tail_level(0.98));
}
