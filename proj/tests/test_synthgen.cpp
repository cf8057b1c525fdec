#include <doctest.h>

#include <set>

#include "battlytics/classification.hpp"
#include "battlytics/ingestion.hpp"
#include "battlytics/segmentation.hpp"
#include "battlytics/synthgen.hpp"

using namespace battlytics;

namespace {

std::string serialize(const synth::Trace& t) {
    std::string out;
    for (const auto& s : t.samples) out += to_jsonl(s) + "\n";
    return out;
}

}  // namespace

TEST_CASE("plain CC-CV trace") {
    synth::TraceSpec spec;
    const auto t = synth::generate_trace(spec);
    REQUIRE(t.samples.size() == 100);
    CHECK(t.samples.front().soc == 1);
    CHECK(t.samples.back().soc == 100);
    CHECK(t.samples.back().voltage_mv == 4200);
    for (int soc = 2; soc <= 50; ++soc)
        CHECK(t.samples[soc - 1].timestamp - t.samples[soc - 2].timestamp == doctest::Approx(72.0));
    CHECK(t.truth.technique == Technique::CcCv);
    CHECK(t.truth.final_voltage_mv == 4200);
}

TEST_CASE("degraded DLC trace inverts the loss formula") {
    synth::TraceSpec spec;
    spec.technique = Technique::Dlc;
    spec.capacity_loss_pct = 10.0;
    const auto t = synth::generate_trace(spec);
    CHECK(t.samples.back().voltage_mv == 4250);
    const std::vector<int> finals{t.samples.back().voltage_mv};
    CHECK(capacity_loss(finals, 4350) == 10.0);
}

TEST_CASE("pulse trace oscillates") {
    synth::TraceSpec spec;
    spec.technique = Technique::FastPulse;
    const auto t = synth::generate_trace(spec);
    int reversals = 0, prev = 0;
    for (std::size_t i = 1; i < t.samples.size(); ++i) {
        if (t.samples[i].soc < 30 || t.samples[i].soc > 95) continue;
        const int d = t.samples[i].voltage_mv - t.samples[i - 1].voltage_mv;
        if (std::abs(d) < 40) continue;
        const int sign = d > 0 ? 1 : -1;
        if (prev && sign != prev) ++reversals;
        prev = sign;
    }
    CHECK(reversals >= 4);
}

TEST_CASE("quick trace peaks then declines") {
    synth::TraceSpec spec;
    spec.technique = Technique::Quick;
    const auto t = synth::generate_trace(spec);
    int peak = 0;
    for (const auto& s : t.samples) peak = std::max(peak, s.voltage_mv);
    CHECK(peak == 4480);
    CHECK(t.samples.back().voltage_mv == 4350);
}

TEST_CASE("same spec and seed give identical bytes") {
    synth::TraceSpec spec;
    spec.fuel_gauge = FuelGauge::VoltageBased;
    spec.voltage_noise_mv = 10.0;
    spec.seed = 77;
    CHECK(serialize(synth::generate_trace(spec)) == serialize(synth::generate_trace(spec)));
    auto other = spec;
    other.seed = 78;
    CHECK(serialize(synth::generate_trace(spec)) != serialize(synth::generate_trace(other)));
}

TEST_CASE("generated samples are valid and time ordered") {
    for (auto tech : {Technique::CcCv, Technique::Dlc, Technique::Quick, Technique::FastPulse}) {
        synth::TraceSpec spec;
        spec.technique = tech;
        spec.voltage_noise_mv = 10.0;
        spec.fuel_gauge = FuelGauge::VoltageBased;
        spec.fluctuation = synth::FluctuationPattern{};
        spec.full_plugged = synth::FullPluggedPattern{};
        const auto t = synth::generate_trace(spec);
        for (std::size_t i = 0; i < t.samples.size(); ++i) {
            CHECK(validate(t.samples[i]).empty());
            if (i > 0) CHECK(t.samples[i].timestamp > t.samples[i - 1].timestamp);
        }
    }
}

TEST_CASE("invalid specs are refused") {
    synth::TraceSpec spec;
    spec.cv_onset_soc = 95;
    CHECK_FALSE(synth::validate(spec).empty());
    CHECK_THROWS_AS(synth::generate_trace(spec), std::invalid_argument);
    spec = {};
    spec.cc_rate = 0.0;
    CHECK_THROWS_AS(synth::generate_trace(spec), std::invalid_argument);
    spec = {};
    spec.technique = Technique::Unknown;
    CHECK_THROWS_AS(synth::generate_trace(spec), std::invalid_argument);
}

TEST_CASE("multi-session traces mark their gaps") {
    synth::MultiSessionSpec spec;
    spec.sessions = 4;
    spec.seed = 5;
    const auto t = synth::generate_sessions(spec);
    const auto steps = pair_consecutive(t.samples);
    CHECK(t.boundary_steps.size() == 3);
    REQUIRE(t.step_session.size() == steps.size());
    for (auto b : t.boundary_steps) CHECK(steps.at(b).c_rate < 0.03);
}

TEST_CASE("manifest corpus matches its proportions exactly") {
    const auto m = synth::manifest_from_json(nlohmann::json::parse(R"({
        "seed": 3,
        "entries": [
            {"technique": "cccv", "count": 38, "loss": [1, 10]},
            {"technique": "dlc", "count": 59, "loss": 2.5},
            {"technique": "quick", "count": 3, "model": "fast"}
        ]})"));
    std::map<Technique, int> counts;
    std::set<std::string> users;
    synth::generate_corpus(m, [&](const synth::Trace& t) {
        ++counts[t.truth.technique];
        users.insert(t.truth.user_id);
        if (t.truth.technique == Technique::CcCv) {
            CHECK(t.truth.capacity_loss_pct >= 1.0);
            CHECK(t.truth.capacity_loss_pct <= 10.0);
        }
        if (t.truth.technique == Technique::Dlc) CHECK(t.truth.capacity_loss_pct == 2.5);
    });
    CHECK(counts[Technique::CcCv] == 38);
    CHECK(counts[Technique::Dlc] == 59);
    CHECK(counts[Technique::Quick] == 3);
    CHECK(users.size() == 100);
}

TEST_CASE("ground truth round-trips through JSON") {
    synth::TraceSpec spec;
    spec.cv_first = true;
    spec.fuel_gauge = FuelGauge::VoltageBased;
    spec.fluctuation = synth::FluctuationPattern{};
    spec.full_plugged = synth::FullPluggedPattern{};
    const auto truth = synth::generate_trace(spec).truth;
    const auto back = synth::ground_truth_from_json(truth.user_id, synth::to_json(truth));
    CHECK(back.technique == truth.technique);
    CHECK(back.variants == truth.variants);
    CHECK(back.fuel_gauge == truth.fuel_gauge);
    CHECK(back.final_voltage_mv == truth.final_voltage_mv);
    CHECK(back.fluctuation_reversals == truth.fluctuation_reversals);
    CHECK(back.maintenance_cycles == truth.maintenance_cycles);
}

TEST_CASE("rng is deterministic") {
    synth::Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) {
        const double u = a.uniform();
        CHECK(u == b.uniform());
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    CHECK(synth::derive_seed(1, 2) != synth::derive_seed(1, 3));
    CHECK(synth::derive_seed(1, 2) == synth::derive_seed(1, 2));
}
