#pragma once

// Synthetic charge traces with known ground truth. Waveforms are templates of
// the shapes seen in crowdsourced Android data, not an electrochemical model.

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "battlytics/domain.hpp"

namespace battlytics::synth {

/// Deterministic stream on top of mt19937_64 so that traces are identical
/// across standard library implementations.
class Rng {
   public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform();  // [0, 1)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal(double mean, double stddev);
    std::uint64_t next() { return engine_(); }

   private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

struct FluctuationPattern {
    int level = 5;      // alternates between level and level + 1
    int reversals = 2;
};

struct FullPluggedPattern {
    double hours = 10.0;
    double cycle_period_s = 540.0;
    int dip_pct = 1;
};

struct TraceSpec {
    std::string user_id = "u000000";
    std::string model = "synthetic";
    Technique technique = Technique::CcCv;
    bool cv_first = false;
    bool cc_tail = false;
    FuelGauge fuel_gauge = FuelGauge::CoulombCounter;
    double cc_rate = 0.5;
    double fast_rate = 1.1;  // CC rate for Quick and FastPulse
    std::optional<double> tail_rate;  // defaults to the CC rate
    double capacity_loss_pct = 0.0;
    double voltage_noise_mv = 0.0;
    double time_jitter_rel = 0.4;  // only applied for VoltageBased
    int cv_onset_soc = 80;
    int quick_cv_onset_soc = 60;
    double cv_final_rate = 0.1;
    double cv_first_rate = 0.05;
    double pulse_amplitude_mv = 40.0;
    int pulse_half_period = 3;
    std::optional<FluctuationPattern> fluctuation;
    std::optional<FullPluggedPattern> full_plugged;
    double start_time = 1.45e9;
    std::uint64_t seed = 1;
};

/// Empty string when the spec is usable, otherwise why not.
std::string validate(const TraceSpec& spec);

struct GroundTruth {
    std::string user_id;
    std::string model;
    Technique technique = Technique::CcCv;
    std::set<Variant> variants;
    FuelGauge fuel_gauge = FuelGauge::CoulombCounter;
    double capacity_loss_pct = 0.0;
    int final_voltage_mv = 0;
    std::optional<int> fluctuation_reversals;
    std::optional<int> maintenance_cycles;
    std::optional<double> full_plugged_duration_s;
};

struct Trace {
    std::vector<BatterySample> samples;
    GroundTruth truth;
};

/// One sample per percent from 1 to 100, then any behavior patterns.
/// Throws std::invalid_argument for a contradictory spec.
Trace generate_trace(const TraceSpec& spec);

/// Several charge sessions of one user joined by gap steps whose rate is below
/// the termination threshold (either a very slow single percent or a drop).
struct MultiSessionSpec {
    std::string user_id = "u000000";
    std::string model = "synthetic";
    int sessions = 3;
    double gap_rate_max = 0.025;  // must stay below the 0.03C termination rate
    double start_time = 1.45e9;
    std::uint64_t seed = 1;
};

struct MultiSessionTrace {
    std::vector<BatterySample> samples;
    std::vector<std::size_t> boundary_steps;  // step index of each gap step
    std::vector<int> step_session;            // 0-based session per step
};

MultiSessionTrace generate_sessions(const MultiSessionSpec& spec);

struct ManifestEntry {
    TraceSpec base;
    std::size_t count = 0;
    double loss_min = 0.0;
    double loss_max = 0.0;
};

struct Manifest {
    std::uint64_t seed = 1;
    std::vector<ManifestEntry> entries;
};

Manifest manifest_from_json(const nlohmann::json& j);
TraceSpec trace_spec_from_json(const nlohmann::json& j, TraceSpec base = {});

/// Generates count traces per entry in manifest order. User ids are
/// "u" + zero-padded running index; each trace seed derives from the manifest seed.
void generate_corpus(const Manifest& manifest, const std::function<void(const Trace&)>& sink);

nlohmann::json to_json(const GroundTruth& truth);
GroundTruth ground_truth_from_json(const std::string& user, const nlohmann::json& j);

}  // namespace battlytics::synth
