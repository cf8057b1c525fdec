// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <unistd.h>

#include "battlytics/analysis.hpp"
#include "battlytics/classification.hpp"
#include "battlytics/cli.hpp"
#include "battlytics/segmentation.hpp"
#include "battlytics/synthgen.hpp"

using namespace battlytics;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("battlytics-acceptance-" + tag + "-" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cli(std::vector<std::string> args, std::string* err_text = nullptr) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    if (err_text) *err_text = err.str();
    if (code != 0) std::fprintf(stderr, "command failed (%d): %s\n", code, err.str().c_str());
    return code;
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), f, a);
    return buf;
}

GroupAnalysis analyze(const synth::Trace& t, const AnalysisConfig& cfg = {}) {
    return analyze_group(t.truth.user_id, t.truth.model, user_events(t.samples, cfg), cfg);
}

// ---------------------------------------------------------------- 1
Outcome c_rate_exactness() {
    Outcome o;
    const double a = c_rate(1, 36), b = c_rate(1, 514);
    if (a != 1.0 || !(b >= 0.0700 && b <= 0.0701)) o.pass = false;
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> dsoc(1, 100), scale(1, 1000);
    std::uniform_real_distribution<double> dt(0.001, 1e6);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const int s = dsoc(rng);
        const double t = dt(rng);
        const int k = scale(rng);
        const double base = c_rate(s, t);
        const double scaled = c_rate(s * k, t * k);
        worst = std::max(worst, std::abs(scaled - base) / base);
    }
    if (worst > 1e-12) o.pass = false;
    o.detail = "c(1,36)=" + fmt("%.4f", a) + " c(1,514)=" + fmt("%.6f", b) + " max rel err " + fmt("%.2e", worst);
    return o;
}

// ---------------------------------------------------------------- 2
Outcome capacity_loss_exactness() {
    Outcome o;
    const double v = capacity_loss(std::vector<int>{4250}, 4350);
    if (v != 10.0) o.pass = false;
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> mv(3900, 4500), n(1, 20), nominal(4100, 4400), bump(1, 50);
    int clamp_fail = 0, mono_fail = 0;
    for (int i = 0; i < 10000; ++i) {
        std::vector<int> finals(static_cast<std::size_t>(n(rng)));
        for (auto& f : finals) f = mv(rng);
        const int nom = nominal(rng);
        const double loss = capacity_loss(finals, nom);
        double mean = 0;
        for (int f : finals) mean += f;
        mean /= static_cast<double>(finals.size());
        if (loss < 0.0 || (mean >= nom && loss != 0.0)) ++clamp_fail;
        auto higher = finals;
        higher[static_cast<std::size_t>(i) % higher.size()] += bump(rng);
        if (capacity_loss(higher, nom) > loss) ++mono_fail;
    }
    if (clamp_fail || mono_fail) o.pass = false;
    o.detail = "loss([4250],4350)=" + fmt("%.4f", v) + " clamp failures " + std::to_string(clamp_fail) +
               " monotonicity failures " + std::to_string(mono_fail);
    return o;
}

// ---------------------------------------------------------------- 3
Outcome segmentation_oracle() {
    int exact = 0;
    const int n = 1000;
    for (int i = 0; i < n; ++i) {
        synth::MultiSessionSpec spec;
        spec.sessions = 2 + i % 4;
        spec.seed = synth::derive_seed(3, static_cast<std::uint64_t>(i));
        const auto trace = synth::generate_sessions(spec);
        const auto steps = pair_consecutive(trace.samples);
        const auto events = segment_events(steps);

        // Brute-force threshold scan.
        std::vector<std::size_t> oracle;
        for (std::size_t k = 0; k < steps.size(); ++k) {
            const auto& s = steps[k];
            const double c = s.delta_soc > 0 ? 36.0 * s.delta_soc / s.delta_t : 0.0;
            if (c <= 0.03) oracle.push_back(k);
        }
        std::vector<std::size_t> found;
        std::size_t index = 0;
        for (const auto& e : events) {
            index += e.steps.size();
            if (e.closed) found.push_back(index - 1);
        }
        const bool sessions_ok = static_cast<int>(events.size()) == spec.sessions;
        if (found == trace.boundary_steps && oracle == trace.boundary_steps && sessions_ok) ++exact;
    }
    Outcome o;
    o.pass = exact == n;
    o.detail = std::to_string(exact) + "/" + std::to_string(n) + " traces with exact boundaries";
    return o;
}

// ---------------------------------------------------------------- 4
synth::TraceSpec random_spec(Technique tech, std::mt19937_64& rng, std::uint64_t seed, double max_loss = 4.0) {
    synth::TraceSpec spec;
    spec.technique = tech;
    spec.seed = seed;
    spec.cc_rate = std::uniform_real_distribution<double>(0.3, 0.9)(rng);
    spec.fast_rate = std::uniform_real_distribution<double>(1.05, 1.5)(rng);
    spec.cv_onset_soc = std::uniform_int_distribution<int>(60, 90)(rng);
    spec.capacity_loss_pct = std::round(std::uniform_real_distribution<double>(0.0, max_loss)(rng) * 10.0) / 10.0;
    spec.fuel_gauge = seed % 2 ? FuelGauge::VoltageBased : FuelGauge::CoulombCounter;
    return spec;
}

Outcome technique_classification() {
    Outcome o;
    std::mt19937_64 rng(4);
    std::uint64_t seed = 1;
    for (double noise : {0.0, 10.0}) {
        for (auto tech : {Technique::CcCv, Technique::Dlc, Technique::Quick, Technique::FastPulse}) {
            int correct = 0;
            for (int i = 0; i < 100; ++i) {
                auto spec = random_spec(tech, rng, seed++, 0.0);
                spec.voltage_noise_mv = noise;
                correct += analyze(synth::generate_trace(spec)).profile.technique == tech;
            }
            const int needed = noise == 0.0 ? 100 : 95;
            if (correct < needed) o.pass = false;
            o.detail += std::string(to_string(tech)) + (noise == 0.0 ? "" : "~") + " " + std::to_string(correct) + " ";
        }
    }
    o.detail += "(~ = sigma 10 mV)";
    return o;
}

// ---------------------------------------------------------------- 5
Outcome variant_detection() {
    std::mt19937_64 rng(5);
    int cv_first = 0, cc_tail = 0, clean = 0, fast_rate = 0;
    auto has = [](const DeviceProfile& p, Variant v) { return p.variants.count(v) == 1; };
    for (int i = 0; i < 100; ++i) {
        const auto base = random_spec(i % 2 ? Technique::CcCv : Technique::Dlc, rng, static_cast<std::uint64_t>(i + 1));
        auto a = base;
        a.cv_first = true;
        const auto pa = analyze(synth::generate_trace(a)).profile;
        cv_first += has(pa, Variant::CvFirst) && !has(pa, Variant::CcTail);
        auto b = base;
        b.cc_tail = true;
        const auto pb = analyze(synth::generate_trace(b)).profile;
        cc_tail += has(pb, Variant::CcTail) && !has(pb, Variant::CvFirst);
        auto c = base;
        c.technique = Technique::CcCv;
        const auto pc = analyze(synth::generate_trace(c)).profile;
        clean += !has(pc, Variant::CvFirst) && !has(pc, Variant::CcTail);
        fast_rate += has(pc, Variant::FastRate);
    }
    Outcome o;
    o.pass = cv_first == 100 && cc_tail == 100 && clean == 100;
    o.detail = "cv_first " + std::to_string(cv_first) + "/100, cc_tail " + std::to_string(cc_tail) +
               "/100, plain CC-CV free of both " + std::to_string(clean) + "/100 (fast_rate flagged on " +
               std::to_string(fast_rate) + " jittered plain traces)";
    return o;
}

// ---------------------------------------------------------------- 6
Outcome fuel_gauge_inference() {
    std::mt19937_64 rng(6);
    int cc_ok = 0, cc_as_vb = 0, vb_ok = 0;
    for (int i = 0; i < 100; ++i) {
        auto spec = random_spec(Technique::CcCv, rng, static_cast<std::uint64_t>(1000 + i));
        spec.fuel_gauge = FuelGauge::CoulombCounter;
        spec.time_jitter_rel = 0.0;
        const auto cc = analyze(synth::generate_trace(spec)).profile.fuel_gauge;
        cc_ok += cc == FuelGauge::CoulombCounter;
        cc_as_vb += cc == FuelGauge::VoltageBased;

        spec.fuel_gauge = FuelGauge::VoltageBased;
        spec.time_jitter_rel = 0.4;
        vb_ok += analyze(synth::generate_trace(spec)).profile.fuel_gauge == FuelGauge::VoltageBased;
    }
    Outcome o;
    o.pass = cc_ok == 100 && vb_ok >= 95 && cc_as_vb == 0;
    o.detail = "coulomb counter " + std::to_string(cc_ok) + "/100 (as voltage-based: " + std::to_string(cc_as_vb) +
               "), voltage-based " + std::to_string(vb_ok) + "/100";
    return o;
}

// ---------------------------------------------------------------- 7
Outcome capacity_loss_round_trip() {
    Outcome o;
    AnalysisConfig cfg;
    double worst = 0.0;
    int cases = 0;
    std::mt19937_64 rng(7);
    for (auto tech : {Technique::CcCv, Technique::Dlc}) {
        for (double loss : {0.0, 1.0, 5.0, 10.0, 20.0}) {
            for (int rep = 0; rep < 5; ++rep) {
                // The target device plus fresh devices of the same model.
                std::vector<DeviceProfile> profiles;
                for (int d = 0; d < 5; ++d) {
                    auto spec = random_spec(tech, rng, static_cast<std::uint64_t>(cases * 10 + d + 1));
                    spec.user_id = "dev" + std::to_string(d);
                    spec.model = "model";
                    spec.capacity_loss_pct = d == 0 ? loss : 0.0;
                    profiles.push_back(analyze(synth::generate_trace(spec), cfg).profile);
                }
                apply_model_consensus(profiles, cfg.classifier);
                ++cases;
                const auto& p = profiles[0];
                if (!p.capacity_loss_pct) {
                    o.pass = false;
                    worst = INFINITY;
                    continue;
                }
                worst = std::max(worst, std::abs(*p.capacity_loss_pct - loss));
            }
        }
    }
    if (worst > 0.05) o.pass = false;
    o.detail = std::to_string(cases) + " targets, max |estimate - truth| = " + fmt("%.4f", worst) + " pp";
    return o;
}

// ---------------------------------------------------------------- 8
Outcome behavior_detection() {
    Outcome o;
    int fluct_ok = 0, fluct_total = 0;
    for (int level = 2; level <= 90; level += 8) {
        for (int reversals = 2; reversals <= 5; ++reversals) {
            synth::TraceSpec spec;
            spec.fluctuation = synth::FluctuationPattern{level, reversals};
            const auto trace = synth::generate_trace(spec);
            const auto r = analyze_behavior(trace.samples);
            ++fluct_total;
            fluct_ok += r.fluctuation_episodes.size() == 1 && r.fluctuation_episodes[0].soc_low == level &&
                        r.fluctuation_episodes[0].repetitions == reversals;
        }
    }
    if (fluct_ok != fluct_total) o.pass = false;

    synth::TraceSpec spec;
    spec.full_plugged = synth::FullPluggedPattern{10.0, 540.0, 1};
    BehaviorConfig cfg;
    cfg.capacity_mah = 1810.0;
    const auto r = analyze_behavior(synth::generate_trace(spec).samples, cfg);
    const double wasted = r.wasted_energy_estimate.value_or(-1.0);
    if (!(wasted >= 1357.0 && wasted <= 2172.0)) o.pass = false;
    o.detail = "fluctuation " + std::to_string(fluct_ok) + "/" + std::to_string(fluct_total) +
               " (5-6-5-6 included), 10 h plugged: " + fmt("%.1f", wasted) + " mAh";
    return o;
}

// ---------------------------------------------------------------- 9
Outcome corpus_statistics() {
    TempDir tmp("corpus");
    // 38% CC-CV, 59% DLC, 3% fast techniques; about 85% of devices with 1-10% loss.
    const json manifest = json::parse(R"({
      "seed": 9,
      "entries": [
        {"model": "cc-a", "technique": "cccv", "count": 120, "loss": [1, 10]},
        {"model": "cc-a", "technique": "cccv", "count": 30, "loss": [0, 0.9]},
        {"model": "cc-b", "technique": "cccv", "count": 100, "loss": [1, 10], "fuel_gauge": "voltage_based"},
        {"model": "cc-b", "technique": "cccv", "count": 40, "loss": [1, 10], "variants": ["cv_first"]},
        {"model": "cc-b", "technique": "cccv", "count": 20, "loss": [0, 0.9]},
        {"model": "cc-c", "technique": "cccv", "count": 60, "loss": [1, 10], "variants": ["cc_tail"]},
        {"model": "cc-c", "technique": "cccv", "count": 10, "loss": [12, 20]},
        {"model": "dlc-a", "technique": "dlc", "count": 300, "loss": [1, 10]},
        {"model": "dlc-a", "technique": "dlc", "count": 50, "loss": [0, 0.9]},
        {"model": "dlc-b", "technique": "dlc", "count": 150, "loss": [1, 10], "fuel_gauge": "voltage_based"},
        {"model": "dlc-b", "technique": "dlc", "count": 50, "loss": [1, 10], "cc_rate": 1.2},
        {"model": "dlc-b", "technique": "dlc", "count": 20, "loss": [0, 0.9]},
        {"model": "dlc-b", "technique": "dlc", "count": 20, "loss": [12, 20]},
        {"model": "quick", "technique": "quick", "count": 15},
        {"model": "pulse", "technique": "fast_pulse", "count": 15}
      ]})");
    std::ofstream(tmp / "manifest.json") << manifest.dump();
    Outcome o;
    if (cli({"synth", "--manifest", tmp / "manifest.json", "-o", tmp / "corpus.jsonl"}) != 0 ||
        cli({"report", tmp / "corpus.jsonl", "-o", tmp / "report.md", "--json", tmp / "report.json"}) != 0) {
        o.pass = false;
        o.detail = "pipeline failed";
        return o;
    }
    const auto truth = json::parse(slurp(tmp / "corpus.truth.json"))["users"];
    const auto summary = json::parse(slurp(tmp / "report.json"))["summary"];

    const double n = static_cast<double>(truth.size());
    std::map<std::string, double> tech, variant, gauge;
    double with_loss = 0, loss_1_10 = 0;
    for (const auto& [user, t] : truth.items()) {
        tech[t["technique"].get<std::string>()] += 1;
        for (const auto& v : t["variants"]) variant[v.get<std::string>()] += 1;
        gauge[t["fuel_gauge"].get<std::string>()] += 1;
        const auto tt = t["technique"].get<std::string>();
        if (tt == "cccv" || tt == "dlc") {
            with_loss += 1;
            const double l = t["capacity_loss_pct"].get<double>();
            if (l >= 1.0 && l <= 10.0) loss_1_10 += 1;
        }
    }
    double worst = 0.0;
    auto compare = [&](const std::string& label, double expected, double got) {
        const double pp = 100.0 * std::abs(expected - got);
        worst = std::max(worst, pp);
        if (pp > 2.0) {
            o.pass = false;
            o.detail += label + " off by " + fmt("%.2f", pp) + " pp; ";
        }
    };
    compare("cccv", tech["cccv"] / n, summary["techniques"]["cccv"]["share"].get<double>());
    compare("dlc", tech["dlc"] / n, summary["techniques"]["dlc"]["share"].get<double>());
    compare("fast", (tech["quick"] + tech["fast_pulse"]) / n,
            summary["techniques"]["quick"]["share"].get<double>() +
                summary["techniques"]["fast_pulse"]["share"].get<double>());
    for (const char* v : {"cv_first", "cc_tail", "fast_rate"})
        compare(v, variant[v] / n, summary["variants"][v]["share"].get<double>());
    for (const char* g : {"coulomb_counter", "voltage_based"})
        compare(g, gauge[g] / n, summary["fuel_gauges"][g]["share"].get<double>());
    compare("loss 1-10", loss_1_10 / with_loss, summary["capacity_loss"]["share_1_to_10"].get<double>());
    o.detail += "generated cccv " + fmt("%.1f%%", 100 * tech["cccv"] / n) + ", dlc " +
                fmt("%.1f%%", 100 * tech["dlc"] / n) + ", loss 1-10 " + fmt("%.1f%%", 100 * loss_1_10 / with_loss) +
                "; max deviation " + fmt("%.2f", worst) + " pp";
    return o;
}

// ---------------------------------------------------------------- 10
std::size_t peak_from(const std::string& err) {
    const auto pos = err.find("peak buffered samples ");
    return pos == std::string::npos ? 0 : std::stoul(err.substr(pos + 22));
}

Outcome throughput() {
    Outcome o;
    TempDir tmp("throughput");
    if (cli({"synth", "--count", "10000", "--fuel-gauge", "voltage_based", "--noise-mv", "10", "--seed", "10", "-o",
             tmp / "corpus.jsonl"}) != 0) {
        o.pass = false;
        o.detail = "synth failed";
        return o;
    }
    // The same samples split round-robin over four files.
    {
        std::ifstream in(tmp / "corpus.jsonl");
        std::vector<std::ofstream> parts;
        for (int i = 0; i < 4; ++i) parts.emplace_back(tmp / ("part" + std::to_string(i) + ".jsonl"));
        std::size_t k = 0;
        for (std::string line; std::getline(in, line); ++k) parts[k % 4] << line << '\n';
    }

    std::string err1, err8, errs;
    const auto t0 = std::chrono::steady_clock::now();
    int rc = cli({"segment", tmp / "corpus.jsonl", "-j", "1", "-o", tmp / "seg1.csv"}, &err1);
    rc |= cli({"profile", tmp / "corpus.jsonl", "-j", "1", "-o", tmp / "prof1"});
    const double seconds_1 = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const auto t1 = std::chrono::steady_clock::now();
    rc |= cli({"segment", tmp / "corpus.jsonl", "-j", "8", "-o", tmp / "seg8.csv"}, &err8);
    rc |= cli({"profile", tmp / "corpus.jsonl", "-j", "8", "-o", tmp / "prof8"});
    const double seconds_8 = std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count();

    rc |= cli({"segment", tmp / "part0.jsonl", tmp / "part1.jsonl", tmp / "part2.jsonl", tmp / "part3.jsonl", "-o",
               tmp / "segs.csv"},
              &errs);
    if (rc != 0) {
        o.pass = false;
        o.detail = "pipeline failed";
        return o;
    }

    const bool same = slurp(tmp / "seg1.csv") == slurp(tmp / "seg8.csv") &&
                      slurp(tmp / "prof1/profiles.jsonl") == slurp(tmp / "prof8/profiles.jsonl") &&
                      slurp(tmp / "prof1/curves.csv") == slurp(tmp / "prof8/curves.csv") &&
                      slurp(tmp / "prof1/health.csv") == slurp(tmp / "prof8/health.csv");
    const auto peak_one = peak_from(err1), peak_many = peak_from(errs);
    const bool samples_ok = err1.find("1000000 samples read") != std::string::npos;
    o.pass = same && samples_ok && peak_one == peak_many && peak_one > 0 && seconds_1 < 60.0 && seconds_8 < 60.0;
    o.detail = "1M samples/10k users: " + fmt("%.1f s", seconds_1) + " (jobs 1), " + fmt("%.1f s", seconds_8) +
               " (jobs 8); outputs " + (same ? "identical" : "DIFFER") + "; peak buffered " +
               std::to_string(peak_one) + " (1 file) vs " + std::to_string(peak_many) + " (4 files)";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"c-rate exactness and scale invariance", c_rate_exactness},
        {"capacity-loss exactness, clamp and monotonicity", capacity_loss_exactness},
        {"segmentation matches the threshold-scan oracle", segmentation_oracle},
        {"charging-technique classification", technique_classification},
        {"variant detection", variant_detection},
        {"fuel-gauge inference", fuel_gauge_inference},
        {"capacity-loss round-trip", capacity_loss_round_trip},
        {"behavior detection", behavior_detection},
        {"corpus statistics through the report layer", corpus_statistics},
        {"throughput, streaming and job-count independence", throughput},
    };
    const std::vector<double> limits{1.0, 1.0, 30.0, 60.0, 0, 0, 0, 0, 0, 0};

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (limits[i] > 0 && secs >= limits[i]) {
            o.pass = false;
            o.detail += " [over the " + fmt("%.0f s", limits[i]) + " budget]";
        }
        failed += !o.pass;
        std::printf("%s criterion %zu: %s -- %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
