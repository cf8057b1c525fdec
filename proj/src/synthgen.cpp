#include "battlytics/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace battlytics::synth {

namespace {

constexpr double kBaseVoltage = 3600.0;
constexpr double kCcCvPlateau = 4200.0;
constexpr double kDlcPlateau = 4350.0;
constexpr double kQuickPeak = 4480.0;
constexpr double kFastTemperatureOffset = 9.0;

bool is_fast(Technique t) { return t == Technique::Quick || t == Technique::FastPulse; }

double round_to(double v, double step) { return std::round(v / step) * step; }

int clamp_voltage(double v) {
    return static_cast<int>(std::clamp<long>(std::lround(v), kMinVoltageMv, kMaxVoltageMv));
}

// Decline to soc 20, flat until 80, decline again while the current tapers.
double temperature_at(int soc, Technique t) {
    double temp;
    if (soc <= 20) {
        temp = 32.0 - 3.0 * (soc - 1) / 19.0;
    } else if (soc <= 80) {
        temp = 29.0;
    } else {
        temp = 29.0 - 3.0 * (soc - 80) / 20.0;
    }
    if (is_fast(t)) temp += kFastTemperatureOffset;
    return round_to(temp, 0.1);
}

int cv_onset(const TraceSpec& spec) {
    return spec.technique == Technique::Quick ? spec.quick_cv_onset_soc : spec.cv_onset_soc;
}

double cc_rate_of(const TraceSpec& spec) { return is_fast(spec.technique) ? spec.fast_rate : spec.cc_rate; }

// Noise-free voltage at a level.
double template_voltage(const TraceSpec& spec, int soc) {
    const double loss_mv = 10.0 * spec.capacity_loss_pct;
    const int onset = cv_onset(spec);
    if (spec.technique == Technique::Quick) {
        if (soc <= onset) return kBaseVoltage + (kQuickPeak - kBaseVoltage) * (soc - 1) / (onset - 1);
        const double end = kDlcPlateau - loss_mv;
        return kQuickPeak + (end - kQuickPeak) * (soc - onset) / (100 - onset);
    }
    const double plateau = (spec.technique == Technique::CcCv ? kCcCvPlateau : kDlcPlateau) - loss_mv;
    double v = soc <= onset ? kBaseVoltage + (plateau - kBaseVoltage) * (soc - 1) / (onset - 1) : plateau;
    if (spec.technique == Technique::FastPulse && soc >= 30 && soc <= 95) {
        const bool high = ((soc - 30) / spec.pulse_half_period) % 2 == 0;
        v += high ? spec.pulse_amplitude_mv : -spec.pulse_amplitude_mv;
    }
    return v;
}

}  // namespace

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal(double mean, double stddev) {
    if (spare_) {
        const double z = *spare_;
        spare_.reset();
        return mean + stddev * z;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    // splitmix64 finalizer over the combined value
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::string validate(const TraceSpec& spec) {
    if (spec.technique == Technique::Unknown) return "technique must be one of cccv, dlc, quick, fast_pulse";
    if (spec.fuel_gauge == FuelGauge::Inconclusive) return "fuel gauge must be coulomb_counter or voltage_based";
    if (!(spec.cc_rate > 0.0) || !(spec.fast_rate > 0.0) || !(spec.cv_final_rate > 0.0) ||
        !(spec.cv_first_rate > 0.0) || (spec.tail_rate && !(*spec.tail_rate > 0.0)))
        return "all rates must be positive";
    if (spec.voltage_noise_mv < 0.0) return "voltage noise must be non-negative";
    if (spec.time_jitter_rel < 0.0 || spec.time_jitter_rel >= 1.0) return "time jitter must be in [0, 1)";
    if (spec.capacity_loss_pct < 0.0 || spec.capacity_loss_pct > 100.0) return "capacity loss must be in [0, 100]";
    if (spec.cv_onset_soc < 50 || spec.cv_onset_soc > 90) return "CV onset must be in [50, 90]";
    if (spec.quick_cv_onset_soc < 2 || spec.quick_cv_onset_soc > 99) return "quick CV onset must be in [2, 99]";
    if (spec.cv_first && spec.technique == Technique::Quick && spec.quick_cv_onset_soc <= 10)
        return "CV-first phase overlaps the quick-charge peak";
    if (spec.cc_tail && cv_onset(spec) >= 95) return "CC tail needs a CV phase before 95%";
    if (spec.pulse_half_period < 1) return "pulse half period must be >= 1";
    if (spec.fluctuation && (spec.fluctuation->level < 1 || spec.fluctuation->level > 98 ||
                             spec.fluctuation->reversals < 2))
        return "fluctuation needs a level in [1, 98] and at least 2 reversals";
    if (spec.full_plugged && (!(spec.full_plugged->hours > 0.0) || spec.full_plugged->dip_pct < 1 ||
                              spec.full_plugged->dip_pct > 2 || !(spec.full_plugged->cycle_period_s > 0.0)))
        return "full-plugged pattern needs positive hours and period, and a 1-2% dip";
    return {};
}

Trace generate_trace(const TraceSpec& spec) {
    if (auto reason = validate(spec); !reason.empty()) throw std::invalid_argument(reason);
    Rng rng(spec.seed);

    Trace trace;
    auto& truth = trace.truth;
    truth.user_id = spec.user_id;
    truth.model = spec.model;
    truth.technique = spec.technique;
    if (spec.cv_first) truth.variants.insert(Variant::CvFirst);
    if (spec.cc_tail) truth.variants.insert(Variant::CcTail);
    if (cc_rate_of(spec) > 1.0) truth.variants.insert(Variant::FastRate);
    truth.fuel_gauge = spec.fuel_gauge;
    truth.capacity_loss_pct = spec.capacity_loss_pct;

    const int onset = cv_onset(spec);
    const double cc = cc_rate_of(spec);
    const int cv_end = spec.cc_tail ? 95 : 100;
    const double tail = spec.tail_rate.value_or(cc);

    // Seconds spent on the percent ending at `soc`.
    auto per_percent = [&](int soc) {
        double rate;
        if (spec.cv_first && soc <= 10) {
            rate = spec.cv_first_rate;
        } else if (soc <= onset) {
            double t = 36.0 / cc;
            if (spec.fuel_gauge == FuelGauge::VoltageBased)
                t *= 1.0 + rng.uniform(-spec.time_jitter_rel, spec.time_jitter_rel);
            return round_to(t, 0.001);
        } else if (soc > cv_end) {
            rate = tail;
        } else {
            const double frac = static_cast<double>(soc - onset) / (cv_end - onset);
            rate = cc * std::pow(spec.cv_final_rate / cc, frac);
        }
        return round_to(36.0 / rate, 0.001);
    };

    auto make_sample = [&](double t, int soc, double voltage) {
        BatterySample s;
        s.timestamp = t;
        s.user_id = spec.user_id;
        s.model = spec.model;
        s.soc = soc;
        s.voltage_mv = clamp_voltage(voltage);
        s.temperature_c = temperature_at(soc, spec.technique);
        s.health = Health::Good;
        s.charger = Charger::AC;
        s.charging = true;
        s.screen = Screen::Off;
        return s;
    };
    auto noisy = [&](double v) { return spec.voltage_noise_mv > 0.0 ? rng.normal(v, spec.voltage_noise_mv) : v; };

    auto& out = trace.samples;
    double t = spec.start_time;
    for (int soc = 1; soc <= 100; ++soc) {
        if (soc > 1) t += per_percent(soc);
        out.push_back(make_sample(t, soc, noisy(template_voltage(spec, soc))));

        if (spec.fluctuation && soc == spec.fluctuation->level + 1) {
            const int low = spec.fluctuation->level;
            out[out.size() - 2].screen = Screen::On;
            out.back().screen = Screen::On;
            for (int r = 0; r < spec.fluctuation->reversals; ++r) {
                const int level = r % 2 == 0 ? low : low + 1;
                t += 60.0;
                auto s = make_sample(t, level, noisy(template_voltage(spec, level)));
                s.screen = Screen::On;
                out.push_back(std::move(s));
            }
            truth.fluctuation_reversals = spec.fluctuation->reversals;
        }
    }
    truth.final_voltage_mv = clamp_voltage(template_voltage(spec, 100));

    if (spec.full_plugged) {
        const auto& fp = *spec.full_plugged;
        const double full_at = t;
        const double end = full_at + fp.hours * 3600.0;
        const double recharge = fp.dip_pct * 36.0 / cc;
        const int v_full = truth.final_voltage_mv;
        int cycles = 0;
        for (int c = 1; full_at + c * fp.cycle_period_s <= end; ++c) {
            const double back = full_at + c * fp.cycle_period_s;
            out.push_back(make_sample(back - recharge, 100 - fp.dip_pct, v_full - 15.0 * fp.dip_pct));
            out.push_back(make_sample(back, 100, v_full));
            ++cycles;
        }
        if (out.back().timestamp < end) out.push_back(make_sample(end, 100, v_full));
        auto unplug = make_sample(end + 1.0, 100, v_full);
        unplug.charging = false;
        unplug.charger = Charger::Unplugged;
        out.push_back(std::move(unplug));
        truth.maintenance_cycles = cycles;
        truth.full_plugged_duration_s = end - full_at;
    }
    return trace;
}

MultiSessionTrace generate_sessions(const MultiSessionSpec& spec) {
    if (spec.sessions < 1) throw std::invalid_argument("need at least one session");
    if (!(spec.gap_rate_max > 0.0)) throw std::invalid_argument("gap rate must be positive");
    Rng rng(spec.seed);
    MultiSessionTrace trace;

    auto push = [&](double t, int soc) {
        BatterySample s;
        s.timestamp = t;
        s.user_id = spec.user_id;
        s.model = spec.model;
        s.soc = soc;
        s.voltage_mv = static_cast<int>(std::lround(3600.0 + 6.0 * soc));
        s.temperature_c = 29.0;
        trace.samples.push_back(std::move(s));
    };

    double t = spec.start_time;
    int soc = 1 + static_cast<int>(rng.uniform() * 20.0);
    push(t, soc);
    for (int session = 0; session < spec.sessions; ++session) {
        if (session > 0) {
            // Gap step: either one very slow percent or a drop while unplugged.
            const bool slow = soc <= 85 && rng.uniform() < 0.5;
            if (slow) {
                const double rate = rng.uniform(0.2, 1.0) * spec.gap_rate_max;
                t += round_to(36.0 / rate, 0.001);
                soc += 1;
            } else {
                t += round_to(rng.uniform(600.0, 7200.0), 0.001);
                soc = std::max(1, soc - 10 - static_cast<int>(rng.uniform() * 30.0));
            }
            trace.boundary_steps.push_back(trace.step_session.size());
            trace.step_session.push_back(session - 1);
            push(t, soc);
        }
        const double base_rate = rng.uniform(0.2, 1.0);
        const int length = 5 + static_cast<int>(rng.uniform() * 11.0);
        for (int k = 0; k < length && soc < 100; ++k) {
            const int delta = rng.uniform() < 0.15 ? 2 : 1;
            const double rate = base_rate * rng.uniform(0.7, 1.3);
            t += round_to(36.0 * delta / rate, 0.001);
            soc = std::min(100, soc + delta);
            trace.step_session.push_back(session);
            push(t, soc);
        }
    }
    return trace;
}

namespace {

std::set<Variant> variants_from_json(const nlohmann::json& j) {
    std::set<Variant> out;
    for (const auto& v : j) {
        const auto parsed = parse_variant(v.get<std::string>());
        if (!parsed) throw std::invalid_argument("unknown variant '" + v.get<std::string>() + "'");
        out.insert(*parsed);
    }
    return out;
}

}  // namespace

TraceSpec trace_spec_from_json(const nlohmann::json& j, TraceSpec spec) {
    if (j.contains("model")) spec.model = j.at("model").get<std::string>();
    if (j.contains("technique")) {
        const auto t = parse_technique(j.at("technique").get<std::string>());
        if (!t) throw std::invalid_argument("unknown technique '" + j.at("technique").get<std::string>() + "'");
        spec.technique = *t;
    }
    if (j.contains("variants")) {
        const auto vs = variants_from_json(j.at("variants"));
        spec.cv_first = vs.contains(Variant::CvFirst);
        spec.cc_tail = vs.contains(Variant::CcTail);
    }
    if (j.contains("fuel_gauge")) {
        const auto f = parse_fuel_gauge(j.at("fuel_gauge").get<std::string>());
        if (!f) throw std::invalid_argument("unknown fuel gauge '" + j.at("fuel_gauge").get<std::string>() + "'");
        spec.fuel_gauge = *f;
    }
    if (j.contains("cc_rate")) spec.cc_rate = j.at("cc_rate").get<double>();
    if (j.contains("fast_rate")) spec.fast_rate = j.at("fast_rate").get<double>();
    if (j.contains("tail_rate")) spec.tail_rate = j.at("tail_rate").get<double>();
    if (j.contains("capacity_loss_pct")) spec.capacity_loss_pct = j.at("capacity_loss_pct").get<double>();
    if (j.contains("noise_mv")) spec.voltage_noise_mv = j.at("noise_mv").get<double>();
    if (j.contains("jitter")) spec.time_jitter_rel = j.at("jitter").get<double>();
    if (j.contains("cv_onset_soc")) spec.cv_onset_soc = j.at("cv_onset_soc").get<int>();
    if (j.contains("quick_cv_onset_soc")) spec.quick_cv_onset_soc = j.at("quick_cv_onset_soc").get<int>();
    if (j.contains("fluctuation")) {
        const auto& f = j.at("fluctuation");
        spec.fluctuation = FluctuationPattern{f.value("level", 5), f.value("reversals", 2)};
    }
    if (j.contains("full_plugged")) {
        const auto& f = j.at("full_plugged");
        spec.full_plugged = FullPluggedPattern{f.value("hours", 10.0), f.value("cycle_period_s", 540.0),
                                               f.value("dip_pct", 1)};
    }
    return spec;
}

Manifest manifest_from_json(const nlohmann::json& j) {
    Manifest m;
    m.seed = j.value("seed", std::uint64_t{1});
    if (!j.contains("entries") || !j.at("entries").is_array()) throw std::invalid_argument("manifest needs an 'entries' array");
    for (const auto& e : j.at("entries")) {
        ManifestEntry entry;
        entry.base = trace_spec_from_json(e);
        entry.count = e.value("count", std::size_t{0});
        if (e.contains("loss")) {
            const auto& loss = e.at("loss");
            if (loss.is_array() && loss.size() == 2) {
                entry.loss_min = loss[0].get<double>();
                entry.loss_max = loss[1].get<double>();
            } else {
                entry.loss_min = entry.loss_max = loss.get<double>();
            }
        } else {
            entry.loss_min = entry.loss_max = entry.base.capacity_loss_pct;
        }
        if (entry.loss_min > entry.loss_max) throw std::invalid_argument("loss range is reversed");
        m.entries.push_back(std::move(entry));
    }
    return m;
}

void generate_corpus(const Manifest& manifest, const std::function<void(const Trace&)>& sink) {
    std::uint64_t index = 0;
    for (const auto& entry : manifest.entries) {
        for (std::size_t i = 0; i < entry.count; ++i, ++index) {
            TraceSpec spec = entry.base;
            spec.seed = derive_seed(manifest.seed, index);
            char id[32];
            std::snprintf(id, sizeof(id), "u%06llu", static_cast<unsigned long long>(index));
            spec.user_id = id;
            spec.start_time = entry.base.start_time + static_cast<double>(index) * 1000.0;
            if (entry.loss_max > entry.loss_min) {
                Rng rng(derive_seed(spec.seed, 0xC0FFEE));
                spec.capacity_loss_pct = round_to(rng.uniform(entry.loss_min, entry.loss_max), 0.1);
            } else {
                spec.capacity_loss_pct = entry.loss_min;
            }
            sink(generate_trace(spec));
        }
    }
}

nlohmann::json to_json(const GroundTruth& truth) {
    nlohmann::json j;
    j["model"] = truth.model;
    j["technique"] = to_string(truth.technique);
    auto variants = nlohmann::json::array();
    for (auto v : truth.variants) variants.push_back(to_string(v));
    j["variants"] = variants;
    j["fuel_gauge"] = to_string(truth.fuel_gauge);
    j["capacity_loss_pct"] = truth.capacity_loss_pct;
    j["final_voltage_mv"] = truth.final_voltage_mv;
    if (truth.fluctuation_reversals) j["fluctuation_reversals"] = *truth.fluctuation_reversals;
    if (truth.maintenance_cycles) j["maintenance_cycles"] = *truth.maintenance_cycles;
    if (truth.full_plugged_duration_s) j["full_plugged_duration_s"] = *truth.full_plugged_duration_s;
    return j;
}

GroundTruth ground_truth_from_json(const std::string& user, const nlohmann::json& j) {
    GroundTruth t;
    t.user_id = user;
    t.model = j.at("model").get<std::string>();
    t.technique = parse_technique(j.at("technique").get<std::string>()).value_or(Technique::Unknown);
    t.variants = variants_from_json(j.at("variants"));
    t.fuel_gauge = parse_fuel_gauge(j.at("fuel_gauge").get<std::string>()).value_or(FuelGauge::Inconclusive);
    t.capacity_loss_pct = j.at("capacity_loss_pct").get<double>();
    t.final_voltage_mv = j.at("final_voltage_mv").get<int>();
    if (j.contains("fluctuation_reversals")) t.fluctuation_reversals = j.at("fluctuation_reversals").get<int>();
    if (j.contains("maintenance_cycles")) t.maintenance_cycles = j.at("maintenance_cycles").get<int>();
    if (j.contains("full_plugged_duration_s")) t.full_plugged_duration_s = j.at("full_plugged_duration_s").get<double>();
    return t;
}

}  // namespace battlytics::synth
