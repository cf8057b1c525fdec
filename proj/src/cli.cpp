#include "battlytics/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "battlytics/analysis.hpp"
#include "battlytics/partition.hpp"
#include "battlytics/report.hpp"
#include "battlytics/synthgen.hpp"
#include "battlytics/text.hpp"

namespace battlytics {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

// Schema or I/O problems that end the run with kExitFatal.
struct Fatal : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr std::size_t kMaxReportedDiagnostics = 20;

struct InputFlags {
    std::vector<std::string> paths;
    std::string format;
    std::string time_unit = "s";
    std::string charger;
    std::string screen;
    std::vector<std::string> health;
    std::string model;
    double termination_c = kDefaultTerminationC;
    bool include_terminal = false;
    std::string config;
    std::size_t jobs = 1;
    std::size_t buckets = 0;
};

void add_input_flags(CLI::App* cmd, InputFlags& f) {
    cmd->add_option("inputs", f.paths, "JSONL or CSV sample logs")->required();
    cmd->add_option("--format", f.format, "Input format (jsonl|csv); default from extension")
        ->check(CLI::IsMember({"jsonl", "csv"}));
    cmd->add_option("--time-unit", f.time_unit, "Timestamp unit (s|ms)")->check(CLI::IsMember({"s", "ms"}));
    cmd->add_option("--charger", f.charger, "Keep samples with this charger state (ac|usb|unplugged)");
    cmd->add_option("--screen", f.screen, "Keep samples with this screen state (on|off)");
    cmd->add_option("--health", f.health, "Keep samples with these health states");
    cmd->add_option("--model", f.model, "Keep samples of this device model");
    cmd->add_option("--termination-c", f.termination_c, "C-rate at or below which a charging event ends");
    cmd->add_flag("--include-terminal", f.include_terminal, "Count the closing step in rate statistics");
    cmd->add_option("--config", f.config, "JSON configuration file; flags take precedence");
    cmd->add_option("--jobs,-j", f.jobs, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--buckets", f.buckets, "Spill buckets (0 = size from input)");
}

bool given(const CLI::App* cmd, const std::string& name) { return cmd->count(name) > 0; }

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Fatal("cannot read config '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Fatal("invalid JSON in '" + path + "': " + e.what());
    }
}

AnalysisConfig resolve_config(const CLI::App* cmd, const InputFlags& f) {
    AnalysisConfig c;
    try {
        if (!f.config.empty()) apply_json(c, read_json_file(f.config));
        if (given(cmd, "--termination-c")) {
            if (!(f.termination_c > 0.0)) throw std::invalid_argument("--termination-c must be positive");
            c.termination_c = f.termination_c;
            c.behavior.termination_c = f.termination_c;
        }
        if (given(cmd, "--include-terminal")) c.include_terminal = f.include_terminal;
        if (given(cmd, "--charger")) {
            const auto v = parse_charger(f.charger);
            if (!v) throw std::invalid_argument("unknown charger '" + f.charger + "'");
            c.filter.charger = v;
        }
        if (given(cmd, "--screen")) {
            const auto v = parse_screen(f.screen);
            if (!v) throw std::invalid_argument("unknown screen state '" + f.screen + "'");
            c.filter.screen = v;
        }
        if (given(cmd, "--health")) {
            std::set<Health> hs;
            for (const auto& h : f.health) hs.insert(parse_health(h));
            c.filter.health = hs;
        }
        if (given(cmd, "--model")) c.filter.model = f.model;
    } catch (const std::invalid_argument& e) {
        throw Fatal(e.what());
    } catch (const json::exception& e) {
        throw Fatal(std::string("bad configuration: ") + e.what());
    }
    return c;
}

InputOptions input_options(const InputFlags& f) {
    InputOptions o;
    o.paths = f.paths;
    if (!f.format.empty()) o.format = parse_input_format(f.format);
    o.unit = f.time_unit == "ms" ? TimeUnit::Milliseconds : TimeUnit::Seconds;
    return o;
}

void report_diagnostics(const PartitionedInput& input, std::ostream& err) {
    const auto& diags = input.diagnostics();
    for (std::size_t i = 0; i < diags.size() && i < kMaxReportedDiagnostics; ++i)
        err << diags[i].path << ":" << diags[i].diagnostic.line << ": " << diags[i].diagnostic.reason << "\n";
    if (diags.size() > kMaxReportedDiagnostics)
        err << "... " << diags.size() - kMaxReportedDiagnostics << " more rejected lines\n";
}

// Writes to a file, or to the fallback stream when the path is empty or "-".
class Sink {
   public:
    Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
        if (path.empty() || path == "-") return;
        file_.open(path, std::ios::binary);
        if (!file_) throw Fatal("cannot write output '" + path + "'");
        os_ = &file_;
    }
    std::ostream& stream() { return *os_; }
    void close(const std::string& what) {
        os_->flush();
        if (!*os_) throw Fatal("write error on " + what);
    }

   private:
    std::ofstream file_;
    std::ostream* os_;
};

std::ofstream open_out(const fs::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Fatal("cannot write output '" + path.string() + "'");
    return f;
}

// ---------------------------------------------------------------- segment

struct SegmentChunk {
    std::string rows;
    std::size_t events = 0;
    std::size_t steps = 0;
};

int cmd_segment(const CLI::App* cmd, const InputFlags& f, const std::string& output, std::ostream& out,
                std::ostream& err) {
    const auto config = resolve_config(cmd, f);
    PartitionedInput input(input_options(f), GroupKey::Device, f.buckets);
    report_diagnostics(input, err);

    Sink sink(output, out);
    auto& os = sink.stream();
    os << "# config: " << to_json(config).dump() << "\n" << kStepCsvHeader << "\n";

    std::size_t users = 0, events = 0, steps = 0;
    input.for_each_batch([&](std::vector<PartitionUnit>& units) {
        auto chunks = parallel_map(units, f.jobs, [&](PartitionUnit& unit) {
            SegmentChunk chunk;
            std::ostringstream rows;
            for (const auto& seq : unit.users) {
                const auto evs = user_events(seq, config);
                write_step_rows(rows, evs);
                chunk.events += evs.size();
                for (const auto& e : evs) chunk.steps += e.steps.size();
            }
            chunk.rows = rows.str();
            return chunk;
        });
        for (const auto& c : chunks) {
            os << c.rows;
            if (c.steps > 0) ++users;
            events += c.events;
            steps += c.steps;
        }
    });
    sink.close("segment output");

    const auto& st = input.stats();
    err << "segment: " << st.samples << " samples read, " << st.rejected << " rejected, " << users << " users, "
        << events << " events, " << steps << " steps, peak buffered samples " << st.peak_buffered_samples << "\n";
    if (steps == 0) err << "warning: no charging steps left after filtering\n";
    return kExitOk;
}

// ---------------------------------------------------------------- profile

struct ProfileFlags {
    std::string out_dir;
    std::string group = "device";
    bool no_consensus = false;
    bool no_curves = false;
    bool rates = false;
    bool per_event_mean = false;
    std::size_t min_support = 3;
};

struct ProfileChunk {
    std::optional<DeviceProfile> profile;
    std::string curve_rows;
    std::string rate_rows;
};

std::string config_comment(const AnalysisConfig& config) { return "# config: " + to_json(config).dump() + "\n"; }

int cmd_profile(const CLI::App* cmd, const InputFlags& f, const ProfileFlags& p, std::ostream& err) {
    auto config = resolve_config(cmd, f);
    if (given(cmd, "--group")) config.group = p.group == "model" ? GroupKey::Model : GroupKey::Device;
    if (given(cmd, "--no-consensus")) config.model_consensus = !p.no_consensus;
    if (given(cmd, "--min-support")) config.min_support = p.min_support;

    std::error_code ec;
    fs::create_directories(p.out_dir, ec);
    if (!fs::is_directory(p.out_dir)) throw Fatal("cannot create output directory '" + p.out_dir + "'");
    const fs::path dir(p.out_dir);

    std::mutex health_mutex;
    HealthSummary health;
    auto on_sample = [&](const BatterySample& s) {
        if (!config.filter.matches(s)) return;
        std::lock_guard lock(health_mutex);
        health[s.health].add(s);
    };
    PartitionedInput input(input_options(f), config.group, f.buckets, on_sample);
    report_diagnostics(input, err);

    std::ofstream curves;
    if (!p.no_curves) {
        curves = open_out(dir / "curves.csv");
        curves << config_comment(config) << kCurveCsvHeader << "\n";
    }
    std::ofstream rates;
    if (p.rates) {
        rates = open_out(dir / "rates.csv");
        rates << config_comment(config) << "group,c_rate\n";
    }

    std::vector<DeviceProfile> profiles;
    input.for_each_batch([&](std::vector<PartitionUnit>& units) {
        auto chunks = parallel_map(units, f.jobs, [&](PartitionUnit& unit) {
            ProfileChunk chunk;
            std::vector<ChargingEvent> events;
            std::string model;
            for (const auto& seq : unit.users) {
                auto evs = user_events(seq, config);
                for (auto& e : evs) {
                    if (model.empty()) model = e.model;
                    events.push_back(std::move(e));
                }
            }
            if (events.empty()) return chunk;
            const auto group_model = config.group == GroupKey::Model ? unit.key : model;
            auto analysis = analyze_group(unit.key, group_model, events, config);
            if (!p.no_curves) {
                std::ostringstream rows;
                write_curve_rows(rows, unit.key, analysis.voltage, config.min_support);
                write_curve_rows(rows, unit.key, analysis.charge_time, config.min_support);
                write_curve_rows(rows, unit.key, analysis.temperature, config.min_support);
                chunk.curve_rows = rows.str();
            }
            if (p.rates) {
                std::string rows;
                const auto key = text::csv_escape(unit.key);
                for (double r : collect_rates(events, p.per_event_mean, config.include_terminal))
                    rows += key + "," + text::format_double(r) + "\n";
                chunk.rate_rows = std::move(rows);
            }
            chunk.profile = std::move(analysis.profile);
            return chunk;
        });
        for (auto& c : chunks) {
            if (!c.profile) continue;
            if (!p.no_curves) curves << c.curve_rows;
            if (p.rates) rates << c.rate_rows;
            profiles.push_back(std::move(*c.profile));
        }
    });

    if (config.group == GroupKey::Device && config.model_consensus)
        apply_model_consensus(profiles, config.classifier);
    std::sort(profiles.begin(), profiles.end(),
              [](const DeviceProfile& a, const DeviceProfile& b) { return a.user_id < b.user_id; });

    auto out = open_out(dir / "profiles.jsonl");
    const auto config_json = to_json(config);
    for (const auto& prof : profiles) {
        auto j = to_json(prof);
        j["config"] = config_json;
        out << j.dump() << "\n";
    }

    auto hcsv = open_out(dir / "health.csv");
    hcsv << config_comment(config) << "health,voltage_min_mv,voltage_max_mv,temp_min_c,temp_max_c,samples\n";
    for (const auto& [h, r] : health)
        hcsv << to_string(h) << "," << r.voltage_min << "," << r.voltage_max << "," << text::format_double(r.temp_min)
             << "," << text::format_double(r.temp_max) << "," << r.count << "\n";

    out.flush();
    hcsv.flush();
    if (!out || !hcsv || (curves.is_open() && !curves.flush()) || (rates.is_open() && !rates.flush()))
        throw Fatal("write error in '" + p.out_dir + "'");

    const auto& st = input.stats();
    err << "profile: " << st.samples << " samples read, " << st.rejected << " rejected, " << profiles.size()
        << " profiles, peak buffered samples " << st.peak_buffered_samples << "\n";
    if (profiles.empty()) {
        err << "warning: no charging events to profile\n";
        return kExitNoOutput;
    }
    return kExitOk;
}

// ---------------------------------------------------------------- behavior

struct BehaviorFlags {
    std::string output;
    double capacity_mah = 0.0;
    double maintenance_pct = 1.5;
};

int cmd_behavior(const CLI::App* cmd, const InputFlags& f, const BehaviorFlags& b, std::ostream& out,
                 std::ostream& err) {
    auto config = resolve_config(cmd, f);
    if (given(cmd, "--capacity-mah")) {
        if (!(b.capacity_mah > 0.0)) throw Fatal("--capacity-mah must be positive");
        config.behavior.capacity_mah = b.capacity_mah;
    }
    if (given(cmd, "--maintenance-pct")) {
        if (!(b.maintenance_pct > 0.0)) throw Fatal("--maintenance-pct must be positive");
        config.behavior.maintenance_pct_per_cycle = b.maintenance_pct;
    }

    PartitionedInput input(input_options(f), GroupKey::Device, f.buckets);
    report_diagnostics(input, err);

    Sink sink(b.output, out);
    const auto config_json = to_json(config);
    std::size_t reports = 0;
    input.for_each_batch([&](std::vector<PartitionUnit>& units) {
        auto lines = parallel_map(units, f.jobs, [&](PartitionUnit& unit) {
            std::string text;
            for (const auto& seq : unit.users) {
                const auto samples = config.filter.empty() ? seq : filter_samples(seq, config.filter);
                if (samples.empty()) continue;
                const auto report = analyze_behavior(samples, config.behavior);
                if (report.empty()) continue;
                auto j = to_json(report);
                j["config"] = config_json;
                text += j.dump() + "\n";
            }
            return text;
        });
        for (const auto& l : lines) {
            if (l.empty()) continue;
            sink.stream() << l;
            reports += static_cast<std::size_t>(std::count(l.begin(), l.end(), '\n'));
        }
    });
    sink.close("behavior output");

    err << "behavior: " << input.stats().samples << " samples read, " << reports << " users with episodes\n";
    if (reports == 0) {
        err << "warning: no behavior episodes found\n";
        return kExitNoOutput;
    }
    return kExitOk;
}

// ---------------------------------------------------------------- synth

struct SynthFlags {
    std::string output;
    std::string truth;
    std::string format;
    std::string manifest;
    std::size_t count = 1;
    std::uint64_t seed = 1;
    std::string technique = "cccv";
    std::vector<std::string> variants;
    std::string fuel_gauge = "coulomb_counter";
    std::string loss = "0";
    double noise_mv = 0.0;
    double cc_rate = 0.5;
    double fast_rate = 1.1;
    double jitter = 0.4;
    std::string fluctuation;
    double full_plugged_hours = 10.0;
    std::string model = "synthetic";
};

json loss_json(const std::string& text) {
    const auto colon = text.find(':');
    try {
        if (colon == std::string::npos) return std::stod(text);
        return json::array({std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))});
    } catch (const std::exception&) {
        throw Fatal("bad --loss '" + text + "'; expected PCT or MIN:MAX");
    }
}

synth::Manifest manifest_from_flags(const CLI::App* cmd, const SynthFlags& s) {
    json entry;
    entry["model"] = s.model;
    entry["technique"] = s.technique;
    entry["fuel_gauge"] = s.fuel_gauge;
    entry["count"] = s.count;
    entry["loss"] = loss_json(s.loss);
    entry["noise_mv"] = s.noise_mv;
    entry["jitter"] = s.jitter;
    entry["fast_rate"] = s.fast_rate;
    entry["variants"] = s.variants;
    double cc = s.cc_rate;
    const bool fast = std::find(s.variants.begin(), s.variants.end(), "fast_rate") != s.variants.end();
    if (fast && !given(cmd, "--cc-rate")) cc = s.fast_rate;
    entry["cc_rate"] = cc;
    if (!s.fluctuation.empty()) {
        const auto colon = s.fluctuation.find(':');
        try {
            entry["fluctuation"] = {{"level", std::stoi(s.fluctuation.substr(0, colon))},
                                    {"reversals", colon == std::string::npos
                                                      ? 2
                                                      : std::stoi(s.fluctuation.substr(colon + 1))}};
        } catch (const std::exception&) {
            throw Fatal("bad --fluctuation '" + s.fluctuation + "'; expected LEVEL[:REVERSALS]");
        }
    }
    if (given(cmd, "--full-plugged")) entry["full_plugged"] = {{"hours", s.full_plugged_hours}};
    return synth::manifest_from_json({{"seed", s.seed}, {"entries", json::array({entry})}});
}

std::string default_truth_path(const std::string& output) {
    fs::path p(output);
    p.replace_extension(".truth.json");
    return p.string();
}

int cmd_synth(const CLI::App* cmd, const SynthFlags& s, std::ostream& out, std::ostream& err) {
    synth::Manifest manifest;
    try {
        if (!s.manifest.empty()) {
            manifest = synth::manifest_from_json(read_json_file(s.manifest));
            if (given(cmd, "--seed")) manifest.seed = s.seed;
        } else {
            manifest = manifest_from_flags(cmd, s);
        }
        for (const auto& e : manifest.entries) {
            auto probe = e.base;
            probe.capacity_loss_pct = e.loss_max;
            if (const auto why = synth::validate(probe); !why.empty()) throw std::invalid_argument(why);
        }
    } catch (const std::invalid_argument& e) {
        throw Fatal(e.what());
    } catch (const json::exception& e) {
        throw Fatal(std::string("bad synthetic spec: ") + e.what());
    }

    const auto format = !s.format.empty() ? parse_input_format(s.format)
                        : s.output.empty() ? InputFormat::Jsonl
                                           : format_for_path(s.output);
    Sink sink(s.output, out);
    auto& os = sink.stream();
    if (format == InputFormat::Csv) os << kCsvHeader << "\n";

    json users = json::object();
    std::size_t samples = 0;
    synth::generate_corpus(manifest, [&](const synth::Trace& trace) {
        for (const auto& smp : trace.samples) os << (format == InputFormat::Csv ? to_csv_row(smp) : to_jsonl(smp)) << "\n";
        samples += trace.samples.size();
        users[trace.truth.user_id] = synth::to_json(trace.truth);
    });
    sink.close("synthetic corpus");

    std::string truth_path = s.truth;
    if (truth_path.empty() && !s.output.empty() && s.output != "-") truth_path = default_truth_path(s.output);
    if (!truth_path.empty()) {
        auto t = open_out(truth_path);
        t << json{{"seed", manifest.seed}, {"users", users}}.dump(2) << "\n";
        if (!t.flush()) throw Fatal("write error on '" + truth_path + "'");
    }
    err << "synth: " << users.size() << " users, " << samples << " samples\n";
    return kExitOk;
}

// ---------------------------------------------------------------- report

struct ReportFlags {
    std::string output;
    std::string json_path;
    double capacity_mah = 0.0;
    bool no_consensus = false;
};

struct ReportChunk {
    std::optional<DeviceProfile> profile;
    BehaviorReport behavior;
    std::size_t charging_events = 0;
};

int cmd_report(const CLI::App* cmd, const InputFlags& f, const ReportFlags& r, std::ostream& out,
               std::ostream& err) {
    auto config = resolve_config(cmd, f);
    config.group = GroupKey::Device;
    if (given(cmd, "--no-consensus")) config.model_consensus = !r.no_consensus;
    if (given(cmd, "--capacity-mah")) {
        if (!(r.capacity_mah > 0.0)) throw Fatal("--capacity-mah must be positive");
        config.behavior.capacity_mah = r.capacity_mah;
    }

    CorpusSummary summary;
    std::mutex health_mutex;
    auto on_sample = [&](const BatterySample& s) {
        if (!config.filter.matches(s)) return;
        std::lock_guard lock(health_mutex);
        summary.health[s.health].add(s);
    };
    PartitionedInput input(input_options(f), GroupKey::Device, f.buckets, on_sample);
    report_diagnostics(input, err);

    std::vector<DeviceProfile> profiles;
    input.for_each_batch([&](std::vector<PartitionUnit>& units) {
        auto chunks = parallel_map(units, f.jobs, [&](PartitionUnit& unit) {
            ReportChunk chunk;
            const auto& seq = unit.users.front();
            const auto samples = config.filter.empty() ? seq : filter_samples(seq, config.filter);
            const auto events = user_events(samples, config);
            if (!events.empty()) {
                auto analysis = analyze_group(unit.key, events.front().model, events, config);
                chunk.charging_events = static_cast<std::size_t>(analysis.profile.event_count);
                chunk.profile = std::move(analysis.profile);
            }
            chunk.behavior = analyze_behavior(samples, config.behavior);
            return chunk;
        });
        for (auto& c : chunks) {
            summary.add(c.behavior, c.charging_events);
            if (c.profile) profiles.push_back(std::move(*c.profile));
        }
    });
    if (config.model_consensus) apply_model_consensus(profiles, config.classifier);
    for (const auto& p : profiles) summary.add(p);

    const auto config_json = to_json(config);
    {
        Sink sink(r.output, out);
        sink.stream() << to_markdown(summary, config.tail_quantile) << "\n## Configuration\n\n```json\n"
                      << config_json.dump(2) << "\n```\n";
        sink.close("report");
    }
    if (!r.json_path.empty()) {
        auto j = open_out(r.json_path);
        j << json{{"config", config_json}, {"summary", to_json(summary, config.tail_quantile)}}.dump(2) << "\n";
        if (!j.flush()) throw Fatal("write error on '" + r.json_path + "'");
    }
    err << "report: " << input.stats().samples << " samples read, " << summary.devices << " devices profiled\n";
    if (summary.devices == 0 && summary.fluctuation_episodes == 0 && summary.full_plugged_episodes == 0) {
        err << "warning: nothing to report\n";
        return kExitNoOutput;
    }
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Battery charging analytics for crowdsourced smartphone logs", "battlytics"};
    app.require_subcommand(1);

    InputFlags seg_in, prof_in, beh_in, rep_in;
    std::string seg_out;
    ProfileFlags prof;
    BehaviorFlags beh;
    SynthFlags syn;
    ReportFlags rep;

    auto* seg = app.add_subcommand("segment", "Split charge logs into charging events (labeled step CSV)");
    add_input_flags(seg, seg_in);
    seg->add_option("-o,--output", seg_out, "Output CSV (default stdout)");

    auto* pro = app.add_subcommand("profile", "Per-device profiles, SOC curves and health summary");
    add_input_flags(pro, prof_in);
    pro->add_option("-o,--output-dir", prof.out_dir, "Output directory")->required();
    pro->add_option("--group", prof.group, "Pool by device or by model")->check(CLI::IsMember({"device", "model"}));
    pro->add_flag("--no-consensus", prof.no_consensus, "Do not use the per-model technique consensus");
    pro->add_flag("--no-curves", prof.no_curves, "Skip curves.csv");
    pro->add_flag("--rates", prof.rates, "Write the per-step C-rates to rates.csv");
    pro->add_flag("--per-event-mean", prof.per_event_mean, "rates.csv holds one mean rate per event");
    pro->add_option("--min-support", prof.min_support, "Samples below which a curve point is low confidence");

    auto* beh_cmd = app.add_subcommand("behavior", "Detect SOC fluctuation and full-plugged episodes");
    add_input_flags(beh_cmd, beh_in);
    beh_cmd->add_option("-o,--output", beh.output, "Output JSONL (default stdout)");
    beh_cmd->add_option("--capacity-mah", beh.capacity_mah, "Nominal capacity for the wasted-energy estimate");
    beh_cmd->add_option("--maintenance-pct", beh.maintenance_pct, "Capacity percent recharged per maintenance cycle");

    auto* syn_cmd = app.add_subcommand("synth", "Generate a synthetic corpus with a ground-truth sidecar");
    syn_cmd->add_option("-o,--output", syn.output, "Output corpus (default stdout)");
    syn_cmd->add_option("--truth", syn.truth, "Ground-truth JSON (default <output>.truth.json)");
    syn_cmd->add_option("--format", syn.format, "jsonl|csv; default from extension")
        ->check(CLI::IsMember({"jsonl", "csv"}));
    syn_cmd->add_option("--manifest", syn.manifest, "JSON manifest of mixed trace specs");
    syn_cmd->add_option("--count,-n", syn.count, "Number of users");
    syn_cmd->add_option("--seed", syn.seed, "Random seed");
    syn_cmd->add_option("--technique", syn.technique, "cccv|dlc|quick|fast_pulse");
    syn_cmd->add_option("--variant", syn.variants, "cv_first|cc_tail|fast_rate (repeatable)");
    syn_cmd->add_option("--fuel-gauge", syn.fuel_gauge, "coulomb_counter|voltage_based");
    syn_cmd->add_option("--loss", syn.loss, "Capacity loss percent, or MIN:MAX");
    syn_cmd->add_option("--noise-mv", syn.noise_mv, "Voltage noise standard deviation");
    syn_cmd->add_option("--cc-rate", syn.cc_rate, "Constant-current C-rate");
    syn_cmd->add_option("--fast-rate", syn.fast_rate, "C-rate for fast techniques");
    syn_cmd->add_option("--jitter", syn.jitter, "Relative charge-time jitter for voltage-based gauges");
    syn_cmd->add_option("--fluctuation", syn.fluctuation, "Embed SOC fluctuation LEVEL[:REVERSALS]");
    syn_cmd->add_option("--full-plugged", syn.full_plugged_hours, "Stay plugged at 100% for HOURS");
    syn_cmd->add_option("--model", syn.model, "Device model name");

    auto* rep_cmd = app.add_subcommand("report", "Markdown/JSON corpus summary");
    add_input_flags(rep_cmd, rep_in);
    rep_cmd->add_option("-o,--output", rep.output, "Markdown output (default stdout)");
    rep_cmd->add_option("--json", rep.json_path, "Also write the summary as JSON");
    rep_cmd->add_option("--capacity-mah", rep.capacity_mah, "Nominal capacity for the wasted-energy estimate");
    rep_cmd->add_flag("--no-consensus", rep.no_consensus, "Do not use the per-model technique consensus");

    std::vector<std::string> argv_store{"battlytics"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitFatal;
    }

    try {
        if (*seg) return cmd_segment(seg, seg_in, seg_out, out, err);
        if (*pro) return cmd_profile(pro, prof_in, prof, err);
        if (*beh_cmd) return cmd_behavior(beh_cmd, beh_in, beh, out, err);
        if (*syn_cmd) return cmd_synth(syn_cmd, syn, out, err);
        if (*rep_cmd) return cmd_report(rep_cmd, rep_in, rep, out, err);
    } catch (const Fatal& e) {
        err << "error: " << e.what() << "\n";
        return kExitFatal;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kExitFatal;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitFatal;
    }
    return kExitFatal;
}

}  // namespace battlytics
