#include "battlytics/ingestion.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <utility>

#include <json.hpp>

#include "battlytics/text.hpp"

namespace battlytics {

using text::csv_escape;
using text::format_double;

namespace {

using ordered_json = nlohmann::ordered_json;

std::optional<double> parse_double(std::string_view text) {
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.remove_suffix(1);
    if (text.empty()) return std::nullopt;
    if (text.front() == '+') text.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) return std::nullopt;
    if (!std::isfinite(v)) return std::nullopt;
    return v;
}

// A fractional reading in [0, 1] is a fraction of full charge; anything else is percent.
std::optional<int> normalize_soc(double value, bool fractional_notation) {
    if (!std::isfinite(value)) return std::nullopt;
    if (fractional_notation && value >= 0.0 && value <= 1.0) return static_cast<int>(std::lround(value * 100.0));
    return static_cast<int>(std::lround(value));
}

bool looks_fractional(std::string_view text) {
    return text.find_first_of(".eE") != std::string_view::npos;
}

std::vector<std::string> split_csv(std::string_view line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

bool is_blank(std::string_view line) {
    return std::all_of(line.begin(), line.end(), [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

}  // namespace

std::optional<InputFormat> parse_input_format(std::string_view text) {
    if (text == "jsonl" || text == "json") return InputFormat::Jsonl;
    if (text == "csv") return InputFormat::Csv;
    return std::nullopt;
}

InputFormat format_for_path(std::string_view path) {
    return path.size() >= 4 && path.substr(path.size() - 4) == ".csv" ? InputFormat::Csv : InputFormat::Jsonl;
}

SampleLineParser::SampleLineParser(InputFormat format, TimeUnit unit) : format_(format), unit_(unit) {}

SampleLineParser::Outcome SampleLineParser::feed(std::string_view line) {
    ++line_no_;
    if (is_blank(line)) return {};
    return format_ == InputFormat::Jsonl ? parse_json(line) : parse_csv(line);
}

SampleLineParser::Outcome SampleLineParser::finish(BatterySample s) {
    if (unit_ == TimeUnit::Milliseconds) s.timestamp /= 1000.0;
    if (auto reason = validate(s); !reason.empty()) return {std::nullopt, Diagnostic{line_no_, std::move(reason)}};
    return {std::move(s), std::nullopt};
}

SampleLineParser::Outcome SampleLineParser::parse_json(std::string_view line) {
    auto fail = [this](std::string reason) { return Outcome{std::nullopt, Diagnostic{line_no_, std::move(reason)}}; };
    const auto j = nlohmann::json::parse(line.begin(), line.end(), nullptr, false);
    if (j.is_discarded() || !j.is_object()) return fail("malformed JSON");

    for (const char* key : {"time", "user", "model", "soc", "voltage_mv", "temp_c", "health", "charger", "charging",
                            "screen"}) {
        if (!j.contains(key)) return fail(std::string("missing field '") + key + "'");
    }
    auto wrong = [&](const char* key) { return fail(std::string("field '") + key + "' has wrong type"); };

    BatterySample s;
    if (!j["time"].is_number()) return wrong("time");
    s.timestamp = j["time"].get<double>();
    if (!j["user"].is_string()) return wrong("user");
    s.user_id = j["user"].get<std::string>();
    if (!j["model"].is_string()) return wrong("model");
    s.model = j["model"].get<std::string>();

    // Some exports quote the level ("0.99"); accept it like the CSV reader does.
    const auto& soc = j["soc"];
    std::optional<int> normalized;
    if (soc.is_number()) {
        normalized = normalize_soc(soc.get<double>(), soc.is_number_float());
    } else if (soc.is_string()) {
        const auto text = soc.get<std::string>();
        const auto value = parse_double(text);
        if (!value) return wrong("soc");
        normalized = normalize_soc(*value, looks_fractional(text));
    } else {
        return wrong("soc");
    }
    if (!normalized) return fail("soc out of range");
    s.soc = *normalized;

    const auto& volt = j["voltage_mv"];
    if (!volt.is_number()) return wrong("voltage_mv");
    const double mv = volt.get<double>();
    if (!(mv >= kMinVoltageMv && mv <= kMaxVoltageMv)) return fail("voltage out of range");
    s.voltage_mv = static_cast<int>(std::lround(mv));

    if (!j["temp_c"].is_number()) return wrong("temp_c");
    s.temperature_c = j["temp_c"].get<double>();
    if (!j["health"].is_string()) return wrong("health");
    s.health = parse_health(j["health"].get<std::string>());

    if (!j["charger"].is_string()) return wrong("charger");
    const auto charger = parse_charger(j["charger"].get<std::string>());
    if (!charger) return fail("unknown charger '" + j["charger"].get<std::string>() + "'");
    s.charger = *charger;

    if (!j["charging"].is_boolean()) return wrong("charging");
    s.charging = j["charging"].get<bool>();

    if (!j["screen"].is_string()) return wrong("screen");
    const auto screen = parse_screen(j["screen"].get<std::string>());
    if (!screen) return fail("unknown screen '" + j["screen"].get<std::string>() + "'");
    s.screen = *screen;

    return finish(std::move(s));
}

SampleLineParser::Outcome SampleLineParser::parse_csv(std::string_view line) {
    auto fail = [this](std::string reason) { return Outcome{std::nullopt, Diagnostic{line_no_, std::move(reason)}}; };
    if (!header_checked_) {
        header_checked_ = true;
        std::string_view trimmed = line;
        if (!trimmed.empty() && trimmed.back() == '\r') trimmed.remove_suffix(1);
        if (trimmed != kCsvHeader) return fail("missing or unexpected CSV header");
        return {};
    }
    const auto f = split_csv(line);
    if (f.size() != 10) return fail("expected 10 columns, got " + std::to_string(f.size()));

    BatterySample s;
    const auto time = parse_double(f[0]);
    if (!time) return fail("field 'time' is not a number");
    s.timestamp = *time;
    s.user_id = f[1];
    s.model = f[2];

    const auto soc = parse_double(f[3]);
    if (!soc) return fail("field 'soc' is not a number");
    const auto normalized = normalize_soc(*soc, looks_fractional(f[3]));
    if (!normalized) return fail("soc out of range");
    s.soc = *normalized;

    const auto mv = parse_double(f[4]);
    if (!mv) return fail("field 'voltage_mv' is not a number");
    if (!(*mv >= kMinVoltageMv && *mv <= kMaxVoltageMv)) return fail("voltage out of range");
    s.voltage_mv = static_cast<int>(std::lround(*mv));

    const auto temp = parse_double(f[5]);
    if (!temp) return fail("field 'temp_c' is not a number");
    s.temperature_c = *temp;
    s.health = parse_health(f[6]);

    const auto charger = parse_charger(f[7]);
    if (!charger) return fail("unknown charger '" + f[7] + "'");
    s.charger = *charger;

    if (f[8] == "true" || f[8] == "1") {
        s.charging = true;
    } else if (f[8] == "false" || f[8] == "0") {
        s.charging = false;
    } else {
        return fail("field 'charging' is not a boolean");
    }

    const auto screen = parse_screen(f[9]);
    if (!screen) return fail("unknown screen '" + f[9] + "'");
    s.screen = *screen;

    return finish(std::move(s));
}

ParseResult parse_samples(std::istream& input, InputFormat format, TimeUnit unit) {
    if (!input) throw IoError("input stream is not readable");
    ParseResult result;
    SampleLineParser parser(format, unit);
    std::string line;
    while (std::getline(input, line)) {
        auto outcome = parser.feed(line);
        if (outcome.sample) result.samples.push_back(std::move(*outcome.sample));
        if (outcome.diagnostic) result.rejected.push_back(std::move(*outcome.diagnostic));
    }
    if (input.bad()) throw IoError("read error after line " + std::to_string(parser.line_number()));
    return result;
}

std::string to_jsonl(const BatterySample& s) {
    ordered_json j;
    j["time"] = s.timestamp;
    j["user"] = s.user_id;
    j["model"] = s.model;
    j["soc"] = s.soc;
    j["voltage_mv"] = s.voltage_mv;
    j["temp_c"] = s.temperature_c;
    j["health"] = to_string(s.health);
    j["charger"] = to_string(s.charger);
    j["charging"] = s.charging;
    j["screen"] = to_string(s.screen);
    return j.dump();
}

std::string to_csv_row(const BatterySample& s) {
    std::string row;
    row.reserve(96);
    row += format_double(s.timestamp);
    row += ',';
    row += csv_escape(s.user_id);
    row += ',';
    row += csv_escape(s.model);
    row += ',';
    row += std::to_string(s.soc);
    row += ',';
    row += std::to_string(s.voltage_mv);
    row += ',';
    row += format_double(s.temperature_c);
    row += ',';
    row += to_string(s.health);
    row += ',';
    row += to_string(s.charger);
    row += ',';
    row += s.charging ? "true" : "false";
    row += ',';
    row += to_string(s.screen);
    return row;
}

bool FilterCriteria::matches(const BatterySample& s) const {
    if (charger && s.charger != *charger) return false;
    if (screen && s.screen != *screen) return false;
    if (health && !health->contains(s.health)) return false;
    if (model && s.model != *model) return false;
    return true;
}

std::vector<BatterySample> filter_samples(const std::vector<BatterySample>& samples, const FilterCriteria& criteria) {
    if (criteria.empty()) return samples;
    std::vector<BatterySample> out;
    std::copy_if(samples.begin(), samples.end(), std::back_inserter(out),
                 [&](const BatterySample& s) { return criteria.matches(s); });
    return out;
}

void normalize_user_samples(std::vector<BatterySample>& samples) {
    std::stable_sort(samples.begin(), samples.end(),
                     [](const BatterySample& a, const BatterySample& b) { return a.timestamp < b.timestamp; });
    std::vector<BatterySample> out;
    out.reserve(samples.size());
    std::size_t run_start = 0;
    std::set<int> seen;
    for (auto& s : samples) {
        if (out.size() == run_start || out[run_start].timestamp != s.timestamp) {
            run_start = out.size();
            seen.clear();
        }
        if (seen.insert(s.soc).second) out.push_back(std::move(s));
    }
    samples = std::move(out);
}

std::map<std::string, std::vector<BatterySample>> group_by_user(std::vector<BatterySample> samples) {
    std::map<std::string, std::vector<BatterySample>> groups;
    for (auto& s : samples) groups[s.user_id].push_back(std::move(s));
    for (auto& [user, seq] : groups) normalize_user_samples(seq);
    return groups;
}

}  // namespace battlytics
