#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "battlytics/domain.hpp"

namespace battlytics {

enum class InputFormat { Jsonl, Csv };
enum class TimeUnit { Seconds, Milliseconds };

std::optional<InputFormat> parse_input_format(std::string_view text);
/// Picks Csv for a ".csv" extension and Jsonl otherwise.
InputFormat format_for_path(std::string_view path);

class IoError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

struct Diagnostic {
    std::size_t line = 0;  // 1-based
    std::string reason;
};

struct ParseResult {
    std::vector<BatterySample> samples;
    std::vector<Diagnostic> rejected;
};

/// CSV column order, also the header row.
inline constexpr std::string_view kCsvHeader =
    "time,user,model,soc,voltage_mv,temp_c,health,charger,charging,screen";

/// Parses a whole line-delimited stream. Throws IoError if the stream is unreadable.
ParseResult parse_samples(std::istream& input, InputFormat format, TimeUnit unit = TimeUnit::Seconds);

/// Incremental parser for large inputs. Feed lines one at a time; each returns
/// either a sample or a diagnostic (blank lines and the CSV header return neither).
class SampleLineParser {
   public:
    explicit SampleLineParser(InputFormat format, TimeUnit unit = TimeUnit::Seconds);

    struct Outcome {
        std::optional<BatterySample> sample;
        std::optional<Diagnostic> diagnostic;
    };

    Outcome feed(std::string_view line);
    std::size_t line_number() const { return line_no_; }

   private:
    Outcome parse_json(std::string_view line);
    Outcome parse_csv(std::string_view line);
    Outcome finish(BatterySample s);

    InputFormat format_;
    TimeUnit unit_;
    std::size_t line_no_ = 0;
    bool header_checked_ = false;
};

std::string to_jsonl(const BatterySample& s);
std::string to_csv_row(const BatterySample& s);

struct FilterCriteria {
    std::optional<Charger> charger;
    std::optional<Screen> screen;
    std::optional<std::set<Health>> health;
    std::optional<std::string> model;

    bool empty() const { return !charger && !screen && !health && !model; }
    bool matches(const BatterySample& s) const;
};

std::vector<BatterySample> filter_samples(const std::vector<BatterySample>& samples, const FilterCriteria& criteria);

/// Partitions by user, sorts each partition by time (stable) and drops exact
/// (user, timestamp, soc) duplicates, keeping the first occurrence.
std::map<std::string, std::vector<BatterySample>> group_by_user(std::vector<BatterySample> samples);

/// Sort + dedup a single user's samples in place.
void normalize_user_samples(std::vector<BatterySample>& samples);

}  // namespace battlytics
