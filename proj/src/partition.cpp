#include "battlytics/partition.hpp"

#include <map>
#include <system_error>

#include <unistd.h>

namespace battlytics {

namespace fs = std::filesystem;

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

fs::path make_spill_dir() {
    static std::atomic<unsigned> counter{0};
    const auto dir = fs::temp_directory_path() /
                     ("battlytics-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::create_directories(dir);
    return dir;
}

}  // namespace

PartitionedInput::PartitionedInput(const InputOptions& inputs, GroupKey key, std::size_t bucket_count,
                                   const std::function<void(const BatterySample&)>& on_sample)
    : key_(key) {
    std::uintmax_t total_bytes = 0;
    for (const auto& path : inputs.paths) {
        std::error_code ec;
        if (!fs::is_regular_file(path, ec)) throw IoError("cannot read input '" + path + "'");
        total_bytes += fs::file_size(path, ec);
    }
    if (bucket_count == 0)
        bucket_count = std::clamp<std::size_t>(total_bytes / kTargetBucketBytes + 1, 1, kMaxBuckets);

    dir_ = make_spill_dir();
    stats_.buckets = bucket_count;
    bucket_sizes_.assign(bucket_count, 0);

    std::vector<std::ofstream> writers;
    writers.reserve(bucket_count);
    for (std::size_t b = 0; b < bucket_count; ++b) {
        writers.emplace_back(bucket_path(b), std::ios::binary);
        if (!writers.back()) throw IoError("cannot create spill file " + bucket_path(b).string());
        writers.back() << kCsvHeader << '\n';
    }

    for (const auto& path : inputs.paths) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot read input '" + path + "'");
        SampleLineParser parser(inputs.format.value_or(format_for_path(path)), inputs.unit);
        std::string line;
        while (std::getline(in, line)) {
            auto outcome = parser.feed(line);
            if (outcome.diagnostic) {
                ++stats_.rejected;
                diagnostics_.push_back({path, std::move(*outcome.diagnostic)});
            }
            if (!outcome.sample) continue;
            const auto& s = *outcome.sample;
            ++stats_.samples;
            if (on_sample) on_sample(s);
            const auto b = fnv1a(key_ == GroupKey::Device ? s.user_id : s.model) % bucket_count;
            writers[b] << to_csv_row(s) << '\n';
            ++bucket_sizes_[b];
        }
        if (in.bad()) throw IoError("read error in '" + path + "'");
    }
    for (auto& w : writers) {
        w.flush();
        if (!w) throw IoError("write error while spilling samples");
    }
}

PartitionedInput::~PartitionedInput() {
    std::error_code ec;
    fs::remove_all(dir_, ec);
}

fs::path PartitionedInput::bucket_path(std::size_t b) const { return dir_ / ("bucket-" + std::to_string(b) + ".csv"); }

void PartitionedInput::for_each_batch(const std::function<void(std::vector<PartitionUnit>&)>& fn) {
    for (std::size_t b = 0; b < bucket_sizes_.size(); ++b) {
        if (bucket_sizes_[b] == 0) continue;
        std::ifstream in(bucket_path(b), std::ios::binary);
        if (!in) throw IoError("cannot reopen spill file " + bucket_path(b).string());
        auto parsed = parse_samples(in, InputFormat::Csv);
        stats_.peak_buffered_samples = std::max(stats_.peak_buffered_samples, parsed.samples.size());

        std::map<std::string, std::map<std::string, std::vector<BatterySample>>> grouped;
        for (auto& s : parsed.samples) {
            const std::string unit_key = key_ == GroupKey::Device ? s.user_id : s.model;
            auto& users = grouped[unit_key];
            users[s.user_id].push_back(std::move(s));
        }
        parsed.samples.clear();
        parsed.samples.shrink_to_fit();

        std::vector<PartitionUnit> units;
        units.reserve(grouped.size());
        for (auto& [unit_key, users] : grouped) {
            PartitionUnit unit{unit_key, {}};
            unit.users.reserve(users.size());
            for (auto& [user, seq] : users) {
                normalize_user_samples(seq);
                unit.users.push_back(std::move(seq));
            }
            units.push_back(std::move(unit));
        }
        fn(units);
    }
}

}  // namespace battlytics
