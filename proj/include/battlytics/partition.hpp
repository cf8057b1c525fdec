#pragma once

// Out-of-core grouping of sample logs. Inputs are parsed once and spilled into
// hash buckets on disk; buckets are then loaded one at a time, so peak memory
// tracks the bucket size rather than the total input.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "battlytics/curves.hpp"
#include "battlytics/domain.hpp"
#include "battlytics/ingestion.hpp"

namespace battlytics {

struct InputOptions {
    std::vector<std::string> paths;
    std::optional<InputFormat> format;  // detected from the extension when unset
    TimeUnit unit = TimeUnit::Seconds;
};

struct InputDiagnostic {
    std::string path;
    Diagnostic diagnostic;
};

struct PartitionStats {
    std::size_t samples = 0;
    std::size_t rejected = 0;
    std::size_t buckets = 0;
    std::size_t peak_buffered_samples = 0;
};

/// All samples of one group key (a user, or a model with its users), each user's
/// samples time-sorted and deduplicated.
struct PartitionUnit {
    std::string key;
    std::vector<std::vector<BatterySample>> users;
};

class PartitionedInput {
   public:
    static constexpr std::size_t kTargetBucketBytes = 4u << 20;
    static constexpr std::size_t kMaxBuckets = 256;

    /// Reads every input; throws IoError naming the first unreadable path.
    /// bucket_count = 0 sizes buckets from the total input size.
    PartitionedInput(const InputOptions& inputs, GroupKey key, std::size_t bucket_count = 0,
                     const std::function<void(const BatterySample&)>& on_sample = {});
    ~PartitionedInput();

    PartitionedInput(const PartitionedInput&) = delete;
    PartitionedInput& operator=(const PartitionedInput&) = delete;

    const std::vector<InputDiagnostic>& diagnostics() const { return diagnostics_; }
    const PartitionStats& stats() const { return stats_; }

    /// Calls fn once per non-empty bucket, in bucket order, with units sorted by key.
    void for_each_batch(const std::function<void(std::vector<PartitionUnit>&)>& fn);

   private:
    std::filesystem::path bucket_path(std::size_t b) const;

    GroupKey key_;
    std::filesystem::path dir_;
    std::vector<std::size_t> bucket_sizes_;
    std::vector<InputDiagnostic> diagnostics_;
    PartitionStats stats_;
};

/// Stable 64-bit FNV-1a, used for bucket assignment.
std::uint64_t fnv1a(std::string_view text);

/// Applies fn to every item using up to `jobs` threads; results keep input order.
template <typename T, typename F>
auto parallel_map(std::vector<T>& items, std::size_t jobs, F&& fn) {
    using R = std::invoke_result_t<F&, T&>;
    std::vector<std::optional<R>> slots(items.size());
    const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, items.size()));
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < items.size(); i = next++) {
            try {
                slots[i].emplace(fn(items[i]));
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (error) std::rethrow_exception(error);
    std::vector<R> out;
    out.reserve(items.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

}  // namespace battlytics
