#pragma once

#include <array>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "battlytics/domain.hpp"

namespace battlytics {

enum class GroupKey { Device, Model };

/// Pools raw per-level values so curves from several event subsets can be
/// merged before the medians are taken.
class CurveAccumulator {
   public:
    explicit CurveAccumulator(CurveKind kind, bool include_terminal = false)
        : kind_(kind), include_terminal_(include_terminal) {}

    void add(int soc, double value);
    void add_event(const ChargingEvent& event);
    void merge(const CurveAccumulator& other);

    CurveKind kind() const { return kind_; }
    const std::vector<double>& values_at(int soc) const { return values_.at(static_cast<std::size_t>(soc)); }
    SocCurve build() const;

   private:
    CurveKind kind_;
    bool include_terminal_;
    std::array<std::vector<double>, 101> values_{};
};

/// Median sample voltage per soc level.
SocCurve voltage_curve(std::span<const ChargingEvent> events);
/// Median seconds-per-percent per destination level. A step spanning several
/// percent contributes delta_t / delta_soc to every level in (soc1, soc2].
SocCurve charge_time_curve(std::span<const ChargingEvent> events, bool include_terminal = false);
SocCurve temperature_curve(std::span<const ChargingEvent> events);

std::map<std::string, SocCurve> grouped_curves(std::span<const ChargingEvent> events, CurveKind kind, GroupKey key,
                                               bool include_terminal = false);

/// Per-step C-rates of charging steps, or one mean rate per event.
std::vector<double> collect_rates(std::span<const ChargingEvent> events, bool per_event_mean,
                                  bool include_terminal = false);

inline constexpr std::string_view kCurveCsvHeader = "group,kind,soc,value,count,low_confidence";

void write_curve_rows(std::ostream& out, const std::string& group, const SocCurve& curve,
                      std::size_t min_support = 3);

}  // namespace battlytics
