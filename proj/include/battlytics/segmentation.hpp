#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "battlytics/domain.hpp"

namespace battlytics {

/// Termination rate used by default; tablets can sit in CV for a long time, so
/// this is lower than the 0.07C at which charge controllers typically stop.
inline constexpr double kDefaultTerminationC = 0.03;
inline constexpr double kControllerTerminationC = 0.07;

/// A 1C charge takes 36 s per percent, so C = 36 * dSOC / dt.
/// Returns 0 for non-positive dSOC. Throws std::domain_error("non-positive interval")
/// when delta_t <= 0.
double c_rate(int delta_soc, double delta_t);

/// Overlapping consecutive pairs. Of several samples sharing a timestamp only the
/// last one is paired, since a zero interval carries no rate information.
std::vector<ChargeStep> pair_consecutive(std::span<const BatterySample> samples);

/// Scans steps in order; any step at or below termination_c closes the current
/// event (and stays in it). The following step opens the next event id.
std::vector<ChargingEvent> segment_events(std::span<const ChargeStep> steps,
                                          double termination_c = kDefaultTerminationC);

struct EventEndpoints {
    int initial_voltage_mv = 0;
    int final_voltage_mv = 0;
    int soc_min = 0;
    int soc_max = 0;
    // Present only when the event reached 100 %.
    std::optional<int> final_voltage_candidate;
};

/// Throws std::invalid_argument for an event without steps.
EventEndpoints event_endpoints(const ChargingEvent& event);

/// Per-sample label in the style of the event-labeling scan: each sample gets
/// the event id plus the interval and rate of the step that reached it. The
/// opening sample of every event is labeled with dt = 0, C = 0; the sample
/// before a terminating step carries that step's dt and C.
struct SampleLabel {
    int event_id = 0;
    double timestamp = 0.0;
    int soc = 0;
    double delta_t = 0.0;
    double c_rate = 0.0;
};

std::vector<SampleLabel> label_samples(std::span<const ChargeStep> steps, double termination_c = kDefaultTerminationC);

inline constexpr std::string_view kStepCsvHeader = "user,event_id,t1,t2,soc1,soc2,delta_t,c_rate";

void write_step_rows(std::ostream& out, std::span<const ChargingEvent> events);

}  // namespace battlytics
