#include "battlytics/segmentation.hpp"

#include "battlytics/text.hpp"

#include <algorithm>
#include <stdexcept>

namespace battlytics {

using text::format_double;

double c_rate(int delta_soc, double delta_t) {
    if (!(delta_t > 0.0)) throw std::domain_error("non-positive interval");
    if (delta_soc <= 0) return 0.0;
    return 36.0 * static_cast<double>(delta_soc) / delta_t;
}

std::vector<ChargeStep> pair_consecutive(std::span<const BatterySample> samples) {
    // Of several samples sharing a timestamp only the last is paired.
    std::vector<const BatterySample*> chain;
    chain.reserve(samples.size());
    for (const auto& s : samples) {
        if (!chain.empty() && chain.back()->timestamp == s.timestamp) {
            chain.back() = &s;
        } else {
            chain.push_back(&s);
        }
    }

    std::vector<ChargeStep> steps;
    if (chain.size() < 2) return steps;
    steps.reserve(chain.size() - 1);
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        ChargeStep step;
        step.first = *chain[i];
        step.second = *chain[i + 1];
        step.delta_soc = step.second.soc - step.first.soc;
        step.delta_t = step.second.timestamp - step.first.timestamp;
        step.c_rate = c_rate(step.delta_soc, step.delta_t);
        steps.push_back(std::move(step));
    }
    return steps;
}

std::vector<ChargingEvent> segment_events(std::span<const ChargeStep> steps, double termination_c) {
    std::vector<ChargingEvent> events;
    if (steps.empty()) return events;

    int next_id = 1;
    ChargingEvent current;
    auto open = [&](const ChargeStep& step) {
        current = ChargingEvent{};
        current.event_id = next_id++;
        current.user_id = step.first.user_id;
        current.model = step.first.model;
        current.start_time = step.first.timestamp;
    };

    open(steps.front());
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const auto& step = steps[i];
        if (current.steps.empty() && i > 0) open(step);
        current.steps.push_back(step);
        if (step.c_rate <= termination_c) {
            current.closed = true;
            current.end_time = step.first.timestamp;
            events.push_back(std::move(current));
            current = ChargingEvent{};
        }
    }
    if (!current.steps.empty()) {
        current.end_time = current.steps.back().second.timestamp;
        events.push_back(std::move(current));
    }
    return events;
}

EventEndpoints event_endpoints(const ChargingEvent& event) {
    const auto samples = event.samples();
    if (samples.empty()) throw std::invalid_argument("event has no samples");
    // Lowest soc wins for the initial voltage, highest for the final; ties go to
    // the earliest and the latest sample respectively.
    const BatterySample* low = samples.front();
    const BatterySample* high = samples.front();
    for (const auto* s : samples) {
        if (s->soc < low->soc) low = s;
        if (s->soc >= high->soc) high = s;
    }
    EventEndpoints ep;
    ep.initial_voltage_mv = low->voltage_mv;
    ep.final_voltage_mv = high->voltage_mv;
    ep.soc_min = low->soc;
    ep.soc_max = high->soc;
    if (high->soc == 100) ep.final_voltage_candidate = high->voltage_mv;
    return ep;
}

std::vector<SampleLabel> label_samples(std::span<const ChargeStep> steps, double termination_c) {
    std::vector<SampleLabel> labels;
    if (steps.empty()) return labels;
    labels.reserve(steps.size() + 1);
    int event = 1;
    labels.push_back({event, steps.front().first.timestamp, steps.front().first.soc, 0.0, 0.0});
    for (const auto& step : steps) {
        if (step.c_rate <= termination_c) {
            labels.back().delta_t = step.delta_t;
            labels.back().c_rate = step.c_rate;
            ++event;
            labels.push_back({event, step.second.timestamp, step.second.soc, 0.0, 0.0});
        } else {
            labels.push_back({event, step.second.timestamp, step.second.soc, step.delta_t, step.c_rate});
        }
    }
    return labels;
}

void write_step_rows(std::ostream& out, std::span<const ChargingEvent> events) {
    for (const auto& ev : events) {
        for (const auto& st : ev.steps) {
            out << text::csv_escape(ev.user_id) << ',' << ev.event_id << ',' << format_double(st.first.timestamp) << ','
                << format_double(st.second.timestamp) << ',' << st.first.soc << ',' << st.second.soc << ','
                << format_double(st.delta_t) << ',' << format_double(st.c_rate) << '\n';
        }
    }
}

}  // namespace battlytics
