#include "battlytics/curves.hpp"

#include "battlytics/stats.hpp"
#include "battlytics/text.hpp"

namespace battlytics {

void CurveAccumulator::add(int soc, double value) {
    if (soc < 0 || soc > 100) return;
    values_[static_cast<std::size_t>(soc)].push_back(value);
}

void CurveAccumulator::add_event(const ChargingEvent& event) {
    switch (kind_) {
        case CurveKind::Voltage:
            for (const auto* s : event.samples()) add(s->soc, s->voltage_mv);
            break;
        case CurveKind::Temperature:
            for (const auto* s : event.samples()) add(s->soc, s->temperature_c);
            break;
        case CurveKind::ChargeTime:
            for (const auto* step : event.rate_steps(include_terminal_)) {
                const double per_percent = step->delta_t / step->delta_soc;
                for (int level = step->first.soc + 1; level <= step->second.soc; ++level) add(level, per_percent);
            }
            break;
    }
}

void CurveAccumulator::merge(const CurveAccumulator& other) {
    for (std::size_t i = 0; i < values_.size(); ++i)
        values_[i].insert(values_[i].end(), other.values_[i].begin(), other.values_[i].end());
}

SocCurve CurveAccumulator::build() const {
    SocCurve curve;
    curve.kind = kind_;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (values_[i].empty()) continue;
        curve.points.emplace(static_cast<int>(i), CurvePoint{stats::median(values_[i]), values_[i].size()});
    }
    return curve;
}

namespace {

SocCurve build_curve(std::span<const ChargingEvent> events, CurveKind kind, bool include_terminal) {
    CurveAccumulator acc(kind, include_terminal);
    for (const auto& ev : events) acc.add_event(ev);
    return acc.build();
}

}  // namespace

SocCurve voltage_curve(std::span<const ChargingEvent> events) { return build_curve(events, CurveKind::Voltage, false); }

SocCurve charge_time_curve(std::span<const ChargingEvent> events, bool include_terminal) {
    return build_curve(events, CurveKind::ChargeTime, include_terminal);
}

SocCurve temperature_curve(std::span<const ChargingEvent> events) {
    return build_curve(events, CurveKind::Temperature, false);
}

std::map<std::string, SocCurve> grouped_curves(std::span<const ChargingEvent> events, CurveKind kind, GroupKey key,
                                               bool include_terminal) {
    std::map<std::string, CurveAccumulator> accs;
    for (const auto& ev : events) {
        const auto& group = key == GroupKey::Device ? ev.user_id : ev.model;
        accs.try_emplace(group, kind, include_terminal).first->second.add_event(ev);
    }
    std::map<std::string, SocCurve> out;
    for (const auto& [group, acc] : accs) out.emplace(group, acc.build());
    return out;
}

std::vector<double> collect_rates(std::span<const ChargingEvent> events, bool per_event_mean, bool include_terminal) {
    std::vector<double> rates;
    for (const auto& ev : events) {
        const auto steps = ev.rate_steps(include_terminal);
        if (steps.empty()) continue;
        if (per_event_mean) {
            double sum = 0.0;
            for (const auto* st : steps) sum += st->c_rate;
            rates.push_back(sum / static_cast<double>(steps.size()));
        } else {
            for (const auto* st : steps) rates.push_back(st->c_rate);
        }
    }
    return rates;
}

void write_curve_rows(std::ostream& out, const std::string& group, const SocCurve& curve, std::size_t min_support) {
    const auto group_field = text::csv_escape(group);
    for (const auto& [soc, point] : curve.points) {
        out << group_field << ',' << to_string(curve.kind) << ',' << soc << ',' << text::format_double(point.value)
            << ',' << point.count << ',' << (point.low_confidence(min_support) ? "true" : "false") << '\n';
    }
}

}  // namespace battlytics
