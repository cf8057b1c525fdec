#include "battlytics/domain.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <utility>

namespace battlytics {

namespace {

std::string lowercase(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

template <typename E, std::size_t N>
std::optional<E> lookup(const std::array<std::pair<std::string_view, E>, N>& table, std::string_view text) {
    const auto key = lowercase(text);
    for (const auto& [name, value] : table) {
        if (name == key) return value;
    }
    return std::nullopt;
}

}  // namespace

std::string_view to_string(Health h) {
    switch (h) {
        case Health::Good: return "good";
        case Health::Overheat: return "overheat";
        case Health::OverVoltage: return "over_voltage";
        case Health::Other: return "other";
    }
    return "other";
}

std::string_view to_string(Charger c) {
    switch (c) {
        case Charger::AC: return "ac";
        case Charger::USB: return "usb";
        case Charger::Unplugged: return "unplugged";
    }
    return "unplugged";
}

std::string_view to_string(Screen s) { return s == Screen::On ? "on" : "off"; }

Health parse_health(std::string_view text) {
    static constexpr std::array<std::pair<std::string_view, Health>, 5> table{{
        {"good", Health::Good},
        {"overheat", Health::Overheat},
        {"over_voltage", Health::OverVoltage},
        {"over voltage", Health::OverVoltage},
        {"overvoltage", Health::OverVoltage},
    }};
    return lookup(table, text).value_or(Health::Other);
}

std::optional<Charger> parse_charger(std::string_view text) {
    static constexpr std::array<std::pair<std::string_view, Charger>, 4> table{{
        {"ac", Charger::AC},
        {"usb", Charger::USB},
        {"unplugged", Charger::Unplugged},
        {"ac main", Charger::AC},
    }};
    return lookup(table, text);
}

std::optional<Screen> parse_screen(std::string_view text) {
    static constexpr std::array<std::pair<std::string_view, Screen>, 2> table{{
        {"on", Screen::On},
        {"off", Screen::Off},
    }};
    return lookup(table, text);
}

std::string validate(const BatterySample& s) {
    if (s.user_id.empty()) return "empty user id";
    if (!std::isfinite(s.timestamp)) return "timestamp is not finite";
    if (s.soc < 0 || s.soc > 100) return "soc out of range";
    if (s.voltage_mv < kMinVoltageMv || s.voltage_mv > kMaxVoltageMv) return "voltage out of range";
    if (!(s.temperature_c >= kMinTemperatureC && s.temperature_c <= kMaxTemperatureC))
        return "temperature out of range";
    return {};
}

std::vector<const ChargeStep*> ChargingEvent::rate_steps(bool include_terminal) const {
    std::vector<const ChargeStep*> out;
    out.reserve(steps.size());
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const bool terminal = closed && i + 1 == steps.size();
        if (terminal && !include_terminal) continue;
        if (!steps[i].is_charging()) continue;
        out.push_back(&steps[i]);
    }
    return out;
}

std::vector<const BatterySample*> ChargingEvent::samples() const {
    std::vector<const BatterySample*> out;
    if (steps.empty()) return out;
    out.reserve(steps.size() + 1);
    out.push_back(&steps.front().first);
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const bool terminal = closed && i + 1 == steps.size();
        if (!terminal) out.push_back(&steps[i].second);
    }
    return out;
}

std::string_view to_string(CurveKind k) {
    switch (k) {
        case CurveKind::Voltage: return "voltage";
        case CurveKind::ChargeTime: return "charge_time";
        case CurveKind::Temperature: return "temperature";
    }
    return "voltage";
}

std::optional<double> SocCurve::at(int soc) const {
    const auto it = points.find(soc);
    if (it == points.end()) return std::nullopt;
    return it->second.value;
}

std::string_view to_string(Technique t) {
    switch (t) {
        case Technique::CcCv: return "cccv";
        case Technique::Dlc: return "dlc";
        case Technique::Quick: return "quick";
        case Technique::FastPulse: return "fast_pulse";
        case Technique::Unknown: return "unknown";
    }
    return "unknown";
}

std::string_view to_string(Variant v) {
    switch (v) {
        case Variant::CvFirst: return "cv_first";
        case Variant::CcTail: return "cc_tail";
        case Variant::FastRate: return "fast_rate";
    }
    return "cv_first";
}

std::string_view to_string(FuelGauge f) {
    switch (f) {
        case FuelGauge::CoulombCounter: return "coulomb_counter";
        case FuelGauge::VoltageBased: return "voltage_based";
        case FuelGauge::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

std::optional<Technique> parse_technique(std::string_view text) {
    static constexpr std::array<std::pair<std::string_view, Technique>, 8> table{{
        {"cccv", Technique::CcCv},
        {"cc-cv", Technique::CcCv},
        {"dlc", Technique::Dlc},
        {"quick", Technique::Quick},
        {"fast_pulse", Technique::FastPulse},
        {"fastpulse", Technique::FastPulse},
        {"pulse", Technique::FastPulse},
        {"unknown", Technique::Unknown},
    }};
    return lookup(table, text);
}

std::optional<Variant> parse_variant(std::string_view text) {
    static constexpr std::array<std::pair<std::string_view, Variant>, 3> table{{
        {"cv_first", Variant::CvFirst},
        {"cc_tail", Variant::CcTail},
        {"fast_rate", Variant::FastRate},
    }};
    return lookup(table, text);
}

std::optional<FuelGauge> parse_fuel_gauge(std::string_view text) {
    static constexpr std::array<std::pair<std::string_view, FuelGauge>, 4> table{{
        {"coulomb_counter", FuelGauge::CoulombCounter},
        {"coulomb", FuelGauge::CoulombCounter},
        {"voltage_based", FuelGauge::VoltageBased},
        {"inconclusive", FuelGauge::Inconclusive},
    }};
    return lookup(table, text);
}

}  // namespace battlytics
