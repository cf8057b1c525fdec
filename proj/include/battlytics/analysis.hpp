#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "battlytics/behavior.hpp"
#include "battlytics/classification.hpp"
#include "battlytics/curves.hpp"
#include "battlytics/domain.hpp"
#include "battlytics/ingestion.hpp"
#include "battlytics/segmentation.hpp"

namespace battlytics {

struct AnalysisConfig {
    double termination_c = kDefaultTerminationC;
    bool include_terminal = false;
    FilterCriteria filter;
    GroupKey group = GroupKey::Device;
    bool model_consensus = true;
    std::size_t min_support = 3;
    ClassifierConfig classifier;
    BehaviorConfig behavior;
    double tail_quantile = 0.98;
};

nlohmann::json to_json(const AnalysisConfig& config);
/// Overrides only the keys present in `j`. Throws std::invalid_argument on bad values.
void apply_json(AnalysisConfig& config, const nlohmann::json& j);

/// Filter, pair and segment one user's time-sorted samples.
std::vector<ChargingEvent> user_events(std::span<const BatterySample> samples, const AnalysisConfig& config);

struct GroupAnalysis {
    DeviceProfile profile;
    SocCurve voltage;
    SocCurve charge_time;
    SocCurve temperature;
};

/// Classifies one device (or one pooled model). Capacity loss is filled in from
/// the device's own technique; apply_model_consensus may revise it afterwards.
GroupAnalysis analyze_group(const std::string& group_id, const std::string& model,
                            std::span<const ChargingEvent> events, const AnalysisConfig& config);

/// Recomputes the nominal final voltage from the final-voltage band chosen by
/// the majority of devices of the same model. Quick and FastPulse devices keep
/// their own label.
void apply_model_consensus(std::vector<DeviceProfile>& profiles, const ClassifierConfig& config);

/// Sets nominal_final_voltage and capacity_loss_pct from profile.technique.
void finalize_capacity_loss(DeviceProfile& profile, const TechniqueBands& bands);

nlohmann::json to_json(const DeviceProfile& profile);
nlohmann::json to_json(const BehaviorReport& report);
nlohmann::json to_json(const HealthSummary& summary);

}  // namespace battlytics
