#pragma once

// JSON conversions shared by the map serializer and the run configuration.

#include "gaitsom/som.hpp"
#include "gaitsom/synth.hpp"

#include <json.hpp>

#include <string_view>

namespace gaitsom {

std::string_view to_string(Kernel k);
std::string_view to_string(InitMethod m);
std::string_view to_string(Metric m);
std::string_view to_string(Decay d);
std::string_view to_string(PhaseRegion r);
Kernel parse_kernel(std::string_view text);
InitMethod parse_init(std::string_view text);
Metric parse_metric(std::string_view text);
Decay parse_decay(std::string_view text);
PhaseRegion parse_phase_region(std::string_view text);

nlohmann::json schedule_to_json(const TrainSchedule& s);
/// Missing keys keep the values already in `s`.
void schedule_from_json(const nlohmann::json& j, TrainSchedule& s);

nlohmann::json synth_to_json(const SynthSpec& s);
void synth_from_json(const nlohmann::json& j, SynthSpec& s);

}  // namespace gaitsom
