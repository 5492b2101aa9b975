#pragma once

// JSON mappings shared by the GA, compositor, and pipeline file formats.

#include "bannerforge/ga_optimizer.hpp"
#include "json_util.hpp"

namespace bannerforge::detail {

json layout_to_json(const Layout& layout);
Layout layout_from_json(const json& v, const std::string& path);
json energy_to_json(const EnergyBreakdown& e);
json weights_to_json(const EnergyWeights& w);
EnergyWeights weights_from_json(const json& v, const std::string& path);
json bounds_to_json(const SizeBounds& b);
SizeBounds bounds_from_json(const json& v, const std::string& path);
json ga_config_to_json(const GAConfig& cfg);
/// Missing keys keep the defaults in `base`.
GAConfig ga_config_from_json(const json& v, const std::string& path, GAConfig base = {});

}  // namespace bannerforge::detail
