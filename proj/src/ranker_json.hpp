#pragma once

// JSON mapping of ModelSpec, shared by the model artifact and job configs.

#include "bannerforge/ctr_ranker.hpp"
#include "json_util.hpp"

namespace bannerforge::detail {

json model_spec_to_json(const ModelSpec& spec);
/// Missing keys keep the defaults in `base`.
ModelSpec model_spec_from_json(const json& v, const std::string& path, ModelSpec base = {});

}  // namespace bannerforge::detail
