#pragma once

#include <string_view>
#include <utility>
#include <vector>

// Generated at configure time from core/data/{presets,kernels}/*.json.
namespace cgra::embedded {

const std::vector<std::pair<std::string_view, std::string_view>>& presets();
const std::vector<std::pair<std::string_view, std::string_view>>& kernels();

}  // namespace cgra::embedded
