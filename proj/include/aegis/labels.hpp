#pragma once

#include <array>
#include <string_view>

namespace aegis {

// Canonical class order, fixed for all manifests and outputs.
inline constexpr std::array<std::string_view, 7> kClassLabels = {
    "anger", "disgust", "fear", "happiness", "sadness", "surprise", "neutral"};

inline constexpr int kNumClasses = 7;

}  // namespace aegis
