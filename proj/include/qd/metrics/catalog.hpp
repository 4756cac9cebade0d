#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

namespace qd::metrics {

enum class EntityKind { Method, Class };

/// Which sign of change improves quality.
enum class Direction { Up, Down };

struct MetricInfo {
    std::string_view name;
    std::string_view description;
    Direction direction;
};

/// Every metric of the catalogue, in reporting order (complexity, coupling,
/// documentation, size).
inline constexpr std::array<MetricInfo, 23> kAllMetrics = {{
    {"HCPL", "Halstead Calculated Program Length", Direction::Down},
    {"HDIF", "Halstead Difficulty", Direction::Down},
    {"HEFF", "Halstead Effort", Direction::Down},
    {"HPL", "Halstead Program Length", Direction::Down},
    {"HPV", "Halstead Program Vocabulary", Direction::Down},
    {"HTRP", "Halstead Time Required to Program", Direction::Down},
    {"HVOL", "Halstead Volume", Direction::Down},
    {"MI", "Maintainability Index", Direction::Up},
    {"McCC", "McCabe's Cyclomatic Complexity", Direction::Down},
    {"NL", "Nesting Level", Direction::Down},
    {"NLE", "Nesting Level Else-If", Direction::Down},
    {"WMC", "Weighted Methods per Class", Direction::Down},
    {"CBO", "Coupling Between Object classes", Direction::Down},
    {"CBOI", "CBO Inverse", Direction::Down},
    {"NII", "Number of Incoming Invocations", Direction::Down},
    {"NOI", "Number of Outgoing Invocations", Direction::Down},
    {"RFC", "Response set For Class", Direction::Down},
    {"AD", "API Documentation", Direction::Up},
    {"CD", "Comment Density", Direction::Up},
    {"CLOC", "Comment Lines of Code", Direction::Up},
    {"DLOC", "Documentation Lines of Code", Direction::Up},
    {"LLOC", "Logical Lines of Code", Direction::Down},
    {"LOC", "Lines of Code", Direction::Down},
}};

/// Method-level metrics; this order is the layout of the first 18 impact
/// vector components.
inline constexpr std::array<std::string_view, 18> kMethodMetrics = {
    "HCPL", "HDIF", "HEFF", "HPL", "HPV", "HTRP", "HVOL", "MI",   "McCC",
    "NL",   "NLE",  "NII",  "NOI", "CD",  "CLOC", "DLOC", "LLOC", "LOC",
};

/// Class-level metrics; the last 14 impact vector components.
inline constexpr std::array<std::string_view, 14> kClassMetrics = {
    "NL", "NLE", "WMC", "CBO", "CBOI", "NII", "NOI", "RFC", "AD", "CD", "CLOC", "DLOC", "LLOC", "LOC",
};

inline constexpr std::size_t kImpactDimensions = kMethodMetrics.size() + kClassMetrics.size();

std::span<const std::string_view> metrics_for(EntityKind kind);

/// Index of `name` within metrics_for(kind), if applicable at that level.
std::optional<std::size_t> metric_index(EntityKind kind, std::string_view name);

const MetricInfo* find_metric(std::string_view name);

/// Canonical impact-vector component name, e.g. "method.HCPL" / "class.LOC".
std::string_view impact_component_level(std::size_t component);
std::string_view impact_component_metric(std::size_t component);

}  // namespace qd::metrics
