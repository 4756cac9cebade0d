#include "qd/metrics/catalog.hpp"

#include <algorithm>

namespace qd::metrics {

std::span<const std::string_view> metrics_for(EntityKind kind) {
    if (kind == EntityKind::Method) return kMethodMetrics;
    return kClassMetrics;
}

std::optional<std::size_t> metric_index(EntityKind kind, std::string_view name) {
    const auto names = metrics_for(kind);
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) return std::nullopt;
    return static_cast<std::size_t>(it - names.begin());
}

const MetricInfo* find_metric(std::string_view name) {
    auto it = std::find_if(kAllMetrics.begin(), kAllMetrics.end(), [&](const MetricInfo& m) { return m.name == name; });
    return it == kAllMetrics.end() ? nullptr : &*it;
}

std::string_view impact_component_level(std::size_t component) {
    return component < kMethodMetrics.size() ? "method" : "class";
}

std::string_view impact_component_metric(std::size_t component) {
    return component < kMethodMetrics.size() ? kMethodMetrics[component]
                                             : kClassMetrics[component - kMethodMetrics.size()];
}

}  // namespace qd::metrics
