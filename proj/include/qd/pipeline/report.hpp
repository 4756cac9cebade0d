#pragma once

#include "qd/cluster/kmeans.hpp"
#include "qd/impact/impact.hpp"
#include "qd/summarize/summarizer.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qd::pipeline {

enum class Verdict { Improvement, Degradation, Neutral };

std::string_view to_string(Verdict v);

/// Improvement when the change moves the metric in its good direction
/// (up for MI, AD, CD, CLOC, DLOC; down for the rest); 0 is neutral.
/// Throws InputError for an unknown metric name.
Verdict verdict(std::string_view metric, double mean_change);

/// Linear interpolation between closest ranks: h = (n - 1) p.
double quantile(std::vector<double> sorted_values, double p);

struct Distribution {
    std::string component;  // "method.HCPL"
    std::size_t count_defined = 0;
    std::optional<double> min, q1, median, q3, max, mean;
};

/// Per-component summary of the defined values. Throws InputError when
/// `impacts` is empty.
std::vector<Distribution> export_distributions(const std::vector<impact::ImpactVector>& impacts);
std::string distributions_csv(const std::vector<Distribution>& rows);

struct MemberRow {
    std::size_t index = 0;  // 1-based row number
    std::string modification_id;
    std::string repo;
    std::string summary;
    std::string simple_summary;
};

struct ComponentRow {
    std::string level;   // "method" / "class"
    std::string metric;  // "HCPL"
    std::string description;
    std::optional<double> mean;  // over members with a defined value
    std::size_t count_defined = 0;
    std::optional<Verdict> verdict;
};

struct ClusterReport {
    std::size_t cluster_id = 0;
    double silhouette = 0;
    std::vector<std::string> repositories;
    std::vector<MemberRow> members;
    std::vector<ComponentRow> components;
};

inline constexpr const char* kUnsummarized = "(unsummarized)";

/// Report for one cluster. `summaries` may be empty, in which case the
/// summary cells hold the "(unsummarized)" placeholder.
ClusterReport render_cluster_report(std::size_t cluster_id, const cluster::ClusterResult& result,
                                    const std::vector<impact::ImpactVector>& impacts,
                                    const std::map<std::string, summarize::SummaryPair>& summaries);

/// Retained clusters in descending silhouette order (ties by id).
std::vector<std::size_t> report_order(const cluster::ClusterResult& result);

std::string report_text(const cluster::ClusterResult& result, const std::vector<ClusterReport>& reports);
std::string report_metrics_csv(const std::vector<ClusterReport>& reports);
std::string report_members_csv(const std::vector<ClusterReport>& reports);

std::string csv_field(std::string_view s);
/// Fixed "%.6g"-style rendering used in text and CSV output.
std::string format_number(double v, int precision = 6);

}  // namespace qd::pipeline
