#include "qd/pipeline/report.hpp"

#include "qd/error.hpp"
#include "qd/metrics/catalog.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace qd::pipeline {

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Improvement: return "improvement";
        case Verdict::Degradation: return "degradation";
        case Verdict::Neutral: break;
    }
    return "neutral";
}

Verdict verdict(std::string_view metric, double mean_change) {
    const auto* info = metrics::find_metric(metric);
    if (!info) throw InputError("unknown metric '" + std::string(metric) + "'");
    if (mean_change == 0.0) return Verdict::Neutral;
    const bool up = mean_change > 0;
    const bool good = info->direction == metrics::Direction::Up ? up : !up;
    return good ? Verdict::Improvement : Verdict::Degradation;
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw InputError("quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<Distribution> export_distributions(const std::vector<impact::ImpactVector>& impacts) {
    if (impacts.empty()) throw InputError("no retained impact vectors to summarize");
    std::vector<Distribution> rows;
    for (std::size_t c = 0; c < metrics::kImpactDimensions; ++c) {
        Distribution d;
        d.component = std::string(metrics::impact_component_level(c)) + "." + std::string(metrics::impact_component_metric(c));
        std::vector<double> v;
        for (const auto& iv : impacts)
            if (iv.components[c]) v.push_back(*iv.components[c]);
        d.count_defined = v.size();
        if (!v.empty()) {
            std::sort(v.begin(), v.end());
            d.min = v.front();
            d.max = v.back();
            d.q1 = quantile(v, 0.25);
            d.median = quantile(v, 0.5);
            d.q3 = quantile(v, 0.75);
            double s = 0;
            for (double x : v) s += x;
            d.mean = s / static_cast<double>(v.size());
        }
        rows.push_back(std::move(d));
    }
    return rows;
}

std::string format_number(double v, int precision) {
    if (v == 0.0) v = 0.0;  // no "-0"
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_number(*v, 10) : ""; }

std::string percent(const std::optional<double>& v) {
    if (!v) return "n/a";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%+.1f%%", *v == 0.0 ? 0.0 : *v);
    return buf;
}

std::string pad(std::string s, std::size_t w) {
    if (s.size() < w) s.append(w - s.size(), ' ');
    return s;
}

}  // namespace

std::string distributions_csv(const std::vector<Distribution>& rows) {
    std::string out = "component,count_defined,min,q1,median,q3,max,mean\n";
    for (const auto& d : rows)
        out += d.component + "," + std::to_string(d.count_defined) + "," + opt(d.min) + "," + opt(d.q1) + "," +
               opt(d.median) + "," + opt(d.q3) + "," + opt(d.max) + "," + opt(d.mean) + "\n";
    return out;
}

ClusterReport render_cluster_report(std::size_t cluster_id, const cluster::ClusterResult& result,
                                    const std::vector<impact::ImpactVector>& impacts,
                                    const std::map<std::string, summarize::SummaryPair>& summaries) {
    if (impacts.size() != result.assignment.size()) throw InputError("impacts do not match the cluster assignment");
    if (cluster_id >= result.k) throw InputError("no cluster " + std::to_string(cluster_id));

    ClusterReport r;
    r.cluster_id = cluster_id;
    r.silhouette = result.cluster_silhouette.at(cluster_id);
    std::set<std::string> repos;
    std::array<double, metrics::kImpactDimensions> sum{};
    std::array<std::size_t, metrics::kImpactDimensions> count{};
    for (std::size_t i = 0; i < impacts.size(); ++i) {
        if (static_cast<std::size_t>(result.assignment[i]) != cluster_id) continue;
        const auto& iv = impacts[i];
        repos.insert(iv.repo);
        MemberRow row;
        row.index = r.members.size() + 1;
        row.modification_id = iv.modification_id;
        row.repo = iv.repo;
        if (auto it = summaries.find(iv.modification_id); it != summaries.end()) {
            row.summary = it->second.detailed;
            row.simple_summary = it->second.simple;
        } else {
            row.summary = row.simple_summary = kUnsummarized;
        }
        r.members.push_back(std::move(row));
        for (std::size_t c = 0; c < metrics::kImpactDimensions; ++c)
            if (iv.components[c]) {
                sum[c] += *iv.components[c];
                ++count[c];
            }
    }
    r.repositories.assign(repos.begin(), repos.end());
    for (std::size_t c = 0; c < metrics::kImpactDimensions; ++c) {
        ComponentRow row;
        row.level = std::string(metrics::impact_component_level(c));
        row.metric = std::string(metrics::impact_component_metric(c));
        row.description = std::string(metrics::find_metric(row.metric)->description);
        row.count_defined = count[c];
        if (count[c] > 0) {
            row.mean = sum[c] / static_cast<double>(count[c]);
            row.verdict = verdict(row.metric, *row.mean);
        }
        r.components.push_back(std::move(row));
    }
    return r;
}

std::vector<std::size_t> report_order(const cluster::ClusterResult& result) {
    auto order = result.retained;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (result.cluster_silhouette[a] != result.cluster_silhouette[b])
            return result.cluster_silhouette[a] > result.cluster_silhouette[b];
        return a < b;
    });
    return order;
}

std::string report_text(const cluster::ClusterResult& result, const std::vector<ClusterReport>& reports) {
    std::ostringstream out;
    out << "Modification clusters\n=====================\n\n";
    out << "k = " << result.k << ", mean silhouette = " << format_number(result.mean_silhouette, 4)
        << ", retained " << result.retained.size() << " of " << result.k << "\n\n";

    out << pad("cluster", 9) << pad("size", 6) << pad("silhouette", 12) << "status\n";
    for (std::size_t c = 0; c < result.k; ++c) {
        out << pad(std::to_string(c), 9) << pad(std::to_string(result.cluster_size[c]), 6)
            << pad(format_number(result.cluster_silhouette[c], 4), 12);
        auto it = result.rejection_reasons.find(c);
        if (it == result.rejection_reasons.end()) {
            out << "retained\n";
        } else {
            out << "rejected:";
            for (const auto& reason : it->second) out << " [" << reason.predicate << "] " << reason.message << ";";
            out << "\n";
        }
    }

    for (const auto& r : reports) {
        out << "\nCluster " << r.cluster_id << " (silhouette " << format_number(r.silhouette, 4) << ", "
            << r.members.size() << " modifications)\n";
        out << "Repositories:";
        for (const auto& repo : r.repositories) out << " " << repo;
        out << "\n\n";
        out << pad("#", 4) << pad("Summary", 64) << "Simple summary\n";
        for (const auto& m : r.members)
            out << pad(std::to_string(m.index), 4) << pad(m.summary, 64) << m.simple_summary << "\n";
        out << "\n" << pad("Level", 8) << pad("Metric", 7) << pad("Description", 38) << pad("Mean", 12) << pad("n", 5)
            << "Verdict\n";
        for (const auto& c : r.components)
            out << pad(c.level, 8) << pad(c.metric, 7) << pad(c.description, 38) << pad(percent(c.mean), 12)
                << pad(std::to_string(c.count_defined), 5) << (c.verdict ? to_string(*c.verdict) : "n/a") << "\n";
    }
    if (reports.empty()) out << "\nNo cluster passed all three retention checks.\n";
    return out.str();
}

std::string report_metrics_csv(const std::vector<ClusterReport>& reports) {
    std::string out = "cluster,level,metric,description,mean,count_defined,verdict\n";
    for (const auto& r : reports)
        for (const auto& c : r.components)
            out += std::to_string(r.cluster_id) + "," + c.level + "," + c.metric + "," + csv_field(c.description) + "," +
                   opt(c.mean) + "," + std::to_string(c.count_defined) + "," +
                   std::string(c.verdict ? to_string(*c.verdict) : "n/a") + "\n";
    return out;
}

std::string report_members_csv(const std::vector<ClusterReport>& reports) {
    std::string out = "cluster,index,modification_id,repo,summary,simple_summary\n";
    for (const auto& r : reports)
        for (const auto& m : r.members)
            out += std::to_string(r.cluster_id) + "," + std::to_string(m.index) + "," + csv_field(m.modification_id) + "," +
                   csv_field(m.repo) + "," + csv_field(m.summary) + "," + csv_field(m.simple_summary) + "\n";
    return out;
}

}  // namespace qd::pipeline
