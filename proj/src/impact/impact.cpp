#include "qd/impact/impact.hpp"

#include "qd/error.hpp"

#include <algorithm>
#include <map>

namespace qd::impact {

using metrics::EntityKind;

std::optional<double> percentage_delta(double before, double after) {
    if (before == 0.0) {
        if (after == 0.0) return 0.0;
        return std::nullopt;
    }
    return (after - before) / before * 100.0;
}

namespace {

bool touches(const java::LineSpan& span, const std::vector<std::size_t>& lines) {
    return std::any_of(lines.begin(), lines.end(), [&](std::size_t l) { return span.contains(l); });
}

struct Located {
    std::size_t ci, mi;
    java::LineSpan span;
};

std::map<std::string, Located> class_index(const java::EntityTree& t) {
    std::map<std::string, Located> out;
    for (std::size_t ci = 0; ci < t.classes.size(); ++ci) out.emplace(t.classes[ci].qualified_name, Located{ci, 0, t.classes[ci].span});
    return out;
}

std::map<std::string, Located> method_index(const java::EntityTree& t) {
    std::map<std::string, Located> out;
    for (std::size_t ci = 0; ci < t.classes.size(); ++ci) {
        const auto& c = t.classes[ci];
        for (std::size_t mi = 0; mi < c.methods.size(); ++mi)
            out.emplace(c.method_key(c.methods[mi]), Located{ci, mi, c.methods[mi].span});
    }
    return out;
}

void match(EntityKind kind, const std::map<std::string, Located>& before, const std::map<std::string, Located>& after,
           const std::vector<std::size_t>& removed, const std::vector<std::size_t>& added, AffectedEntities& out) {
    // Walk keys in source order of the before tree so pairs are deterministic.
    std::vector<std::pair<std::string, Located>> ordered(before.begin(), before.end());
    std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
        return std::tie(a.second.ci, a.second.mi) < std::tie(b.second.ci, b.second.mi);
    });
    for (const auto& [key, b] : ordered) {
        auto it = after.find(key);
        if (it == after.end()) {
            if (touches(b.span, removed)) out.removed.push_back(key);
            continue;
        }
        const auto& a = it->second;
        if (touches(b.span, removed) || touches(a.span, added))
            out.pairs.push_back({kind, key, b.ci, b.mi, a.ci, a.mi});
    }
    for (const auto& [key, a] : after)
        if (!before.count(key) && touches(a.span, added)) out.added.push_back(key);
}

}  // namespace

AffectedEntities affected_entities(const diff::Hunk& hunk, const java::EntityTree& before,
                                   const java::EntityTree& after) {
    const auto removed = hunk.removed_line_numbers();
    const auto added = hunk.added_line_numbers();
    AffectedEntities out;
    const auto bc = class_index(before), ac = class_index(after);
    match(EntityKind::Class, bc, ac, removed, added, out);
    match(EntityKind::Method, method_index(before), method_index(after), removed, added, out);

    const bool touched_any = !out.pairs.empty() || !out.added.empty() || !out.removed.empty();
    if (!touched_any) {
        out.file_level = true;
        for (std::size_t ci = 0; ci < before.classes.size(); ++ci) {
            const auto& key = before.classes[ci].qualified_name;
            auto it = ac.find(key);
            if (it != ac.end()) out.pairs.push_back({EntityKind::Class, key, ci, 0, it->second.ci, 0});
        }
    }
    return out;
}

std::array<bool, metrics::kImpactDimensions> ImpactVector::defined_mask() const {
    std::array<bool, metrics::kImpactDimensions> m{};
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = components[i].has_value();
    return m;
}

std::array<double, metrics::kImpactDimensions> ImpactVector::imputed() const {
    std::array<double, metrics::kImpactDimensions> v{};
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = components[i].value_or(0.0);
    return v;
}

ImpactVector compute_impact(const std::string& modification_id, const std::string& repo,
                            const AffectedEntities& affected, const metrics::FileAnalysis& before,
                            const metrics::FileAnalysis& after) {
    if (affected.pairs.empty()) throw InputError("no matched entities for " + modification_id);
    ImpactVector v;
    v.modification_id = modification_id;
    v.repo = repo;

    constexpr std::size_t kMethodDims = metrics::kMethodMetrics.size();
    std::array<double, metrics::kImpactDimensions> sum{};
    std::array<std::size_t, metrics::kImpactDimensions> count{};
    for (const auto& p : affected.pairs) {
        const bool is_method = p.kind == EntityKind::Method;
        const auto b = is_method ? before.method_metrics(p.before_class, p.before_method)
                                 : before.class_metrics(p.before_class);
        const auto a = is_method ? after.method_metrics(p.after_class, p.after_method)
                                 : after.class_metrics(p.after_class);
        const std::size_t base = is_method ? 0 : kMethodDims;
        for (std::size_t j = 0; j < b.values.size(); ++j) {
            if (auto d = percentage_delta(b.values[j], a.values[j])) {
                sum[base + j] += *d;
                ++count[base + j];
            }
        }
        (is_method ? v.affected_methods : v.affected_classes) += 1;
    }
    for (std::size_t j = 0; j < v.components.size(); ++j)
        if (count[j] > 0) v.components[j] = sum[j] / static_cast<double>(count[j]);
    return v;
}

bool has_impact(const ImpactVector& v) {
    return std::any_of(v.components.begin(), v.components.end(),
                       [](const std::optional<double>& c) { return c && *c != 0.0; });
}

std::vector<ImpactVector> filter_zero_impact(const std::vector<ImpactVector>& vectors) {
    std::vector<ImpactVector> out;
    std::copy_if(vectors.begin(), vectors.end(), std::back_inserter(out), has_impact);
    return out;
}

}  // namespace qd::impact
