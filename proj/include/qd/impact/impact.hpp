#pragma once

#include "qd/diff/unified_diff.hpp"
#include "qd/java/entity_tree.hpp"
#include "qd/metrics/engine.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace qd::impact {

/// (after - before) / before * 100; 0 when both are 0; nullopt when only
/// `before` is 0.
std::optional<double> percentage_delta(double before, double after);

struct EntityPair {
    metrics::EntityKind kind;
    std::string key;
    std::size_t before_class = 0, before_method = 0;  // indices into the before tree
    std::size_t after_class = 0, after_method = 0;    // indices into the after tree
};

struct AffectedEntities {
    std::vector<EntityPair> pairs;       // classes first, then methods
    std::vector<std::string> added;      // keys only present after
    std::vector<std::string> removed;    // keys only present before
    bool file_level = false;             // no entity touched: all classes attributed
};

/// Entities matched by key whose before-span meets the removed lines or
/// whose after-span meets the added lines. A hunk that touches no entity is
/// attributed to every class present on both sides.
AffectedEntities affected_entities(const diff::Hunk& hunk, const java::EntityTree& before,
                                   const java::EntityTree& after);

struct ImpactVector {
    std::string modification_id;
    std::string repo;
    std::array<std::optional<double>, metrics::kImpactDimensions> components{};
    std::size_t affected_methods = 0;
    std::size_t affected_classes = 0;

    [[nodiscard]] std::array<bool, metrics::kImpactDimensions> defined_mask() const;
    /// Components with undefined entries replaced by 0.
    [[nodiscard]] std::array<double, metrics::kImpactDimensions> imputed() const;
};

/// Component j is the mean of the defined percentage deltas of metric j over
/// the pairs of its level; undefined when no pair defines it. Throws
/// InputError when `affected` has no pairs.
ImpactVector compute_impact(const std::string& modification_id, const std::string& repo,
                            const AffectedEntities& affected, const metrics::FileAnalysis& before,
                            const metrics::FileAnalysis& after);

/// Keeps vectors with at least one defined nonzero component, in order.
std::vector<ImpactVector> filter_zero_impact(const std::vector<ImpactVector>& vectors);

bool has_impact(const ImpactVector& v);

}  // namespace qd::impact
