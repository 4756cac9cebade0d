#pragma once

#include "qd/java/entity_tree.hpp"
#include "qd/metrics/catalog.hpp"

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace qd::metrics {

/// Metric vector of one method or class at one point in time. `values` is
/// aligned with metrics_for(kind).
struct EntityMetrics {
    EntityKind kind = EntityKind::Method;
    std::string key;
    std::vector<double> values;

    [[nodiscard]] double get(std::string_view metric) const;
};

/// Operator/operand tally of a token range.
struct HalsteadCounts {
    std::map<std::string, int> operators;
    std::map<std::string, int> operands;

    [[nodiscard]] int distinct_operators() const { return static_cast<int>(operators.size()); }
    [[nodiscard]] int distinct_operands() const { return static_cast<int>(operands.size()); }
    [[nodiscard]] int total_operators() const;
    [[nodiscard]] int total_operands() const;
};

struct HalsteadMeasures {
    double program_length = 0;      // HPL = N1 + N2
    double vocabulary = 0;          // HPV = n1 + n2
    double volume = 0;              // HVOL = HPL * log2(HPV)
    double difficulty = 0;          // HDIF = n1/2 * N2/n2
    double effort = 0;              // HEFF = HDIF * HVOL
    double time_to_program = 0;     // HTRP = HEFF / 18
    double calculated_length = 0;   // HCPL = n1 log2 n1 + n2 log2 n2
};

HalsteadCounts halstead_counts(const java::EntityTree& tree, java::TokenRange range);
HalsteadMeasures halstead_measures(int n1, int n2, int total1, int total2);

/// Classic unnormalized maintainability index; ln(x) for x <= 0 taken as 0.
double maintainability_index(double volume, double mccc, double lloc);

struct Nesting {
    int nl = 0;
    int nle = 0;
};

/// Maximum control-structure nesting of a method body.
Nesting method_nesting(const java::EntityTree& tree, const java::MethodNode& method);

/// 1 + decision points (if, for, while, case, catch, ?:, &&, ||).
int cyclomatic_complexity(const java::EntityTree& tree, const java::MethodNode& method);

struct Invocation {
    std::string name;
    std::size_t arity = 0;
    bool operator<(const Invocation& o) const { return std::tie(name, arity) < std::tie(o.name, o.arity); }
    bool operator==(const Invocation&) const = default;
};

/// Method invocation sites ("name(args)") in a token range; constructor
/// calls, this(...)/super(...) and local declarations are excluded.
std::vector<Invocation> invocations(const java::EntityTree& tree, java::TokenRange range);

/// File-scoped analysis context: call graph, type references and line
/// tables shared by every entity of one file.
class FileAnalysis {
public:
    explicit FileAnalysis(const java::EntityTree& tree);

    [[nodiscard]] EntityMetrics method_metrics(std::size_t class_index, std::size_t method_index) const;
    [[nodiscard]] EntityMetrics class_metrics(std::size_t class_index) const;

    /// All class metrics then all method metrics, in tree order.
    [[nodiscard]] std::vector<EntityMetrics> all() const;

    /// Types referenced by a class (simple names), excluding itself.
    [[nodiscard]] const std::set<std::string>& referenced_types(std::size_t class_index) const {
        return class_refs_[class_index];
    }

    [[nodiscard]] const java::EntityTree& tree() const noexcept { return tree_; }

private:
    using MethodId = std::pair<std::size_t, std::size_t>;  // (class, method)

    [[nodiscard]] std::size_t count_lines(const std::vector<char>& flags, java::LineSpan span) const;

    const java::EntityTree& tree_;
    std::vector<char> code_lines_;
    std::vector<char> comment_lines_;
    std::vector<char> doc_lines_;
    std::set<std::pair<MethodId, MethodId>> edges_;  // caller -> callee
    std::map<MethodId, std::vector<Invocation>> calls_;
    std::vector<std::set<std::string>> class_refs_;
};

EntityMetrics compute_method_metrics(const FileAnalysis& file, std::size_t class_index, std::size_t method_index);
EntityMetrics compute_class_metrics(const FileAnalysis& file, std::size_t class_index);

}  // namespace qd::metrics
