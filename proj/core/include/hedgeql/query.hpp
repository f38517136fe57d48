#pragma once

// Query language and execution.
//
// Grammar (keywords case-insensitive, "and" binds tighter than "or"):
//   query   := "select" proj "from" IDENT "where" or_expr
//   proj    := "*" | IDENT {"," IDENT}
//   or_expr := and_expr {"or" and_expr}
//   and_expr:= pred {"and" pred}
//   pred    := IDENT ["(" ")"] ("=" | ">=") (QUOTED_STRING | NUMBER)
//            | "(" or_expr ")"
//
// Binding chooses one similarity level per leaf: the length of the
// leaf's resolved term (level 1 for crisp right-hand sides), clamped to
// [1,4].  Execution matches every object against every leaf exactly
// once — no short-circuiting — and folds the outcomes through the
// condition tree.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hedgeql/partition.hpp"
#include "hedgeql/schema.hpp"

namespace hedgeql {

// ---- abstract syntax --------------------------------------------------------

enum class CompareOp { EqualLevel, GreaterEqualLevel };

struct AttrPredicate {
    std::string attribute;
    CompareOp op = CompareOp::EqualLevel;
    std::variant<double, std::string> rhs; // crisp number or term text
    std::size_t position = 0;              // offset into the query text
};

struct MethodPredicate {
    std::string method;
    std::string term_text;
    std::size_t position = 0;
};

struct ConditionNode;

struct AndGroup {
    std::vector<ConditionNode> children;
};
struct OrGroup {
    std::vector<ConditionNode> children;
};

struct ConditionNode {
    std::variant<AttrPredicate, MethodPredicate, AndGroup, OrGroup> node;
};

struct QueryAst {
    bool select_all = true;
    std::vector<std::string> projection; // empty when select_all
    std::string class_name;
    ConditionNode where;
    std::string text; // original query text, kept for traces
};

/// Recursive-descent parser; SyntaxError carries the offending offset.
QueryAst parse_query(std::string_view text);

// ---- bound form -------------------------------------------------------------

struct BoundLeaf {
    std::string attribute;
    int attribute_index = -1;
    CompareOp op = CompareOp::EqualLevel;
    AttrValue rhs;                  // Term, or crisp constant unit-scaled
    double rhs_domain = 0.0;        // original domain value when crisp
    int level = 1;
    std::shared_ptr<const LevelPartition> partition;
    const SimilarityClass* condition_class = nullptr; // linguistic rhs only
    bool unmatchable = false; // linguistic rhs whose neighborhood is a gap
};

struct BoundNode;

struct BoundMethodGroup {
    std::string method;
    Connective connective = Connective::And;
    std::vector<BoundLeaf> dependencies;
};

struct BoundAndGroup {
    std::vector<BoundNode> children;
};
struct BoundOrGroup {
    std::vector<BoundNode> children;
};

struct BoundNode {
    std::variant<BoundLeaf, BoundMethodGroup, BoundAndGroup, BoundOrGroup> node;
};

namespace detail {
class QueryBinder;
}

class BoundQuery {
public:
    const FuzzyClassSchema& schema() const { return *schema_; }
    std::shared_ptr<const FuzzyClassSchema> schema_ptr() const { return schema_; }
    const QueryAst& ast() const { return ast_; }
    const BoundNode& root() const { return root_; }

    /// Leaves including expanded method dependencies.
    int leaf_count() const { return leaf_count_; }
    bool attributes_only() const { return attributes_only_; }
    bool single_method() const { return single_method_; }

    /// Non-fatal binding diagnostics (conditions that can match nothing).
    const std::vector<std::string>& warnings() const { return warnings_; }

    /// Distinct partitions the query uses, for traces and partition dumps.
    struct PartitionUse {
        int attribute_index;
        int level;
        std::shared_ptr<const LevelPartition> partition;
    };
    const std::vector<PartitionUse>& partitions() const { return partitions_; }

private:
    friend class detail::QueryBinder;

    std::shared_ptr<const FuzzyClassSchema> schema_;
    QueryAst ast_;
    BoundNode root_;
    int leaf_count_ = 0;
    bool attributes_only_ = true;
    bool single_method_ = false;
    std::vector<std::string> warnings_;
    std::vector<PartitionUse> partitions_;
};

/// Resolves names, terms and levels, and precomputes per-leaf partitions
/// and condition neighborhoods.
BoundQuery bind(const QueryAst& ast, std::shared_ptr<const FuzzyClassSchema> schema);

// ---- execution --------------------------------------------------------------

struct EvalStats {
    std::uint64_t objects_visited = 0;
    std::uint64_t leaf_evaluations = 0;
};

struct ResultSet {
    std::vector<std::string> ids; // matched object ids, dataset order
};

/// Attribute-condition search; requires a method-free condition tree.
ResultSet exec_sasn(const BoundQuery& query, const Dataset& data, EvalStats* stats = nullptr);

/// Method-condition search; requires a single method predicate.
ResultSet exec_smsn(const BoundQuery& query, const Dataset& data, EvalStats* stats = nullptr);

/// Dispatches to the matching algorithm; mixed trees evaluate with the
/// same per-leaf machinery.
ResultSet execute(const BoundQuery& query, const Dataset& data, EvalStats* stats = nullptr);

// ---- explain ----------------------------------------------------------------

struct LeafTrace {
    std::string attribute;
    std::string value_text;     // the object's value on that attribute
    std::string located_label;  // class label or "gap"
    std::string condition_label;
    bool outcome = false;
};

struct ObjectTrace {
    std::string id;
    bool matched = false;
    std::vector<LeafTrace> leaves;
};

struct PartitionClassRow {
    std::string label;
    double lower = 0.0; // domain units
    double upper = 0.0;
    bool closed_lower = false;
    int ordinal = 0;
};

struct PartitionTrace {
    std::string attribute;
    int level = 0;
    std::vector<PartitionClassRow> classes;
    std::vector<std::pair<double, double>> gaps; // domain units
};

struct Trace {
    std::vector<PartitionTrace> partitions;
    std::vector<ObjectTrace> objects;
};

/// Per-object, per-leaf evaluation record plus the partition tables used.
Trace explain(const BoundQuery& query, const Dataset& data);

/// JSON rendering of a trace (same dialect as the dataset files).
std::string trace_to_json(const Trace& trace, int indent = -1);

} // namespace hedgeql
