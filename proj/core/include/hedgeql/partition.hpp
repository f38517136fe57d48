#pragma once

// Level-k similarity partitions and neighborhood matching.
//
// A partition at level k keeps one class per length-k term (that term's
// interval minus its two extreme depth-(k+1) children) plus the three
// boundary classes around 0, the generator split point, and 1.  At k >= 2
// the trimmed child intervals that are not absorbed into a boundary class
// remain as gaps: values falling there match nothing, and there is no
// nearest-class fallback.

#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hedgeql/algebra.hpp"

namespace hedgeql {

inline constexpr int kMaxPartitionLevel = 4;

struct SimilarityClass {
    std::variant<Term, BoundaryTerm> label;
    FuzzyInterval interval;
    int ordinal = 0; // position in ascending interval order
};

class LevelPartition {
public:
    int level() const { return level_; }
    const ValidatedAlgebra& algebra() const { return *algebra_; }
    std::shared_ptr<const ValidatedAlgebra> algebra_ptr() const { return algebra_; }

    std::span<const SimilarityClass> classes() const { return classes_; }
    std::span<const FuzzyInterval> gaps() const { return gaps_; }

    /// The class containing a unit value, or nullptr when it falls in a
    /// gap (possible only at level >= 2).
    const SimilarityClass* locate_crisp(double unit) const;

    /// Length-k terms resolve to their own class; anything else locates
    /// via its representative value.  nullptr means "gap".
    const SimilarityClass* neighborhood_of_term(const Term& term) const;

    /// The gap containing a unit value, if any.
    const FuzzyInterval* gap_containing(double unit) const;

    /// "S(0)", "S(W)", "S(1)" or "S(<canonical term text>)".
    std::string label_text(const SimilarityClass& cls) const;

private:
    friend LevelPartition build_partition(std::shared_ptr<const ValidatedAlgebra> alg,
                                          int level);
    LevelPartition() = default;

    std::shared_ptr<const ValidatedAlgebra> algebra_;
    int level_ = 0;
    std::vector<SimilarityClass> classes_; // ascending, ordinal == index
    std::vector<FuzzyInterval> gaps_;      // ascending
};

/// Builds the similarity partition at level k (1..4); classes and gaps
/// tile [0,1] exactly.
LevelPartition build_partition(std::shared_ptr<const ValidatedAlgebra> alg, int level);

/// Equality at the partition's level: crisp pairs match on exact
/// equality or a shared class, mixed pairs when the crisp side lands in
/// the term's neighborhood, term pairs on identical non-gap
/// neighborhoods.  Crisp operands are unit-scaled.
bool match_equal_level(const LevelPartition& part, const AttrValue& a, const AttrValue& b);

enum class MatchOutcome { NotMatched, Matched, Unmatchable };

/// Order comparison at the partition's level; Unmatchable reports that a
/// linguistic operand's neighborhood is a gap.
MatchOutcome try_match_ge_level(const LevelPartition& part, const AttrValue& a,
                                const AttrValue& b);

/// Throwing wrapper around try_match_ge_level (UnmatchableValue).
bool match_ge_level(const LevelPartition& part, const AttrValue& a, const AttrValue& b);

} // namespace hedgeql
