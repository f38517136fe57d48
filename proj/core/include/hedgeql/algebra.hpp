#pragma once

// Hedge-algebra kernel: linguistic terms over a two-generator algebra,
// multiplicative fuzziness measures, and the recursive interval layout
// on [0,1] that every partition and matching operation is built on.
//
// Layout convention (fixed, both sides, every depth):
//   * inside the negative generator's interval the children run, left to
//     right, strongest positive hedge .. weakest positive hedge, then
//     weakest negative hedge .. strongest negative hedge;
//   * inside the positive generator's interval the mirror image, so the
//     strongest positive hedge ends up nearest 1.
// Intervals are left-open right-closed; only the leftmost interval of a
// depth is closed at 0.  Child intervals of a term tile the parent
// exactly: shared endpoints are the same double, the first child starts
// at the parent's lower bound and the last child ends at its upper bound.

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "hedgeql/errors.hpp"

namespace hedgeql {

/// Which generator (or hedge family) a thing belongs to.
enum class Polarity : std::uint8_t { Negative, Positive };

/// Reference to a hedge in its owning algebra: family plus 1-based rank,
/// weakest hedge of a family first.
struct HedgeRef {
    Polarity family{};
    int rank = 0;
    bool operator==(const HedgeRef&) const = default;
};

/// A linguistic term: a generator with a hedge chain, outermost hedge
/// first ("very little short" has hedges [Very, Little], generator
/// Negative).
struct Term {
    Polarity generator{};
    std::vector<HedgeRef> hedges;

    int length() const { return 1 + static_cast<int>(hedges.size()); }
    bool operator==(const Term&) const = default;
};

/// The three precise constants; never represented as a Term.
enum class BoundaryTerm : std::uint8_t { Zero, W, One };

using ParsedTerm = std::variant<Term, BoundaryTerm>;

/// A crisp number or a linguistic term.  Whether the crisp side is in
/// unit or domain coordinates depends on context: objects store domain
/// values, partition matching works on [0,1].
using AttrValue = std::variant<double, Term>;

/// Subinterval of [0,1].  Left-open right-closed unless closed_lower,
/// which only the leftmost interval of a depth has.
struct FuzzyInterval {
    double lower = 0.0;
    double upper = 0.0;
    bool closed_lower = false;

    bool contains(double u) const {
        return (closed_lower ? u >= lower : u > lower) && u <= upper;
    }
    double width() const { return upper - lower; }
    bool operator==(const FuzzyInterval&) const = default;
};

/// Real endpoints of an attribute domain; [0,1] maps onto it affinely.
struct DomainScale {
    double min = 0.0;
    double max = 1.0;
};

double scale_to_domain(const DomainScale& scale, double unit);
/// Inverse of scale_to_domain; throws OutOfDomain outside [min, max].
double unscale(const DomainScale& scale, double domain_value);

struct HedgeSpec {
    std::string name;
    double mu = 0.0; // hedge measure
};

/// Raw, unvalidated configuration of one linguistic attribute universe.
struct HedgeAlgebraConfig {
    std::string negative_generator; // e.g. "short"
    std::string positive_generator; // e.g. "long"
    double fm_negative = 0.0;       // generator measure of the negative side
    double fm_positive = 0.0;       // must complement to 1
    std::vector<HedgeSpec> positive_hedges; // weakest first
    std::vector<HedgeSpec> negative_hedges; // weakest first
    std::map<std::string, std::string> synonyms; // surface text -> canonical text
};

/// One child position inside a parent interval: which hedge sits there
/// and the cumulative measure fractions before/after it.  Slots of one
/// side share cumulative values, so adjacent children reuse the exact
/// same boundary double.
struct ChildSlot {
    HedgeRef hedge;
    double mu = 0.0;
    double offset_lo = 0.0;
    double offset_hi = 0.0;
};

/// Parse terms at most this deep (hedge count); partitions go one level
/// further, so depth-5 intervals are the deepest ever constructed.
inline constexpr int kMaxHedges = 4;
inline constexpr int kMaxTermLength = kMaxHedges + 1;
inline constexpr double kMeasureTolerance = 1e-12;

/// An immutable, checked hedge algebra.  All members are read-only after
/// construction; instances may be shared freely across threads.
class ValidatedAlgebra {
public:
    const HedgeAlgebraConfig& config() const { return cfg_; }

    int positive_count() const { return static_cast<int>(cfg_.positive_hedges.size()); }
    int negative_count() const { return static_cast<int>(cfg_.negative_hedges.size()); }
    int hedge_count() const { return positive_count() + negative_count(); }

    const HedgeSpec& hedge(HedgeRef ref) const;
    double hedge_measure(HedgeRef ref) const { return hedge(ref).mu; }
    const std::string& hedge_name(HedgeRef ref) const { return hedge(ref).name; }

    const std::string& generator_name(Polarity side) const {
        return side == Polarity::Negative ? cfg_.negative_generator : cfg_.positive_generator;
    }
    double generator_measure(Polarity side) const {
        return side == Polarity::Negative ? cfg_.fm_negative : cfg_.fm_positive;
    }

    /// Sum of negative-hedge measures (Def. of the weakening mass).
    double negative_measure_sum() const { return negative_mu_sum_; }
    /// Sum of positive-hedge measures; the two sums add up to 1.
    double positive_measure_sum() const { return positive_mu_sum_; }

    /// Ascending child layout inside a parent on the given generator side.
    std::span<const ChildSlot> child_layout(Polarity generator_side) const {
        return generator_side == Polarity::Negative ? layout_negative_ : layout_positive_;
    }
    /// Position of a hedge within child_layout(generator_side).
    int slot_index(Polarity generator_side, HedgeRef h) const;

    /// I(c-) = [0, fm(c-)] or I(c+) = (fm(c-), 1].
    FuzzyInterval root_interval(Polarity generator) const;

    /// Case-insensitive word lookup; nullptr when the word is neither a
    /// hedge nor a generator.
    const std::variant<Polarity, HedgeRef>* lookup_word(std::string_view word) const;
    /// Whole-text synonym lookup on the normalized text, or nullopt.
    const std::string* lookup_synonym(std::string_view normalized_text) const;

private:
    friend ValidatedAlgebra validate_config(HedgeAlgebraConfig cfg);
    ValidatedAlgebra() = default;

    HedgeAlgebraConfig cfg_;
    double negative_mu_sum_ = 0.0;
    double positive_mu_sum_ = 0.0;
    std::vector<ChildSlot> layout_negative_;
    std::vector<ChildSlot> layout_positive_;
    std::unordered_map<std::string, std::variant<Polarity, HedgeRef>> words_;
    std::unordered_map<std::string, std::string> synonyms_; // normalized key
};

/// Checks every construction constraint and returns the immutable
/// algebra; throws Error with the full list of violations otherwise.
ValidatedAlgebra validate_config(HedgeAlgebraConfig cfg);

/// Case-insensitive surface-syntax parser.  The synonym table is
/// consulted first on the whole (normalized) text; afterwards the last
/// word must be a generator and every preceding word a hedge, outermost
/// first.  "0"/"zero", "w", "1"/"one" parse as boundary constants.
ParsedTerm parse_term(std::string_view text, const ValidatedAlgebra& alg);

/// Multiplicative fuzziness measure; boundary constants measure 0.
double fuzziness_measure(const ValidatedAlgebra& alg, const Term& term);
double fuzziness_measure(const ValidatedAlgebra& alg, const ParsedTerm& term);

/// The term's interval under the canonical layout.
FuzzyInterval fuzzy_interval(const ValidatedAlgebra& alg, const Term& term);

/// Exactly tiling child interval for the slot at `slot_index` of `layout`.
FuzzyInterval child_interval(const FuzzyInterval& parent, double parent_measure,
                             std::span<const ChildSlot> layout, std::size_t slot_index);

/// Quantitative semantics: the interior point of I(term) separating the
/// positive-hedge child block from the negative-hedge child block.
double representative_value(const ValidatedAlgebra& alg, const Term& term);
double representative_value(const ValidatedAlgebra& alg, const ParsedTerm& term);

/// True iff some length-k interval contains both terms' intervals.
/// Terms shorter than k never compare equal at level k.
bool equal_at_level(const ValidatedAlgebra& alg, const Term& a, const Term& b, int level);

/// Canonical rendering with the configured casing: "Very Very short".
std::string term_text(const ValidatedAlgebra& alg, const Term& term);
std::string term_text(const ValidatedAlgebra& alg, const ParsedTerm& term);

/// Normalized key for case-insensitive lookups: lowercased, trimmed,
/// inner whitespace collapsed.
std::string normalize_text(std::string_view text);

} // namespace hedgeql
