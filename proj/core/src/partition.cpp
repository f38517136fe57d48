#include "hedgeql/partition.hpp"

#include <algorithm>
#include <cassert>

namespace hedgeql {

namespace {

struct TermNode {
    Term term;
    FuzzyInterval interval;
    double measure = 0.0;
};

// all length-`length` terms of one generator side, ascending by interval
void enumerate_side(const ValidatedAlgebra& alg, Polarity generator, int length,
                    std::vector<TermNode>& out) {
    auto layout = alg.child_layout(generator);
    std::vector<HedgeRef> chain; // innermost first while recursing
    auto recurse = [&](auto&& self, const FuzzyInterval& iv, double measure,
                       int remaining) -> void {
        if (remaining == 0) {
            Term term;
            term.generator = generator;
            term.hedges.assign(chain.rbegin(), chain.rend()); // store outermost first
            out.push_back(TermNode{std::move(term), iv, measure});
            return;
        }
        for (std::size_t slot = 0; slot < layout.size(); ++slot) {
            chain.push_back(layout[slot].hedge);
            self(self, child_interval(iv, measure, layout, slot),
                 measure * layout[slot].mu, remaining - 1);
            chain.pop_back();
        }
    };
    recurse(recurse, alg.root_interval(generator), alg.generator_measure(generator),
            length - 1);
}

} // namespace

LevelPartition build_partition(std::shared_ptr<const ValidatedAlgebra> alg, int level) {
    if (level < 1 || level > kMaxPartitionLevel)
        throw Error(ErrorKind::LevelOutOfRange,
                    "partition level must lie in [1, " +
                        std::to_string(kMaxPartitionLevel) + "], got " +
                        std::to_string(level));

    const ValidatedAlgebra& a = *alg;
    std::vector<TermNode> negative_terms, positive_terms;
    enumerate_side(a, Polarity::Negative, level, negative_terms);
    enumerate_side(a, Polarity::Positive, level, positive_terms);

    LevelPartition part;
    part.algebra_ = std::move(alg);
    part.level_ = level;
    part.classes_.reserve(negative_terms.size() + positive_terms.size() + 3);

    // trimmed extreme children that do not become a boundary class
    FuzzyInterval zero_iv, one_iv;
    FuzzyInterval w_left, w_right;

    auto process_side = [&](const std::vector<TermNode>& terms, bool negative_side) {
        auto layout = a.child_layout(negative_side ? Polarity::Negative : Polarity::Positive);
        for (std::size_t i = 0; i < terms.size(); ++i) {
            const TermNode& node = terms[i];
            const FuzzyInterval first_child =
                child_interval(node.interval, node.measure, layout, 0);
            const FuzzyInterval last_child =
                child_interval(node.interval, node.measure, layout, layout.size() - 1);

            const bool side_first = i == 0;
            const bool side_last = i + 1 == terms.size();

            // on both sides the trimmed children are the interval's two
            // extremes; absorption depends on the side's orientation
            if (negative_side) {
                if (side_first) zero_iv = first_child;
                else part.gaps_.push_back(first_child);
                part.classes_.push_back(SimilarityClass{
                    node.term,
                    FuzzyInterval{first_child.upper, last_child.lower, false}, 0});
                if (side_last) w_left = last_child;
                else part.gaps_.push_back(last_child);
            } else {
                if (side_first) w_right = first_child;
                else part.gaps_.push_back(first_child);
                part.classes_.push_back(SimilarityClass{
                    node.term,
                    FuzzyInterval{first_child.upper, last_child.lower, false}, 0});
                if (side_last) one_iv = last_child;
                else part.gaps_.push_back(last_child);
            }
        }
    };

    // ascending order: S(0), negative-side classes, S(W), positive-side
    // classes, S(1); gaps come out ascending by the same sweep
    part.classes_.push_back(SimilarityClass{BoundaryTerm::Zero, {}, 0});
    process_side(negative_terms, true);
    part.classes_.push_back(SimilarityClass{BoundaryTerm::W, {}, 0});
    process_side(positive_terms, false);
    part.classes_.push_back(SimilarityClass{BoundaryTerm::One, {}, 0});

    part.classes_.front().interval = zero_iv;
    part.classes_.back().interval = one_iv;
    const std::size_t w_index = 1 + negative_terms.size();
    // the two straddling pieces are contiguous across fm(c-)
    part.classes_[w_index].interval = FuzzyInterval{w_left.lower, w_right.upper, false};

    for (std::size_t i = 0; i < part.classes_.size(); ++i)
        part.classes_[i].ordinal = static_cast<int>(i);

    assert(std::is_sorted(part.gaps_.begin(), part.gaps_.end(),
                          [](const FuzzyInterval& x, const FuzzyInterval& y) {
                              return x.lower < y.lower;
                          }));
    return part;
}

const SimilarityClass* LevelPartition::locate_crisp(double unit) const {
    if (unit < 0.0 || unit > 1.0) return nullptr;
    auto it = std::lower_bound(classes_.begin(), classes_.end(), unit,
                               [](const SimilarityClass& cls, double u) {
                                   return cls.interval.upper < u;
                               });
    if (it == classes_.end()) return nullptr;
    return it->interval.contains(unit) ? &*it : nullptr;
}

const FuzzyInterval* LevelPartition::gap_containing(double unit) const {
    auto it = std::lower_bound(gaps_.begin(), gaps_.end(), unit,
                               [](const FuzzyInterval& gap, double u) {
                                   return gap.upper < u;
                               });
    if (it == gaps_.end()) return nullptr;
    return it->contains(unit) ? &*it : nullptr;
}

const SimilarityClass* LevelPartition::neighborhood_of_term(const Term& term) const {
    if (term.length() != level_)
        return locate_crisp(representative_value(*algebra_, term));

    // direct lookup: the ascending enumeration is positional, innermost
    // hedge most significant
    const int fanout = algebra_->hedge_count();
    std::size_t index = 0;
    for (auto it = term.hedges.rbegin(); it != term.hedges.rend(); ++it)
        index = index * static_cast<std::size_t>(fanout) +
                static_cast<std::size_t>(algebra_->slot_index(term.generator, *it));

    std::size_t side_count = 1;
    for (int i = 1; i < level_; ++i) side_count *= static_cast<std::size_t>(fanout);

    const std::size_t class_index =
        term.generator == Polarity::Negative ? 1 + index : 2 + side_count + index;
    const SimilarityClass& cls = classes_[class_index];
    assert(std::holds_alternative<Term>(cls.label) && std::get<Term>(cls.label) == term);
    return &cls;
}

std::string LevelPartition::label_text(const SimilarityClass& cls) const {
    if (const auto* boundary = std::get_if<BoundaryTerm>(&cls.label)) {
        switch (*boundary) {
            case BoundaryTerm::Zero: return "S(0)";
            case BoundaryTerm::W: return "S(W)";
            case BoundaryTerm::One: return "S(1)";
        }
    }
    return "S(" + term_text(*algebra_, std::get<Term>(cls.label)) + ")";
}

namespace {

const SimilarityClass* neighborhood_of_value(const LevelPartition& part, const AttrValue& v) {
    if (const auto* unit = std::get_if<double>(&v)) return part.locate_crisp(*unit);
    return part.neighborhood_of_term(std::get<Term>(v));
}

} // namespace

bool match_equal_level(const LevelPartition& part, const AttrValue& a, const AttrValue& b) {
    const auto* crisp_a = std::get_if<double>(&a);
    const auto* crisp_b = std::get_if<double>(&b);
    if (crisp_a && crisp_b) {
        if (*crisp_a == *crisp_b) return true;
        const SimilarityClass* ca = part.locate_crisp(*crisp_a);
        return ca != nullptr && ca == part.locate_crisp(*crisp_b);
    }
    const SimilarityClass* na = neighborhood_of_value(part, a);
    return na != nullptr && na == neighborhood_of_value(part, b);
}

MatchOutcome try_match_ge_level(const LevelPartition& part, const AttrValue& a,
                                const AttrValue& b) {
    const auto* crisp_a = std::get_if<double>(&a);
    const auto* crisp_b = std::get_if<double>(&b);

    if (crisp_a && crisp_b)
        return *crisp_a >= *crisp_b ? MatchOutcome::Matched : MatchOutcome::NotMatched;

    if (!crisp_b) {
        const SimilarityClass* nb = part.neighborhood_of_term(std::get<Term>(b));
        if (nb == nullptr) return MatchOutcome::Unmatchable;
        if (crisp_a)
            return *crisp_a > nb->interval.lower ? MatchOutcome::Matched
                                                 : MatchOutcome::NotMatched;
        const SimilarityClass* na = part.neighborhood_of_term(std::get<Term>(a));
        if (na == nullptr) return MatchOutcome::Unmatchable;
        return na->ordinal >= nb->ordinal ? MatchOutcome::Matched : MatchOutcome::NotMatched;
    }

    // linguistic a against crisp b: compare ordinals when b locates,
    // otherwise fall back to the neighborhood's upper end
    const SimilarityClass* na = part.neighborhood_of_term(std::get<Term>(a));
    if (na == nullptr) return MatchOutcome::Unmatchable;
    if (const SimilarityClass* lb = part.locate_crisp(*crisp_b))
        return na->ordinal >= lb->ordinal ? MatchOutcome::Matched : MatchOutcome::NotMatched;
    return na->interval.upper >= *crisp_b ? MatchOutcome::Matched : MatchOutcome::NotMatched;
}

bool match_ge_level(const LevelPartition& part, const AttrValue& a, const AttrValue& b) {
    switch (try_match_ge_level(part, a, b)) {
        case MatchOutcome::Matched: return true;
        case MatchOutcome::NotMatched: return false;
        case MatchOutcome::Unmatchable: break;
    }
    throw Error(ErrorKind::UnmatchableValue,
                "a linguistic operand's neighborhood at level " +
                    std::to_string(part.level()) + " is a gap");
}

} // namespace hedgeql
