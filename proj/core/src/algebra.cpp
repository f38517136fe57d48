#include "hedgeql/algebra.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace hedgeql {

// ---- errors ----------------------------------------------------------------

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::MeasureSumViolation: return "MeasureSumViolation";
        case ErrorKind::EmptyHedgeSide: return "EmptyHedgeSide";
        case ErrorKind::DuplicateName: return "DuplicateName";
        case ErrorKind::UnknownWord: return "UnknownWord";
        case ErrorKind::EmptyInput: return "EmptyInput";
        case ErrorKind::TermTooDeep: return "TermTooDeep";
        case ErrorKind::OutOfDomain: return "OutOfDomain";
        case ErrorKind::LevelOutOfRange: return "LevelOutOfRange";
        case ErrorKind::UnmatchableValue: return "UnmatchableValue";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::ValidationError: return "ValidationError";
        case ErrorKind::UnknownDependency: return "UnknownDependency";
        case ErrorKind::UnknownTerm: return "UnknownTerm";
        case ErrorKind::DuplicateId: return "DuplicateId";
        case ErrorKind::MissingAttribute: return "MissingAttribute";
        case ErrorKind::UnsupportedValueKind: return "UnsupportedValueKind";
        case ErrorKind::SyntaxError: return "SyntaxError";
        case ErrorKind::UnknownAttribute: return "UnknownAttribute";
        case ErrorKind::UnknownMethod: return "UnknownMethod";
        case ErrorKind::UnmatchableCondition: return "UnmatchableCondition";
        case ErrorKind::UnsupportedQuery: return "UnsupportedQuery";
        case ErrorKind::UsageError: return "UsageError";
    }
    return "Error";
}

Error::Error(ErrorKind kind, std::string message)
    : kind_(kind), message_(std::move(message)) {
    rebuild_what();
}

Error& Error::with_source(std::string source) {
    source_ = std::move(source);
    rebuild_what();
    return *this;
}

Error& Error::with_position(std::size_t offset) {
    position_ = offset;
    rebuild_what();
    return *this;
}

Error& Error::with_details(std::vector<std::string> details) {
    details_ = std::move(details);
    rebuild_what();
    return *this;
}

void Error::rebuild_what() {
    std::ostringstream out;
    out << to_string(kind_) << ": ";
    if (source_) out << *source_ << ": ";
    out << message_;
    if (position_) out << " (at offset " << *position_ << ")";
    for (const auto& d : details_) out << "\n  - " << d;
    what_ = out.str();
}

// ---- text helpers -----------------------------------------------------------

std::string normalize_text(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

namespace {

std::vector<std::string> split_words(std::string_view normalized) {
    std::vector<std::string> words;
    std::size_t start = 0;
    while (start < normalized.size()) {
        std::size_t end = normalized.find(' ', start);
        if (end == std::string_view::npos) end = normalized.size();
        words.emplace_back(normalized.substr(start, end - start));
        start = end + 1;
    }
    return words;
}

bool is_reserved_word(const std::string& w) {
    return w == "0" || w == "1" || w == "w" || w == "zero" || w == "one";
}

} // namespace

// ---- validation -------------------------------------------------------------

ValidatedAlgebra validate_config(HedgeAlgebraConfig cfg) {
    std::vector<std::string> violations;
    ErrorKind first_kind = ErrorKind::ValidationError;
    auto violate = [&](ErrorKind kind, const std::string& msg) {
        if (violations.empty()) first_kind = kind;
        violations.push_back(msg);
    };

    if (cfg.positive_hedges.empty())
        violate(ErrorKind::EmptyHedgeSide, "at least one positive hedge is required");
    if (cfg.negative_hedges.empty())
        violate(ErrorKind::EmptyHedgeSide, "at least one negative hedge is required");

    // name hygiene: non-empty single words, unique case-insensitively,
    // none of the boundary spellings
    std::unordered_map<std::string, std::string> seen;
    auto check_name = [&](const std::string& name, const char* role) {
        std::string norm = normalize_text(name);
        if (norm.empty() || norm.find(' ') != std::string::npos) {
            violate(ErrorKind::ValidationError,
                    std::string(role) + " name '" + name + "' must be a single non-empty word");
            return;
        }
        if (is_reserved_word(norm)) {
            violate(ErrorKind::ValidationError,
                    std::string(role) + " name '" + name + "' collides with a boundary constant");
            return;
        }
        auto [it, inserted] = seen.emplace(norm, name);
        if (!inserted)
            violate(ErrorKind::DuplicateName,
                    "name '" + name + "' duplicates '" + it->second + "' (case-insensitive)");
    };
    check_name(cfg.negative_generator, "generator");
    check_name(cfg.positive_generator, "generator");
    for (const auto& h : cfg.positive_hedges) check_name(h.name, "hedge");
    for (const auto& h : cfg.negative_hedges) check_name(h.name, "hedge");

    if (!(cfg.fm_negative > 0.0 && cfg.fm_negative < 1.0) ||
        !(cfg.fm_positive > 0.0 && cfg.fm_positive < 1.0))
        violate(ErrorKind::MeasureSumViolation,
                "generator measures must lie strictly inside (0,1)");
    else if (std::abs(cfg.fm_negative + cfg.fm_positive - 1.0) > kMeasureTolerance)
        violate(ErrorKind::MeasureSumViolation,
                "generator measures must sum to 1");

    double mu_sum = 0.0;
    bool mu_positive = true;
    for (const auto& h : cfg.positive_hedges) {
        mu_sum += h.mu;
        mu_positive = mu_positive && h.mu > 0.0;
    }
    for (const auto& h : cfg.negative_hedges) {
        mu_sum += h.mu;
        mu_positive = mu_positive && h.mu > 0.0;
    }
    if (!mu_positive)
        violate(ErrorKind::MeasureSumViolation, "every hedge measure must be positive");
    else if (std::abs(mu_sum - 1.0) > kMeasureTolerance)
        violate(ErrorKind::MeasureSumViolation, "hedge measures must sum to 1");

    if (!violations.empty())
        throw Error(first_kind, "invalid hedge algebra configuration")
            .with_details(std::move(violations));

    ValidatedAlgebra alg;
    alg.cfg_ = std::move(cfg);

    for (const auto& h : alg.cfg_.positive_hedges) alg.positive_mu_sum_ += h.mu;
    for (const auto& h : alg.cfg_.negative_hedges) alg.negative_mu_sum_ += h.mu;

    const int p = alg.positive_count();
    const int q = alg.negative_count();

    // ascending child order on the negative side: strongest positive hedge
    // first, strongest negative hedge last; mirrored on the positive side
    auto push_slot = [](std::vector<ChildSlot>& layout, HedgeRef ref, double mu) {
        double lo = layout.empty() ? 0.0 : layout.back().offset_hi;
        layout.push_back(ChildSlot{ref, mu, lo, lo + mu});
    };
    for (int r = p; r >= 1; --r)
        push_slot(alg.layout_negative_, HedgeRef{Polarity::Positive, r},
                  alg.cfg_.positive_hedges[r - 1].mu);
    for (int r = 1; r <= q; ++r)
        push_slot(alg.layout_negative_, HedgeRef{Polarity::Negative, r},
                  alg.cfg_.negative_hedges[r - 1].mu);
    for (int r = q; r >= 1; --r)
        push_slot(alg.layout_positive_, HedgeRef{Polarity::Negative, r},
                  alg.cfg_.negative_hedges[r - 1].mu);
    for (int r = 1; r <= p; ++r)
        push_slot(alg.layout_positive_, HedgeRef{Polarity::Positive, r},
                  alg.cfg_.positive_hedges[r - 1].mu);

    alg.words_.emplace(normalize_text(alg.cfg_.negative_generator), Polarity::Negative);
    alg.words_.emplace(normalize_text(alg.cfg_.positive_generator), Polarity::Positive);
    for (int r = 1; r <= p; ++r)
        alg.words_.emplace(normalize_text(alg.cfg_.positive_hedges[r - 1].name),
                           HedgeRef{Polarity::Positive, r});
    for (int r = 1; r <= q; ++r)
        alg.words_.emplace(normalize_text(alg.cfg_.negative_hedges[r - 1].name),
                           HedgeRef{Polarity::Negative, r});

    for (const auto& [key, value] : alg.cfg_.synonyms)
        alg.synonyms_.emplace(normalize_text(key), value);

    return alg;
}

const HedgeSpec& ValidatedAlgebra::hedge(HedgeRef ref) const {
    const auto& side =
        ref.family == Polarity::Positive ? cfg_.positive_hedges : cfg_.negative_hedges;
    return side.at(static_cast<std::size_t>(ref.rank - 1));
}

int ValidatedAlgebra::slot_index(Polarity generator_side, HedgeRef h) const {
    const int p = positive_count();
    const int q = negative_count();
    if (generator_side == Polarity::Negative)
        return h.family == Polarity::Positive ? p - h.rank : p + h.rank - 1;
    return h.family == Polarity::Negative ? q - h.rank : q + h.rank - 1;
}

FuzzyInterval ValidatedAlgebra::root_interval(Polarity generator) const {
    if (generator == Polarity::Negative)
        return FuzzyInterval{0.0, cfg_.fm_negative, true};
    return FuzzyInterval{cfg_.fm_negative, 1.0, false};
}

const std::variant<Polarity, HedgeRef>* ValidatedAlgebra::lookup_word(
    std::string_view word) const {
    auto it = words_.find(std::string(word));
    return it == words_.end() ? nullptr : &it->second;
}

const std::string* ValidatedAlgebra::lookup_synonym(std::string_view normalized_text) const {
    auto it = synonyms_.find(std::string(normalized_text));
    return it == synonyms_.end() ? nullptr : &it->second;
}

// ---- term parsing -------------------------------------------------------------

ParsedTerm parse_term(std::string_view text, const ValidatedAlgebra& alg) {
    std::string norm = normalize_text(text);
    if (norm.empty()) throw Error(ErrorKind::EmptyInput, "empty term text");

    if (const std::string* canonical = alg.lookup_synonym(norm)) norm = normalize_text(*canonical);

    std::vector<std::string> words = split_words(norm);
    if (words.size() == 1) {
        const std::string& w = words.front();
        if (w == "0" || w == "zero") return BoundaryTerm::Zero;
        if (w == "w") return BoundaryTerm::W;
        if (w == "1" || w == "one") return BoundaryTerm::One;
    }

    const auto* last = alg.lookup_word(words.back());
    if (last == nullptr || !std::holds_alternative<Polarity>(*last))
        throw Error(ErrorKind::UnknownWord,
                    "'" + words.back() + "' is not a generator of this attribute");

    if (words.size() - 1 > static_cast<std::size_t>(kMaxHedges))
        throw Error(ErrorKind::TermTooDeep,
                    "terms may carry at most " + std::to_string(kMaxHedges) + " hedges");

    Term term;
    term.generator = std::get<Polarity>(*last);
    term.hedges.reserve(words.size() - 1);
    for (std::size_t i = 0; i + 1 < words.size(); ++i) {
        const auto* entry = alg.lookup_word(words[i]);
        if (entry == nullptr || !std::holds_alternative<HedgeRef>(*entry))
            throw Error(ErrorKind::UnknownWord,
                        "'" + words[i] + "' is not a hedge of this attribute");
        term.hedges.push_back(std::get<HedgeRef>(*entry));
    }
    return term;
}

// ---- measures and intervals ---------------------------------------------------

double fuzziness_measure(const ValidatedAlgebra& alg, const Term& term) {
    double fm = alg.generator_measure(term.generator);
    for (const HedgeRef& h : term.hedges) fm *= alg.hedge_measure(h);
    return fm;
}

double fuzziness_measure(const ValidatedAlgebra& alg, const ParsedTerm& term) {
    if (std::holds_alternative<BoundaryTerm>(term)) return 0.0;
    return fuzziness_measure(alg, std::get<Term>(term));
}

FuzzyInterval child_interval(const FuzzyInterval& parent, double parent_measure,
                             std::span<const ChildSlot> layout, std::size_t slot_index) {
    const ChildSlot& slot = layout[slot_index];
    FuzzyInterval out;
    out.lower = slot_index == 0 ? parent.lower
                                : parent.lower + slot.offset_lo * parent_measure;
    out.upper = slot_index + 1 == layout.size()
                    ? parent.upper
                    : parent.lower + slot.offset_hi * parent_measure;
    out.closed_lower = slot_index == 0 && parent.closed_lower;
    return out;
}

FuzzyInterval fuzzy_interval(const ValidatedAlgebra& alg, const Term& term) {
    FuzzyInterval iv = alg.root_interval(term.generator);
    double measure = alg.generator_measure(term.generator);
    auto layout = alg.child_layout(term.generator);
    // innermost hedge narrows first
    for (auto it = term.hedges.rbegin(); it != term.hedges.rend(); ++it) {
        const int slot = alg.slot_index(term.generator, *it);
        iv = child_interval(iv, measure, layout, static_cast<std::size_t>(slot));
        measure *= alg.hedge_measure(*it);
    }
    return iv;
}

double representative_value(const ValidatedAlgebra& alg, const Term& term) {
    const FuzzyInterval iv = fuzzy_interval(alg, term);
    const double fm = fuzziness_measure(alg, term);
    // the block boundary: positive-hedge children first on the negative
    // side, negative-hedge children first on the positive side
    const double block = term.generator == Polarity::Negative ? alg.positive_measure_sum()
                                                              : alg.negative_measure_sum();
    return iv.lower + block * fm;
}

double representative_value(const ValidatedAlgebra& alg, const ParsedTerm& term) {
    if (const auto* boundary = std::get_if<BoundaryTerm>(&term)) {
        switch (*boundary) {
            case BoundaryTerm::Zero: return 0.0;
            case BoundaryTerm::W: return alg.config().fm_negative;
            case BoundaryTerm::One: return 1.0;
        }
    }
    return representative_value(alg, std::get<Term>(term));
}

bool equal_at_level(const ValidatedAlgebra& alg, const Term& a, const Term& b, int level) {
    (void)alg;
    if (level < 1 || level > kMaxTermLength)
        throw Error(ErrorKind::LevelOutOfRange,
                    "equality level must lie in [1, " + std::to_string(kMaxTermLength) + "]");
    if (a.length() < level || b.length() < level) return false;
    if (a.generator != b.generator) return false;
    // both intervals sit inside the interval of their length-`level`
    // ancestor, i.e. of the innermost level-1 hedges; compare those
    const std::size_t keep = static_cast<std::size_t>(level - 1);
    return std::equal(a.hedges.end() - static_cast<std::ptrdiff_t>(keep), a.hedges.end(),
                      b.hedges.end() - static_cast<std::ptrdiff_t>(keep), b.hedges.end());
}

// ---- scaling ------------------------------------------------------------------

double scale_to_domain(const DomainScale& scale, double unit) {
    return scale.min + (scale.max - scale.min) * unit;
}

double unscale(const DomainScale& scale, double domain_value) {
    if (domain_value < scale.min || domain_value > scale.max)
        throw Error(ErrorKind::OutOfDomain,
                    "value " + std::to_string(domain_value) + " lies outside [" +
                        std::to_string(scale.min) + ", " + std::to_string(scale.max) + "]");
    return (domain_value - scale.min) / (scale.max - scale.min);
}

// ---- rendering ---------------------------------------------------------------

std::string term_text(const ValidatedAlgebra& alg, const Term& term) {
    std::string out;
    for (const HedgeRef& h : term.hedges) {
        out += alg.hedge_name(h);
        out += ' ';
    }
    out += alg.generator_name(term.generator);
    return out;
}

std::string term_text(const ValidatedAlgebra& alg, const ParsedTerm& term) {
    if (const auto* boundary = std::get_if<BoundaryTerm>(&term)) {
        switch (*boundary) {
            case BoundaryTerm::Zero: return "0";
            case BoundaryTerm::W: return "W";
            case BoundaryTerm::One: return "1";
        }
    }
    return term_text(alg, std::get<Term>(term));
}

} // namespace hedgeql
