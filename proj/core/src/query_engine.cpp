#include "hedgeql/query.hpp"

#include <algorithm>
#include <map>

#include <json.hpp>

#include "hedgeql/format.hpp"

namespace hedgeql {

namespace {

int clamp_level(int term_length) {
    return std::clamp(term_length, 1, kMaxPartitionLevel);
}

} // namespace

namespace detail {

class QueryBinder {
public:
    QueryBinder(const QueryAst& ast, std::shared_ptr<const FuzzyClassSchema> schema)
        : ast_(ast), schema_(std::move(schema)) {}

    BoundQuery run() {
        if (ast_.class_name != schema_->class_name())
            throw Error(ErrorKind::ValidationError,
                        "query targets class '" + ast_.class_name +
                            "' but the schema defines class '" + schema_->class_name() + "'");
        for (const std::string& name : ast_.projection)
            if (schema_->attribute_index(name) < 0)
                throw Error(ErrorKind::UnknownAttribute,
                            "cannot project '" + name + "': not an attribute");

        BoundQuery out;
        out.schema_ = schema_;
        out.ast_ = ast_;
        out.root_ = bind_node(ast_.where);
        out.leaf_count_ = leaf_count_;
        out.attributes_only_ = attributes_only_;
        out.single_method_ =
            std::holds_alternative<BoundMethodGroup>(out.root_.node);
        out.warnings_ = std::move(warnings_);
        for (auto& [key, part] : partitions_)
            out.partitions_.push_back(
                BoundQuery::PartitionUse{key.first, key.second, part});
        return out;
    }

private:
    BoundNode bind_node(const ConditionNode& node) {
        return std::visit(
            [&](const auto& n) -> BoundNode { return bind_any(n); }, node.node);
    }

    BoundNode bind_any(const AndGroup& group) {
        BoundAndGroup out;
        for (const ConditionNode& child : group.children)
            out.children.push_back(bind_node(child));
        return BoundNode{std::move(out)};
    }

    BoundNode bind_any(const OrGroup& group) {
        BoundOrGroup out;
        for (const ConditionNode& child : group.children)
            out.children.push_back(bind_node(child));
        return BoundNode{std::move(out)};
    }

    BoundNode bind_any(const AttrPredicate& pred) {
        const int index = schema_->attribute_index(pred.attribute);
        if (index < 0)
            throw Error(ErrorKind::UnknownAttribute,
                        "unknown attribute '" + pred.attribute + "'")
                .with_position(pred.position);
        return BoundNode{bind_leaf(index, pred.op, pred.rhs, pred.position)};
    }

    BoundNode bind_any(const MethodPredicate& pred) {
        attributes_only_ = false;
        const MethodSpec* method = schema_->find_method(pred.method);
        if (method == nullptr)
            throw Error(ErrorKind::UnknownMethod,
                        "unknown method '" + pred.method + "'")
                .with_position(pred.position);

        BoundMethodGroup group;
        group.method = method->name;
        group.connective = method->connective;
        // the condition term is resolved anew in every dependency's own
        // algebra and synonym table
        for (const std::string& dep : method->dependencies) {
            const int index = schema_->attribute_index(dep);
            group.dependencies.push_back(
                bind_leaf(index, CompareOp::EqualLevel, pred.term_text, pred.position));
        }
        return BoundNode{std::move(group)};
    }

    BoundLeaf bind_leaf(int attr_index, CompareOp op,
                        const std::variant<double, std::string>& rhs,
                        std::size_t position) {
        const AttributeSpec& attr =
            schema_->attributes()[static_cast<std::size_t>(attr_index)];
        BoundLeaf leaf;
        leaf.attribute = attr.name;
        leaf.attribute_index = attr_index;
        leaf.op = op;
        ++leaf_count_;

        if (const auto* crisp = std::get_if<double>(&rhs)) {
            if (*crisp < attr.scale.min || *crisp > attr.scale.max)
                throw Error(ErrorKind::OutOfDomain,
                            "condition value " + format_number(*crisp) +
                                " lies outside the domain of '" + attr.name + "'")
                    .with_position(position);
            leaf.rhs_domain = *crisp;
            leaf.rhs = unscale(attr.scale, *crisp);
            leaf.level = 1;
            leaf.partition = partition_for(attr_index, leaf.level);
            return leaf;
        }

        const std::string& text = std::get<std::string>(rhs);
        ParsedTerm parsed;
        try {
            parsed = parse_term(text, *attr.algebra);
        } catch (const Error& e) {
            throw Error(ErrorKind::UnknownTerm,
                        "cannot resolve \"" + text + "\" on attribute '" + attr.name +
                            "': " + e.message())
                .with_position(position);
        }
        if (std::holds_alternative<BoundaryTerm>(parsed))
            throw Error(ErrorKind::UnsupportedValueKind,
                        "boundary constants cannot be query conditions")
                .with_position(position);

        Term term = std::get<Term>(std::move(parsed));
        leaf.level = clamp_level(term.length());
        leaf.partition = partition_for(attr_index, leaf.level);
        leaf.condition_class = leaf.partition->neighborhood_of_term(term);
        if (leaf.condition_class == nullptr) {
            leaf.unmatchable = true;
            warnings_.push_back("condition on '" + attr.name + "' = \"" + text +
                                "\" falls in a gap at level " +
                                std::to_string(leaf.level) + " and matches nothing");
        }
        leaf.rhs = std::move(term);
        return leaf;
    }

    std::shared_ptr<const LevelPartition> partition_for(int attr_index, int level) {
        auto key = std::make_pair(attr_index, level);
        auto it = partitions_.find(key);
        if (it == partitions_.end()) {
            const AttributeSpec& attr =
                schema_->attributes()[static_cast<std::size_t>(attr_index)];
            auto part = std::make_shared<const LevelPartition>(
                build_partition(attr.algebra, level));
            it = partitions_.emplace(key, std::move(part)).first;
        }
        return it->second;
    }

    const QueryAst& ast_;
    std::shared_ptr<const FuzzyClassSchema> schema_;
    std::map<std::pair<int, int>, std::shared_ptr<const LevelPartition>> partitions_;
    std::vector<std::string> warnings_;
    int leaf_count_ = 0;
    bool attributes_only_ = true;
};

} // namespace detail

namespace {

AttrValue unit_value(const AttributeSpec& attr, const AttrValue& stored) {
    if (const auto* crisp = std::get_if<double>(&stored))
        return AttrValue{unscale(attr.scale, *crisp)};
    return stored;
}

struct TraceSink {
    std::vector<LeafTrace>* leaves = nullptr;
};

bool eval_leaf(const BoundLeaf& leaf, const FuzzyClassSchema& schema,
               const FuzzyObject& object, EvalStats* stats, TraceSink sink) {
    if (stats) ++stats->leaf_evaluations;
    const AttributeSpec& attr =
        schema.attributes()[static_cast<std::size_t>(leaf.attribute_index)];
    const AttrValue value =
        unit_value(attr, object.values[static_cast<std::size_t>(leaf.attribute_index)]);

    bool matched = false;
    if (leaf.op == CompareOp::EqualLevel)
        matched = match_equal_level(*leaf.partition, value, leaf.rhs);
    else
        matched = try_match_ge_level(*leaf.partition, value, leaf.rhs) ==
                  MatchOutcome::Matched;

    if (sink.leaves) {
        const LevelPartition& part = *leaf.partition;
        LeafTrace trace;
        trace.attribute = leaf.attribute;

        const AttrValue& stored =
            object.values[static_cast<std::size_t>(leaf.attribute_index)];
        if (const auto* crisp = std::get_if<double>(&stored))
            trace.value_text = format_number(*crisp);
        else
            trace.value_text = term_text(part.algebra(), std::get<Term>(stored));

        const SimilarityClass* located = nullptr;
        if (const auto* unit = std::get_if<double>(&value))
            located = part.locate_crisp(*unit);
        else
            located = part.neighborhood_of_term(std::get<Term>(value));
        trace.located_label = located ? part.label_text(*located) : "gap";

        if (leaf.condition_class != nullptr)
            trace.condition_label = part.label_text(*leaf.condition_class);
        else if (std::holds_alternative<Term>(leaf.rhs))
            trace.condition_label = "gap";
        else if (leaf.op == CompareOp::GreaterEqualLevel)
            trace.condition_label = ">= " + format_number(leaf.rhs_domain);
        else if (const SimilarityClass* rhs_class =
                     part.locate_crisp(std::get<double>(leaf.rhs)))
            trace.condition_label = part.label_text(*rhs_class);
        else
            trace.condition_label = "gap";

        trace.outcome = matched;
        sink.leaves->push_back(std::move(trace));
    }
    return matched;
}

// evaluates every leaf exactly once per object; no short-circuiting
bool eval_node(const BoundNode& node, const FuzzyClassSchema& schema,
               const FuzzyObject& object, EvalStats* stats, TraceSink sink) {
    return std::visit(
        [&](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, BoundLeaf>) {
                return eval_leaf(n, schema, object, stats, sink);
            } else if constexpr (std::is_same_v<T, BoundMethodGroup>) {
                bool all = true, any = false;
                for (const BoundLeaf& dep : n.dependencies) {
                    const bool m = eval_leaf(dep, schema, object, stats, sink);
                    all = all && m;
                    any = any || m;
                }
                return n.connective == Connective::And ? all : any;
            } else if constexpr (std::is_same_v<T, BoundAndGroup>) {
                bool all = true;
                for (const BoundNode& child : n.children)
                    all = eval_node(child, schema, object, stats, sink) && all;
                return all;
            } else {
                bool any = false;
                for (const BoundNode& child : n.children)
                    any = eval_node(child, schema, object, stats, sink) || any;
                return any;
            }
        },
        node.node);
}

ResultSet run(const BoundQuery& query, const Dataset& data, EvalStats* stats) {
    ResultSet result;
    for (const FuzzyObject& object : data.objects()) {
        if (stats) ++stats->objects_visited;
        if (eval_node(query.root(), query.schema(), object, stats, TraceSink{}))
            result.ids.push_back(object.id);
    }
    return result;
}

} // namespace

BoundQuery bind(const QueryAst& ast, std::shared_ptr<const FuzzyClassSchema> schema) {
    return detail::QueryBinder(ast, std::move(schema)).run();
}

ResultSet exec_sasn(const BoundQuery& query, const Dataset& data, EvalStats* stats) {
    if (!query.attributes_only())
        throw Error(ErrorKind::UnsupportedQuery,
                    "attribute search requires a condition tree without method predicates");
    return run(query, data, stats);
}

ResultSet exec_smsn(const BoundQuery& query, const Dataset& data, EvalStats* stats) {
    if (!query.single_method())
        throw Error(ErrorKind::UnsupportedQuery,
                    "method search requires a single method predicate");
    return run(query, data, stats);
}

ResultSet execute(const BoundQuery& query, const Dataset& data, EvalStats* stats) {
    if (query.attributes_only()) return exec_sasn(query, data, stats);
    if (query.single_method()) return exec_smsn(query, data, stats);
    // mixed tree: same per-leaf evaluation, methods expand in place
    return run(query, data, stats);
}

Trace explain(const BoundQuery& query, const Dataset& data) {
    Trace trace;

    for (const BoundQuery::PartitionUse& use : query.partitions()) {
        const AttributeSpec& attr =
            query.schema().attributes()[static_cast<std::size_t>(use.attribute_index)];
        PartitionTrace pt;
        pt.attribute = attr.name;
        pt.level = use.level;
        for (const SimilarityClass& cls : use.partition->classes())
            pt.classes.push_back(PartitionClassRow{
                use.partition->label_text(cls),
                scale_to_domain(attr.scale, cls.interval.lower),
                scale_to_domain(attr.scale, cls.interval.upper),
                cls.interval.closed_lower, cls.ordinal});
        for (const FuzzyInterval& gap : use.partition->gaps())
            pt.gaps.emplace_back(scale_to_domain(attr.scale, gap.lower),
                                 scale_to_domain(attr.scale, gap.upper));
        trace.partitions.push_back(std::move(pt));
    }

    for (const FuzzyObject& object : data.objects()) {
        ObjectTrace ot;
        ot.id = object.id;
        TraceSink sink{&ot.leaves};
        ot.matched = eval_node(query.root(), query.schema(), object, nullptr, sink);
        trace.objects.push_back(std::move(ot));
    }
    return trace;
}

std::string trace_to_json(const Trace& trace, int indent) {
    using nlohmann::json;
    json root;
    json partitions = json::array();
    for (const PartitionTrace& pt : trace.partitions) {
        json classes = json::array();
        for (const PartitionClassRow& row : pt.classes)
            classes.push_back({{"label", row.label},
                               {"lower", row.lower},
                               {"upper", row.upper},
                               {"closed_lower", row.closed_lower},
                               {"ordinal", row.ordinal}});
        json gaps = json::array();
        for (const auto& [lo, hi] : pt.gaps)
            gaps.push_back({{"lower", lo}, {"upper", hi}});
        partitions.push_back({{"attribute", pt.attribute},
                              {"level", pt.level},
                              {"classes", std::move(classes)},
                              {"gaps", std::move(gaps)}});
    }
    root["partitions"] = std::move(partitions);

    json objects = json::array();
    for (const ObjectTrace& ot : trace.objects) {
        json leaves = json::array();
        for (const LeafTrace& lt : ot.leaves)
            leaves.push_back({{"attribute", lt.attribute},
                              {"value", lt.value_text},
                              {"located", lt.located_label},
                              {"condition", lt.condition_label},
                              {"outcome", lt.outcome}});
        objects.push_back(
            {{"id", ot.id}, {"matched", ot.matched}, {"leaves", std::move(leaves)}});
    }
    root["objects"] = std::move(objects);
    return root.dump(indent);
}

} // namespace hedgeql
