#include "hedgeql/schema.hpp"

#include <algorithm>
#include <unordered_set>

#include <json.hpp>

namespace hedgeql {

using nlohmann::json;

namespace {

std::string line_col(std::string_view bytes, std::size_t byte_offset) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte_offset && i < bytes.size(); ++i) {
        if (bytes[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

json parse_json(std::string_view bytes, std::string_view source) {
    try {
        return json::parse(bytes);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::ParseError,
                    std::string(e.what()) + " (" + line_col(bytes, e.byte) + ")")
            .with_source(std::string(source));
    }
}

[[noreturn]] void fail(ErrorKind kind, std::string_view source, const std::string& path,
                       const std::string& message) {
    throw Error(kind, path.empty() ? message : path + ": " + message)
        .with_source(std::string(source));
}

const json& require_key(const json& obj, const char* key, std::string_view source,
                        const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end())
        fail(ErrorKind::ParseError, source, path, std::string("missing key '") + key + "'");
    return *it;
}

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         std::string_view source, const std::string& path) {
    for (const auto& item : obj.items()) {
        const std::string& key = item.key();
        bool known = false;
        for (const char* a : allowed) known = known || key == a;
        if (!known) fail(ErrorKind::ParseError, source, path, "unknown key '" + key + "'");
    }
}

std::string as_string(const json& v, std::string_view source, const std::string& path) {
    if (!v.is_string()) fail(ErrorKind::ParseError, source, path, "expected a string");
    return v.get<std::string>();
}

double as_number(const json& v, std::string_view source, const std::string& path) {
    if (!v.is_number()) fail(ErrorKind::ParseError, source, path, "expected a number");
    return v.get<double>();
}

const json& as_object(const json& v, std::string_view source, const std::string& path) {
    if (!v.is_object()) fail(ErrorKind::ParseError, source, path, "expected an object");
    return v;
}

const json& as_array(const json& v, std::string_view source, const std::string& path) {
    if (!v.is_array()) fail(ErrorKind::ParseError, source, path, "expected an array");
    return v;
}

std::vector<HedgeSpec> load_hedges(const json& arr, std::string_view source,
                                   const std::string& path) {
    std::vector<HedgeSpec> hedges;
    std::size_t i = 0;
    for (const json& entry : as_array(arr, source, path)) {
        const std::string entry_path = path + "[" + std::to_string(i++) + "]";
        as_object(entry, source, entry_path);
        reject_unknown_keys(entry, {"name", "mu"}, source, entry_path);
        hedges.push_back(HedgeSpec{
            as_string(require_key(entry, "name", source, entry_path), source,
                      entry_path + ".name"),
            as_number(require_key(entry, "mu", source, entry_path), source,
                      entry_path + ".mu")});
    }
    return hedges;
}

} // namespace

FuzzyClassSchema::FuzzyClassSchema(std::string class_name,
                                   std::vector<AttributeSpec> attributes,
                                   std::vector<MethodSpec> methods)
    : class_name_(std::move(class_name)),
      attributes_(std::move(attributes)),
      methods_(std::move(methods)) {}

int FuzzyClassSchema::attribute_index(std::string_view name) const {
    for (std::size_t i = 0; i < attributes_.size(); ++i)
        if (attributes_[i].name == name) return static_cast<int>(i);
    return -1;
}

const AttributeSpec* FuzzyClassSchema::find_attribute(std::string_view name) const {
    const int idx = attribute_index(name);
    return idx < 0 ? nullptr : &attributes_[static_cast<std::size_t>(idx)];
}

const MethodSpec* FuzzyClassSchema::find_method(std::string_view name) const {
    for (const MethodSpec& m : methods_)
        if (m.name == name) return &m;
    return nullptr;
}

FuzzyClassSchema load_schema(std::string_view bytes, std::string_view source_name) {
    const json root = parse_json(bytes, source_name);
    as_object(root, source_name, "");
    reject_unknown_keys(root, {"class", "attributes", "methods"}, source_name, "");

    std::string class_name =
        as_string(require_key(root, "class", source_name, ""), source_name, "class");
    if (class_name.empty())
        fail(ErrorKind::ValidationError, source_name, "class", "class name must be non-empty");

    std::vector<AttributeSpec> attributes;
    const json& attrs = as_array(require_key(root, "attributes", source_name, ""),
                                 source_name, "attributes");
    if (attrs.empty())
        fail(ErrorKind::ValidationError, source_name, "attributes",
             "at least one attribute is required");

    std::size_t ai = 0;
    for (const json& attr : attrs) {
        const std::string path = "attributes[" + std::to_string(ai++) + "]";
        as_object(attr, source_name, path);
        reject_unknown_keys(attr, {"name", "min", "max", "algebra", "synonyms"},
                            source_name, path);

        AttributeSpec spec;
        spec.name = as_string(require_key(attr, "name", source_name, path), source_name,
                              path + ".name");
        spec.scale.min = as_number(require_key(attr, "min", source_name, path), source_name,
                                   path + ".min");
        spec.scale.max = as_number(require_key(attr, "max", source_name, path), source_name,
                                   path + ".max");
        if (!(spec.scale.min < spec.scale.max))
            fail(ErrorKind::ValidationError, source_name, path, "min must be less than max");

        const json& alg = as_object(require_key(attr, "algebra", source_name, path),
                                    source_name, path + ".algebra");
        reject_unknown_keys(
            alg, {"negative", "positive", "fm_neg", "positive_hedges", "negative_hedges"},
            source_name, path + ".algebra");

        HedgeAlgebraConfig cfg;
        cfg.negative_generator = as_string(require_key(alg, "negative", source_name, path),
                                           source_name, path + ".algebra.negative");
        cfg.positive_generator = as_string(require_key(alg, "positive", source_name, path),
                                           source_name, path + ".algebra.positive");
        cfg.fm_negative = as_number(require_key(alg, "fm_neg", source_name, path),
                                    source_name, path + ".algebra.fm_neg");
        cfg.fm_positive = 1.0 - cfg.fm_negative;
        cfg.positive_hedges = load_hedges(require_key(alg, "positive_hedges", source_name, path),
                                          source_name, path + ".algebra.positive_hedges");
        cfg.negative_hedges = load_hedges(require_key(alg, "negative_hedges", source_name, path),
                                          source_name, path + ".algebra.negative_hedges");

        if (auto it = attr.find("synonyms"); it != attr.end()) {
            as_object(*it, source_name, path + ".synonyms");
            for (const auto& [surface, canonical] : it->items())
                cfg.synonyms.emplace(surface,
                                     as_string(canonical, source_name,
                                               path + ".synonyms['" + surface + "']"));
        }

        try {
            spec.algebra = std::make_shared<const ValidatedAlgebra>(validate_config(cfg));
        } catch (const Error& e) {
            throw Error(ErrorKind::ValidationError, path + ".algebra: " + e.message())
                .with_source(std::string(source_name))
                .with_details(e.details());
        }

        if (std::any_of(attributes.begin(), attributes.end(),
                        [&](const AttributeSpec& other) { return other.name == spec.name; }))
            fail(ErrorKind::ValidationError, source_name, path,
                 "duplicate attribute name '" + spec.name + "'");
        attributes.push_back(std::move(spec));
    }

    std::vector<MethodSpec> methods;
    if (auto it = root.find("methods"); it != root.end()) {
        std::size_t mi = 0;
        for (const json& method : as_array(*it, source_name, "methods")) {
            const std::string path = "methods[" + std::to_string(mi++) + "]";
            as_object(method, source_name, path);
            reject_unknown_keys(method, {"name", "deps", "connective"}, source_name, path);

            MethodSpec spec;
            spec.name = as_string(require_key(method, "name", source_name, path), source_name,
                                  path + ".name");
            const json& deps = as_array(require_key(method, "deps", source_name, path),
                                        source_name, path + ".deps");
            if (deps.empty())
                fail(ErrorKind::ValidationError, source_name, path + ".deps",
                     "a method needs at least one dependency");
            for (const json& dep : deps) {
                std::string dep_name = as_string(dep, source_name, path + ".deps");
                if (std::none_of(attributes.begin(), attributes.end(),
                                 [&](const AttributeSpec& a) { return a.name == dep_name; }))
                    fail(ErrorKind::UnknownDependency, source_name, path + ".deps",
                         "method '" + spec.name + "' depends on unknown attribute '" +
                             dep_name + "'");
                spec.dependencies.push_back(std::move(dep_name));
            }
            const std::string conn = normalize_text(
                as_string(require_key(method, "connective", source_name, path), source_name,
                          path + ".connective"));
            if (conn == "and") spec.connective = Connective::And;
            else if (conn == "or") spec.connective = Connective::Or;
            else
                fail(ErrorKind::ParseError, source_name, path + ".connective",
                     "expected \"and\" or \"or\"");

            const bool clashes =
                std::any_of(attributes.begin(), attributes.end(),
                            [&](const AttributeSpec& a) { return a.name == spec.name; }) ||
                std::any_of(methods.begin(), methods.end(),
                            [&](const MethodSpec& m) { return m.name == spec.name; });
            if (clashes)
                fail(ErrorKind::ValidationError, source_name, path,
                     "method name '" + spec.name + "' is already taken");
            methods.push_back(std::move(spec));
        }
    }

    return FuzzyClassSchema(std::move(class_name), std::move(attributes), std::move(methods));
}

Dataset load_dataset(std::string_view bytes, std::shared_ptr<const FuzzyClassSchema> schema,
                     std::string_view source_name) {
    const json root = parse_json(bytes, source_name);
    as_object(root, source_name, "");
    reject_unknown_keys(root, {"class", "objects"}, source_name, "");

    const std::string class_name =
        as_string(require_key(root, "class", source_name, ""), source_name, "class");
    if (class_name != schema->class_name())
        fail(ErrorKind::ValidationError, source_name, "class",
             "dataset class '" + class_name + "' does not match schema class '" +
                 schema->class_name() + "'");

    std::vector<FuzzyObject> objects;
    std::unordered_set<std::string> seen_ids;

    std::size_t oi = 0;
    for (const json& obj : as_array(require_key(root, "objects", source_name, ""),
                                    source_name, "objects")) {
        const std::string path = "objects[" + std::to_string(oi++) + "]";
        as_object(obj, source_name, path);
        reject_unknown_keys(obj, {"id", "values"}, source_name, path);

        FuzzyObject out;
        out.id = as_string(require_key(obj, "id", source_name, path), source_name,
                           path + ".id");
        if (out.id.empty())
            fail(ErrorKind::ValidationError, source_name, path + ".id",
                 "object id must be non-empty");
        if (!seen_ids.insert(out.id).second)
            fail(ErrorKind::DuplicateId, source_name, path + ".id",
                 "duplicate object id '" + out.id + "'");

        const json& values = as_object(require_key(obj, "values", source_name, path),
                                       source_name, path + ".values");
        for (const auto& [key, value] : values.items())
            if (schema->attribute_index(key) < 0)
                fail(ErrorKind::ParseError, source_name, path + ".values",
                     "unknown attribute '" + key + "'");

        out.values.reserve(schema->attributes().size());
        for (const AttributeSpec& attr : schema->attributes()) {
            const std::string vpath = path + ".values." + attr.name;
            auto it = values.find(attr.name);
            if (it == values.end())
                fail(ErrorKind::MissingAttribute, source_name, vpath,
                     "object '" + out.id + "' has no value for attribute '" + attr.name +
                         "'");
            const json& v = *it;
            if (v.is_number()) {
                const double d = v.get<double>();
                if (d < attr.scale.min || d > attr.scale.max)
                    fail(ErrorKind::OutOfDomain, source_name, vpath,
                         "value " + std::to_string(d) + " lies outside [" +
                             std::to_string(attr.scale.min) + ", " +
                             std::to_string(attr.scale.max) + "]");
                out.values.emplace_back(d);
            } else if (v.is_string()) {
                ParsedTerm parsed;
                try {
                    parsed = parse_term(v.get<std::string>(), *attr.algebra);
                } catch (const Error& e) {
                    throw Error(ErrorKind::UnknownTerm, vpath + ": " + e.message())
                        .with_source(std::string(source_name));
                }
                if (std::holds_alternative<BoundaryTerm>(parsed))
                    fail(ErrorKind::UnsupportedValueKind, source_name, vpath,
                         "boundary constants cannot be attribute values");
                out.values.emplace_back(std::get<Term>(std::move(parsed)));
            } else {
                // object references and collections are out of scope
                fail(ErrorKind::UnsupportedValueKind, source_name, vpath,
                     "attribute values must be numbers or linguistic strings");
            }
        }
        objects.push_back(std::move(out));
    }

    return Dataset(std::move(schema), std::move(objects));
}

std::string save_schema(const FuzzyClassSchema& schema) {
    json root;
    root["class"] = schema.class_name();
    json attrs = json::array();
    for (const AttributeSpec& attr : schema.attributes()) {
        const HedgeAlgebraConfig& cfg = attr.algebra->config();
        json hedges_pos = json::array(), hedges_neg = json::array();
        for (const HedgeSpec& h : cfg.positive_hedges)
            hedges_pos.push_back({{"name", h.name}, {"mu", h.mu}});
        for (const HedgeSpec& h : cfg.negative_hedges)
            hedges_neg.push_back({{"name", h.name}, {"mu", h.mu}});
        json a{{"name", attr.name},
               {"min", attr.scale.min},
               {"max", attr.scale.max},
               {"algebra",
                {{"negative", cfg.negative_generator},
                 {"positive", cfg.positive_generator},
                 {"fm_neg", cfg.fm_negative},
                 {"positive_hedges", hedges_pos},
                 {"negative_hedges", hedges_neg}}}};
        if (!cfg.synonyms.empty()) {
            json syn = json::object();
            for (const auto& [k, v] : cfg.synonyms) syn[k] = v;
            a["synonyms"] = syn;
        }
        attrs.push_back(std::move(a));
    }
    root["attributes"] = std::move(attrs);
    if (!schema.methods().empty()) {
        json methods = json::array();
        for (const MethodSpec& m : schema.methods())
            methods.push_back({{"name", m.name},
                               {"deps", m.dependencies},
                               {"connective", m.connective == Connective::And ? "and" : "or"}});
        root["methods"] = std::move(methods);
    }
    return root.dump(2) + "\n";
}

std::string save_dataset(const Dataset& dataset) {
    json root;
    root["class"] = dataset.schema().class_name();
    json objects = json::array();
    for (const FuzzyObject& obj : dataset.objects()) {
        json values = json::object();
        const auto attrs = dataset.schema().attributes();
        for (std::size_t i = 0; i < attrs.size(); ++i) {
            const AttrValue& v = obj.values[i];
            if (const auto* crisp = std::get_if<double>(&v))
                values[attrs[i].name] = *crisp;
            else
                values[attrs[i].name] = term_text(*attrs[i].algebra, std::get<Term>(v));
        }
        objects.push_back({{"id", obj.id}, {"values", std::move(values)}});
    }
    root["objects"] = std::move(objects);
    return root.dump(2) + "\n";
}

std::string resolve_synonym(const FuzzyClassSchema& schema, std::string_view attribute,
                            std::string_view text) {
    const AttributeSpec* attr = schema.find_attribute(attribute);
    if (attr == nullptr)
        throw Error(ErrorKind::UnknownAttribute,
                    "unknown attribute '" + std::string(attribute) + "'");
    if (const std::string* canonical = attr->algebra->lookup_synonym(normalize_text(text)))
        return *canonical;
    return std::string(text);
}

} // namespace hedgeql
