#pragma once

// The fuzzy object model: one class whose attributes carry a crisp real
// domain plus a hedge algebra, derived methods that combine attribute
// neighborhoods with a connective, and datasets of objects whose values
// are crisp numbers or linguistic terms.  Everything is immutable after
// loading.

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hedgeql/algebra.hpp"

namespace hedgeql {

struct AttributeSpec {
    std::string name;
    DomainScale scale;
    std::shared_ptr<const ValidatedAlgebra> algebra;
};

enum class Connective { And, Or };

/// A derived method carries no numeric body: matching combines the
/// dependency attributes' neighborhoods with the connective.
struct MethodSpec {
    std::string name;
    std::vector<std::string> dependencies;
    Connective connective = Connective::And;
};

class FuzzyClassSchema {
public:
    FuzzyClassSchema(std::string class_name, std::vector<AttributeSpec> attributes,
                     std::vector<MethodSpec> methods);

    const std::string& class_name() const { return class_name_; }
    std::span<const AttributeSpec> attributes() const { return attributes_; }
    std::span<const MethodSpec> methods() const { return methods_; }

    /// Index into attributes(), or -1.
    int attribute_index(std::string_view name) const;
    const AttributeSpec* find_attribute(std::string_view name) const;
    const MethodSpec* find_method(std::string_view name) const;

private:
    std::string class_name_;
    std::vector<AttributeSpec> attributes_;
    std::vector<MethodSpec> methods_;
};

/// Values in schema attribute order; crisp values in domain units.
struct FuzzyObject {
    std::string id;
    std::vector<AttrValue> values;
};

class Dataset {
public:
    Dataset(std::shared_ptr<const FuzzyClassSchema> schema, std::vector<FuzzyObject> objects)
        : schema_(std::move(schema)), objects_(std::move(objects)) {}

    const FuzzyClassSchema& schema() const { return *schema_; }
    std::shared_ptr<const FuzzyClassSchema> schema_ptr() const { return schema_; }
    std::span<const FuzzyObject> objects() const { return objects_; }
    std::size_t size() const { return objects_.size(); }

private:
    std::shared_ptr<const FuzzyClassSchema> schema_;
    std::vector<FuzzyObject> objects_;
};

/// Parses and validates a schema file.  Unknown keys are rejected;
/// errors carry the source name and a JSON path.
FuzzyClassSchema load_schema(std::string_view bytes, std::string_view source_name = "<schema>");

/// Parses a dataset file against its schema: every attribute exactly
/// once, crisp values inside the attribute scale, linguistic values
/// resolved through the attribute's synonyms and hedges.
Dataset load_dataset(std::string_view bytes, std::shared_ptr<const FuzzyClassSchema> schema,
                     std::string_view source_name = "<data>");

std::string save_schema(const FuzzyClassSchema& schema);
std::string save_dataset(const Dataset& dataset);

/// Synonym lookup in the attribute's algebra (case-insensitive);
/// identity when no entry exists.
std::string resolve_synonym(const FuzzyClassSchema& schema, std::string_view attribute,
                            std::string_view text);

} // namespace hedgeql
