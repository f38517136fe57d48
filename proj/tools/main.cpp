// hedgeql command-line front end: run queries, dump partitions, locate
// values, validate files, or drive an interactive session.
//
// Exit codes: 0 success (an empty result is a success), 1 usage error,
// 2 parse or validation error.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "hedgeql/format.hpp"
#include "hedgeql/query.hpp"

namespace {

using namespace hedgeql;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::ParseError, "cannot open file").with_source(path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::shared_ptr<const FuzzyClassSchema> load_schema_file(const std::string& path) {
    return std::make_shared<const FuzzyClassSchema>(load_schema(read_file(path), path));
}

Dataset load_dataset_file(const std::string& path,
                          std::shared_ptr<const FuzzyClassSchema> schema) {
    return load_dataset(read_file(path), std::move(schema), path);
}

// ---- table rendering -------------------------------------------------------

void print_table(std::ostream& out, const std::vector<std::vector<std::string>>& rows) {
    if (rows.empty()) return;
    std::vector<std::size_t> widths;
    for (const auto& row : rows) {
        if (widths.size() < row.size()) widths.resize(row.size(), 0);
        for (std::size_t i = 0; i < row.size(); ++i)
            widths[i] = std::max(widths[i], row[i].size());
    }
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << row[i];
            if (i + 1 < row.size())
                out << std::string(widths[i] - row[i].size() + 2, ' ');
        }
        out << '\n';
    }
}

std::string value_text(const AttributeSpec& attr, const AttrValue& value) {
    if (const auto* crisp = std::get_if<double>(&value)) return format_number(*crisp);
    return term_text(*attr.algebra, std::get<Term>(value));
}

// ---- query -----------------------------------------------------------------

void print_result_table(std::ostream& out, const BoundQuery& query, const Dataset& data,
                        const ResultSet& result) {
    const auto& schema = query.schema();
    std::vector<int> columns;
    if (query.ast().select_all) {
        for (std::size_t i = 0; i < schema.attributes().size(); ++i)
            columns.push_back(static_cast<int>(i));
    } else {
        for (const std::string& name : query.ast().projection)
            columns.push_back(schema.attribute_index(name));
    }

    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header{"id"};
    for (int c : columns) header.push_back(schema.attributes()[c].name);
    rows.push_back(std::move(header));

    for (const FuzzyObject& object : data.objects()) {
        if (std::find(result.ids.begin(), result.ids.end(), object.id) == result.ids.end())
            continue;
        std::vector<std::string> row{object.id};
        for (int c : columns)
            row.push_back(value_text(schema.attributes()[c],
                                     object.values[static_cast<std::size_t>(c)]));
        rows.push_back(std::move(row));
    }
    print_table(out, rows);
    out << "(" << result.ids.size() << " of " << data.size() << " objects matched)\n";
}

void print_trace_text(std::ostream& out, const Trace& trace) {
    out << "explain:\n";
    for (const PartitionTrace& pt : trace.partitions) {
        out << "  partition " << pt.attribute << " level " << pt.level << ":";
        for (const PartitionClassRow& row : pt.classes) {
            out << " " << row.label << (row.closed_lower ? " [" : " (")
                << format_number(row.lower) << ", " << format_number(row.upper) << "]";
        }
        if (!pt.gaps.empty()) {
            out << " | gaps:";
            for (const auto& [lo, hi] : pt.gaps)
                out << " (" << format_number(lo) << ", " << format_number(hi) << "]";
        }
        out << '\n';
    }
    for (const ObjectTrace& ot : trace.objects) {
        out << "  " << ot.id << (ot.matched ? "  MATCH" : "  no match") << '\n';
        for (const LeafTrace& lt : ot.leaves)
            out << "    " << lt.attribute << " = " << lt.value_text << " -> "
                << lt.located_label << " vs " << lt.condition_label << " => "
                << (lt.outcome ? "true" : "false") << '\n';
    }
}

int cmd_query(const std::string& schema_path, const std::string& data_path,
              const std::string& query_text, const std::string& format, bool explain_flag) {
    auto schema = load_schema_file(schema_path);
    Dataset data = load_dataset_file(data_path, schema);

    QueryAst ast;
    try {
        ast = parse_query(query_text);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        if (e.position() && *e.position() <= query_text.size()) {
            std::cerr << "  " << query_text << '\n'
                      << "  " << std::string(*e.position(), ' ') << "^\n";
        }
        return kExitData;
    }

    BoundQuery bound = hedgeql::bind(ast, schema);
    for (const std::string& warning : bound.warnings())
        std::cerr << "warning: " << warning << '\n';

    ResultSet result = execute(bound, data);

    if (format == "json") {
        nlohmann::json out;
        out["query"] = query_text;
        out["matched"] = result.ids;
        if (explain_flag)
            out["explain"] = nlohmann::json::parse(trace_to_json(explain(bound, data)));
        std::cout << out.dump(2) << '\n';
    } else {
        print_result_table(std::cout, bound, data, result);
        if (explain_flag) print_trace_text(std::cout, explain(bound, data));
    }
    return kExitOk;
}

// ---- partition / locate ------------------------------------------------------

std::vector<std::vector<std::string>> partition_rows(const LevelPartition& part,
                                                     const DomainScale& scale) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"label", "lower", "upper", "ordinal"});
    auto classes = part.classes();
    auto gaps = part.gaps();
    std::size_t ci = 0, gi = 0;
    // interleave classes and gaps in ascending order
    while (ci < classes.size() || gi < gaps.size()) {
        const bool take_class =
            gi >= gaps.size() ||
            (ci < classes.size() && classes[ci].interval.lower <= gaps[gi].lower);
        if (take_class) {
            const SimilarityClass& cls = classes[ci++];
            rows.push_back({part.label_text(cls),
                            format_number(scale_to_domain(scale, cls.interval.lower)),
                            format_number(scale_to_domain(scale, cls.interval.upper)),
                            std::to_string(cls.ordinal)});
        } else {
            const FuzzyInterval& gap = gaps[gi++];
            rows.push_back({"gap", format_number(scale_to_domain(scale, gap.lower)),
                            format_number(scale_to_domain(scale, gap.upper)), "-"});
        }
    }
    return rows;
}

nlohmann::json partition_json(const LevelPartition& part, const AttributeSpec& attr,
                              int level) {
    nlohmann::json out;
    out["attribute"] = attr.name;
    out["level"] = level;
    nlohmann::json classes = nlohmann::json::array();
    for (const SimilarityClass& cls : part.classes())
        classes.push_back({{"label", part.label_text(cls)},
                           {"lower", scale_to_domain(attr.scale, cls.interval.lower)},
                           {"upper", scale_to_domain(attr.scale, cls.interval.upper)},
                           {"closed_lower", cls.interval.closed_lower},
                           {"ordinal", cls.ordinal}});
    out["classes"] = std::move(classes);
    nlohmann::json gaps = nlohmann::json::array();
    for (const FuzzyInterval& gap : part.gaps())
        gaps.push_back({{"lower", scale_to_domain(attr.scale, gap.lower)},
                        {"upper", scale_to_domain(attr.scale, gap.upper)}});
    out["gaps"] = std::move(gaps);
    return out;
}

const AttributeSpec& require_attribute(const FuzzyClassSchema& schema,
                                       const std::string& name) {
    const AttributeSpec* attr = schema.find_attribute(name);
    if (attr == nullptr)
        throw Error(ErrorKind::UnknownAttribute, "unknown attribute '" + name + "'");
    return *attr;
}

int cmd_partition(const std::string& schema_path, const std::string& attr_name, int level,
                  const std::string& format) {
    auto schema = load_schema_file(schema_path);
    const AttributeSpec& attr = require_attribute(*schema, attr_name);
    LevelPartition part = build_partition(attr.algebra, level);

    if (format == "json")
        std::cout << partition_json(part, attr, level).dump(2) << '\n';
    else
        print_table(std::cout, partition_rows(part, attr.scale));
    return kExitOk;
}

int cmd_locate(const std::string& schema_path, const std::string& attr_name, int level,
               const std::string& input) {
    auto schema = load_schema_file(schema_path);
    const AttributeSpec& attr = require_attribute(*schema, attr_name);
    LevelPartition part = build_partition(attr.algebra, level);

    double unit = 0.0;
    bool crisp = false;
    try {
        std::size_t consumed = 0;
        const double parsed = std::stod(input, &consumed);
        if (consumed == input.size()) {
            unit = unscale(attr.scale, parsed); // OutOfDomain propagates
            crisp = true;
        }
    } catch (const std::invalid_argument&) {
    } catch (const std::out_of_range&) {
    }

    const SimilarityClass* located = nullptr;
    if (crisp) {
        located = part.locate_crisp(unit);
    } else {
        ParsedTerm parsed = parse_term(input, *attr.algebra);
        if (std::holds_alternative<BoundaryTerm>(parsed))
            unit = representative_value(*attr.algebra, parsed);
        else {
            const Term& term = std::get<Term>(parsed);
            located = part.neighborhood_of_term(term);
            unit = representative_value(*attr.algebra, term);
        }
        if (located == nullptr) located = part.locate_crisp(unit);
    }

    if (located != nullptr) {
        std::cout << part.label_text(*located) << " "
                  << format_interval(located->interval, &attr.scale) << '\n';
    } else if (const FuzzyInterval* gap = part.gap_containing(unit)) {
        std::cout << "gap " << format_interval(*gap, &attr.scale) << '\n';
    } else {
        std::cout << "gap\n";
    }
    return kExitOk;
}

// ---- validate -----------------------------------------------------------------

int cmd_validate(const std::string& schema_path, const std::string& data_path) {
    auto schema = load_schema_file(schema_path);
    std::cout << "schema OK: class " << schema->class_name() << ", "
              << schema->attributes().size() << " attribute(s), "
              << schema->methods().size() << " method(s)\n";
    if (!data_path.empty()) {
        Dataset data = load_dataset_file(data_path, schema);
        std::cout << "data OK: " << data.size() << " object(s)\n";
    }
    return kExitOk;
}

// ---- repl ----------------------------------------------------------------------

int cmd_repl(const std::string& schema_path, const std::string& data_path) {
    auto schema = load_schema_file(schema_path);
    Dataset data = load_dataset_file(data_path, schema);
    bool explain_on = false;
    const bool interactive = isatty(fileno(stdin)) != 0;

    std::string line;
    while (true) {
        if (interactive) std::cout << "hedgeql> " << std::flush;
        if (!std::getline(std::cin, line)) break;
        const std::string trimmed = [&] {
            std::size_t b = line.find_first_not_of(" \t\r");
            std::size_t e = line.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : line.substr(b, e - b + 1);
        }();
        if (trimmed.empty()) continue;

        try {
            if (trimmed[0] == '.') {
                std::istringstream meta(trimmed);
                std::string cmd;
                meta >> cmd;
                if (cmd == ".quit") break;
                if (cmd == ".explain") {
                    std::string mode;
                    meta >> mode;
                    if (mode == "on") explain_on = true;
                    else if (mode == "off") explain_on = false;
                    else { std::cout << "error: usage: .explain on|off\n"; continue; }
                    std::cout << "explain " << (explain_on ? "on" : "off") << '\n';
                } else if (cmd == ".partition") {
                    std::string attr_name;
                    int level = 0;
                    if (!(meta >> attr_name >> level)) {
                        std::cout << "error: usage: .partition <attribute> <level>\n";
                        continue;
                    }
                    const AttributeSpec& attr = require_attribute(*schema, attr_name);
                    LevelPartition part = build_partition(attr.algebra, level);
                    print_table(std::cout, partition_rows(part, attr.scale));
                } else {
                    std::cout << "error: unknown meta-command '" << cmd
                              << "' (.partition, .explain, .quit)\n";
                }
                continue;
            }

            QueryAst ast = parse_query(trimmed);
            BoundQuery bound = hedgeql::bind(ast, schema);
            for (const std::string& warning : bound.warnings())
                std::cout << "warning: " << warning << '\n';
            ResultSet result = execute(bound, data);
            print_result_table(std::cout, bound, data, result);
            if (explain_on) print_trace_text(std::cout, explain(bound, data));
        } catch (const Error& e) {
            std::cout << "error: " << e.what() << '\n';
        }
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hedgeql - fuzzy queries over linguistic attribute domains"};
    app.require_subcommand(1);

    std::string schema_path, data_path, query_text, query_file, format = "table";
    std::string attr_name, locate_input;
    int level = 1;
    bool explain_flag = false;

    auto add_format = [&](CLI::App* cmd) {
        cmd->add_option("--format", format, "output format")
            ->check(CLI::IsMember({"table", "json"}));
    };

    CLI::App* query = app.add_subcommand("query", "run a query against a dataset");
    query->add_option("--schema", schema_path, "schema file")->required();
    query->add_option("--data", data_path, "dataset file")->required();
    CLI::Option* q_opt = query->add_option("--q", query_text, "query text");
    CLI::Option* qf_opt = query->add_option("--query-file", query_file, "file with the query text");
    q_opt->excludes(qf_opt);
    add_format(query);
    query->add_flag("--explain", explain_flag, "append a per-object evaluation trace");

    CLI::App* repl = app.add_subcommand("repl", "interactive query session");
    repl->add_option("--schema", schema_path, "schema file")->required();
    repl->add_option("--data", data_path, "dataset file")->required();

    CLI::App* partition = app.add_subcommand("partition", "print a level-k partition");
    partition->add_option("--schema", schema_path, "schema file")->required();
    partition->add_option("--attr", attr_name, "attribute name")->required();
    partition->add_option("--level", level, "similarity level")->required();
    add_format(partition);

    CLI::App* locate = app.add_subcommand("locate", "locate a value or term in a partition");
    locate->add_option("--schema", schema_path, "schema file")->required();
    locate->add_option("--attr", attr_name, "attribute name")->required();
    locate->add_option("--level", level, "similarity level")->required();
    locate->add_option("value", locate_input, "crisp number or quoted term")->required();

    CLI::App* validate = app.add_subcommand("validate", "validate schema and dataset files");
    validate->add_option("--schema", schema_path, "schema file")->required();
    validate->add_option("--data", data_path, "dataset file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (query->parsed()) {
            if (query_text.empty() && query_file.empty()) {
                std::cerr << "error: one of --q or --query-file is required\n";
                return kExitUsage;
            }
            if (!query_file.empty()) query_text = read_file(query_file);
            return cmd_query(schema_path, data_path, query_text, format, explain_flag);
        }
        if (repl->parsed()) return cmd_repl(schema_path, data_path);
        if (partition->parsed()) return cmd_partition(schema_path, attr_name, level, format);
        if (locate->parsed()) return cmd_locate(schema_path, attr_name, level, locate_input);
        if (validate->parsed()) return cmd_validate(schema_path, data_path);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}
