#include "dpfindiff/schema.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "dpfindiff/errors.hpp"

namespace dpfd {

namespace {

double parse_numeric_cell(const std::string& cell, const std::string& column) {
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (end[-1] == ' ' || end[-1] == '\t')) --end;
    double value = 0.0;
    auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc() || res.ptr != end || begin == end) {
        throw DataError("column '" + column + "': non-numeric value '" + cell + "'");
    }
    return value;
}

} // namespace

std::size_t Column::vocab_index(const std::string& value) const {
    auto it = std::lower_bound(vocab.begin(), vocab.end(), value);
    if (it == vocab.end() || *it != value) {
        throw DataError("column '" + name + "': unknown category '" + value + "'");
    }
    return static_cast<std::size_t>(it - vocab.begin());
}

std::size_t TableSchema::d_num() const {
    std::size_t n = 0;
    for (const auto& c : features) n += c.kind == ColumnKind::Numeric ? 1 : 0;
    return n;
}

std::size_t TableSchema::d_cat() const {
    std::size_t n = 0;
    for (const auto& c : features) n += c.kind == ColumnKind::Categorical ? 1 : 0;
    return n;
}

std::vector<std::string> TableSchema::output_header() const {
    std::vector<std::string> names;
    names.reserve(features.size() + (label ? 1 : 0));
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (label && i == label_position) names.push_back(label->name);
        names.push_back(features[i].name);
    }
    if (label && label_position == features.size()) names.push_back(label->name);
    return names;
}

TableSchema fit_schema(const CsvTable& table, const SchemaDeclaration& decl) {
    if (table.rows.empty()) {
        throw DataError("fit_schema: table has no data rows");
    }

    std::unordered_map<std::string, ColumnKind> kinds;
    for (const auto& name : decl.numeric) {
        if (!kinds.emplace(name, ColumnKind::Numeric).second) {
            throw DataError("fit_schema: column '" + name + "' declared twice");
        }
    }
    for (const auto& name : decl.categorical) {
        if (!kinds.emplace(name, ColumnKind::Categorical).second) {
            throw DataError("fit_schema: column '" + name + "' declared twice");
        }
    }
    std::unordered_set<std::string> header_names(table.header.begin(), table.header.end());
    if (header_names.size() != table.header.size()) {
        throw DataError("fit_schema: duplicate column names in header");
    }
    for (const auto& [name, kind] : kinds) {
        (void)kind;
        if (!header_names.count(name)) {
            throw DataError("fit_schema: declared column '" + name + "' not in table");
        }
    }
    if (decl.label) {
        auto it = kinds.find(*decl.label);
        if (it == kinds.end() || it->second != ColumnKind::Categorical) {
            throw DataError("fit_schema: label column '" + *decl.label +
                            "' must be declared categorical");
        }
    }

    TableSchema schema;
    for (std::size_t col = 0; col < table.header.size(); ++col) {
        const std::string& name = table.header[col];
        auto it = kinds.find(name);
        if (it == kinds.end()) continue; // undeclared columns are dropped

        Column column;
        column.name = name;
        column.kind = it->second;
        if (column.kind == ColumnKind::Categorical) {
            std::set<std::string> values;
            for (const auto& row : table.rows) values.insert(row[col]);
            column.vocab.assign(values.begin(), values.end());
        } else {
            for (const auto& row : table.rows) {
                parse_numeric_cell(row[col], name); // validation only
            }
        }

        if (decl.label && name == *decl.label) {
            schema.label_position = schema.features.size();
            schema.label = std::move(column);
        } else {
            schema.features.push_back(std::move(column));
        }
    }
    return schema;
}

namespace {

void format_column(std::ostringstream& os, const Column& c) {
    os << "name = " << c.name << '\n';
    os << "kind = " << (c.kind == ColumnKind::Numeric ? "numeric" : "categorical") << '\n';
    for (const auto& v : c.vocab) os << "vocab = " << v << '\n';
}

struct LineReader {
    std::istringstream is;
    std::string line;
    bool next() { return static_cast<bool>(std::getline(is, line)); }
};

// Splits "key = value"; the value keeps everything after the first " = ".
bool key_value(const std::string& line, std::string& key, std::string& value) {
    const auto pos = line.find(" = ");
    if (pos == std::string::npos) return false;
    key = line.substr(0, pos);
    value = line.substr(pos + 3);
    return true;
}

} // namespace

std::string format_schema(const TableSchema& schema) {
    std::ostringstream os;
    os << "dpfindiff-schema v1\n";
    for (const auto& c : schema.features) {
        os << "begin column\n";
        format_column(os, c);
        os << "end column\n";
    }
    if (schema.label) {
        os << "begin label\n";
        os << "position = " << schema.label_position << '\n';
        format_column(os, *schema.label);
        os << "end label\n";
    }
    return os.str();
}

TableSchema parse_schema(const std::string& text) {
    LineReader reader;
    reader.is.str(text);
    if (!reader.next() || reader.line != "dpfindiff-schema v1") {
        throw DataError("schema: bad or missing header line");
    }
    TableSchema schema;
    while (reader.next()) {
        if (reader.line.empty()) continue;
        const bool is_label = reader.line == "begin label";
        if (!is_label && reader.line != "begin column") {
            throw DataError("schema: unexpected line '" + reader.line + "'");
        }
        Column c;
        std::size_t position = 0;
        while (reader.next() && reader.line != "end column" && reader.line != "end label") {
            std::string key, value;
            if (!key_value(reader.line, key, value)) {
                throw DataError("schema: malformed line '" + reader.line + "'");
            }
            if (key == "name") {
                c.name = value;
            } else if (key == "kind") {
                if (value == "numeric") c.kind = ColumnKind::Numeric;
                else if (value == "categorical") c.kind = ColumnKind::Categorical;
                else throw DataError("schema: unknown kind '" + value + "'");
            } else if (key == "vocab") {
                c.vocab.push_back(value);
            } else if (key == "position") {
                position = std::stoul(value);
            } else {
                throw DataError("schema: unknown key '" + key + "'");
            }
        }
        if (is_label) {
            schema.label = std::move(c);
            schema.label_position = position;
        } else {
            schema.features.push_back(std::move(c));
        }
    }
    for (const auto& c : schema.features) {
        if (c.kind == ColumnKind::Categorical && c.vocab.empty()) {
            throw DataError("schema: categorical column '" + c.name + "' has empty vocab");
        }
    }
    return schema;
}

void save_schema(const std::string& path, const TableSchema& schema) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("schema: cannot write '" + path + "'");
    out << format_schema(schema);
}

TableSchema load_schema(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("schema: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_schema(buf.str());
}

Dataset parse_dataset(const CsvTable& table, const TableSchema& schema) {
    Dataset ds;
    ds.schema = &schema;
    ds.n_rows = table.rows.size();

    const std::size_t d_num = schema.d_num();
    const std::size_t d_cat = schema.d_cat();
    ds.numeric.reserve(ds.n_rows * d_num);
    ds.cat.reserve(ds.n_rows * d_cat);

    std::vector<std::size_t> feature_cols;
    feature_cols.reserve(schema.features.size());
    for (const auto& c : schema.features) feature_cols.push_back(table.column_index(c.name));
    std::size_t label_col = 0;
    if (schema.label) {
        label_col = table.column_index(schema.label->name);
        ds.labels.reserve(ds.n_rows);
    }

    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < schema.features.size(); ++i) {
            const Column& c = schema.features[i];
            const std::string& cell = row[feature_cols[i]];
            if (c.kind == ColumnKind::Numeric) {
                ds.numeric.push_back(parse_numeric_cell(cell, c.name));
            } else {
                ds.cat.push_back(c.vocab_index(cell));
            }
        }
        if (schema.label) {
            ds.labels.push_back(schema.label->vocab_index(row[label_col]));
        }
    }
    return ds;
}

} // namespace dpfd
