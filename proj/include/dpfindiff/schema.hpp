#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dpfindiff/csv.hpp"

namespace dpfd {

enum class ColumnKind { Numeric, Categorical };

struct Column {
    std::string name;
    ColumnKind kind = ColumnKind::Categorical;
    std::vector<std::string> vocab; // sorted distinct values; empty for numeric

    std::size_t vocab_index(const std::string& value) const; // throws DataError
};

// Declared typing of the raw table. Columns not mentioned are dropped.
struct SchemaDeclaration {
    std::vector<std::string> numeric;
    std::vector<std::string> categorical;
    std::optional<std::string> label; // must also appear in `categorical`
};

// Feature columns are the encoded ones; the label column conditions the
// model and is filled from the label source at generation time, so it is
// kept outside the feature list and does not count toward d_num/d_cat.
struct TableSchema {
    std::vector<Column> features;  // original header order
    std::optional<Column> label;
    std::size_t label_position = 0; // features preceding the label in the header

    std::size_t d_num() const;
    std::size_t d_cat() const;
    std::size_t num_classes() const { return label ? label->vocab.size() : 0; }

    // Feature + label names in original header order.
    std::vector<std::string> output_header() const;
    const Column& feature(std::size_t slot) const { return features[slot]; }
};

TableSchema fit_schema(const CsvTable& table, const SchemaDeclaration& decl);

void save_schema(const std::string& path, const TableSchema& schema);
TableSchema load_schema(const std::string& path);
std::string format_schema(const TableSchema& schema);
TableSchema parse_schema(const std::string& text);

// Rows parsed against a schema: raw numeric values plus vocab indices.
struct Dataset {
    const TableSchema* schema = nullptr;
    std::size_t n_rows = 0;
    std::vector<double> numeric;       // n_rows x d_num, row-major
    std::vector<std::size_t> cat;      // n_rows x d_cat, row-major
    std::vector<std::size_t> labels;   // n_rows when schema has a label

    double num_at(std::size_t row, std::size_t j) const {
        return numeric[row * schema->d_num() + j];
    }
    std::size_t cat_at(std::size_t row, std::size_t j) const {
        return cat[row * schema->d_cat() + j];
    }
};

Dataset parse_dataset(const CsvTable& table, const TableSchema& schema);

} // namespace dpfd
