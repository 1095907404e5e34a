#pragma once

#include <string>
#include <vector>

#include "stochcl/grid.hpp"

namespace stochcl {

std::string library_version();

// RFC-4180 field quoting: fields containing a comma, quote, CR or LF are quoted, quotes doubled.
std::string csv_field(const std::string& s);
std::string csv_number(double x);

// CSV table whose every row ends with config_hash and version columns.
class CsvTable {
public:
    CsvTable(std::vector<std::string> columns, std::string config_hash);
    void add_row(const std::vector<std::string>& cells);
    // Convenience for all-numeric rows.
    void add_numbers(const std::vector<double>& cells);
    std::string str() const;  // CRLF line endings
    void write(const std::string& filename) const;
    std::size_t rows() const { return rows_.size(); }

private:
    std::vector<std::string> columns_;
    std::string hash_;
    std::vector<std::vector<std::string>> rows_;
};

// Parses RFC-4180 text back into rows (header included).
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

// Binary snapshot: magic, version, hash, n, L, t, then n doubles.
void write_snapshot(const GridField& u, const std::string& config_hash, const std::string& filename);
struct Snapshot {
    GridField field;
    std::string config_hash;
    std::string version;
};
Snapshot read_snapshot(const std::string& filename);

// Creates the directory and its parents if needed.
void ensure_directory(const std::string& dir);
std::string join_path(const std::string& dir, const std::string& name);

}  // namespace stochcl
