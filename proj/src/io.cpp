#include "stochcl/io.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace stochcl {

std::string library_version() { return STOCHCL_VERSION; }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string csv_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

CsvTable::CsvTable(std::vector<std::string> columns, std::string config_hash)
    : columns_(std::move(columns)), hash_(std::move(config_hash)) {}

void CsvTable::add_row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_.size()) throw std::invalid_argument("CSV row width does not match the header");
    rows_.push_back(cells);
}

void CsvTable::add_numbers(const std::vector<double>& cells) {
    std::vector<std::string> s;
    for (double x : cells) s.push_back(csv_number(x));
    add_row(s);
}

std::string CsvTable::str() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells, const std::string& a, const std::string& b) {
        for (const auto& c : cells) out += csv_field(c) + ",";
        out += csv_field(a) + "," + csv_field(b) + "\r\n";
    };
    line(columns_, "config_hash", "version");
    for (const auto& r : rows_) line(r, hash_, library_version());
    return out;
}

void CsvTable::write(const std::string& filename) const {
    std::ofstream f(filename, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + filename);
    f << str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string cur;
    bool quoted = false, any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
            continue;
        }
        if (c == '"') {
            quoted = true;
            any = true;
        } else if (c == ',') {
            row.push_back(cur);
            cur.clear();
            any = true;
        } else if (c == '\r' || c == '\n') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            if (any || !cur.empty()) {
                row.push_back(cur);
                rows.push_back(row);
            }
            row.clear();
            cur.clear();
            any = false;
        } else {
            cur += c;
            any = true;
        }
    }
    if (quoted) throw std::runtime_error("unterminated quoted CSV field");
    if (any || !cur.empty()) {
        row.push_back(cur);
        rows.push_back(row);
    }
    return rows;
}

namespace {

constexpr char kMagic[8] = {'S', 'C', 'L', 'S', 'N', 'A', 'P', '1'};

void put_string(std::ofstream& f, const std::string& s) {
    const std::uint64_t n = s.size();
    f.write(reinterpret_cast<const char*>(&n), 8);
    f.write(s.data(), static_cast<std::streamsize>(n));
}

std::string get_string(std::ifstream& f) {
    std::uint64_t n = 0;
    f.read(reinterpret_cast<char*>(&n), 8);
    if (!f || n > 4096) throw std::runtime_error("corrupt snapshot header");
    std::string s(n, '\0');
    f.read(s.data(), static_cast<std::streamsize>(n));
    return s;
}

}  // namespace

void write_snapshot(const GridField& u, const std::string& config_hash, const std::string& filename) {
    std::ofstream f(filename, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + filename);
    f.write(kMagic, 8);
    put_string(f, library_version());
    put_string(f, config_hash);
    const std::uint64_t n = u.grid.n;
    f.write(reinterpret_cast<const char*>(&n), 8);
    f.write(reinterpret_cast<const char*>(&u.grid.L), 8);
    f.write(reinterpret_cast<const char*>(&u.t), 8);
    f.write(reinterpret_cast<const char*>(u.values.data()), static_cast<std::streamsize>(n * sizeof(double)));
}

Snapshot read_snapshot(const std::string& filename) {
    std::ifstream f(filename, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + filename);
    char magic[8];
    f.read(magic, 8);
    if (!f || std::memcmp(magic, kMagic, 8) != 0) throw std::runtime_error("not a snapshot file: " + filename);
    Snapshot s;
    s.version = get_string(f);
    s.config_hash = get_string(f);
    std::uint64_t n = 0;
    double L = 0, t = 0;
    f.read(reinterpret_cast<char*>(&n), 8);
    f.read(reinterpret_cast<char*>(&L), 8);
    f.read(reinterpret_cast<char*>(&t), 8);
    if (!f || n > (1ULL << 28)) throw std::runtime_error("corrupt snapshot header");
    std::vector<double> v(n);
    f.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
    if (!f) throw std::runtime_error("truncated snapshot " + filename);
    s.field = GridField(Grid(n, L), std::move(v), t);
    return s;
}

void ensure_directory(const std::string& dir) {
    if (dir.empty()) return;
    std::filesystem::create_directories(dir);
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

}  // namespace stochcl
