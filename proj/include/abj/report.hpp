#pragma once

#include <cstdint>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace abj {

inline constexpr const char* kVersion = "0.1.0";

// 64-bit FNV-1a, printed as 16 hex digits.
inline std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// Shortest round-trip decimal form.
inline std::string fmt_double(double v) {
    char buf[32];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

inline std::vector<double> parse_double_list(const std::string& text, std::size_t expected = 0) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        const auto b = part.find_first_not_of(" \t"), e = part.find_last_not_of(" \t");
        if (b == std::string::npos) throw std::invalid_argument("empty entry in list '" + text + "'");
        part = part.substr(b, e - b + 1);
        std::size_t used = 0;
        double v;
        try {
            v = std::stod(part, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("not a number: '" + part + "'");
        }
        if (used != part.size()) throw std::invalid_argument("not a number: '" + part + "'");
        out.push_back(v);
    }
    if (expected && out.size() != expected)
        throw std::invalid_argument("expected " + std::to_string(expected) + " values in '" + text + "'");
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

// CSV table with a versioned comment line in front of the header row.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void add(std::vector<std::string> row) {
        if (row.size() != columns_.size()) throw std::logic_error("csv row width mismatch");
        rows_.push_back(std::move(row));
    }

    std::string str(const std::string& config_hash) const {
        std::ostringstream os;
        os << "# abj " << kVersion << " config " << config_hash << "\n";
        write_row(os, columns_);
        for (const auto& r : rows_) write_row(os, r);
        return os.str();
    }

private:
    static void write_row(std::ostringstream& os, const std::vector<std::string>& r) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_escape(r[i]);
        os << "\n";
    }
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace abj
