#include "divmdp/csv.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <stdexcept>
#include <unordered_set>

namespace divmdp::csv {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": " + what);
}

bool parse_u64(const std::string& s, std::uint64_t& out) {
    if (s.empty() || s[0] == '+' || s[0] == '-') return false;
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end;
}

bool parse_f64(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end;
}

bool looks_like_header_field(const std::string& s) {
    for (char c : s) {
        if (std::isalpha(static_cast<unsigned char>(c))) return true;
    }
    return false;
}

// Shared label,value scanner; Value parsing + semantics differ per caller.
template <typename Row, typename ParseValue>
std::vector<Row> read_labeled(std::istream& in, const char* value_name,
                              ParseValue parse_value) {
    std::vector<Row> rows;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    bool first_content_line = true;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty()) continue;
        const std::size_t comma = t.find(',');
        if (comma == std::string::npos)
            fail(line_no, "expected 'label," + std::string(value_name) + "'");
        const std::string label = trim(t.substr(0, comma));
        const std::string value = trim(t.substr(comma + 1));
        if (label.empty()) fail(line_no, "empty label");
        Row row;
        row.label = label;
        if (!parse_value(value, row)) {
            // a leading header row has a word in the value column; a bad
            // number is a data error even on line 1
            if (first_content_line && looks_like_header_field(value)) {
                first_content_line = false;
                continue;
            }
            fail(line_no, "cannot parse " + std::string(value_name) + " '" + value + "'");
        }
        first_content_line = false;
        if (!seen.insert(label).second) fail(line_no, "duplicate label '" + label + "'");
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

std::vector<LabeledCount> read_counts(std::istream& in) {
    return read_labeled<LabeledCount>(
        in, "count", [](const std::string& v, LabeledCount& row) {
            return parse_u64(v, row.count);
        });
}

std::vector<LabeledWeight> read_weights(std::istream& in) {
    return read_labeled<LabeledWeight>(
        in, "weight", [](const std::string& v, LabeledWeight& row) {
            return parse_f64(v, row.weight) && row.weight >= 0.0;
        });
}

namespace {
std::ifstream open_or_throw(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open file: " + path);
    return f;
}
}  // namespace

std::vector<LabeledCount> read_counts_file(const std::string& path) {
    auto f = open_or_throw(path);
    try {
        return read_counts(f);
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

std::vector<LabeledWeight> read_weights_file(const std::string& path) {
    auto f = open_or_throw(path);
    try {
        return read_weights(f);
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

Table read_table(std::istream& in) {
    Table table;
    std::string line;
    bool first = true;
    auto split = [](const std::string& s) {
        std::vector<std::string> fields;
        std::size_t pos = 0;
        for (;;) {
            const std::size_t comma = s.find(',', pos);
            if (comma == std::string::npos) {
                fields.push_back(trim(s.substr(pos)));
                return fields;
            }
            fields.push_back(trim(s.substr(pos, comma - pos)));
            pos = comma + 1;
        }
    };
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (first) {
            table.header = split(t);
            first = false;
        } else {
            table.rows.push_back(split(t));
        }
    }
    return table;
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace divmdp::csv
