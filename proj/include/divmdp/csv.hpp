#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace divmdp::csv {

struct LabeledCount {
    std::string label;
    std::uint64_t count;
};

struct LabeledWeight {
    std::string label;
    double weight;
};

// "label,count" rows with an optional header; counts must be nonnegative
// integers. Parse errors cite the 1-based line number; duplicate labels are
// rejected. Blank lines are skipped.
std::vector<LabeledCount> read_counts(std::istream& in);
std::vector<LabeledCount> read_counts_file(const std::string& path);

// "label,weight" rows, same conventions, weights nonnegative reals.
std::vector<LabeledWeight> read_weights(std::istream& in);
std::vector<LabeledWeight> read_weights_file(const std::string& path);

// Generic re-reader for the tool's own CSV emissions: header fields and
// string-valued cells, comma-separated.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};
Table read_table(std::istream& in);

// 17 significant digits, losslessly round-trippable.
std::string format_double(double x);

}  // namespace divmdp::csv
