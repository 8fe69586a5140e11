#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace divmdp {

// Per-letter counts of an i.i.d. sample. Letters are positive integer
// indices; entries are sorted by letter, counts are positive and sum to n.
struct EmpiricalSample {
    std::uint64_t n = 0;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> counts;

    // Sorts by letter, merges duplicates, drops zero counts and sets n.
    static EmpiricalSample from_counts(
        std::vector<std::pair<std::uint64_t, std::uint64_t>> raw) {
        std::sort(raw.begin(), raw.end());
        EmpiricalSample s;
        for (const auto& [letter, count] : raw) {
            if (letter == 0) throw std::invalid_argument("letter indices start at 1");
            if (count == 0) continue;
            if (!s.counts.empty() && s.counts.back().first == letter) {
                s.counts.back().second += count;
            } else {
                s.counts.emplace_back(letter, count);
            }
            s.n += count;
        }
        if (s.n == 0) throw std::invalid_argument("sample has no positive counts");
        return s;
    }

    double p_hat(std::uint64_t letter) const {
        auto it = std::lower_bound(counts.begin(), counts.end(),
                                   std::make_pair(letter, std::uint64_t{0}));
        if (it == counts.end() || it->first != letter) return 0.0;
        return static_cast<double>(it->second) / static_cast<double>(n);
    }
};

}  // namespace divmdp
