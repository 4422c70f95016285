// patterns.hpp — pattern identifiers, the enumeration oracle, symmetries.
//
// A pattern of order k is a permutation in S_k written one-line: sigma(j) = r
// means position j holds the r-th smallest value. Patterns are indexed by
// their Lehmer-code rank, which coincides with lexicographic one-line order.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gpe/common.hpp"
#include "gpe/series.hpp"

namespace gpe {

inline constexpr int kMinOrder = 1;
inline constexpr int kMaxOrder = 8;

struct PatternId {
    int order = 0;
    std::uint32_t index = 0;  // Lehmer rank in [0, order!-1]

    bool operator==(const PatternId&) const = default;
    auto operator<=>(const PatternId&) const = default;
};

// Standardizes a tuple of pairwise-distinct entries to its pattern.
PatternId pattern_of_tuple(std::span<const int> tuple);

// Lehmer encode/decode between one-line permutations of 1..k and indices.
PatternId encode_one_line(std::span<const int> one_line);
std::vector<int> decode_one_line(PatternId id);

// Compact one-line rendering, e.g. [2,1,3] -> "213" (orders up to 8).
std::string pattern_to_string(PatternId id);
PatternId pattern_from_string(const std::string& s);

enum class SymmetryOp { Reverse, Complement };

// Reverse reads the one-line form right to left (time reversal);
// complement maps sigma(j) to k+1-sigma(j) (value negation).
PatternId pattern_symmetry(PatternId id, SymmetryOp op);

// Exact counts of all order-k patterns over the C(n,k) increasing tuples.
struct Profile {
    int order = 0;
    std::uint64_t n = 0;
    std::vector<u128> counts;  // indexed by PatternId::index, size order!
    std::string method;        // "oracle" | "fast" | "fallback"

    u128 total() const;
};

inline constexpr u128 kDefaultOracleBudget = 100000000;  // tuples

// Ground-truth profile by explicit enumeration of every increasing index
// tuple. Deliberately unoptimized: this is the trust anchor for the fast
// algorithms, not a fast path itself.
Profile oracle_profile(const RankSequence& rs, int k, u128 budget = kDefaultOracleBudget);

}  // namespace gpe
