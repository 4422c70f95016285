#include "gpe/patterns.hpp"

#include <algorithm>

namespace gpe {

namespace {

void check_order(int k) {
    if (k < kMinOrder || k > kMaxOrder) {
        throw ValidationError("pattern order out of range [1,8]: " + std::to_string(k));
    }
}

}  // namespace

PatternId pattern_of_tuple(std::span<const int> tuple) {
    const int k = static_cast<int>(tuple.size());
    check_order(k);
    // sigma(j) = 1 + #{i : tuple[i] < tuple[j]}
    int one_line[kMaxOrder];
    for (int j = 0; j < k; ++j) {
        int r = 1;
        for (int i = 0; i < k; ++i) {
            if (tuple[i] < tuple[j]) ++r;
            if (i != j && tuple[i] == tuple[j]) {
                throw ValidationError("pattern_of_tuple: duplicate entries (ties must be resolved upstream)");
            }
        }
        one_line[j] = r;
    }
    return encode_one_line(std::span<const int>(one_line, static_cast<std::size_t>(k)));
}

PatternId encode_one_line(std::span<const int> one_line) {
    const int k = static_cast<int>(one_line.size());
    check_order(k);
    bool seen[kMaxOrder + 1] = {};
    for (int v : one_line) {
        if (v < 1 || v > k || seen[v]) {
            throw ValidationError("encode_one_line: not a permutation of 1..k");
        }
        seen[v] = true;
    }
    std::uint32_t index = 0;
    for (int i = 0; i < k; ++i) {
        std::uint32_t smaller_after = 0;
        for (int j = i + 1; j < k; ++j) {
            if (one_line[j] < one_line[i]) ++smaller_after;
        }
        index = index * static_cast<std::uint32_t>(k - i) + smaller_after;
    }
    return PatternId{k, index};
}

std::vector<int> decode_one_line(PatternId id) {
    check_order(id.order);
    const int k = id.order;
    if (id.index >= factorial(static_cast<std::uint32_t>(k))) {
        throw ValidationError("pattern index out of range for order " + std::to_string(k));
    }
    // Unpack the factorial-base digits, then pick remaining values.
    int digits[kMaxOrder];
    std::uint32_t rest = id.index;
    for (int i = k - 1; i >= 0; --i) {
        digits[i] = static_cast<int>(rest % static_cast<std::uint32_t>(k - i));
        rest /= static_cast<std::uint32_t>(k - i);
    }
    std::vector<int> avail(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) avail[static_cast<std::size_t>(i)] = i + 1;
    std::vector<int> out(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        out[static_cast<std::size_t>(i)] = avail[static_cast<std::size_t>(digits[i])];
        avail.erase(avail.begin() + digits[i]);
    }
    return out;
}

std::string pattern_to_string(PatternId id) {
    std::string out;
    for (int v : decode_one_line(id)) out.push_back(static_cast<char>('0' + v));
    return out;
}

PatternId pattern_from_string(const std::string& s) {
    std::vector<int> one_line;
    one_line.reserve(s.size());
    for (char c : s) {
        if (c < '1' || c > '8') throw ValidationError("invalid pattern string: " + s);
        one_line.push_back(c - '0');
    }
    return encode_one_line(one_line);
}

PatternId pattern_symmetry(PatternId id, SymmetryOp op) {
    std::vector<int> p = decode_one_line(id);
    if (op == SymmetryOp::Reverse) {
        std::reverse(p.begin(), p.end());
    } else {
        for (int& v : p) v = id.order + 1 - v;
    }
    return encode_one_line(p);
}

u128 Profile::total() const {
    u128 t = 0;
    for (u128 c : counts) t += c;
    return t;
}

Profile oracle_profile(const RankSequence& rs, int k, u128 budget) {
    if (k < 2 || k > kMaxOrder) {
        throw ValidationError("oracle_profile: order out of range [2,8]: " + std::to_string(k));
    }
    const int n = static_cast<int>(rs.size());
    Profile p;
    p.order = k;
    p.n = static_cast<std::uint64_t>(n);
    p.counts.assign(factorial(static_cast<std::uint32_t>(k)), 0);
    p.method = "oracle";
    if (n < k) return p;

    const u128 tuples = binomial(static_cast<std::uint64_t>(n), static_cast<std::uint32_t>(k));
    if (tuples > budget) {
        throw GuardError("oracle_profile: C(" + std::to_string(n) + "," + std::to_string(k) +
                         ") = " + u128_to_string(tuples) + " tuples exceeds the enumeration budget of " +
                         u128_to_string(budget));
    }

    // Odometer over increasing index tuples; every tuple standardized from
    // scratch. No pruning, no reuse: maximal simplicity over speed.
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
    std::vector<int> tuple(static_cast<std::size_t>(k));
    while (true) {
        for (int i = 0; i < k; ++i) tuple[static_cast<std::size_t>(i)] = rs.ranks[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
        ++p.counts[pattern_of_tuple(tuple).index];
        int pos = k - 1;
        while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n - k + pos) --pos;
        if (pos < 0) break;
        ++idx[static_cast<std::size_t>(pos)];
        for (int i = pos + 1; i < k; ++i) idx[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i - 1)] + 1;
    }
    return p;
}

}  // namespace gpe
