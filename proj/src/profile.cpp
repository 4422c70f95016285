#include "gpe/profile.hpp"

#include <algorithm>
#include <array>
#include <mutex>

namespace gpe {

u128 count_3214(const RankSequence& rs, CountWorkspace* ws) {
    const int n = static_cast<int>(rs.size());
    if (n < 4) return 0;
    CountWorkspace local;
    if (!ws) ws = &local;
    ws->prepare(n, 0);

    std::vector<int> suffix_above(static_cast<std::size_t>(n), 0);
    u128 total = 0;
    for (int i = 0; i < n - 3; ++i) {
        const int ri = rs.ranks[static_cast<std::size_t>(i)];
        // suffix_above[l] = #{m > l : rank[m] > rank[i]}
        int cnt = 0;
        for (int l = n - 1; l > i; --l) {
            suffix_above[static_cast<std::size_t>(l)] = cnt;
            if (rs.ranks[static_cast<std::size_t>(l)] > ri) ++cnt;
        }
        // Sweep l; the accumulator holds candidate middle elements j with
        // i < j < l and rank[j] < rank[i].
        ws->fenwick_reset();
        for (int l = i + 1; l < n; ++l) {
            const int rl = rs.ranks[static_cast<std::size_t>(l)];
            if (rl >= ri) continue;
            const u128 middles = ws->fenwick_total() - ws->fenwick_prefix(rl);
            total += middles * static_cast<u128>(suffix_above[static_cast<std::size_t>(l)]);
            ws->fenwick_add(rl, 1);
        }
    }
    return total;
}

Profile fast_profile(const RankSequence& rs, int k, CountWorkspace* ws) {
    if (k < 2 || k > 4) throw ValidationError("fast_profile: order must be 2, 3 or 4");
    const auto n = static_cast<std::uint64_t>(rs.size());
    CountWorkspace local;
    if (!ws) ws = &local;

    // Profiles of all orders up to k, built bottom-up; order m uses the
    // orders below it to strip the non-injective map contributions.
    std::vector<std::vector<u128>> profs(static_cast<std::size_t>(k) + 1);
    profs[1] = {static_cast<u128>(n)};
    for (int m = 2; m <= k; ++m) {
        const Basis& basis = shared_basis(m);
        std::vector<BigInt> rhs;
        rhs.reserve(basis.entries.size());
        for (const BasisEntry& e : basis.entries) {
            const u128 c = e.direct_3214 ? count_3214(rs, ws) : count_tree(e.tree, rs, ws);
            BigInt b = BigInt::from_u128(c);
            for (int o = 1; o < m; ++o) {
                const auto& comp = e.coeffs.by_order[static_cast<std::size_t>(o - 1)];
                for (std::size_t s = 0; s < comp.size(); ++s) {
                    if (comp[s] == 0 || profs[static_cast<std::size_t>(o)][s] == 0) continue;
                    b -= BigInt(static_cast<std::int64_t>(comp[s])) *
                         BigInt::from_u128(profs[static_cast<std::size_t>(o)][s]);
                }
            }
            rhs.push_back(std::move(b));
        }
        profs[static_cast<std::size_t>(m)] = basis_solve(basis, rhs);
        u128 sum = 0;
        for (u128 c : profs[static_cast<std::size_t>(m)]) sum += c;
        if (sum != binomial(n, static_cast<std::uint32_t>(m))) {
            throw InternalError("fast_profile: order-" + std::to_string(m) +
                                " counts do not sum to C(n,k)");
        }
    }
    Profile p;
    p.order = k;
    p.n = n;
    p.counts = std::move(profs[static_cast<std::size_t>(k)]);
    p.method = "fast";
    return p;
}

// ---------------------------------------------------------------------------
// Fallback enumeration
// ---------------------------------------------------------------------------

namespace {

// ext[d] maps (pattern of order d, insertion rank r in 1..d+1) to the
// pattern of order d+1 obtained by appending an element of that rank.
// Flattened: ext[d][pidx * (d+1) + (r-1)]. Order-0 has one (empty) pattern.
using ExtTables = std::vector<std::vector<std::uint32_t>>;

ExtTables build_extension_tables(int k) {
    ExtTables tables;
    for (int d = 0; d < k; ++d) {
        const std::uint64_t npat = d == 0 ? 1 : factorial(static_cast<std::uint32_t>(d));
        std::vector<std::uint32_t> table(npat * static_cast<std::uint64_t>(d + 1));
        for (std::uint64_t pi = 0; pi < npat; ++pi) {
            std::vector<int> ol;
            if (d > 0) ol = decode_one_line(PatternId{d, static_cast<std::uint32_t>(pi)});
            for (int r = 1; r <= d + 1; ++r) {
                std::vector<int> ext;
                ext.reserve(static_cast<std::size_t>(d) + 1);
                for (int v : ol) ext.push_back(v >= r ? v + 1 : v);
                ext.push_back(r);
                table[pi * static_cast<std::uint64_t>(d + 1) + static_cast<std::uint64_t>(r - 1)] =
                    encode_one_line(ext).index;
            }
        }
        tables.push_back(std::move(table));
    }
    return tables;
}

const ExtTables& extension_tables(int k) {
    static std::array<std::once_flag, kMaxOrder + 1> flags;
    static std::array<ExtTables, kMaxOrder + 1> store;
    std::call_once(flags[static_cast<std::size_t>(k)],
                   [k] { store[static_cast<std::size_t>(k)] = build_extension_tables(k); });
    return store[static_cast<std::size_t>(k)];
}

struct TupleEnumerator {
    const RankSequence& rs;
    int k;
    std::vector<u128>& counts;
    const ExtTables& ext;
    // When pinned_last >= 0, every tuple must end there.
    int pinned_last = -1;
    int chosen_ranks[kMaxOrder + 1] = {};

    void run() {
        if (pinned_last >= 0) {
            extend_pinned(0, 0, 0);
        } else {
            extend(0, 0, 0, static_cast<int>(rs.size()));
        }
    }

    std::uint32_t step(int depth, std::uint32_t pidx, int rank) const {
        int ins = 1;
        for (int d = 0; d < depth; ++d) {
            if (chosen_ranks[d] < rank) ++ins;
        }
        return ext[static_cast<std::size_t>(depth)][pidx * static_cast<std::uint32_t>(depth + 1) +
                                                    static_cast<std::uint32_t>(ins - 1)];
    }

    void extend(int next_min, int depth, std::uint32_t pidx, int limit) {
        const int remaining = k - depth;
        for (int i = next_min; i <= limit - remaining; ++i) {
            const std::uint32_t next = step(depth, pidx, rs.ranks[static_cast<std::size_t>(i)]);
            if (depth + 1 == k) {
                ++counts[next];
            } else {
                chosen_ranks[depth] = rs.ranks[static_cast<std::size_t>(i)];
                extend(i + 1, depth + 1, next, limit);
            }
        }
    }

    void extend_pinned(int next_min, int depth, std::uint32_t pidx) {
        if (depth == k - 1) {
            ++counts[step(depth, pidx, rs.ranks[static_cast<std::size_t>(pinned_last)])];
            return;
        }
        const int remaining = (k - 1) - depth;
        for (int i = next_min; i <= pinned_last - remaining; ++i) {
            const std::uint32_t next = step(depth, pidx, rs.ranks[static_cast<std::size_t>(i)]);
            chosen_ranks[depth] = rs.ranks[static_cast<std::size_t>(i)];
            extend_pinned(i + 1, depth + 1, next);
        }
    }
};

Profile enumerate_profile(const RankSequence& rs, int k, u128 budget) {
    const auto n = static_cast<std::uint64_t>(rs.size());
    Profile p;
    p.order = k;
    p.n = n;
    p.counts.assign(factorial(static_cast<std::uint32_t>(k)), 0);
    p.method = "fallback";
    if (n < static_cast<std::uint64_t>(k)) return p;

    const u128 tuples = binomial(n, static_cast<std::uint32_t>(k));
    if (tuples > budget) {
        throw GuardError("fallback_profile: C(" + std::to_string(n) + "," + std::to_string(k) +
                         ") = " + u128_to_string(tuples) + " tuples exceeds the guard of " +
                         u128_to_string(budget) + " (raise --fallback-budget to override)");
    }
    TupleEnumerator en{rs, k, p.counts, extension_tables(k)};
    en.run();
    return p;
}

}  // namespace

void add_patterns_ending_at(const RankSequence& rs, int k, int last, std::vector<u128>& counts) {
    if (k < 2 || k > kMaxOrder) throw ValidationError("add_patterns_ending_at: bad order");
    if (last < 0 || last >= static_cast<int>(rs.size())) {
        throw ValidationError("add_patterns_ending_at: index out of range");
    }
    if (counts.size() != factorial(static_cast<std::uint32_t>(k))) {
        throw ValidationError("add_patterns_ending_at: counts size mismatch");
    }
    if (last + 1 < k) return;
    TupleEnumerator en{rs, k, counts, extension_tables(k)};
    en.pinned_last = last;
    en.run();
}

Profile fallback_profile(const RankSequence& rs, int k, u128 budget) {
    if (k < 5 || k > 6) throw ValidationError("fallback_profile: order must be 5 or 6");
    return enumerate_profile(rs, k, budget);
}

Profile profile(const RankSequence& rs, int k, const ProfileOptions& options) {
    if (k < 2 || k > 6) throw ValidationError("profile: order out of range [2,6]: " + std::to_string(k));
    ProfileMethod m = options.method;
    if (m == ProfileMethod::Auto) m = k <= 4 ? ProfileMethod::Fast : ProfileMethod::Fallback;
    switch (m) {
        case ProfileMethod::Fast:
            if (k > 4) throw ValidationError("fast profile supports orders 2..4 only");
            return fast_profile(rs, k);
        case ProfileMethod::Fallback:
            // Explicit fallback requests are honored for any order; auto only
            // routes 5 and 6 here.
            return enumerate_profile(rs, k, options.fallback_budget);
        case ProfileMethod::Oracle:
            return oracle_profile(rs, k, options.oracle_budget);
        case ProfileMethod::Auto:
            break;
    }
    throw InternalError("profile: unreachable dispatch");
}

bool window_sample_size_ok(int w, int k) {
    if (w < k) return false;
    return binomial(static_cast<std::uint64_t>(w), static_cast<std::uint32_t>(k)) >=
           static_cast<u128>(100) * factorial(static_cast<std::uint32_t>(k));
}

}  // namespace gpe
