#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <random>

#include "gpe/profile.hpp"

using namespace gpe;

namespace {

RankSequence random_ranks(std::mt19937_64& gen, int n) {
    std::vector<int> r(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] = i + 1;
    std::shuffle(r.begin(), r.end(), gen);
    return RankSequence{std::move(r)};
}

RankSequence identity_ranks(int n) {
    std::vector<int> r(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] = i + 1;
    return RankSequence{std::move(r)};
}

// Quadruple-loop oracle for the 3214 count.
u128 count_3214_bruteforce(const RankSequence& rs) {
    const int n = static_cast<int>(rs.size());
    u128 total = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int l = j + 1; l < n; ++l)
                for (int m = l + 1; m < n; ++m) {
                    if (rs.ranks[l] < rs.ranks[j] && rs.ranks[j] < rs.ranks[i] &&
                        rs.ranks[i] < rs.ranks[m]) {
                        ++total;
                    }
                }
    return total;
}

}  // namespace

TEST_CASE("count_3214 examples") {
    CHECK(count_3214(identity_ranks(10)) == 0);
    CHECK(count_3214(RankSequence{{3, 2, 1, 4}}) == 1);
    CHECK(count_3214(RankSequence{{4, 3, 2, 1, 5}}) == 4);
    CHECK(count_3214_bruteforce(RankSequence{{4, 3, 2, 1, 5}}) == 4);
    CHECK(count_3214(RankSequence{{1, 2}}) == 0);
}

TEST_CASE("count_3214 equals the brute force on random input") {
    std::mt19937_64 gen(41);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 4 + static_cast<int>(gen() % 17);
        const RankSequence rs = random_ranks(gen, n);
        CHECK(count_3214(rs) == count_3214_bruteforce(rs));
    }
}

TEST_CASE("fast profile closed-form examples") {
    const Profile p = fast_profile(identity_ranks(6), 4);
    CHECK(p.counts[pattern_from_string("1234").index] == 15);  // C(6,4)
    CHECK(p.total() == 15);
    CHECK(p.method == "fast");

    const Profile example7 = fast_profile(RankSequence{{7, 4, 3, 5, 2, 1, 6}}, 3);
    CHECK(example7.counts == std::vector<u128>{2, 0, 9, 4, 7, 13});
}

TEST_CASE("fast profile equals the oracle") {
    std::mt19937_64 gen(42);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + static_cast<int>(gen() % 39);
        const RankSequence rs = random_ranks(gen, n);
        for (int k = 2; k <= 4; ++k) {
            CHECK(fast_profile(rs, k).counts == oracle_profile(rs, k).counts);
        }
    }
}

TEST_CASE("the [3214] coordinate is pinned by the direct counter") {
    std::mt19937_64 gen(43);
    const std::uint32_t idx = pattern_from_string("3214").index;
    for (int trial = 0; trial < 10; ++trial) {
        const RankSequence rs = random_ranks(gen, 4 + static_cast<int>(gen() % 20));
        CHECK(fast_profile(rs, 4).counts[idx] == count_3214(rs));
    }
}

TEST_CASE("fallback profile examples") {
    const Profile p = fallback_profile(identity_ranks(8), 5);
    CHECK(p.counts[pattern_from_string("12345").index] == 56);  // C(8,5)
    CHECK(p.total() == 56);
    CHECK(p.method == "fallback");

    CHECK(fallback_profile(identity_ranks(4), 5).total() == 0);  // n < k
    CHECK_THROWS_AS(fallback_profile(identity_ranks(10), 4), ValidationError);
}

TEST_CASE("fallback equals the oracle for orders 5 and 6") {
    std::mt19937_64 gen(44);
    for (int trial = 0; trial < 15; ++trial) {
        const int n = 5 + static_cast<int>(gen() % 10);
        const RankSequence rs = random_ranks(gen, n);
        for (int k = 5; k <= 6; ++k) {
            CHECK(fallback_profile(rs, k).counts == oracle_profile(rs, k).counts);
        }
    }
}

TEST_CASE("fallback guard names the override") {
    RankSequence rs = identity_ranks(200);
    try {
        fallback_profile(rs, 6);
        FAIL("expected GuardError");
    } catch (const GuardError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("C(200,6)") != std::string::npos);
        CHECK(msg.find("--fallback-budget") != std::string::npos);
    }
}

TEST_CASE("dispatch records the chosen path") {
    std::mt19937_64 gen(45);
    const RankSequence rs = random_ranks(gen, 10);
    CHECK(profile(rs, 3, {}).method == "fast");
    CHECK(profile(rs, 5, {}).method == "fallback");
    ProfileOptions oracle_opt;
    oracle_opt.method = ProfileMethod::Oracle;
    CHECK(profile(rs, 3, oracle_opt).method == "oracle");
    CHECK_THROWS_AS(profile(rs, 7, {}), ValidationError);
    CHECK_THROWS_AS(profile(rs, 1, {}), ValidationError);

    // explicit fast vs oracle agree on small inputs
    for (int trial = 0; trial < 10; ++trial) {
        const RankSequence r2 = random_ranks(gen, 2 + static_cast<int>(gen() % 11));
        for (int k = 2; k <= 4; ++k) {
            ProfileOptions fast_opt;
            fast_opt.method = ProfileMethod::Fast;
            CHECK(profile(r2, k, fast_opt).counts == profile(r2, k, oracle_opt).counts);
        }
    }
}

TEST_CASE("profile sums and symmetries hold for both routes") {
    std::mt19937_64 gen(46);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(gen() % 12);
        const RankSequence rs = random_ranks(gen, n);
        RankSequence rev = rs;
        std::reverse(rev.ranks.begin(), rev.ranks.end());
        RankSequence neg = rs;
        for (int& r : neg.ranks) r = n + 1 - r;
        for (int k = 2; k <= 6; ++k) {
            const Profile base = profile(rs, k, {});
            CHECK(base.total() == binomial(static_cast<std::uint64_t>(n), static_cast<std::uint32_t>(k)));
            const Profile pr = profile(rev, k, {});
            const Profile pn = profile(neg, k, {});
            for (std::uint32_t i = 0; i < base.counts.size(); ++i) {
                const PatternId id{k, i};
                CHECK(pr.counts[pattern_symmetry(id, SymmetryOp::Reverse).index] == base.counts[i]);
                CHECK(pn.counts[pattern_symmetry(id, SymmetryOp::Complement).index] == base.counts[i]);
            }
        }
    }
}

TEST_CASE("incremental tuples ending at an index extend the prefix profile") {
    std::mt19937_64 gen(47);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 6 + static_cast<int>(gen() % 8);
        const RankSequence rs = random_ranks(gen, n);
        for (int k : {2, 3, 5}) {
            std::vector<u128> counts(factorial(static_cast<std::uint32_t>(k)), 0);
            for (int last = 0; last < n; ++last) {
                add_patterns_ending_at(rs, k, last, counts);
                // prefix [0..last] profile must match the oracle on that prefix
                RankSequence prefix;
                prefix.ranks.assign(rs.ranks.begin(), rs.ranks.begin() + last + 1);
                // re-rank the prefix to 1..m (restriction keeps the pattern counts)
                std::vector<int> sorted = prefix.ranks;
                std::sort(sorted.begin(), sorted.end());
                for (int& r : prefix.ranks) {
                    r = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), r) -
                                         sorted.begin()) + 1;
                }
                CHECK(oracle_profile(prefix, k).counts == counts);
            }
        }
    }
}

TEST_CASE("window sample-size rule") {
    // C(w,3) >= 600 first holds at w = 17
    CHECK_FALSE(window_sample_size_ok(16, 3));
    CHECK(window_sample_size_ok(17, 3));
    CHECK_FALSE(window_sample_size_ok(2, 3));
}
