// profile.hpp — full k-profile assembly.
//
// Orders 2..4 go through the corner-tree basis plus the directly counted
// [3214] pattern and an exact linear solve; orders 5 and 6 use a guarded
// exact fallback enumerator that shares tuple prefixes, which keeps it an
// independent cross-check against the simple oracle.
#pragma once

#include <optional>

#include "gpe/common.hpp"
#include "gpe/cornertree.hpp"
#include "gpe/patterns.hpp"
#include "gpe/series.hpp"

namespace gpe {

// Exact count of index quadruples i<j<l<m with x_l < x_j < x_i < x_m.
// O(n^2 log n): per anchor i, decreasing pairs below it are swept with a
// prefix-sum accumulator and weighted by the later-and-larger suffix counts.
u128 count_3214(const RankSequence& rs, CountWorkspace* ws = nullptr);

// Corner-tree route, k in {2,3,4}. Computes every order below k on the way
// up (the lower profiles feed the subtraction step).
Profile fast_profile(const RankSequence& rs, int k, CountWorkspace* ws = nullptr);

inline constexpr u128 kDefaultFallbackBudget = 20000000;  // tuples

// Exact enumeration for k in {5,6} with incremental pattern standardization:
// the DFS over increasing tuples carries the prefix pattern and extends it
// per element, so shared prefixes are standardized once.
Profile fallback_profile(const RankSequence& rs, int k, u128 budget = kDefaultFallbackBudget);

// Adds to `counts` the patterns of all k-tuples whose final index is `last`
// (0-based). Lets callers maintain profiles of growing prefixes without
// re-enumerating; same enumerator core as fallback_profile.
void add_patterns_ending_at(const RankSequence& rs, int k, int last, std::vector<u128>& counts);

enum class ProfileMethod { Auto, Fast, Fallback, Oracle };

struct ProfileOptions {
    ProfileMethod method = ProfileMethod::Auto;
    u128 fallback_budget = kDefaultFallbackBudget;
    u128 oracle_budget = kDefaultOracleBudget;
};

// Dispatch: auto picks fast for k <= 4 and fallback for k = 5,6. The chosen
// path is recorded in Profile::method.
Profile profile(const RankSequence& rs, int k, const ProfileOptions& options = {});

// Sample-size rule for windowed profiles: C(w,k) should dwarf k!.
bool window_sample_size_ok(int w, int k);

}  // namespace gpe
