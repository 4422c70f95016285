// cornertree.hpp — corner-tree model, O(n log n) counting, enumeration,
// pattern-coefficient extraction and basis selection.
//
// A corner tree is a rooted unordered tree whose non-root edges carry a
// direction from {NE, NW, SE, SW}: E/W places the child later/earlier in
// time than its parent, N/S places it strictly larger/smaller in value.
// The number of (not necessarily injective across branches) vertex maps
// into a rank sequence that respect every edge is a non-negative integer
// linear functional of the pattern profile, computable in O(v * n log n).
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gpe/bigint.hpp"
#include "gpe/common.hpp"
#include "gpe/patterns.hpp"
#include "gpe/series.hpp"

namespace gpe {

enum class Dir : std::uint8_t { NE, NW, SE, SW };

const char* dir_name(Dir d);

struct CornerTree {
    // Pre-order vertex layout with children in canonical order; vertex 0 is
    // the root. label[i] is the direction of the edge to parent[i].
    std::vector<int> parent;  // parent[0] == -1
    std::vector<Dir> label;   // label[0] unused

    int size() const { return static_cast<int>(parent.size()); }

    // Canonical text form, e.g. "(root (NE (SW)) (NE))"; children of every
    // vertex appear sorted by their own encoding, so two isomorphic labeled
    // trees produce equal strings.
    std::string encoding() const;
    static CornerTree from_encoding(const std::string& text);

    bool operator==(const CornerTree& o) const { return encoding() == o.encoding(); }
};

// All corner trees with v vertices up to labeled-tree isomorphism, in
// canonical (encoding-sorted) order. Deterministic across runs.
std::vector<CornerTree> enumerate_corner_trees(int v);

// Number of such trees, from the multiset recurrence (no enumeration).
std::uint64_t corner_tree_count(int v);

// Reusable scratch for count_tree: the order-statistic accumulator is reset
// between sweeps by version bump, not reallocation.
class CountWorkspace {
public:
    void prepare(int n, int vertices);

    std::vector<std::vector<u128>> vertex_acc;

    void fenwick_reset();
    void fenwick_add(int pos, u128 v);     // 1-based rank position
    u128 fenwick_prefix(int pos) const;    // sum over positions 1..pos
    u128 fenwick_total() const { return total_; }

private:
    std::vector<u128> fen_val_;
    std::vector<std::uint32_t> fen_ver_;
    std::uint32_t cur_ver_ = 0;
    u128 total_ = 0;
    int n_ = 0;
};

// Number of vertex maps from t into rs satisfying every edge constraint.
// Post-order sweep with directional prefix sums over value ranks.
u128 count_tree(const CornerTree& t, const RankSequence& rs, CountWorkspace* ws = nullptr);

// coeffs such that for every rank sequence:
//   count_tree(t, rs) = sum over orders m and patterns p of
//                       coeff[m][p] * profile_m(rs)[p].
// coeff[m][p] counts the maps from t onto the full index set of p
// (surjective) that satisfy all edge constraints.
struct CoefficientVector {
    std::string tree_encoding;
    int vertices = 0;
    std::vector<std::vector<std::uint64_t>> by_order;  // by_order[m-1] has size m!

    std::uint64_t coeff(PatternId p) const;
};

// Cached by canonical tree encoding.
const CoefficientVector& coefficient_vector(const CornerTree& t);

// Order-m component only (avoids extracting every lower order; used for the
// corner-tree entropy bases at m = 5, 6).
std::vector<std::uint64_t> order_component(const CornerTree& t, int m);

// Exact independence filter over integer rows (fraction-free elimination
// with content reduction). Deterministic: first independent row wins.
class IntRowReducer {
public:
    explicit IntRowReducer(std::size_t cols) : cols_(cols) {}
    bool add_row(std::vector<BigInt> row);  // true if row extended the span
    int rank() const { return static_cast<int>(pivots_.size()); }

private:
    struct Pivot {
        std::size_t col;
        std::vector<BigInt> row;
    };
    std::size_t cols_;
    std::vector<Pivot> pivots_;
};

struct BasisEntry {
    bool direct_3214 = false;  // order-4 direction counted directly, no tree
    CornerTree tree;           // valid when !direct_3214
    CoefficientVector coeffs;  // unit vector on [3214] for the direct entry
};

// Order-k recovery basis: k! functionals whose order-k components form an
// invertible integer matrix M. Profiles are recovered with the precomputed
// exact scaled inverse: x = (det * M^-1) b / det.
struct Basis {
    int order = 0;
    std::vector<BasisEntry> entries;
    std::vector<std::vector<BigInt>> scaled_inverse;  // det * M^-1, integral
    BigInt det;

    int tree_count() const;
};

// k in {2, 3, 4}. Exact rational rank selection over all k-vertex trees in
// canonical order; asserts tree ranks 2/6/23 and, at k = 4, that the [3214]
// direction completes rank 24.
Basis select_basis(int k);

// Memoized shared instances (immutable after construction).
const Basis& shared_basis(int k);

// Pre-installs a basis (e.g. loaded from the on-disk cache) before first
// use; ignored when one is already present. Returns false when ignored.
bool install_shared_basis(Basis basis);

// Exact solve: returns x with M x = rhs; throws InternalError when the
// solution is not a non-negative integer vector (bug trap, never silent).
std::vector<u128> basis_solve(const Basis& basis, const std::vector<BigInt>& rhs);

// Maximal independent corner-tree set with k vertices (order-k components),
// used by the corner-tree entropy. k = 2..4 is always available; 5 and 6 are
// permitted when enumeration stays within the configured limit.
struct CtpeLimits {
    int max_trees = 2000;
};

struct CtpeBasis {
    int order = 0;
    std::vector<CornerTree> trees;
};

CtpeBasis select_ctpe_trees(int k, const CtpeLimits& limits = {});
const CtpeBasis& shared_ctpe_trees(int k, const CtpeLimits& limits = {});

}  // namespace gpe
