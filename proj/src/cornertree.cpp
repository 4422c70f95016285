#include "gpe/cornertree.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <memory>
#include <mutex>

namespace gpe {

const char* dir_name(Dir d) {
    switch (d) {
        case Dir::NE: return "NE";
        case Dir::NW: return "NW";
        case Dir::SE: return "SE";
        case Dir::SW: return "SW";
    }
    throw InternalError("bad direction");
}

namespace {

bool dir_is_east(Dir d) { return d == Dir::NE || d == Dir::SE; }
bool dir_is_north(Dir d) { return d == Dir::NE || d == Dir::NW; }

Dir dir_from_name(const std::string& s) {
    if (s == "NE") return Dir::NE;
    if (s == "NW") return Dir::NW;
    if (s == "SE") return Dir::SE;
    if (s == "SW") return Dir::SW;
    throw ValidationError("unknown edge direction: " + s);
}

struct Node {
    Dir d = Dir::NE;
    std::vector<Node> children;
};

std::string node_key(const Node& nd) {
    std::vector<std::string> parts;
    parts.reserve(nd.children.size());
    for (const Node& c : nd.children) parts.push_back(node_key(c));
    std::sort(parts.begin(), parts.end());
    std::string out = "(";
    out += dir_name(nd.d);
    for (const std::string& p : parts) {
        out += ' ';
        out += p;
    }
    out += ')';
    return out;
}

void flatten(const Node& nd, int parent_idx, CornerTree& t) {
    const int idx = t.size();
    t.parent.push_back(parent_idx);
    t.label.push_back(nd.d);
    std::vector<const Node*> cs;
    cs.reserve(nd.children.size());
    for (const Node& c : nd.children) cs.push_back(&c);
    std::stable_sort(cs.begin(), cs.end(),
                     [](const Node* a, const Node* b) { return node_key(*a) < node_key(*b); });
    for (const Node* c : cs) flatten(*c, idx, t);
}

CornerTree tree_from_root_children(const std::vector<Node>& root_children) {
    CornerTree t;
    t.parent.push_back(-1);
    t.label.push_back(Dir::NE);  // unused root slot
    std::vector<const Node*> cs;
    cs.reserve(root_children.size());
    for (const Node& c : root_children) cs.push_back(&c);
    std::stable_sort(cs.begin(), cs.end(),
                     [](const Node* a, const Node* b) { return node_key(*a) < node_key(*b); });
    for (const Node* c : cs) flatten(*c, 0, t);
    return t;
}

}  // namespace

std::string CornerTree::encoding() const {
    const int n = size();
    if (n == 0 || parent[0] != -1) throw InternalError("malformed corner tree");
    std::vector<std::vector<int>> children(static_cast<std::size_t>(n));
    for (int v = 1; v < n; ++v) children[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])].push_back(v);
    std::function<std::string(int)> enc = [&](int v) -> std::string {
        std::vector<std::string> parts;
        for (int c : children[static_cast<std::size_t>(v)]) parts.push_back(enc(c));
        std::sort(parts.begin(), parts.end());
        std::string out = "(";
        out += (v == 0) ? "root" : dir_name(label[static_cast<std::size_t>(v)]);
        for (const std::string& p : parts) {
            out += ' ';
            out += p;
        }
        out += ')';
        return out;
    };
    return enc(0);
}

CornerTree CornerTree::from_encoding(const std::string& text) {
    std::size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < text.size() && text[pos] == ' ') ++pos;
    };
    std::function<Node()> parse_node = [&]() -> Node {
        skip_ws();
        if (pos >= text.size() || text[pos] != '(') throw ValidationError("tree text: expected '('");
        ++pos;
        std::string name;
        while (pos < text.size() && text[pos] != ' ' && text[pos] != ')' && text[pos] != '(') {
            name.push_back(text[pos++]);
        }
        Node nd;
        nd.d = dir_from_name(name);
        skip_ws();
        while (pos < text.size() && text[pos] == '(') {
            nd.children.push_back(parse_node());
            skip_ws();
        }
        if (pos >= text.size() || text[pos] != ')') throw ValidationError("tree text: expected ')'");
        ++pos;
        return nd;
    };

    skip_ws();
    if (pos >= text.size() || text[pos] != '(') throw ValidationError("tree text: expected '(root ...)'");
    ++pos;
    std::string name;
    while (pos < text.size() && text[pos] != ' ' && text[pos] != ')') name.push_back(text[pos++]);
    if (name != "root") throw ValidationError("tree text: expected root vertex");
    std::vector<Node> root_children;
    skip_ws();
    while (pos < text.size() && text[pos] == '(') {
        root_children.push_back(parse_node());
        skip_ws();
    }
    if (pos >= text.size() || text[pos] != ')') throw ValidationError("tree text: expected ')'");
    return tree_from_root_children(root_children);
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

namespace {

struct Unit {
    std::string key;
    Node node;
    int size = 0;
};

// Multisets of units with the given total vertex count, keys non-decreasing.
void gen_multisets(const std::vector<Unit>& all, int remaining, std::size_t start,
                   std::vector<const Unit*>& cur, const std::function<void()>& emit) {
    if (remaining == 0) {
        emit();
        return;
    }
    for (std::size_t i = start; i < all.size(); ++i) {
        if (all[i].size > remaining) continue;
        cur.push_back(&all[i]);
        gen_multisets(all, remaining - all[i].size, i, cur, emit);
        cur.pop_back();
    }
}

}  // namespace

std::uint64_t corner_tree_count(int v) {
    if (v < 1) throw ValidationError("corner_tree_count: vertex count must be >= 1");
    // units[s] = number of distinct child subtrees with s vertices;
    // forests[m] = number of unit multisets with total size m.
    std::vector<std::uint64_t> units(static_cast<std::size_t>(v), 0);  // units[s], s >= 1
    std::vector<std::uint64_t> forests(static_cast<std::size_t>(v), 0);
    forests[0] = 1;
    auto multichoose = [](std::uint64_t n, std::uint64_t c) {
        std::uint64_t r = 1;
        for (std::uint64_t i = 0; i < c; ++i) r = r * (n + i) / (i + 1);
        return r;
    };
    for (int s = 1; s < v; ++s) {
        units[static_cast<std::size_t>(s)] = 4 * forests[static_cast<std::size_t>(s - 1)];
        // fold size-s units in; descending m keeps forests[m - c*s] at the
        // pre-fold value, so each c counts a multiset of exactly c such units
        for (int m = v - 1; m >= s; --m) {
            std::uint64_t total = 0;
            for (int c = 1; c * s <= m; ++c) {
                total += multichoose(units[static_cast<std::size_t>(s)], static_cast<std::uint64_t>(c)) *
                         forests[static_cast<std::size_t>(m - c * s)];
            }
            forests[static_cast<std::size_t>(m)] += total;
        }
    }
    return forests[static_cast<std::size_t>(v - 1)];
}

std::vector<CornerTree> enumerate_corner_trees(int v) {
    if (v < 1 || v > 6) {
        throw ValidationError("enumerate_corner_trees: vertex count out of range [1,6]: " + std::to_string(v));
    }
    // Units of sizes 1..v-1, kept globally sorted by canonical key.
    std::vector<Unit> units;
    for (int s = 1; s < v; ++s) {
        std::vector<Unit> fresh;
        for (Dir d : {Dir::NE, Dir::NW, Dir::SE, Dir::SW}) {
            std::vector<const Unit*> cur;
            auto emit = [&] {
                Node nd;
                nd.d = d;
                for (const Unit* u : cur) nd.children.push_back(u->node);
                fresh.push_back(Unit{node_key(nd), std::move(nd), s});
            };
            gen_multisets(units, s - 1, 0, cur, emit);
        }
        units.insert(units.end(), std::make_move_iterator(fresh.begin()),
                     std::make_move_iterator(fresh.end()));
        std::sort(units.begin(), units.end(), [](const Unit& a, const Unit& b) { return a.key < b.key; });
    }

    std::vector<CornerTree> out;
    std::vector<const Unit*> cur;
    auto emit = [&] {
        std::vector<Node> root_children;
        root_children.reserve(cur.size());
        for (const Unit* u : cur) root_children.push_back(u->node);
        out.push_back(tree_from_root_children(root_children));
    };
    gen_multisets(units, v - 1, 0, cur, emit);
    std::sort(out.begin(), out.end(), [](const CornerTree& a, const CornerTree& b) {
        return a.encoding() < b.encoding();
    });
    return out;
}

// ---------------------------------------------------------------------------
// Counting
// ---------------------------------------------------------------------------

void CountWorkspace::prepare(int n, int vertices) {
    n_ = n;
    if (static_cast<int>(fen_val_.size()) < n + 1) {
        fen_val_.resize(static_cast<std::size_t>(n) + 1);
        fen_ver_.resize(static_cast<std::size_t>(n) + 1, 0);
    }
    if (static_cast<int>(vertex_acc.size()) < vertices) vertex_acc.resize(static_cast<std::size_t>(vertices));
    for (int i = 0; i < vertices; ++i) {
        vertex_acc[static_cast<std::size_t>(i)].assign(static_cast<std::size_t>(n), 1);
    }
}

void CountWorkspace::fenwick_reset() {
    ++cur_ver_;
    total_ = 0;
}

void CountWorkspace::fenwick_add(int pos, u128 v) {
    total_ += v;
    for (; pos <= n_; pos += pos & -pos) {
        auto p = static_cast<std::size_t>(pos);
        if (fen_ver_[p] != cur_ver_) {
            fen_ver_[p] = cur_ver_;
            fen_val_[p] = v;
        } else {
            fen_val_[p] += v;
        }
    }
}

u128 CountWorkspace::fenwick_prefix(int pos) const {
    u128 s = 0;
    for (; pos > 0; pos -= pos & -pos) {
        auto p = static_cast<std::size_t>(pos);
        if (fen_ver_[p] == cur_ver_) s += fen_val_[p];
    }
    return s;
}

namespace {

// In place: A[i] becomes the sum of A[j] over all j on the dir side of i,
// i.e. strictly later/earlier in time and strictly above/below in rank.
void directional_sums(Dir d, std::vector<u128>& acc, const RankSequence& rs, CountWorkspace& ws) {
    const int n = static_cast<int>(rs.size());
    ws.fenwick_reset();
    const bool north = dir_is_north(d);
    auto step = [&](int i) {
        const int r = rs.ranks[static_cast<std::size_t>(i)];
        const u128 s = north ? ws.fenwick_total() - ws.fenwick_prefix(r) : ws.fenwick_prefix(r - 1);
        ws.fenwick_add(r, acc[static_cast<std::size_t>(i)]);
        acc[static_cast<std::size_t>(i)] = s;
    };
    if (dir_is_east(d)) {
        for (int i = n - 1; i >= 0; --i) step(i);
    } else {
        for (int i = 0; i < n; ++i) step(i);
    }
}

}  // namespace

u128 count_tree(const CornerTree& t, const RankSequence& rs, CountWorkspace* ws) {
    const int n = static_cast<int>(rs.size());
    const int v = t.size();
    if (n == 0) return 0;
    CountWorkspace local;
    if (!ws) ws = &local;
    ws->prepare(n, v);

    std::vector<std::vector<int>> children(static_cast<std::size_t>(v));
    for (int u = 1; u < v; ++u) children[static_cast<std::size_t>(t.parent[static_cast<std::size_t>(u)])].push_back(u);

    // Pre-order layout: every child index exceeds its parent's, so a reverse
    // scan is a valid post-order.
    for (int u = v - 1; u >= 0; --u) {
        auto& acc = ws->vertex_acc[static_cast<std::size_t>(u)];
        for (int c : children[static_cast<std::size_t>(u)]) {
            auto& child_acc = ws->vertex_acc[static_cast<std::size_t>(c)];
            directional_sums(t.label[static_cast<std::size_t>(c)], child_acc, rs, *ws);
            for (int i = 0; i < n; ++i) acc[static_cast<std::size_t>(i)] *= child_acc[static_cast<std::size_t>(i)];
        }
    }
    u128 total = 0;
    for (int i = 0; i < n; ++i) total += ws->vertex_acc[0][static_cast<std::size_t>(i)];
    return total;
}

// ---------------------------------------------------------------------------
// Coefficient extraction
// ---------------------------------------------------------------------------

std::uint64_t CoefficientVector::coeff(PatternId p) const {
    if (p.order < 1 || p.order > vertices) return 0;
    return by_order[static_cast<std::size_t>(p.order - 1)][p.index];
}

std::vector<std::uint64_t> order_component(const CornerTree& t, int m) {
    if (m < 1 || m > kMaxOrder) throw ValidationError("order_component: bad order");
    const int v = t.size();
    const auto mf = factorial(static_cast<std::uint32_t>(m));
    std::vector<std::uint64_t> out(mf, 0);
    if (m > v) return out;

    // One-line forms of all order-m patterns, decoded once.
    std::vector<std::vector<int>> one_lines(mf);
    for (std::uint32_t pi = 0; pi < mf; ++pi) one_lines[pi] = decode_one_line(PatternId{m, pi});

    struct Edge {
        int child, parent;
        Dir d;
    };
    std::vector<Edge> edges;
    for (int u = 1; u < v; ++u) edges.push_back({u, t.parent[static_cast<std::size_t>(u)], t.label[static_cast<std::size_t>(u)]});

    std::vector<int> pos(static_cast<std::size_t>(v), -1);
    std::vector<int> cover(static_cast<std::size_t>(m), 0);
    int covered = 0;

    // Assign vertices in pre-order; E/W constraints only involve positions,
    // so they prune the search before patterns are consulted. Surviving
    // surjective maps are matched against every pattern's value order.
    std::function<void(int)> dfs = [&](int u) {
        if (u == v) {
            if (covered != m) return;
            for (std::uint32_t pi = 0; pi < mf; ++pi) {
                const auto& ol = one_lines[pi];
                bool ok = true;
                for (const Edge& e : edges) {
                    const int pc = pos[static_cast<std::size_t>(e.child)];
                    const int pp = pos[static_cast<std::size_t>(e.parent)];
                    const bool above = ol[static_cast<std::size_t>(pc)] > ol[static_cast<std::size_t>(pp)];
                    if (above != dir_is_north(e.d)) {
                        ok = false;
                        break;
                    }
                }
                if (ok) ++out[pi];
            }
            return;
        }
        const int par = t.parent[static_cast<std::size_t>(u)];
        for (int p = 0; p < m; ++p) {
            if (par >= 0) {
                const int pp = pos[static_cast<std::size_t>(par)];
                const bool later = p > pp;
                if (p == pp || later != dir_is_east(t.label[static_cast<std::size_t>(u)])) continue;
            }
            pos[static_cast<std::size_t>(u)] = p;
            if (cover[static_cast<std::size_t>(p)]++ == 0) ++covered;
            dfs(u + 1);
            if (--cover[static_cast<std::size_t>(p)] == 0) --covered;
        }
        pos[static_cast<std::size_t>(u)] = -1;
    };
    dfs(0);
    return out;
}

const CoefficientVector& coefficient_vector(const CornerTree& t) {
    static std::mutex mu;
    static std::map<std::string, std::unique_ptr<CoefficientVector>> cache;
    const std::string key = t.encoding();
    std::scoped_lock lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;
    auto cv = std::make_unique<CoefficientVector>();
    cv->tree_encoding = key;
    cv->vertices = t.size();
    for (int m = 1; m <= t.size(); ++m) cv->by_order.push_back(order_component(t, m));
    return *cache.emplace(key, std::move(cv)).first->second;
}

// ---------------------------------------------------------------------------
// Basis selection
// ---------------------------------------------------------------------------

bool IntRowReducer::add_row(std::vector<BigInt> row) {
    if (row.size() != cols_) throw InternalError("row reducer: column mismatch");
    for (const Pivot& piv : pivots_) {
        BigInt rl = row[piv.col];
        if (rl.is_zero()) continue;
        const BigInt pl = piv.row[piv.col];
        for (std::size_t j = 0; j < cols_; ++j) {
            row[j] = row[j] * pl - piv.row[j] * rl;
        }
    }
    std::size_t lead = cols_;
    for (std::size_t j = 0; j < cols_; ++j) {
        if (!row[j].is_zero()) {
            lead = j;
            break;
        }
    }
    if (lead == cols_) return false;
    BigInt g(0);
    for (const BigInt& x : row) {
        if (!x.is_zero()) g = BigInt::gcd(g, x);
    }
    const bool flip = row[lead].is_negative();
    for (BigInt& x : row) {
        x = x / g;
        if (flip) x = x.negated();
    }
    pivots_.push_back(Pivot{lead, std::move(row)});
    return true;
}

int Basis::tree_count() const {
    int c = 0;
    for (const auto& e : entries) c += e.direct_3214 ? 0 : 1;
    return c;
}

namespace {

// Exact Gauss-Jordan inverse of an integer matrix; also yields det.
void invert_exact(const std::vector<std::vector<BigInt>>& m_int,
                  std::vector<std::vector<BigInt>>& scaled_inverse, BigInt& det_out) {
    const std::size_t r = m_int.size();
    std::vector<std::vector<Rational>> m(r, std::vector<Rational>(r));
    std::vector<std::vector<Rational>> inv(r, std::vector<Rational>(r, Rational(0)));
    for (std::size_t i = 0; i < r; ++i) {
        inv[i][i] = Rational(1);
        for (std::size_t j = 0; j < r; ++j) m[i][j] = Rational(m_int[i][j], BigInt(1));
    }
    Rational det(1);
    for (std::size_t col = 0; col < r; ++col) {
        std::size_t p = col;
        while (p < r && m[p][col].is_zero()) ++p;
        if (p == r) throw InternalError("basis matrix is singular");
        if (p != col) {
            std::swap(m[p], m[col]);
            std::swap(inv[p], inv[col]);
            det = det * Rational(-1);
        }
        det = det * m[col][col];
        const Rational scale = Rational(1) / m[col][col];
        for (std::size_t j = 0; j < r; ++j) {
            m[col][j] = m[col][j] * scale;
            inv[col][j] = inv[col][j] * scale;
        }
        for (std::size_t q = 0; q < r; ++q) {
            if (q == col || m[q][col].is_zero()) continue;
            const Rational f = m[q][col];
            for (std::size_t j = 0; j < r; ++j) {
                m[q][j] = m[q][j] - f * m[col][j];
                inv[q][j] = inv[q][j] - f * inv[col][j];
            }
        }
    }
    if (!det.is_integer()) throw InternalError("integer matrix determinant is not integral");
    det_out = det.num();
    scaled_inverse.assign(r, std::vector<BigInt>(r));
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < r; ++j) {
            const Rational scaled = inv[i][j] * det;
            if (!scaled.is_integer()) throw InternalError("scaled inverse is not integral");
            scaled_inverse[i][j] = scaled.num();
        }
    }
}

}  // namespace

Basis select_basis(int k) {
    if (k < 2 || k > 4) throw ValidationError("select_basis: order must be 2, 3 or 4");
    const auto kf = factorial(static_cast<std::uint32_t>(k));
    const auto trees = enumerate_corner_trees(k);

    Basis basis;
    basis.order = k;
    IntRowReducer reducer(kf);
    for (const CornerTree& t : trees) {
        const CoefficientVector& cv = coefficient_vector(t);
        const auto& comp = cv.by_order[static_cast<std::size_t>(k - 1)];
        std::vector<BigInt> row;
        row.reserve(kf);
        for (std::uint64_t c : comp) row.push_back(BigInt(static_cast<std::int64_t>(c)));
        if (reducer.add_row(std::move(row))) {
            basis.entries.push_back(BasisEntry{false, t, cv});
        }
    }
    const int expected_trees = (k == 2) ? 2 : (k == 3) ? 6 : 23;
    if (reducer.rank() != expected_trees) {
        throw InternalError("corner-tree rank at order " + std::to_string(k) + " is " +
                            std::to_string(reducer.rank()) + ", expected " + std::to_string(expected_trees));
    }
    if (k == 4) {
        const std::array<int, 4> p3214{3, 2, 1, 4};
        const PatternId pid = encode_one_line(p3214);
        std::vector<BigInt> row(kf, BigInt(0));
        row[pid.index] = BigInt(1);
        if (!reducer.add_row(std::move(row))) {
            throw InternalError("[3214] direction is dependent: order-4 basis cannot reach rank 24");
        }
        BasisEntry direct;
        direct.direct_3214 = true;
        direct.coeffs.tree_encoding = "[3214]";
        direct.coeffs.vertices = 4;
        for (int m = 1; m <= 4; ++m) {
            direct.coeffs.by_order.emplace_back(factorial(static_cast<std::uint32_t>(m)), 0);
        }
        direct.coeffs.by_order[3][pid.index] = 1;
        basis.entries.push_back(std::move(direct));
    }
    if (basis.entries.size() != kf) throw InternalError("basis entry count mismatch");

    std::vector<std::vector<BigInt>> m(kf, std::vector<BigInt>(kf));
    for (std::size_t i = 0; i < kf; ++i) {
        const auto& comp = basis.entries[i].coeffs.by_order[static_cast<std::size_t>(k - 1)];
        for (std::size_t j = 0; j < kf; ++j) m[i][j] = BigInt(static_cast<std::int64_t>(comp[j]));
    }
    invert_exact(m, basis.scaled_inverse, basis.det);
    return basis;
}

namespace {

struct BasisStore {
    std::mutex mu;
    std::array<std::unique_ptr<const Basis>, 5> slots;  // index = order

    const Basis& get(int k) {
        std::scoped_lock lock(mu);
        auto& slot = slots[static_cast<std::size_t>(k)];
        if (!slot) slot = std::make_unique<const Basis>(select_basis(k));
        return *slot;
    }
    bool install(Basis b) {
        const int k = b.order;
        std::scoped_lock lock(mu);
        auto& slot = slots[static_cast<std::size_t>(k)];
        if (slot) return false;
        slot = std::make_unique<const Basis>(std::move(b));
        return true;
    }
};

BasisStore& basis_store() {
    static BasisStore store;
    return store;
}

}  // namespace

const Basis& shared_basis(int k) {
    if (k < 2 || k > 4) throw ValidationError("shared_basis: order must be 2, 3 or 4");
    return basis_store().get(k);
}

bool install_shared_basis(Basis basis) {
    if (basis.order < 2 || basis.order > 4) {
        throw ValidationError("install_shared_basis: order must be 2, 3 or 4");
    }
    return basis_store().install(std::move(basis));
}

std::vector<u128> basis_solve(const Basis& basis, const std::vector<BigInt>& rhs) {
    const std::size_t r = basis.entries.size();
    if (rhs.size() != r) throw InternalError("basis_solve: size mismatch");
    std::vector<u128> out(r);
    for (std::size_t i = 0; i < r; ++i) {
        BigInt dot(0);
        for (std::size_t j = 0; j < r; ++j) dot += basis.scaled_inverse[i][j] * rhs[j];
        BigInt q, rem;
        BigInt::divmod(dot, basis.det, q, rem);
        if (!rem.is_zero()) throw InternalError("profile solve produced a non-integral count");
        if (q.is_negative()) throw InternalError("profile solve produced a negative count");
        out[i] = q.to_u128();
    }
    return out;
}

CtpeBasis select_ctpe_trees(int k, const CtpeLimits& limits) {
    if (k < 2 || k > 6) throw ValidationError("corner-tree entropy order must be in [2,6]");
    const std::uint64_t candidates = corner_tree_count(k);
    if (candidates > static_cast<std::uint64_t>(limits.max_trees)) {
        throw GuardError("corner-tree basis for order " + std::to_string(k) + ": " +
                         std::to_string(candidates) + " candidate trees exceed the configured limit of " +
                         std::to_string(limits.max_trees) + " (raise --ctpe-max-trees to override)");
    }
    const auto trees = enumerate_corner_trees(k);
    const auto kf = factorial(static_cast<std::uint32_t>(k));
    CtpeBasis out;
    out.order = k;
    IntRowReducer reducer(kf);
    for (const CornerTree& t : trees) {
        const auto comp = order_component(t, k);
        std::vector<BigInt> row;
        row.reserve(kf);
        for (std::uint64_t c : comp) row.push_back(BigInt(static_cast<std::int64_t>(c)));
        if (reducer.add_row(std::move(row))) out.trees.push_back(t);
    }
    if (out.trees.empty()) throw InternalError("corner-tree basis is empty");
    return out;
}

const CtpeBasis& shared_ctpe_trees(int k, const CtpeLimits& limits) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<CtpeBasis>> cache;
    if (limits.max_trees != CtpeLimits{}.max_trees) {
        static std::mutex mu2;
        static std::map<std::pair<int, int>, std::unique_ptr<CtpeBasis>> cache2;
        std::scoped_lock lock(mu2);
        auto key = std::make_pair(k, limits.max_trees);
        auto it = cache2.find(key);
        if (it == cache2.end()) {
            it = cache2.emplace(key, std::make_unique<CtpeBasis>(select_ctpe_trees(k, limits))).first;
        }
        return *it->second;
    }
    std::scoped_lock lock(mu);
    auto it = cache.find(k);
    if (it == cache.end()) {
        it = cache.emplace(k, std::make_unique<CtpeBasis>(select_ctpe_trees(k, limits))).first;
    }
    return *it->second;
}

}  // namespace gpe
