#include "gpe/entropy.hpp"

#include <algorithm>
#include <cmath>

namespace gpe {

const char* entropy_kind_name(EntropyKind k) {
    switch (k) {
        case EntropyKind::GPE: return "gpe";
        case EntropyKind::PE: return "pe";
        case EntropyKind::PEavg: return "peavg";
        case EntropyKind::CTPE: return "ctpe";
    }
    throw InternalError("bad entropy kind");
}

EntropyKind entropy_kind_from_string(const std::string& s) {
    if (s == "gpe") return EntropyKind::GPE;
    if (s == "pe") return EntropyKind::PE;
    if (s == "peavg") return EntropyKind::PEavg;
    if (s == "ctpe") return EntropyKind::CTPE;
    throw ValidationError("unknown entropy kind: " + s);
}

double shannon(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0 || !std::isfinite(w)) throw ValidationError("shannon: weights must be finite and non-negative");
        total += w;
    }
    if (total <= 0.0) throw ValidationError("shannon: all-zero weights define no distribution");
    double h = 0.0;
    for (double w : weights) {
        if (w == 0.0) continue;
        const double p = w / total;
        h -= p * std::log(p);
    }
    return std::max(h, 0.0);
}

double shannon_counts(std::span<const u128> counts) {
    u128 total = 0;
    for (u128 c : counts) total += c;
    if (total == 0) throw ValidationError("shannon: all-zero counts define no distribution");
    // One division pass from exact integer counts; no incremental float
    // accumulation of probabilities.
    const double dt = u128_to_double(total);
    double h = 0.0;
    for (u128 c : counts) {
        if (c == 0) continue;
        const double p = u128_to_double(c) / dt;
        h -= p * std::log(p);
    }
    return std::max(h, 0.0);
}

EntropyValue gpe(const RankSequence& rs, int k, const ProfileOptions& options) {
    if (k < 2 || k > 6) throw ValidationError("gpe: order out of range [2,6]");
    const auto n = static_cast<std::uint64_t>(rs.size());
    if (n < static_cast<std::uint64_t>(k)) {
        throw ValidationError("gpe: series length " + std::to_string(n) + " is below order " +
                              std::to_string(k) + " (insufficient data)");
    }
    const Profile p = profile(rs, k, options);
    EntropyValue ev;
    ev.kind = EntropyKind::GPE;
    ev.order = k;
    ev.raw = shannon_counts(p.counts);
    ev.normalized = ev.raw / std::log(static_cast<double>(factorial(static_cast<std::uint32_t>(k))));
    ev.normalized = std::clamp(ev.normalized, 0.0, 1.0);
    ev.sample_size = p.total();
    ev.method = p.method;
    return ev;
}

EntropyValue pe(const RankSequence& rs, int k, int delay) {
    if (k < 2 || k > kMaxOrder) throw ValidationError("pe: order out of range [2,8]");
    if (delay < 1) throw ValidationError("pe: delay must be >= 1");
    const int n = static_cast<int>(rs.size());
    const int samples = n - delay * (k - 1);
    if (samples < 1) {
        throw ValidationError("pe: window of length " + std::to_string(n) +
                              " admits no (k=" + std::to_string(k) + ", tau=" + std::to_string(delay) +
                              ") tuple (insufficient data)");
    }
    std::vector<u128> counts(factorial(static_cast<std::uint32_t>(k)), 0);
    std::vector<int> tuple(static_cast<std::size_t>(k));
    for (int i = 0; i < samples; ++i) {
        for (int j = 0; j < k; ++j) tuple[static_cast<std::size_t>(j)] = rs.ranks[static_cast<std::size_t>(i + j * delay)];
        ++counts[pattern_of_tuple(tuple).index];
    }
    EntropyValue ev;
    ev.kind = EntropyKind::PE;
    ev.order = k;
    ev.delay = delay;
    ev.raw = shannon_counts(counts);
    ev.normalized = ev.raw / std::log(static_cast<double>(factorial(static_cast<std::uint32_t>(k))));
    ev.normalized = std::clamp(ev.normalized, 0.0, 1.0);
    ev.sample_size = static_cast<u128>(samples);
    ev.method = "direct";
    return ev;
}

EntropyValue pe_avg(const RankSequence& rs, int k, std::span<const int> delays) {
    if (delays.empty()) throw ValidationError("pe_avg: empty delay set");
    EntropyValue ev;
    ev.kind = EntropyKind::PEavg;
    ev.order = k;
    ev.method = "direct";
    ev.sample_size = 0;
    double raw_sum = 0.0, norm_sum = 0.0;
    for (int tau : delays) {
        EntropyValue one;
        try {
            one = pe(rs, k, tau);
        } catch (const ValidationError& e) {
            throw ValidationError("pe_avg: delay " + std::to_string(tau) + " infeasible: " + e.what());
        }
        raw_sum += one.raw;
        norm_sum += one.normalized;
        if (ev.sample_size == 0 || one.sample_size < ev.sample_size) ev.sample_size = one.sample_size;
        ev.delays.push_back(tau);
    }
    ev.raw = raw_sum / static_cast<double>(delays.size());
    ev.normalized = norm_sum / static_cast<double>(delays.size());
    return ev;
}

EntropyValue ctpe(const RankSequence& rs, int k, const CtpeLimits& limits) {
    if (k < 2 || k > 6) throw ValidationError("ctpe: order out of range [2,6]");
    const CtpeBasis& basis = shared_ctpe_trees(k, limits);
    std::vector<u128> counts;
    counts.reserve(basis.trees.size());
    CountWorkspace ws;
    u128 total = 0;
    for (const CornerTree& t : basis.trees) {
        counts.push_back(count_tree(t, rs, &ws));
        total += counts.back();
    }
    if (total == 0) {
        throw ValidationError("ctpe: all corner-tree counts are zero (series too short)");
    }
    EntropyValue ev;
    ev.kind = EntropyKind::CTPE;
    ev.order = k;
    ev.raw = shannon_counts(counts);
    ev.normalized = ev.raw / std::log(static_cast<double>(counts.size()));
    ev.normalized = std::clamp(ev.normalized, 0.0, 1.0);
    ev.sample_size = total;
    ev.method = "trees=" + std::to_string(counts.size()) + ";normalized_by=log_basis_size";
    return ev;
}

}  // namespace gpe
