// entropy.hpp — Shannon entropy over pattern distributions.
//
// All raw values are natural-log (nats); normalized values divide by
// log(k!) and are base-invariant, matching the convention that normalized
// entropies live in [0,1].
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gpe/common.hpp"
#include "gpe/cornertree.hpp"
#include "gpe/profile.hpp"
#include "gpe/series.hpp"

namespace gpe {

enum class EntropyKind { GPE, PE, PEavg, CTPE };

const char* entropy_kind_name(EntropyKind k);
EntropyKind entropy_kind_from_string(const std::string& s);

struct EntropyValue {
    EntropyKind kind = EntropyKind::GPE;
    int order = 0;
    std::optional<int> delay;   // PE
    std::vector<int> delays;    // PEavg
    double raw = 0.0;           // nats
    double normalized = 0.0;    // in [0,1]
    u128 sample_size = 0;       // C(n,k) for GPE; n - tau(k-1) for PE
    std::string method;
};

// -sum p log p over the normalized weights, with 0 log 0 := 0.
// All-zero weights are an undefined distribution and rejected.
double shannon(std::span<const double> weights);
double shannon_counts(std::span<const u128> counts);

EntropyValue gpe(const RankSequence& rs, int k, const ProfileOptions& options = {});
EntropyValue pe(const RankSequence& rs, int k, int delay = 1);
EntropyValue pe_avg(const RankSequence& rs, int k, std::span<const int> delays);

// Shannon entropy of the counts of the maximal independent corner-tree set
// with k vertices. The normalization by log(basis size) is a convention of
// this library and is flagged in the method metadata.
EntropyValue ctpe(const RankSequence& rs, int k, const CtpeLimits& limits = {});

}  // namespace gpe
