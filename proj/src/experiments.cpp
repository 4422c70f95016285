#include "gpe/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "gpe/entropy.hpp"
#include "gpe/patterns.hpp"
#include "gpe/profile.hpp"

#include "json.hpp"

namespace gpe {

// ---------------------------------------------------------------------------
// RNG
// ---------------------------------------------------------------------------

namespace {

std::uint64_t splitmix64_next(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t rotl64(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& s : state_) s = splitmix64_next(x);
}

Rng Rng::for_run(std::uint64_t master_seed, std::uint64_t run_index) {
    std::uint64_t x = master_seed + (run_index + 1) * 0x9E3779B97F4A7C15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return Rng(z ^ (z >> 31));
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl64(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl64(state_[3], 45);
    return result;
}

double Rng::next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::next_normal() {
    const double u1 = 1.0 - next_unit();  // (0,1]
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

// ---------------------------------------------------------------------------
// Signal generators
// ---------------------------------------------------------------------------

SignalFamily signal_family_from_string(const std::string& s) {
    if (s == "iid") return SignalFamily::Iid;
    if (s == "noisy_line") return SignalFamily::NoisyLine;
    if (s == "noisy_sine") return SignalFamily::NoisySine;
    if (s == "noise_burst") return SignalFamily::NoiseBurst;
    if (s == "ramp_noise") return SignalFamily::RampNoise;
    throw ValidationError("unknown signal family: " + s);
}

const char* signal_family_name(SignalFamily f) {
    switch (f) {
        case SignalFamily::Iid: return "iid";
        case SignalFamily::NoisyLine: return "noisy_line";
        case SignalFamily::NoisySine: return "noisy_sine";
        case SignalFamily::NoiseBurst: return "noise_burst";
        case SignalFamily::RampNoise: return "ramp_noise";
    }
    throw InternalError("bad signal family");
}

TimeSeries gen_signal(const SignalSpec& spec, Rng& rng) {
    constexpr double kPi = 3.14159265358979323846;
    TimeSeries ts;
    switch (spec.family) {
        case SignalFamily::Iid: {
            if (spec.length < 1) throw ValidationError("iid: length must be >= 1");
            ts.values.reserve(static_cast<std::size_t>(spec.length));
            for (int t = 0; t < spec.length; ++t) ts.values.push_back(rng.next_normal());
            return ts;
        }
        case SignalFamily::NoisyLine: {
            if (spec.length < 1) throw ValidationError("noisy_line: length must be >= 1");
            if (spec.noise_var < 0) throw ValidationError("noisy_line: noise variance must be >= 0");
            const double sd = spec.noise_sd >= 0 ? spec.noise_sd : std::sqrt(spec.noise_var);
            for (int t = 1; t <= spec.length; ++t) {
                ts.values.push_back(spec.slope * t + sd * rng.next_normal());
            }
            return ts;
        }
        case SignalFamily::NoisySine: {
            if (spec.length < 2) throw ValidationError("noisy_sine: length must be >= 2");
            if (spec.noise_var < 0) throw ValidationError("noisy_sine: noise variance must be >= 0");
            const double sd = spec.noise_sd >= 0 ? spec.noise_sd : std::sqrt(spec.noise_var);
            for (int i = 0; i < spec.length; ++i) {
                const double x = kPi * static_cast<double>(i) / static_cast<double>(spec.length - 1);
                ts.values.push_back(std::sin(x) + sd * rng.next_normal());
            }
            return ts;
        }
        case SignalFamily::NoiseBurst: {
            if (spec.period < 2 || spec.period % 2 != 0) {
                throw ValidationError("noise_burst: period must be even and >= 2");
            }
            if (spec.eps < 0) throw ValidationError("noise_burst: eps must be >= 0");
            const int P = spec.period;
            const int len = 9 * P / 2;  // quiet on 1..3P, full-variance on 3P..(9/2)P
            ts.values.reserve(static_cast<std::size_t>(len));
            for (int t = 1; t <= len; ++t) {
                const double scale = t <= 3 * P ? spec.eps : 1.0;
                ts.values.push_back(std::sin(2.0 * kPi * t / P) + scale * rng.next_normal());
            }
            return ts;
        }
        case SignalFamily::RampNoise: {
            if (spec.period < 2) throw ValidationError("ramp_noise: period must be >= 2");
            if (spec.sigma2 <= 0) throw ValidationError("ramp_noise: sigma^2 must be > 0");
            const int P = spec.period;
            const int len = 10 * P;
            const double sd = std::sqrt(spec.sigma2);
            ts.values.reserve(static_cast<std::size_t>(len));
            for (int t = 1; t <= len; ++t) {
                const double prefactor = static_cast<double>(t) / (10.0 * P);
                ts.values.push_back(std::sin(2.0 * kPi * t / P) + prefactor * sd * rng.next_normal());
            }
            return ts;
        }
    }
    throw InternalError("bad signal family");
}

// ---------------------------------------------------------------------------
// ROC / AUC
// ---------------------------------------------------------------------------

ROCResult roc_auc(std::span<const double> noisy_scores, std::span<const double> quiet_scores) {
    if (noisy_scores.empty() || quiet_scores.empty()) {
        throw ValidationError("roc_auc: both score sets must be non-empty");
    }
    struct Obs {
        double score;
        bool positive;
    };
    std::vector<Obs> obs;
    obs.reserve(noisy_scores.size() + quiet_scores.size());
    for (double s : noisy_scores) obs.push_back({s, true});
    for (double s : quiet_scores) obs.push_back({s, false});
    std::sort(obs.begin(), obs.end(), [](const Obs& a, const Obs& b) { return a.score > b.score; });

    const double npos = static_cast<double>(noisy_scores.size());
    const double nneg = static_cast<double>(quiet_scores.size());

    ROCResult out;
    out.sweep_points.emplace_back(0.0, 0.0);
    double auc = 0.0;
    double prev_fpr = 0.0, prev_tpr = 0.0;
    std::size_t tp = 0, fp = 0;
    std::size_t i = 0;
    // Each distinct observed score is a threshold T; ties advance both
    // counts at once, which makes the trapezoid match the pairwise
    // statistic with ties counted one half.
    while (i < obs.size()) {
        const double t = obs[i].score;
        for (; i < obs.size() && obs[i].score == t; ++i) {
            if (obs[i].positive) {
                ++tp;
            } else {
                ++fp;
            }
        }
        const double tpr = static_cast<double>(tp) / npos;
        const double fpr = static_cast<double>(fp) / nneg;
        auc += (fpr - prev_fpr) * (tpr + prev_tpr) * 0.5;
        out.sweep_points.emplace_back(fpr, tpr);
        prev_fpr = fpr;
        prev_tpr = tpr;
    }
    out.auc = auc;
    return out;
}

// ---------------------------------------------------------------------------
// Stats helpers
// ---------------------------------------------------------------------------

double mean_of(std::span<const double> xs) {
    if (xs.empty()) throw ValidationError("mean of empty sample");
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double sample_std(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean_of(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

double ci95_halfwidth(std::span<const double> xs) {
    if (xs.empty()) throw ValidationError("ci of empty sample");
    return 1.96 * sample_std(xs) / std::sqrt(static_cast<double>(xs.size()));
}

namespace {

std::vector<double> average_ranks(std::span<const double> xs) {
    const std::size_t n = xs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
        const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t q = i; q <= j; ++q) ranks[order[q]] = r;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double spearman(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2) {
        throw ValidationError("spearman: samples must have equal size >= 2");
    }
    const auto rx = average_ranks(xs);
    const auto ry = average_ranks(ys);
    const double mx = mean_of(rx), my = mean_of(ry);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

// ---------------------------------------------------------------------------
// Report plumbing
// ---------------------------------------------------------------------------

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

const Table& ExperimentReport::table(const std::string& name) const {
    for (const Table& t : tables) {
        if (t.name == name) return t;
    }
    throw InternalError("report has no table named " + name);
}

void write_table_csv(std::ostream& out, const Table& t) {
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
        if (c) out << ',';
        out << t.columns[c];
    }
    out << '\n';
    for (const auto& row : t.rows) {
        if (row.size() != t.columns.size()) throw InternalError("table row width mismatch");
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out << ',';
            out << row[c];
        }
        out << '\n';
    }
}

namespace {

void stage_file(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write to " + tmp.string());
    out << content;
    if (!out.good()) throw ValidationError("write failed: " + tmp.string());
}

// Deterministic parallel map over run indices: each worker writes only its
// own slots, aggregation happens after the join in index order.
void parallel_runs(int n_runs, int threads, const std::function<void(int)>& fn) {
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    threads = std::min(threads, n_runs);
    if (threads <= 1) {
        for (int i = 0; i < n_runs; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex err_mu;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            while (true) {
                const int i = next.fetch_add(1);
                if (i >= n_runs) break;
                try {
                    fn(i);
                } catch (...) {
                    std::scoped_lock lock(err_mu);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::string join_ints(std::span<const int> xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(xs[i]);
    }
    return out;
}

std::string join_doubles(std::span<const double> xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ',';
        out += format_double(xs[i]);
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Convergence experiment
// ---------------------------------------------------------------------------

ExperimentReport run_convergence(const ConvergenceConfig& cfg) {
    if (cfg.runs < 1) throw ValidationError("convergence: runs must be >= 1");
    if (cfg.length < 2) throw ValidationError("convergence: length must be >= 2");
    std::vector<int> orders = cfg.orders;
    std::sort(orders.begin(), orders.end());
    orders.erase(std::unique(orders.begin(), orders.end()), orders.end());
    for (int k : orders) {
        if (k < 2 || k > 6) throw ValidationError("convergence: orders must lie in [2,6]");
        const u128 tuples = binomial(static_cast<std::uint64_t>(cfg.length), static_cast<std::uint32_t>(k));
        if (tuples > cfg.tuple_budget) {
            throw GuardError("convergence: C(" + std::to_string(cfg.length) + "," + std::to_string(k) +
                             ") = " + u128_to_string(tuples) + " exceeds the tuple budget of " +
                             u128_to_string(cfg.tuple_budget));
        }
    }

    const std::size_t norders = orders.size();
    const auto len = static_cast<std::size_t>(cfg.length);
    // slot layout per run: [order][prefix length] for gpe then pe
    std::vector<std::vector<double>> gpe_runs(static_cast<std::size_t>(cfg.runs)),
        pe_runs(static_cast<std::size_t>(cfg.runs));

    parallel_runs(cfg.runs, cfg.threads, [&](int r) {
        Rng rng = Rng::for_run(cfg.seed, static_cast<std::uint64_t>(r));
        SignalSpec spec;
        spec.family = SignalFamily::Iid;
        spec.length = cfg.length;
        const TimeSeries ts = gen_signal(spec, rng);
        const RankSequence rs = rank_series(ts);

        auto& gr = gpe_runs[static_cast<std::size_t>(r)];
        auto& pr = pe_runs[static_cast<std::size_t>(r)];
        gr.assign(norders * len, 0.0);
        pr.assign(norders * len, 0.0);

        for (std::size_t ki = 0; ki < norders; ++ki) {
            const int k = orders[ki];
            const double log_kf = std::log(static_cast<double>(factorial(static_cast<std::uint32_t>(k))));
            std::vector<u128> gpe_counts(factorial(static_cast<std::uint32_t>(k)), 0);
            std::vector<u128> pe_counts(factorial(static_cast<std::uint32_t>(k)), 0);
            std::vector<int> tuple(static_cast<std::size_t>(k));
            for (int m = k; m <= cfg.length; ++m) {
                // prefix grows to m points; add the tuples that end there
                add_patterns_ending_at(rs, k, m - 1, gpe_counts);
                for (int j = 0; j < k; ++j) {
                    tuple[static_cast<std::size_t>(j)] = rs.ranks[static_cast<std::size_t>(m - k + j)];
                }
                ++pe_counts[pattern_of_tuple(tuple).index];
                gr[ki * len + static_cast<std::size_t>(m - 1)] = shannon_counts(gpe_counts) / log_kf;
                pr[ki * len + static_cast<std::size_t>(m - 1)] = shannon_counts(pe_counts) / log_kf;
            }
        }
    });

    ExperimentReport rep;
    rep.experiment = "convergence";
    rep.seed = cfg.seed;
    rep.config_echo = {{"experiment", "convergence"},
                       {"seed", std::to_string(cfg.seed)},
                       {"runs", std::to_string(cfg.runs)},
                       {"length", std::to_string(cfg.length)},
                       {"orders", join_ints(orders)},
                       {"tuple_budget", u128_to_string(cfg.tuple_budget)}};

    Table t;
    t.name = "mean_curves";
    t.columns.push_back("window");
    for (int k : orders) {
        t.columns.push_back("gpe" + std::to_string(k));
        t.columns.push_back("pe" + std::to_string(k));
    }
    for (int m = 2; m <= cfg.length; ++m) {
        std::vector<std::string> row;
        row.push_back(std::to_string(m));
        for (std::size_t ki = 0; ki < norders; ++ki) {
            if (m < orders[ki]) {
                row.emplace_back();
                row.emplace_back();
                continue;
            }
            double gsum = 0.0, psum = 0.0;
            for (int r = 0; r < cfg.runs; ++r) {
                gsum += gpe_runs[static_cast<std::size_t>(r)][ki * len + static_cast<std::size_t>(m - 1)];
                psum += pe_runs[static_cast<std::size_t>(r)][ki * len + static_cast<std::size_t>(m - 1)];
            }
            row.push_back(format_double(gsum / cfg.runs));
            row.push_back(format_double(psum / cfg.runs));
        }
        t.rows.push_back(std::move(row));
    }
    rep.tables.push_back(std::move(t));
    return rep;
}

// ---------------------------------------------------------------------------
// Noise detection experiment
// ---------------------------------------------------------------------------

namespace {

struct Variant {
    EntropyKind kind;
    int order;
    int delay;  // PE only; 0 otherwise

    std::string desc() const {
        std::string s = entropy_kind_name(kind);
        s += " k=" + std::to_string(order);
        if (kind == EntropyKind::PE) s += " tau=" + std::to_string(delay);
        return s;
    }
    std::string delay_cell(int width) const {
        if (kind == EntropyKind::PE) return std::to_string(delay);
        if (kind == EntropyKind::PEavg) {
            return "avg1-" + std::to_string((width - 1) / (order - 1));
        }
        return "";
    }
};

std::vector<Variant> noise_variants(int w, std::span<const int> orders) {
    std::vector<Variant> out;
    for (int k : orders) out.push_back({EntropyKind::GPE, k, 0});
    for (int k : orders) {
        for (int tau : feasible_delays(w, k)) out.push_back({EntropyKind::PE, k, tau});
        out.push_back({EntropyKind::PEavg, k, 0});
    }
    return out;
}

}  // namespace

ExperimentReport run_noise_detection(const NoiseDetectionConfig& cfg) {
    if (cfg.runs < 2) throw ValidationError("noise_detection: runs must be >= 2");
    if (cfg.period < 6 || cfg.period % 2 != 0) {
        throw ValidationError("noise_detection: period must be even and >= 6");
    }
    if (cfg.eps < 0) throw ValidationError("noise_detection: eps must be >= 0");
    std::vector<int> orders = cfg.orders;
    std::sort(orders.begin(), orders.end());
    orders.erase(std::unique(orders.begin(), orders.end()), orders.end());
    for (int k : orders) {
        if (k < 2 || k > 6) throw ValidationError("noise_detection: orders must lie in [2,6]");
    }

    const int P = cfg.period;
    const int seg = 3 * P / 2;       // scored segment length
    const int onset = 3 * P;         // last quiet time point
    const int len = 9 * P / 2;
    const int w_lo = 8, w_hi = seg + 1;
    if (w_hi < w_lo) throw ValidationError("noise_detection: period too small for the window range");
    for (int k : orders) {
        if (k > w_lo) throw ValidationError("noise_detection: order exceeds smallest window");
    }

    std::vector<int> widths;
    for (int w = w_lo; w <= w_hi; ++w) widths.push_back(w);
    std::vector<std::vector<Variant>> variants;  // per width
    variants.reserve(widths.size());
    for (int w : widths) variants.push_back(noise_variants(w, orders));

    // auc[w][variant][run]
    std::vector<std::vector<std::vector<double>>> auc(widths.size());
    for (std::size_t wi = 0; wi < widths.size(); ++wi) {
        auc[wi].assign(variants[wi].size(), std::vector<double>(static_cast<std::size_t>(cfg.runs), 0.0));
    }

    parallel_runs(cfg.runs, cfg.threads, [&](int r) {
        Rng rng = Rng::for_run(cfg.seed, static_cast<std::uint64_t>(r));
        SignalSpec spec;
        spec.family = SignalFamily::NoiseBurst;
        spec.period = P;
        spec.eps = cfg.eps;
        const TimeSeries sig = gen_signal(spec, rng);

        for (std::size_t wi = 0; wi < widths.size(); ++wi) {
            const int w = widths[wi];
            const auto& vars = variants[wi];
            // series[v][t - w] = entropy of the window ending at t
            std::vector<std::vector<double>> series(vars.size(),
                                                    std::vector<double>(static_cast<std::size_t>(len - w + 1)));
            for (int t = w; t <= len; ++t) {
                const std::span<const double> window(sig.values.data() + (t - w),
                                                     static_cast<std::size_t>(w));
                const RankSequence rs = rank_of_values(window);
                // compute PE for every feasible (k, tau) once; PEavg reuses it
                std::vector<std::vector<double>> pe_by_order(orders.size());
                for (std::size_t ki = 0; ki < orders.size(); ++ki) {
                    const int k = orders[ki];
                    const int max_tau = (w - 1) / (k - 1);
                    pe_by_order[ki].reserve(static_cast<std::size_t>(max_tau));
                    for (int tau = 1; tau <= max_tau; ++tau) {
                        pe_by_order[ki].push_back(pe(rs, k, tau).normalized);
                    }
                }
                for (std::size_t vi = 0; vi < vars.size(); ++vi) {
                    const Variant& v = vars[vi];
                    double val = 0.0;
                    const auto ki = static_cast<std::size_t>(
                        std::find(orders.begin(), orders.end(), v.order) - orders.begin());
                    switch (v.kind) {
                        case EntropyKind::GPE:
                            val = gpe(rs, v.order).normalized;
                            break;
                        case EntropyKind::PE:
                            val = pe_by_order[ki][static_cast<std::size_t>(v.delay - 1)];
                            break;
                        case EntropyKind::PEavg:
                            val = mean_of(pe_by_order[ki]);
                            break;
                        case EntropyKind::CTPE:
                            throw InternalError("noise_detection: unexpected variant");
                    }
                    series[vi][static_cast<std::size_t>(t - w)] = val;
                }
            }
            for (std::size_t vi = 0; vi < vars.size(); ++vi) {
                const double* base = series[vi].data() - w;  // entry t lives at base[t]
                const std::span<const double> quiet(base + (onset - seg + 1), static_cast<std::size_t>(seg));
                const std::span<const double> noisy(base + (onset + 1), static_cast<std::size_t>(seg));
                auc[wi][vi][static_cast<std::size_t>(r)] = roc_auc(noisy, quiet).auc;
            }
        }
    });

    ExperimentReport rep;
    rep.experiment = "noise_detection";
    rep.seed = cfg.seed;
    rep.config_echo = {{"experiment", "noise_detection"}, {"seed", std::to_string(cfg.seed)},
                       {"runs", std::to_string(cfg.runs)}, {"period", std::to_string(P)},
                       {"eps", format_double(cfg.eps)},   {"orders", join_ints(orders)},
                       {"windows", std::to_string(w_lo) + ".." + std::to_string(w_hi)}};

    Table full;
    full.name = "auc_full";
    full.columns = {"window", "method", "order", "delay", "mean_auc", "ci95"};
    // best over the whole grid, per family
    double best_gpe = -1.0, best_pe = -1.0;
    std::size_t best_gpe_w = 0, best_gpe_v = 0, best_pe_w = 0, best_pe_v = 0;

    Table by_window;
    by_window.name = "auc_best_by_window";
    by_window.columns = {"window", "gpe_best",     "gpe_mean_auc", "gpe_ci95",
                         "pe_best", "pe_mean_auc", "pe_ci95"};

    for (std::size_t wi = 0; wi < widths.size(); ++wi) {
        double wbest_gpe = -1.0, wbest_pe = -1.0;
        std::size_t wbest_gpe_v = 0, wbest_pe_v = 0;
        for (std::size_t vi = 0; vi < variants[wi].size(); ++vi) {
            const Variant& v = variants[wi][vi];
            const double m = mean_of(auc[wi][vi]);
            const double ci = ci95_halfwidth(auc[wi][vi]);
            full.rows.push_back({std::to_string(widths[wi]), entropy_kind_name(v.kind),
                                 std::to_string(v.order), v.delay_cell(widths[wi]), format_double(m),
                                 format_double(ci)});
            if (v.kind == EntropyKind::GPE) {
                if (m > wbest_gpe) {
                    wbest_gpe = m;
                    wbest_gpe_v = vi;
                }
                if (m > best_gpe) {
                    best_gpe = m;
                    best_gpe_w = wi;
                    best_gpe_v = vi;
                }
            } else {
                if (m > wbest_pe) {
                    wbest_pe = m;
                    wbest_pe_v = vi;
                }
                if (m > best_pe) {
                    best_pe = m;
                    best_pe_w = wi;
                    best_pe_v = vi;
                }
            }
        }
        by_window.rows.push_back(
            {std::to_string(widths[wi]), variants[wi][wbest_gpe_v].desc(), format_double(wbest_gpe),
             format_double(ci95_halfwidth(auc[wi][wbest_gpe_v])), variants[wi][wbest_pe_v].desc(),
             format_double(wbest_pe), format_double(ci95_halfwidth(auc[wi][wbest_pe_v]))});
    }

    // Paired difference of the best GPE variant vs the best PE-family variant.
    std::vector<double> diff(static_cast<std::size_t>(cfg.runs));
    for (int r = 0; r < cfg.runs; ++r) {
        diff[static_cast<std::size_t>(r)] = auc[best_gpe_w][best_gpe_v][static_cast<std::size_t>(r)] -
                                            auc[best_pe_w][best_pe_v][static_cast<std::size_t>(r)];
    }
    const double dmean = mean_of(diff);
    const double dci = ci95_halfwidth(diff);

    Table summary;
    summary.name = "summary";
    summary.columns = {"best_gpe",      "best_gpe_window", "best_gpe_auc", "best_pe",
                       "best_pe_window", "best_pe_auc",    "diff_mean",    "diff_ci_lo",
                       "diff_ci_hi"};
    summary.rows.push_back({variants[best_gpe_w][best_gpe_v].desc(), std::to_string(widths[best_gpe_w]),
                            format_double(best_gpe), variants[best_pe_w][best_pe_v].desc(),
                            std::to_string(widths[best_pe_w]), format_double(best_pe),
                            format_double(dmean), format_double(dmean - dci), format_double(dmean + dci)});

    rep.tables.push_back(std::move(full));
    rep.tables.push_back(std::move(by_window));
    rep.tables.push_back(std::move(summary));
    return rep;
}

// ---------------------------------------------------------------------------
// Ramp experiment
// ---------------------------------------------------------------------------

ExperimentReport run_ramp(const RampConfig& cfg) {
    if (cfg.runs < 2) throw ValidationError("ramp: runs must be >= 2");
    if (cfg.periods.empty() || cfg.sigma2s.empty()) throw ValidationError("ramp: empty parameter grid");
    if (cfg.windows.empty()) throw ValidationError("ramp: no window sizes");
    for (int P : cfg.periods) {
        if (P < 2) throw ValidationError("ramp: period must be >= 2");
    }
    for (int k : cfg.gpe_orders) {
        if (k < 2 || k > 6) throw ValidationError("ramp: gpe orders must lie in [2,6]");
    }
    if (cfg.pe_order < 2 || cfg.pe_order > 8) throw ValidationError("ramp: pe order out of range");
    if (cfg.pe_avg_lo < 1 || cfg.pe_avg_hi < cfg.pe_avg_lo) {
        throw ValidationError("ramp: bad pe averaging range");
    }

    ExperimentReport rep;
    rep.experiment = "ramp";
    rep.seed = cfg.seed;
    rep.config_echo = {{"experiment", "ramp"},
                       {"seed", std::to_string(cfg.seed)},
                       {"runs", std::to_string(cfg.runs)},
                       {"periods", join_ints(cfg.periods)},
                       {"sigma2s", join_doubles(cfg.sigma2s)},
                       {"windows", join_ints(cfg.windows)},
                       {"gpe_orders", join_ints(cfg.gpe_orders)},
                       {"pe_order", std::to_string(cfg.pe_order)},
                       {"pe_delays", join_ints(cfg.pe_delays)},
                       {"pe_avg", std::to_string(cfg.pe_avg_lo) + ".." + std::to_string(cfg.pe_avg_hi)},
                       {"sweep", cfg.sweep_enabled ? "on" : "off"}};

    Table curves;
    curves.name = "mean_entropy_curves";
    curves.columns = {"period", "sigma2", "window", "method", "order", "delay", "t", "mean_entropy"};
    Table trend;
    trend.name = "trend";
    // spearman_period_means rank-correlates the per-period block means with
    // time, separating the rising-noise trend from the phase-locked
    // oscillation that windows near P/2 pick up from the sine itself.
    trend.columns = {"period",      "sigma2", "window", "method",
                     "order",       "delay",  "spearman_vs_time", "spearman_period_means"};
    Table skipped;
    skipped.name = "skipped";
    skipped.columns = {"context", "reason"};

    struct RampVariant {
        EntropyKind kind;
        int order;
        int delay;  // PE
        std::string method, delay_cell;
    };

    for (int P : cfg.periods) {
        for (double s2 : cfg.sigma2s) {
            const int len = 10 * P;
            // Signals are retained: the sweep below reuses the ensemble.
            std::vector<TimeSeries> signals(static_cast<std::size_t>(cfg.runs));
            parallel_runs(cfg.runs, cfg.threads, [&](int r) {
                Rng rng = Rng::for_run(cfg.seed, static_cast<std::uint64_t>(r));
                SignalSpec spec;
                spec.family = SignalFamily::RampNoise;
                spec.period = P;
                spec.sigma2 = s2;
                signals[static_cast<std::size_t>(r)] = gen_signal(spec, rng);
            });

            for (int w : cfg.windows) {
                if (w > len) {
                    skipped.rows.push_back({"P=" + std::to_string(P) + " w=" + std::to_string(w),
                                            "window exceeds signal length"});
                    continue;
                }
                std::vector<RampVariant> vars;
                for (int k : cfg.gpe_orders) vars.push_back({EntropyKind::GPE, k, 0, "gpe", ""});
                const int max_tau = (w - 1) / (cfg.pe_order - 1);
                for (int tau : cfg.pe_delays) {
                    if (tau > max_tau) {
                        skipped.rows.push_back(
                            {"P=" + std::to_string(P) + " w=" + std::to_string(w) +
                                 " pe tau=" + std::to_string(tau),
                             "delay infeasible (max " + std::to_string(max_tau) + ")"});
                        continue;
                    }
                    vars.push_back({EntropyKind::PE, cfg.pe_order, tau, "pe", std::to_string(tau)});
                }
                if (cfg.pe_avg_hi <= max_tau) {
                    vars.push_back({EntropyKind::PEavg, cfg.pe_order, 0, "peavg",
                                    "avg" + std::to_string(cfg.pe_avg_lo) + "-" + std::to_string(cfg.pe_avg_hi)});
                } else {
                    skipped.rows.push_back({"P=" + std::to_string(P) + " w=" + std::to_string(w) + " peavg",
                                            "averaging range exceeds feasible delays"});
                }

                const std::size_t nt = static_cast<std::size_t>(len - w + 1);
                // mean over runs accumulated in run order after the join
                std::vector<std::vector<std::vector<double>>> per_run(
                    static_cast<std::size_t>(cfg.runs));
                parallel_runs(cfg.runs, cfg.threads, [&](int r) {
                    auto& mine = per_run[static_cast<std::size_t>(r)];
                    mine.assign(vars.size(), std::vector<double>(nt, 0.0));
                    const TimeSeries& sig = signals[static_cast<std::size_t>(r)];
                    std::vector<int> avg_delays;
                    for (int tau = cfg.pe_avg_lo; tau <= cfg.pe_avg_hi; ++tau) avg_delays.push_back(tau);
                    for (int t = w; t <= len; ++t) {
                        const std::span<const double> window(sig.values.data() + (t - w),
                                                             static_cast<std::size_t>(w));
                        const RankSequence rs = rank_of_values(window);
                        for (std::size_t vi = 0; vi < vars.size(); ++vi) {
                            const RampVariant& v = vars[vi];
                            double val = 0.0;
                            switch (v.kind) {
                                case EntropyKind::GPE:
                                    val = gpe(rs, v.order).normalized;
                                    break;
                                case EntropyKind::PE:
                                    val = pe(rs, v.order, v.delay).normalized;
                                    break;
                                case EntropyKind::PEavg:
                                    val = pe_avg(rs, v.order, avg_delays).normalized;
                                    break;
                                case EntropyKind::CTPE:
                                    throw InternalError("ramp: unexpected variant");
                            }
                            mine[vi][static_cast<std::size_t>(t - w)] = val;
                        }
                    }
                });

                for (std::size_t vi = 0; vi < vars.size(); ++vi) {
                    const RampVariant& v = vars[vi];
                    std::vector<double> mean_curve(nt, 0.0);
                    for (int r = 0; r < cfg.runs; ++r) {
                        for (std::size_t i = 0; i < nt; ++i) {
                            mean_curve[i] += per_run[static_cast<std::size_t>(r)][vi][i];
                        }
                    }
                    std::vector<double> times(nt);
                    for (std::size_t i = 0; i < nt; ++i) {
                        mean_curve[i] /= cfg.runs;
                        times[i] = static_cast<double>(w + static_cast<int>(i));
                        curves.rows.push_back({std::to_string(P), format_double(s2), std::to_string(w),
                                               v.method, std::to_string(v.order), v.delay_cell,
                                               std::to_string(w + static_cast<int>(i)),
                                               format_double(mean_curve[i])});
                    }
                    std::vector<double> block_means, block_idx;
                    for (std::size_t lo = 0; lo + static_cast<std::size_t>(P) <= nt;
                         lo += static_cast<std::size_t>(P)) {
                        double s = 0.0;
                        for (int q = 0; q < P; ++q) s += mean_curve[lo + static_cast<std::size_t>(q)];
                        block_means.push_back(s / P);
                        block_idx.push_back(static_cast<double>(block_idx.size()));
                    }
                    const std::string block_sp =
                        block_means.size() >= 2 ? format_double(spearman(block_means, block_idx)) : "";
                    trend.rows.push_back({std::to_string(P), format_double(s2), std::to_string(w),
                                          v.method, std::to_string(v.order), v.delay_cell,
                                          format_double(spearman(mean_curve, times)), block_sp});
                }
            }

            // Window-size sweep on the first grid point only.
            if (cfg.sweep_enabled && P == cfg.periods.front() && s2 == cfg.sigma2s.front()) {
                std::vector<int> widths = cfg.sweep_widths;
                if (widths.empty()) {
                    for (int w = 10; w <= P; ++w) widths.push_back(w);
                }
                const SweepCurve curve = window_size_sweep(signals, EntropyKind::GPE, 3, widths);
                const HalfPeriodEstimate est = estimate_half_period(curve);
                Table sweep;
                sweep.name = "halfperiod_sweep";
                sweep.columns = {"window", "mean_entropy"};
                for (std::size_t i = 0; i < curve.widths.size(); ++i) {
                    sweep.rows.push_back({std::to_string(curve.widths[i]),
                                          format_double(curve.mean_entropy[i])});
                }
                Table estt;
                estt.name = "halfperiod_estimate";
                estt.columns = {"argmin_window", "recommended_low", "recommended_high", "interior"};
                estt.rows.push_back({std::to_string(est.width), std::to_string(est.recommended_low),
                                     std::to_string(est.recommended_high), est.interior ? "1" : "0"});
                rep.tables.push_back(std::move(sweep));
                rep.tables.push_back(std::move(estt));
            }
        }
    }

    rep.tables.push_back(std::move(curves));
    rep.tables.push_back(std::move(trend));
    rep.tables.push_back(std::move(skipped));
    return rep;
}

// ---------------------------------------------------------------------------
// Config files and report output
// ---------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<int> parse_int_list(const std::string& value, const std::string& key) {
    std::vector<int> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        if (auto dots = item.find(".."); dots != std::string::npos) {
            const int lo = std::stoi(item.substr(0, dots));
            const int hi = std::stoi(item.substr(dots + 2));
            if (hi < lo) throw ValidationError("config: bad range for " + key + ": " + item);
            for (int v = lo; v <= hi; ++v) out.push_back(v);
        } else {
            out.push_back(std::stoi(item));
        }
    }
    if (out.empty()) throw ValidationError("config: empty list for " + key);
    return out;
}

std::vector<double> parse_double_list(const std::string& value, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(std::stod(item));
    }
    if (out.empty()) throw ValidationError("config: empty list for " + key);
    return out;
}

}  // namespace

void ExperimentSpec::override_seed(std::uint64_t seed) {
    convergence.seed = seed;
    noise.seed = seed;
    ramp.seed = seed;
}

void ExperimentSpec::override_threads(int threads) {
    convergence.threads = threads;
    noise.threads = threads;
    ramp.threads = threads;
}

std::uint64_t ExperimentSpec::seed() const {
    if (kind == "convergence") return convergence.seed;
    if (kind == "noise_detection") return noise.seed;
    return ramp.seed;
}

ExperimentSpec parse_experiment_config(std::istream& in) {
    ExperimentSpec spec;
    std::string line;
    int lineno = 0;
    std::vector<std::pair<std::string, std::string>> entries;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    for (const auto& [key, value] : entries) {
        if (key == "experiment") {
            if (value != "convergence" && value != "noise_detection" && value != "ramp") {
                throw ValidationError("config: unknown experiment '" + value + "'");
            }
            spec.kind = value;
            break;
        }
    }
    if (spec.kind.empty()) throw ValidationError("config: missing `experiment = ...` key");

    for (const auto& [key, value] : entries) {
        if (key == "experiment") continue;
        try {
            if (key == "seed") {
                spec.override_seed(std::stoull(value));
            } else if (key == "threads") {
                spec.override_threads(std::stoi(value));
            } else if (key == "runs") {
                spec.convergence.runs = spec.noise.runs = spec.ramp.runs = std::stoi(value);
            } else if (spec.kind == "convergence" && key == "length") {
                spec.convergence.length = std::stoi(value);
            } else if (spec.kind == "convergence" && key == "orders") {
                spec.convergence.orders = parse_int_list(value, key);
            } else if (spec.kind == "convergence" && key == "tuple_budget") {
                spec.convergence.tuple_budget = u128_from_string(value);
            } else if (spec.kind == "noise_detection" && key == "period") {
                spec.noise.period = std::stoi(value);
            } else if (spec.kind == "noise_detection" && key == "eps") {
                spec.noise.eps = std::stod(value);
            } else if (spec.kind == "noise_detection" && key == "orders") {
                spec.noise.orders = parse_int_list(value, key);
            } else if (spec.kind == "ramp" && key == "periods") {
                spec.ramp.periods = parse_int_list(value, key);
            } else if (spec.kind == "ramp" && key == "sigma2s") {
                spec.ramp.sigma2s = parse_double_list(value, key);
            } else if (spec.kind == "ramp" && key == "windows") {
                spec.ramp.windows = parse_int_list(value, key);
            } else if (spec.kind == "ramp" && key == "gpe_orders") {
                spec.ramp.gpe_orders = parse_int_list(value, key);
            } else if (spec.kind == "ramp" && key == "pe_order") {
                spec.ramp.pe_order = std::stoi(value);
            } else if (spec.kind == "ramp" && key == "pe_delays") {
                spec.ramp.pe_delays = parse_int_list(value, key);
            } else if (spec.kind == "ramp" && key == "pe_avg") {
                const auto range = parse_int_list(value, key);
                spec.ramp.pe_avg_lo = range.front();
                spec.ramp.pe_avg_hi = range.back();
            } else if (spec.kind == "ramp" && key == "sweep_widths") {
                spec.ramp.sweep_widths = parse_int_list(value, key);
            } else if (spec.kind == "ramp" && key == "sweep") {
                if (value == "on" || value == "true") {
                    spec.ramp.sweep_enabled = true;
                } else if (value == "off" || value == "false") {
                    spec.ramp.sweep_enabled = false;
                } else {
                    throw ValidationError("config: sweep must be on/off");
                }
            } else {
                throw ValidationError("config: unknown key '" + key + "' for experiment " + spec.kind);
            }
        } catch (const std::invalid_argument&) {
            throw ValidationError("config: unparseable value for '" + key + "': " + value);
        } catch (const std::out_of_range&) {
            throw ValidationError("config: value out of range for '" + key + "': " + value);
        }
    }
    return spec;
}

ExperimentSpec parse_experiment_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path);
    return parse_experiment_config(in);
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
    if (spec.kind == "convergence") return run_convergence(spec.convergence);
    if (spec.kind == "noise_detection") return run_noise_detection(spec.noise);
    if (spec.kind == "ramp") return run_ramp(spec.ramp);
    throw ValidationError("unknown experiment kind: " + spec.kind);
}

std::vector<std::string> write_report(const ExperimentReport& report, const std::string& outdir) {
    namespace fs = std::filesystem;
    fs::create_directories(outdir);
    std::vector<std::pair<fs::path, std::string>> files;

    for (const Table& t : report.tables) {
        std::ostringstream os;
        write_table_csv(os, t);
        files.emplace_back(fs::path(outdir) / (report.experiment + "_" + t.name + ".csv"), os.str());
    }

    nlohmann::json summary;
    summary["experiment"] = report.experiment;
    summary["seed"] = report.seed;
    nlohmann::json config = nlohmann::json::object();
    for (const auto& [k, v] : report.config_echo) config[k] = v;
    summary["config"] = config;
    nlohmann::json tables = nlohmann::json::object();
    for (const Table& t : report.tables) {
        if (t.rows.size() <= 200) {
            nlohmann::json jt;
            jt["columns"] = t.columns;
            jt["rows"] = t.rows;
            tables[t.name] = jt;
        } else {
            tables[t.name] = std::string("see ") + report.experiment + "_" + t.name + ".csv";
        }
    }
    summary["tables"] = tables;
    files.emplace_back(fs::path(outdir) / (report.experiment + "_summary.json"), summary.dump(2) + "\n");

    // Two phases: everything is staged before anything is renamed, so a
    // failure never leaves a partial report.
    std::vector<std::string> paths;
    for (const auto& [path, content] : files) stage_file(path, content);
    for (const auto& [path, content] : files) {
        std::filesystem::rename(path.string() + ".tmp", path);
        paths.push_back(path.string());
    }
    return paths;
}

}  // namespace gpe
