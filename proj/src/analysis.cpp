#include "gpe/analysis.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

namespace gpe {

namespace {

double window_value(std::span<const double> window, const WindowConfig& cfg) {
    const RankSequence rs = rank_of_values(window);
    switch (cfg.kind) {
        case EntropyKind::GPE:
            return gpe(rs, cfg.order, cfg.profile_options).normalized;
        case EntropyKind::PE:
            return pe(rs, cfg.order, cfg.delay).normalized;
        case EntropyKind::PEavg: {
            std::vector<int> delays = cfg.delays;
            if (delays.empty()) delays = feasible_delays(cfg.width, cfg.order);
            return pe_avg(rs, cfg.order, delays).normalized;
        }
        case EntropyKind::CTPE:
            return ctpe(rs, cfg.order, cfg.ctpe_limits).normalized;
    }
    throw InternalError("bad entropy kind");
}

}  // namespace

EntropySeries windowed_entropy(const TimeSeries& ts, const WindowConfig& cfg) {
    if (cfg.width < 2) throw ValidationError("windowed_entropy: width must be >= 2");
    const auto windows = sliding_windows(ts, WindowSpec{cfg.width, cfg.stride});
    EntropySeries es;
    es.t_start = cfg.width;
    es.stride = cfg.stride;
    es.config = cfg;
    if (cfg.kind == EntropyKind::GPE || cfg.kind == EntropyKind::PE || cfg.kind == EntropyKind::PEavg) {
        es.undersampled = !window_sample_size_ok(cfg.width, cfg.order);
    }
    es.values.reserve(windows.size());
    for (std::size_t i = 0; i < windows.size(); ++i) {
        try {
            es.values.push_back(window_value(windows[i], cfg));
        } catch (const ValidationError& e) {
            const int t = cfg.width + static_cast<int>(i) * cfg.stride;
            throw ValidationError("windowed_entropy: window ending at t=" + std::to_string(t) + ": " +
                                  e.what());
        }
    }
    return es;
}

std::vector<int> feasible_delays(int w, int k) {
    if (k < 2) throw ValidationError("feasible_delays: order must be >= 2");
    if (w < k) {
        throw ValidationError("feasible_delays: width " + std::to_string(w) + " is below order " +
                              std::to_string(k) + " (no feasible delay)");
    }
    const int max_tau = (w - 1) / (k - 1);
    std::vector<int> out(static_cast<std::size_t>(max_tau));
    for (int i = 0; i < max_tau; ++i) out[static_cast<std::size_t>(i)] = i + 1;
    return out;
}

SweepCurve window_size_sweep(std::span<const TimeSeries> realizations, EntropyKind kind, int k,
                             std::span<const int> widths) {
    if (realizations.empty()) throw ValidationError("window_size_sweep: no realizations");
    if (widths.empty()) throw ValidationError("window_size_sweep: no window sizes");
    for (std::size_t i = 1; i < widths.size(); ++i) {
        if (widths[i] <= widths[i - 1]) {
            throw ValidationError("window_size_sweep: widths must be strictly increasing");
        }
    }
    SweepCurve curve;
    curve.widths.assign(widths.begin(), widths.end());
    curve.mean_entropy.reserve(widths.size());
    for (int w : widths) {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t r = 0; r < realizations.size(); ++r) {
            WindowConfig cfg;
            cfg.kind = kind;
            cfg.order = k;
            cfg.width = w;
            EntropySeries es;
            try {
                es = windowed_entropy(realizations[r], cfg);
            } catch (const ValidationError& e) {
                throw ValidationError("window_size_sweep: realization " + std::to_string(r + 1) +
                                      ", width " + std::to_string(w) + ": " + e.what());
            }
            for (double v : es.values) sum += v;
            count += es.values.size();
        }
        curve.mean_entropy.push_back(sum / static_cast<double>(count));
    }
    return curve;
}

HalfPeriodEstimate estimate_half_period(const SweepCurve& curve) {
    if (curve.widths.empty()) throw ValidationError("estimate_half_period: empty curve");
    std::size_t best = 0;
    for (std::size_t i = 1; i < curve.mean_entropy.size(); ++i) {
        if (curve.mean_entropy[i] < curve.mean_entropy[best]) best = i;
    }
    HalfPeriodEstimate est;
    est.width = curve.widths[best];
    est.recommended_low = est.width;
    est.recommended_high = 2 * est.width;
    est.interior = curve.widths.size() >= 3 && best > 0 && best + 1 < curve.widths.size();
    return est;
}

int min_feasible_width(int k) {
    int w = k;
    while (!window_sample_size_ok(w, k)) ++w;
    return w;
}

std::vector<int> default_sweep_widths(std::size_t n, int k) {
    const int lo = min_feasible_width(k);
    const int hi = static_cast<int>(n / 2);
    if (hi < lo) {
        throw ValidationError("series of length " + std::to_string(n) +
                              " is too short for a width sweep at order " + std::to_string(k) +
                              " (needs at least " + std::to_string(2 * lo) + " points)");
    }
    std::vector<int> out;
    for (int w = lo; w <= hi; ++w) out.push_back(w);
    return out;
}

namespace {
void print_double(std::ostream& out, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    out << buf;
}
}  // namespace

void write_entropy_series_csv(std::ostream& out, const EntropySeries& es) {
    out << "t,value\n";
    for (std::size_t i = 0; i < es.values.size(); ++i) {
        out << (es.t_start + static_cast<int>(i) * es.stride) << ',';
        print_double(out, es.values[i]);
        out << '\n';
    }
}

void write_sweep_curve_csv(std::ostream& out, const SweepCurve& curve) {
    out << "window,mean_entropy\n";
    for (std::size_t i = 0; i < curve.widths.size(); ++i) {
        out << curve.widths[i] << ',';
        print_double(out, curve.mean_entropy[i]);
        out << '\n';
    }
}

}  // namespace gpe
