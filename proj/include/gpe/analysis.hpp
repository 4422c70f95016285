// analysis.hpp — sliding-window entropy series, window-size sweeps and the
// half-period heuristic.
#pragma once

#include <span>
#include <string>
#include <vector>

#include "gpe/entropy.hpp"
#include "gpe/series.hpp"

namespace gpe {

struct WindowConfig {
    EntropyKind kind = EntropyKind::GPE;
    int order = 3;
    int delay = 1;            // PE
    std::vector<int> delays;  // PEavg; empty means the feasible set for the width
    int width = 0;
    int stride = 1;
    ProfileOptions profile_options;
    CtpeLimits ctpe_limits;
};

// Normalized entropy per window, indexed by the window's end time:
// values[i] is Y_t for t = t_start + i*stride, t_start = width (1-based).
struct EntropySeries {
    int t_start = 0;
    int stride = 1;
    std::vector<double> values;
    WindowConfig config;
    bool undersampled = false;  // C(w,k) < 100*k! for profile-based kinds
};

EntropySeries windowed_entropy(const TimeSeries& ts, const WindowConfig& cfg);

// {1, ..., floor((w-1)/(k-1))}: every delay that admits at least one k-tuple
// inside a width-w window.
std::vector<int> feasible_delays(int w, int k);

struct SweepCurve {
    std::vector<int> widths;         // strictly increasing
    std::vector<double> mean_entropy;
};

// Mean windowed entropy per width, averaged uniformly over every
// (realization, window position) pair.
SweepCurve window_size_sweep(std::span<const TimeSeries> realizations, EntropyKind kind, int k,
                             std::span<const int> widths);

struct HalfPeriodEstimate {
    int width = 0;             // argmin of the curve, ties toward smaller w
    int recommended_low = 0;   // == width
    int recommended_high = 0;  // == 2 * width
    bool interior = false;     // false when the minimum sits on the boundary
};

HalfPeriodEstimate estimate_half_period(const SweepCurve& curve);

// Smallest width whose sample size C(w,k) reaches 100 * k!.
int min_feasible_width(int k);

// Default sweep range: from the sample-size rule up to half the series.
std::vector<int> default_sweep_widths(std::size_t n, int k);

void write_entropy_series_csv(std::ostream& out, const EntropySeries& es);
void write_sweep_curve_csv(std::ostream& out, const SweepCurve& curve);

}  // namespace gpe
