#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "gpe/analysis.hpp"
#include "gpe/profile.hpp"

using namespace gpe;

namespace {

TimeSeries monotone_series(int n) {
    TimeSeries ts;
    for (int i = 0; i < n; ++i) ts.values.push_back(0.5 * i);
    return ts;
}

TimeSeries random_series(std::mt19937_64& gen, int n) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    TimeSeries ts;
    for (int i = 0; i < n; ++i) ts.values.push_back(u(gen));
    return ts;
}

const TimeSeries kExample7{{7, 4, 3, 5, 2, 1, 6}};

}  // namespace

TEST_CASE("windowed entropy basics") {
    WindowConfig cfg;
    cfg.kind = EntropyKind::GPE;
    cfg.order = 3;
    cfg.width = 8;
    const EntropySeries flat = windowed_entropy(monotone_series(20), cfg);
    CHECK(flat.t_start == 8);
    CHECK(flat.values.size() == 13);
    for (double v : flat.values) CHECK(v == 0.0);

    cfg.width = 7;
    const EntropySeries whole = windowed_entropy(kExample7, cfg);
    CHECK(whole.values.size() == 1);
    CHECK(whole.values[0] == doctest::Approx(0.8094992234).epsilon(1e-9));
}

TEST_CASE("windowed entropy reports the offending window") {
    WindowConfig cfg;
    cfg.kind = EntropyKind::PE;
    cfg.order = 4;
    cfg.delay = 3;
    cfg.width = 8;  // 8 - 3*3 < 1: infeasible
    try {
        windowed_entropy(monotone_series(20), cfg);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("t=8") != std::string::npos);
    }
}

TEST_CASE("feasible delays") {
    CHECK(feasible_delays(16, 4) == std::vector<int>{1, 2, 3, 4, 5});
    CHECK(feasible_delays(8, 2) == std::vector<int>{1, 2, 3, 4, 5, 6, 7});
    CHECK(feasible_delays(9, 4) == std::vector<int>{1, 2});
    CHECK_THROWS_AS(feasible_delays(3, 4), ValidationError);
}

TEST_CASE("window size sweep on a trend is identically zero") {
    std::vector<TimeSeries> reals{monotone_series(40)};
    const std::vector<int> widths{8, 10, 12};
    const SweepCurve curve = window_size_sweep(reals, EntropyKind::GPE, 3, widths);
    CHECK(curve.widths == widths);
    for (double v : curve.mean_entropy) CHECK(v == 0.0);
}

TEST_CASE("sweep with one realization and width equals the series mean") {
    std::mt19937_64 gen(61);
    const TimeSeries ts = random_series(gen, 30);
    WindowConfig cfg;
    cfg.kind = EntropyKind::GPE;
    cfg.order = 3;
    cfg.width = 9;
    const EntropySeries es = windowed_entropy(ts, cfg);
    double mean = 0.0;
    for (double v : es.values) mean += v;
    mean /= static_cast<double>(es.values.size());

    std::vector<TimeSeries> reals{ts};
    const std::vector<int> widths{9};
    const SweepCurve curve = window_size_sweep(reals, EntropyKind::GPE, 3, widths);
    CHECK(curve.mean_entropy[0] == doctest::Approx(mean).epsilon(1e-12));
}

TEST_CASE("half-period estimation") {
    SweepCurve falling{{10, 20, 30}, {0.9, 0.8, 0.7}};
    const HalfPeriodEstimate f = estimate_half_period(falling);
    CHECK(f.width == 30);
    CHECK_FALSE(f.interior);

    SweepCurve dip{{10, 20, 30}, {0.9, 0.7, 0.8}};
    const HalfPeriodEstimate d = estimate_half_period(dip);
    CHECK(d.width == 20);
    CHECK(d.recommended_low == 20);
    CHECK(d.recommended_high == 40);
    CHECK(d.interior);

    SweepCurve tie{{10, 20}, {0.5, 0.5}};
    CHECK(estimate_half_period(tie).width == 10);  // ties toward smaller w

    CHECK_THROWS_AS(estimate_half_period(SweepCurve{}), ValidationError);
}

TEST_CASE("time reversal mirrors the GPE entropy series") {
    std::mt19937_64 gen(62);
    const TimeSeries ts = random_series(gen, 25);
    TimeSeries rev = ts;
    std::reverse(rev.values.begin(), rev.values.end());
    WindowConfig cfg;
    cfg.kind = EntropyKind::GPE;
    cfg.order = 3;
    cfg.width = 7;
    const EntropySeries a = windowed_entropy(ts, cfg);
    const EntropySeries b = windowed_entropy(rev, cfg);
    REQUIRE(a.values.size() == b.values.size());
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        CHECK(a.values[i] ==
              doctest::Approx(b.values[b.values.size() - 1 - i]).epsilon(1e-12));
    }
}

TEST_CASE("granularity identity: C(w-1,k-1)/C(w,k) == k/w exactly") {
    for (int k = 2; k <= 6; ++k) {
        for (int w = k; w <= 200; ++w) {
            const u128 lhs = binomial(static_cast<std::uint64_t>(w - 1), static_cast<std::uint32_t>(k - 1)) *
                             static_cast<u128>(w);
            const u128 rhs = binomial(static_cast<std::uint64_t>(w), static_cast<std::uint32_t>(k)) *
                             static_cast<u128>(k);
            CHECK(lhs == rhs);
        }
    }
}

TEST_CASE("sliding one step changes the histogram by bounded amounts") {
    std::mt19937_64 gen(63);
    for (int trial = 0; trial < 60; ++trial) {
        const int k = 2 + static_cast<int>(gen() % 3);
        const int w = k + static_cast<int>(gen() % 10);
        const TimeSeries ts = random_series(gen, w + 1 + static_cast<int>(gen() % 10));
        const auto windows = sliding_windows(ts, {w, 1});
        const u128 bound = binomial(static_cast<std::uint64_t>(w - 1), static_cast<std::uint32_t>(k - 1));
        for (std::size_t i = 0; i + 1 < windows.size(); ++i) {
            const Profile a = profile(rank_of_values(windows[i]), k, {});
            const Profile b = profile(rank_of_values(windows[i + 1]), k, {});
            u128 gains = 0, losses = 0, linf = 0;
            for (std::size_t s = 0; s < a.counts.size(); ++s) {
                const u128 hi = std::max(a.counts[s], b.counts[s]);
                const u128 lo = std::min(a.counts[s], b.counts[s]);
                const u128 d = hi - lo;
                if (b.counts[s] > a.counts[s]) gains += d;
                if (a.counts[s] > b.counts[s]) losses += d;
                linf = std::max(linf, d);
            }
            // exactly C(w-1,k-1) tuples leave and enter, so each side of the
            // change and every single bin is bounded by it
            CHECK(gains <= bound);
            CHECK(losses <= bound);
            CHECK(linf <= bound);
        }
    }
}

TEST_CASE("pe histograms change by at most one sample per slide") {
    std::mt19937_64 gen(64);
    for (int trial = 0; trial < 30; ++trial) {
        const int k = 2 + static_cast<int>(gen() % 3);
        const int w = k + 2 + static_cast<int>(gen() % 8);
        const TimeSeries ts = random_series(gen, w + 6);
        const auto windows = sliding_windows(ts, {w, 1});
        auto pe_hist = [&](std::span<const double> win) {
            std::vector<int> counts(factorial(static_cast<std::uint32_t>(k)), 0);
            const RankSequence rs = rank_of_values(win);
            std::vector<int> tuple(static_cast<std::size_t>(k));
            for (int i = 0; i + k <= static_cast<int>(rs.size()); ++i) {
                for (int j = 0; j < k; ++j) tuple[static_cast<std::size_t>(j)] = rs.ranks[static_cast<std::size_t>(i + j)];
                ++counts[pattern_of_tuple(tuple).index];
            }
            return counts;
        };
        for (std::size_t i = 0; i + 1 < windows.size(); ++i) {
            const auto a = pe_hist(windows[i]);
            const auto b = pe_hist(windows[i + 1]);
            int l1 = 0, linf = 0;
            for (std::size_t s = 0; s < a.size(); ++s) {
                const int d = std::abs(a[s] - b[s]);
                l1 += d;
                linf = std::max(linf, d);
            }
            CHECK(l1 <= 2);    // one sample out, one in
            CHECK(linf <= 1);
        }
    }
}

TEST_CASE("default sweep range follows the sample-size rule") {
    CHECK(min_feasible_width(3) == 17);
    const auto widths = default_sweep_widths(100, 3);
    CHECK(widths.front() == 17);
    CHECK(widths.back() == 50);
    CHECK_THROWS_AS(default_sweep_widths(20, 3), ValidationError);

    WindowConfig cfg;
    cfg.kind = EntropyKind::GPE;
    cfg.order = 3;
    cfg.width = 8;
    std::mt19937_64 gen(65);
    CHECK(windowed_entropy(random_series(gen, 20), cfg).undersampled);
    cfg.width = 17;
    CHECK_FALSE(windowed_entropy(random_series(gen, 40), cfg).undersampled);
}

TEST_CASE("csv writers") {
    EntropySeries es;
    es.t_start = 5;
    es.stride = 2;
    es.values = {0.25, 0.5};
    std::ostringstream os;
    write_entropy_series_csv(os, es);
    CHECK(os.str() == "t,value\n5,0.25\n7,0.5\n");

    SweepCurve curve{{10, 20}, {0.75, 0.5}};
    std::ostringstream os2;
    write_sweep_curve_csv(os2, curve);
    CHECK(os2.str() == "window,mean_entropy\n10,0.75\n20,0.5\n");
}
