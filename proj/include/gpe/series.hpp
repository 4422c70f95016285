// series.hpp — time series input, rank reduction and sliding windows.
#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gpe/common.hpp"

namespace gpe {

// A finite real-valued series. All downstream computation is rank-based, so
// non-finite values are rejected up front instead of being silently ordered.
struct TimeSeries {
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

// The series reduced to ranks 1..n. Ties are broken by time of appearance:
// the earlier index receives the smaller rank. This is the sole input of
// every pattern-counting kernel.
struct RankSequence {
    std::vector<int> ranks;  // a permutation of 1..n

    std::size_t size() const { return ranks.size(); }
};

struct WindowSpec {
    int width = 2;
    int stride = 1;
};

RankSequence rank_series(const TimeSeries& ts);

// Convenience for tests and generators: treat a rank/value vector directly.
RankSequence rank_of_values(std::span<const double> values);
RankSequence rank_of_ints(std::span<const int> values);

// Windows end at t = width, width+stride, ...; count = floor((n-w)/stride)+1.
// Each element is a view into ts.values.
std::vector<std::span<const double>> sliding_windows(const TimeSeries& ts, const WindowSpec& spec);

// CSV input: one numeric value per line, or two columns `t,value` (header
// optional). Locale-independent parsing, dot decimal separator.
TimeSeries read_series_csv(std::istream& in, const std::string& origin = "<stream>");
TimeSeries read_series_csv_file(const std::string& path);

void write_series_csv(std::ostream& out, const TimeSeries& ts);

}  // namespace gpe
