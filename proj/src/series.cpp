#include "gpe/series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace gpe {

namespace {

template <typename T>
RankSequence rank_impl(std::span<const T> values) {
    const std::size_t n = values.size();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    // Stable sort by value; equal values keep time order, so the earlier
    // index ends up with the smaller rank.
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return values[a] < values[b]; });
    RankSequence rs;
    rs.ranks.resize(n);
    for (std::size_t r = 0; r < n; ++r) rs.ranks[order[r]] = static_cast<int>(r) + 1;
    return rs;
}

}  // namespace

RankSequence rank_series(const TimeSeries& ts) {
    if (ts.values.empty()) throw ValidationError("rank_series: empty series");
    for (std::size_t i = 0; i < ts.values.size(); ++i) {
        if (!std::isfinite(ts.values[i])) {
            throw ValidationError("rank_series: non-finite value at index " + std::to_string(i + 1));
        }
    }
    return rank_impl(std::span<const double>(ts.values));
}

RankSequence rank_of_values(std::span<const double> values) {
    TimeSeries ts{std::vector<double>(values.begin(), values.end())};
    return rank_series(ts);
}

RankSequence rank_of_ints(std::span<const int> values) { return rank_impl(values); }

std::vector<std::span<const double>> sliding_windows(const TimeSeries& ts, const WindowSpec& spec) {
    const std::size_t n = ts.size();
    if (spec.width < 2) throw ValidationError("sliding_windows: width must be >= 2");
    if (spec.stride < 1) throw ValidationError("sliding_windows: stride must be >= 1");
    if (static_cast<std::size_t>(spec.width) > n) {
        throw ValidationError("sliding_windows: width " + std::to_string(spec.width) +
                              " exceeds series length " + std::to_string(n));
    }
    std::vector<std::span<const double>> out;
    const std::size_t count = (n - spec.width) / spec.stride + 1;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.emplace_back(ts.values.data() + i * spec.stride, static_cast<std::size_t>(spec.width));
    }
    return out;
}

namespace {

bool parse_double(std::string_view token, double& out) {
    const char* first = token.data();
    const char* last = token.data() + token.size();
    while (first != last && (*first == ' ' || *first == '\t')) ++first;
    while (last != first && (*(last - 1) == ' ' || *(last - 1) == '\t' || *(last - 1) == '\r')) --last;
    if (first == last) return false;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

}  // namespace

TimeSeries read_series_csv(std::istream& in, const std::string& origin) {
    TimeSeries ts;
    std::string line;
    std::size_t lineno = 0;
    bool saw_data = false;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv(line);
        if (!sv.empty() && sv.back() == '\r') sv.remove_suffix(1);
        if (sv.empty()) continue;
        // Split on comma: either `value` or `t,value`.
        std::string_view first_tok = sv, second_tok;
        if (auto comma = sv.find(','); comma != std::string_view::npos) {
            first_tok = sv.substr(0, comma);
            second_tok = sv.substr(comma + 1);
        }
        std::string_view value_tok = second_tok.empty() ? first_tok : second_tok;
        double v = 0.0;
        if (!parse_double(value_tok, v)) {
            if (!saw_data) continue;  // header line
            throw ValidationError(origin + ":" + std::to_string(lineno) + ": unparseable value '" +
                                  std::string(value_tok) + "'");
        }
        if (!second_tok.empty()) {
            double t = 0.0;
            if (!parse_double(first_tok, t) && !saw_data) continue;  // header like `t,value`
        }
        ts.values.push_back(v);
        saw_data = true;
    }
    if (ts.values.empty()) throw ValidationError(origin + ": no numeric data");
    return ts;
}

TimeSeries read_series_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open input file: " + path);
    return read_series_csv(in, path);
}

void write_series_csv(std::ostream& out, const TimeSeries& ts) {
    out << "t,value\n";
    char buf[64];
    for (std::size_t i = 0; i < ts.values.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.12g", ts.values[i]);
        out << (i + 1) << ',' << buf << '\n';
    }
}

}  // namespace gpe
