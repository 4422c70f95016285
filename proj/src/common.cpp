#include "gpe/common.hpp"

#include <algorithm>

namespace gpe {

std::string u128_to_string(u128 v) {
    if (v == 0) return "0";
    std::string out;
    while (v > 0) {
        out.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

u128 u128_from_string(const std::string& s) {
    if (s.empty()) throw ValidationError("empty count string");
    u128 v = 0;
    const u128 max = ~static_cast<u128>(0);
    for (char c : s) {
        if (c < '0' || c > '9') throw ValidationError("invalid count string: " + s);
        unsigned d = static_cast<unsigned>(c - '0');
        if (v > (max - d) / 10) throw ValidationError("count string overflows 128 bits: " + s);
        v = v * 10 + d;
    }
    return v;
}

double u128_to_double(u128 v) {
    const double two64 = 18446744073709551616.0;
    return static_cast<double>(static_cast<std::uint64_t>(v >> 64)) * two64 +
           static_cast<double>(static_cast<std::uint64_t>(v));
}

u128 binomial(std::uint64_t n, std::uint32_t k) {
    if (k > n) return 0;
    if (k > n - k) k = static_cast<std::uint32_t>(n - k);
    u128 result = 1;
    const u128 max = ~static_cast<u128>(0);
    for (std::uint32_t i = 0; i < k; ++i) {
        u128 factor = n - i;
        if (result > max / factor) throw InternalError("binomial overflows 128 bits");
        result = result * factor / (i + 1);  // exact: result holds C(n, i+1) after division
    }
    return result;
}

std::uint64_t factorial(std::uint32_t k) {
    std::uint64_t f = 1;
    for (std::uint32_t i = 2; i <= k; ++i) f *= i;
    return f;
}

}  // namespace gpe
