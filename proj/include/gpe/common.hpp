// common.hpp — shared scalar types, errors and small numeric helpers.
#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace gpe {

// 128-bit unsigned counters. Pattern counts reach C(n,6) which overflows
// 64 bits for n in the 10^4 range, so every counting surface uses u128.
using u128 = unsigned __int128;
using i128 = __int128;

// Input that violates a documented precondition (bad value, bad order, ...).
// CLI maps this to exit code 2.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// A resource guard refused the request (enumeration budget, tree limits).
// CLI maps this to exit code 3.
struct GuardError : std::runtime_error {
    explicit GuardError(const std::string& msg) : std::runtime_error(msg) {}
};

// Internal consistency failure: an invariant the implementation must uphold
// was violated. Always a bug, never a user error. CLI maps this to exit 1.
struct InternalError : std::logic_error {
    explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

std::string u128_to_string(u128 v);
u128 u128_from_string(const std::string& s);
double u128_to_double(u128 v);

// Exact C(n,k); throws InternalError if the result would overflow u128.
u128 binomial(std::uint64_t n, std::uint32_t k);

// k! as u64 (valid for k <= 20).
std::uint64_t factorial(std::uint32_t k);

}  // namespace gpe
