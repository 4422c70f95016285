// bigint.hpp — arbitrary-precision signed integers and rationals.
//
// Backs the exact linear algebra in basis selection and profile recovery.
// Magnitudes are base-2^32 limb vectors; the workloads here are small
// matrices with small entries, so schoolbook algorithms are sufficient.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gpe/common.hpp"

namespace gpe {

class BigInt {
public:
    BigInt() = default;
    BigInt(std::int64_t v);  // NOLINT(google-explicit-constructor): numeric literal convenience
    static BigInt from_u128(u128 v);
    static BigInt from_i128(i128 v);
    static BigInt from_string(const std::string& decimal);

    bool is_zero() const { return limbs_.empty(); }
    bool is_negative() const { return negative_; }
    BigInt negated() const;
    BigInt abs() const;

    BigInt operator+(const BigInt& o) const;
    BigInt operator-(const BigInt& o) const;
    BigInt operator*(const BigInt& o) const;
    BigInt& operator+=(const BigInt& o) { return *this = *this + o; }
    BigInt& operator-=(const BigInt& o) { return *this = *this - o; }
    BigInt& operator*=(const BigInt& o) { return *this = *this * o; }

    // Truncated division; remainder carries the dividend's sign.
    static void divmod(const BigInt& num, const BigInt& den, BigInt& quot, BigInt& rem);
    BigInt operator/(const BigInt& o) const;
    BigInt operator%(const BigInt& o) const;

    // -1, 0, 1 ordering of *this vs o.
    int compare(const BigInt& o) const;
    bool operator==(const BigInt& o) const { return compare(o) == 0; }
    bool operator!=(const BigInt& o) const { return compare(o) != 0; }
    bool operator<(const BigInt& o) const { return compare(o) < 0; }
    bool operator>(const BigInt& o) const { return compare(o) > 0; }

    static BigInt gcd(const BigInt& a, const BigInt& b);  // non-negative

    bool fits_u128() const;
    u128 to_u128() const;  // requires non-negative and fits_u128
    std::string to_string() const;
    double to_double() const;

private:
    bool negative_ = false;
    std::vector<std::uint32_t> limbs_;  // little-endian base 2^32, no leading zeros

    void trim();
    static int compare_mag(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b);
    static std::vector<std::uint32_t> add_mag(const std::vector<std::uint32_t>& a,
                                              const std::vector<std::uint32_t>& b);
    // requires |a| >= |b|
    static std::vector<std::uint32_t> sub_mag(const std::vector<std::uint32_t>& a,
                                              const std::vector<std::uint32_t>& b);
};

// Exact rational with normalized sign (denominator > 0) and reduced terms.
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(BigInt num, BigInt den);
    Rational(std::int64_t v) : num_(v), den_(1) {}  // NOLINT(google-explicit-constructor)

    const BigInt& num() const { return num_; }
    const BigInt& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_integer() const;

    Rational operator+(const Rational& o) const;
    Rational operator-(const Rational& o) const;
    Rational operator*(const Rational& o) const;
    Rational operator/(const Rational& o) const;
    bool operator==(const Rational& o) const;

private:
    BigInt num_, den_;
    void normalize();
};

}  // namespace gpe
