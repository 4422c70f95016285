#include "gpe/bigint.hpp"

#include <algorithm>
#include <numeric>

namespace gpe {

namespace {
constexpr std::uint64_t kBase = 1ull << 32;
}

BigInt::BigInt(std::int64_t v) {
    negative_ = v < 0;
    std::uint64_t mag = negative_ ? (~static_cast<std::uint64_t>(v) + 1) : static_cast<std::uint64_t>(v);
    while (mag > 0) {
        limbs_.push_back(static_cast<std::uint32_t>(mag & 0xffffffffu));
        mag >>= 32;
    }
}

BigInt BigInt::from_u128(u128 v) {
    BigInt out;
    while (v > 0) {
        out.limbs_.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
        v >>= 32;
    }
    return out;
}

BigInt BigInt::from_i128(i128 v) {
    if (v >= 0) return from_u128(static_cast<u128>(v));
    BigInt out = from_u128(static_cast<u128>(-v));
    out.negative_ = true;
    return out;
}

BigInt BigInt::from_string(const std::string& decimal) {
    if (decimal.empty()) throw ValidationError("empty integer string");
    std::size_t pos = 0;
    bool neg = false;
    if (decimal[0] == '-' || decimal[0] == '+') {
        neg = decimal[0] == '-';
        pos = 1;
    }
    if (pos == decimal.size()) throw ValidationError("invalid integer string: " + decimal);
    BigInt out;
    const BigInt ten(10);
    for (; pos < decimal.size(); ++pos) {
        char c = decimal[pos];
        if (c < '0' || c > '9') throw ValidationError("invalid integer string: " + decimal);
        out = out * ten + BigInt(c - '0');
    }
    out.negative_ = neg && !out.is_zero();
    return out;
}

void BigInt::trim() {
    while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
    if (limbs_.empty()) negative_ = false;
}

int BigInt::compare_mag(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (std::size_t i = a.size(); i-- > 0;) {
        if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    }
    return 0;
}

std::vector<std::uint32_t> BigInt::add_mag(const std::vector<std::uint32_t>& a,
                                           const std::vector<std::uint32_t>& b) {
    std::vector<std::uint32_t> out;
    out.reserve(std::max(a.size(), b.size()) + 1);
    std::uint64_t carry = 0;
    for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
        std::uint64_t s = carry;
        if (i < a.size()) s += a[i];
        if (i < b.size()) s += b[i];
        out.push_back(static_cast<std::uint32_t>(s & 0xffffffffu));
        carry = s >> 32;
    }
    if (carry) out.push_back(static_cast<std::uint32_t>(carry));
    return out;
}

std::vector<std::uint32_t> BigInt::sub_mag(const std::vector<std::uint32_t>& a,
                                           const std::vector<std::uint32_t>& b) {
    std::vector<std::uint32_t> out;
    out.reserve(a.size());
    std::int64_t borrow = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        std::int64_t d = static_cast<std::int64_t>(a[i]) - borrow - (i < b.size() ? b[i] : 0);
        if (d < 0) {
            d += static_cast<std::int64_t>(kBase);
            borrow = 1;
        } else {
            borrow = 0;
        }
        out.push_back(static_cast<std::uint32_t>(d));
    }
    while (!out.empty() && out.back() == 0) out.pop_back();
    return out;
}

BigInt BigInt::negated() const {
    BigInt out = *this;
    if (!out.is_zero()) out.negative_ = !out.negative_;
    return out;
}

BigInt BigInt::abs() const {
    BigInt out = *this;
    out.negative_ = false;
    return out;
}

BigInt BigInt::operator+(const BigInt& o) const {
    BigInt out;
    if (negative_ == o.negative_) {
        out.limbs_ = add_mag(limbs_, o.limbs_);
        out.negative_ = negative_;
    } else {
        int c = compare_mag(limbs_, o.limbs_);
        if (c == 0) return BigInt();
        if (c > 0) {
            out.limbs_ = sub_mag(limbs_, o.limbs_);
            out.negative_ = negative_;
        } else {
            out.limbs_ = sub_mag(o.limbs_, limbs_);
            out.negative_ = o.negative_;
        }
    }
    out.trim();
    return out;
}

BigInt BigInt::operator-(const BigInt& o) const { return *this + o.negated(); }

BigInt BigInt::operator*(const BigInt& o) const {
    if (is_zero() || o.is_zero()) return BigInt();
    BigInt out;
    out.limbs_.assign(limbs_.size() + o.limbs_.size(), 0);
    for (std::size_t i = 0; i < limbs_.size(); ++i) {
        std::uint64_t carry = 0;
        for (std::size_t j = 0; j < o.limbs_.size(); ++j) {
            std::uint64_t cur = out.limbs_[i + j] +
                                static_cast<std::uint64_t>(limbs_[i]) * o.limbs_[j] + carry;
            out.limbs_[i + j] = static_cast<std::uint32_t>(cur & 0xffffffffu);
            carry = cur >> 32;
        }
        std::size_t pos = i + o.limbs_.size();
        while (carry) {
            std::uint64_t cur = out.limbs_[pos] + carry;
            out.limbs_[pos] = static_cast<std::uint32_t>(cur & 0xffffffffu);
            carry = cur >> 32;
            ++pos;
        }
    }
    out.negative_ = negative_ != o.negative_;
    out.trim();
    return out;
}

void BigInt::divmod(const BigInt& num, const BigInt& den, BigInt& quot, BigInt& rem) {
    if (den.is_zero()) throw InternalError("BigInt division by zero");
    int c = compare_mag(num.limbs_, den.limbs_);
    if (c < 0) {
        quot = BigInt();
        rem = num;
        return;
    }
    // Single-limb divisor fast path.
    if (den.limbs_.size() == 1) {
        std::uint64_t d = den.limbs_[0];
        std::vector<std::uint32_t> q(num.limbs_.size());
        std::uint64_t r = 0;
        for (std::size_t i = num.limbs_.size(); i-- > 0;) {
            std::uint64_t cur = (r << 32) | num.limbs_[i];
            q[i] = static_cast<std::uint32_t>(cur / d);
            r = cur % d;
        }
        quot = BigInt();
        quot.limbs_ = std::move(q);
        quot.negative_ = num.negative_ != den.negative_;
        quot.trim();
        rem = BigInt(static_cast<std::int64_t>(r));
        if (!rem.is_zero()) rem.negative_ = num.negative_;
        return;
    }
    // Bitwise long division on magnitudes.
    const std::size_t total_bits = num.limbs_.size() * 32;
    BigInt r;
    std::vector<std::uint32_t> q((total_bits + 31) / 32, 0);
    for (std::size_t bit = total_bits; bit-- > 0;) {
        // r = (r << 1) | bit(num, bit)
        std::uint32_t carry = (num.limbs_[bit / 32] >> (bit % 32)) & 1u;
        for (std::size_t i = 0; i < r.limbs_.size(); ++i) {
            std::uint32_t next = r.limbs_[i] >> 31;
            r.limbs_[i] = (r.limbs_[i] << 1) | carry;
            carry = next;
        }
        if (carry) r.limbs_.push_back(carry);
        if (compare_mag(r.limbs_, den.limbs_) >= 0) {
            r.limbs_ = sub_mag(r.limbs_, den.limbs_);
            q[bit / 32] |= 1u << (bit % 32);
        }
    }
    quot = BigInt();
    quot.limbs_ = std::move(q);
    quot.negative_ = num.negative_ != den.negative_;
    quot.trim();
    r.negative_ = num.negative_;
    r.trim();
    rem = std::move(r);
}

BigInt BigInt::operator/(const BigInt& o) const {
    BigInt q, r;
    divmod(*this, o, q, r);
    return q;
}

BigInt BigInt::operator%(const BigInt& o) const {
    BigInt q, r;
    divmod(*this, o, q, r);
    return r;
}

int BigInt::compare(const BigInt& o) const {
    if (negative_ != o.negative_) return negative_ ? -1 : 1;
    int c = compare_mag(limbs_, o.limbs_);
    return negative_ ? -c : c;
}

bool BigInt::fits_u128() const { return limbs_.size() <= 4; }

u128 BigInt::to_u128() const {
    if (negative_) throw InternalError("to_u128 on negative BigInt");
    if (!fits_u128()) throw InternalError("BigInt exceeds 128 bits");
    u128 v = 0;
    for (std::size_t i = limbs_.size(); i-- > 0;) v = (v << 32) | limbs_[i];
    return v;
}

BigInt BigInt::gcd(const BigInt& a, const BigInt& b) {
    // u64 fast path covers nearly all values seen in the solve matrices.
    if (a.limbs_.size() <= 2 && b.limbs_.size() <= 2) {
        std::uint64_t x = 0, y = 0;
        for (std::size_t i = a.limbs_.size(); i-- > 0;) x = (x << 32) | a.limbs_[i];
        for (std::size_t i = b.limbs_.size(); i-- > 0;) y = (y << 32) | b.limbs_[i];
        return from_u128(std::gcd(x, y));
    }
    BigInt x = a.abs(), y = b.abs();
    while (!y.is_zero()) {
        BigInt q, r;
        divmod(x, y, q, r);
        x = std::move(y);
        y = std::move(r);
    }
    return x;
}

std::string BigInt::to_string() const {
    if (is_zero()) return "0";
    BigInt v = abs();
    const BigInt chunk(1000000000);
    std::string out;
    while (!v.is_zero()) {
        BigInt q, r;
        divmod(v, chunk, q, r);
        std::uint64_t part = r.is_zero() ? 0 : r.limbs_[0];
        for (int i = 0; i < 9; ++i) {
            out.push_back(static_cast<char>('0' + part % 10));
            part /= 10;
        }
        v = std::move(q);
    }
    while (out.size() > 1 && out.back() == '0') out.pop_back();
    if (negative_) out.push_back('-');
    std::reverse(out.begin(), out.end());
    return out;
}

double BigInt::to_double() const {
    double mag = 0.0;
    for (std::size_t i = limbs_.size(); i-- > 0;) mag = mag * 4294967296.0 + limbs_[i];
    return negative_ ? -mag : mag;
}

Rational::Rational(BigInt num, BigInt den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw InternalError("rational with zero denominator");
    normalize();
}

void Rational::normalize() {
    if (den_.is_negative()) {
        den_ = den_.negated();
        num_ = num_.negated();
    }
    if (num_.is_zero()) {
        den_ = BigInt(1);
        return;
    }
    BigInt g = BigInt::gcd(num_, den_);
    if (g != BigInt(1)) {
        num_ = num_ / g;
        den_ = den_ / g;
    }
}

bool Rational::is_integer() const { return den_ == BigInt(1); }

Rational Rational::operator+(const Rational& o) const {
    return Rational(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

Rational Rational::operator-(const Rational& o) const {
    return Rational(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
}

Rational Rational::operator*(const Rational& o) const {
    return Rational(num_ * o.num_, den_ * o.den_);
}

Rational Rational::operator/(const Rational& o) const {
    if (o.is_zero()) throw InternalError("rational division by zero");
    return Rational(num_ * o.den_, den_ * o.num_);
}

bool Rational::operator==(const Rational& o) const {
    return num_ == o.num_ && den_ == o.den_;
}

}  // namespace gpe
