#pragma once
#include <gmp.h>
#include <cstdint>
#include <string>
#include <utility>

namespace sitlab {

/// Exact rational number (thin RAII wrapper over GMP mpq_t).
///
/// All external numeric inputs of the toolkit pass through this type:
/// decimal strings and p/q fractions parse exactly, never through binary
/// floating point.
class Rational {
public:
    Rational() { mpq_init(q_); }
    Rational(long num, unsigned long den) {
        mpq_init(q_);
        mpq_set_si(q_, num, den);
        mpq_canonicalize(q_);
    }
    explicit Rational(long num) : Rational(num, 1) {}
    Rational(const Rational& o) { mpq_init(q_); mpq_set(q_, o.q_); }
    Rational(Rational&& o) noexcept { mpq_init(q_); mpq_swap(q_, o.q_); }
    Rational& operator=(const Rational& o) {
        if (this != &o) mpq_set(q_, o.q_);
        return *this;
    }
    Rational& operator=(Rational&& o) noexcept {
        if (this != &o) mpq_swap(q_, o.q_);
        return *this;
    }
    ~Rational() { mpq_clear(q_); }

    /// Exact parse of "3", "-1/3", "2.75", "-0.125".  Decimal digits map to
    /// numerator/power-of-ten denominator; fractions must have nonzero
    /// denominator.  Throws ParseError on anything else.
    static Rational from_string(const std::string& s);

    /// Exact decimal rendering.  Only valid when the reduced denominator has
    /// no prime factors other than 2 and 5; returns e.g. "-0.125".
    /// has_finite_decimal() tells whether this holds.
    std::string to_decimal() const;
    bool has_finite_decimal() const;

    /// "p/q" (canonical, q > 0) — always exact.
    std::string to_fraction() const;

    mpq_srcptr raw() const { return q_; }
    mpq_ptr raw() { return q_; }

    int sign() const { return mpq_sgn(q_); }
    bool is_zero() const { return mpq_sgn(q_) == 0; }
    double to_double() const { return mpq_get_d(q_); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        Rational r; mpq_add(r.q_, a.q_, b.q_); return r;
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        Rational r; mpq_sub(r.q_, a.q_, b.q_); return r;
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        Rational r; mpq_mul(r.q_, a.q_, b.q_); return r;
    }
    friend Rational operator/(const Rational& a, const Rational& b);
    Rational operator-() const { Rational r; mpq_neg(r.q_, q_); return r; }

    friend bool operator==(const Rational& a, const Rational& b) { return mpq_equal(a.q_, b.q_) != 0; }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) { return mpq_cmp(a.q_, b.q_) < 0; }
    friend bool operator<=(const Rational& a, const Rational& b) { return mpq_cmp(a.q_, b.q_) <= 0; }
    friend bool operator>(const Rational& a, const Rational& b) { return mpq_cmp(a.q_, b.q_) > 0; }
    friend bool operator>=(const Rational& a, const Rational& b) { return mpq_cmp(a.q_, b.q_) >= 0; }

    /// 2^e as an exact rational (e may be negative).
    static Rational pow2(long e);

private:
    mpq_t q_;
};

/// Dyadic number m * 2^e with arbitrary-size mantissa.  The exact currency
/// of oracle answers and serialized ball components.
class Dyadic {
public:
    Dyadic() : exp_(0) { mpz_init(m_); }
    Dyadic(long mantissa, long exp) : exp_(exp) { mpz_init_set_si(m_, mantissa); }
    Dyadic(const Dyadic& o) : exp_(o.exp_) { mpz_init_set(m_, o.m_); }
    Dyadic(Dyadic&& o) noexcept : exp_(o.exp_) { mpz_init(m_); mpz_swap(m_, o.m_); }
    Dyadic& operator=(const Dyadic& o) {
        if (this != &o) { mpz_set(m_, o.m_); exp_ = o.exp_; }
        return *this;
    }
    Dyadic& operator=(Dyadic&& o) noexcept {
        if (this != &o) { mpz_swap(m_, o.m_); exp_ = o.exp_; }
        return *this;
    }
    ~Dyadic() { mpz_clear(m_); }

    static Dyadic from_mpz(mpz_srcptr m, long exp) {
        Dyadic d; mpz_set(d.m_, m); d.exp_ = exp; return d;
    }

    mpz_srcptr mantissa() const { return m_; }
    long exponent() const { return exp_; }
    bool is_zero() const { return mpz_sgn(m_) == 0; }
    int sign() const { return mpz_sgn(m_); }

    /// Strip trailing zero bits so the mantissa is odd (or zero with exp 0).
    void normalize();

    Rational to_rational() const;
    std::string to_decimal() const;   // always finite, exact

    friend bool operator==(const Dyadic& a, const Dyadic& b);

private:
    mpz_t m_;
    long exp_;
};

} // namespace sitlab
