#pragma once
#include <mpfr.h>
#include <string>

#include "sitlab/rational.hpp"

namespace sitlab {

using Prec = mpfr_prec_t;

/// Arbitrary-precision floating point value (RAII over mpfr_t).
///
/// Every operation takes its destination precision and rounding mode
/// explicitly; there is no global precision state anywhere in the library.
class Real {
public:
    explicit Real(Prec prec = 64) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
    Real(const Real& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
    Real(Real&& o) noexcept { mpfr_init2(v_, 2); mpfr_swap(v_, o.v_); }
    Real& operator=(const Real& o) {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    Real& operator=(Real&& o) noexcept {
        if (this != &o) mpfr_swap(v_, o.v_);
        return *this;
    }
    ~Real() { mpfr_clear(v_); }

    mpfr_srcptr raw() const { return v_; }
    mpfr_ptr raw() { return v_; }
    Prec prec() const { return mpfr_get_prec(v_); }

    static Real from_long(long x, Prec p) {
        Real r(p); mpfr_set_si(r.v_, x, MPFR_RNDN); return r;
    }
    /// Rounded conversion; `exact_rounding` reports the mpfr ternary value.
    static Real from_rational(const Rational& q, Prec p, mpfr_rnd_t rnd) {
        Real r(p); mpfr_set_q(r.v_, q.raw(), rnd); return r;
    }
    /// Exact embedding of a dyadic (precision grows to fit the mantissa).
    static Real from_dyadic(const Dyadic& d, Prec min_prec = 2);

    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    bool is_nan() const { return mpfr_nan_p(v_) != 0; }
    bool is_finite() const { return mpfr_number_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }
    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

    int cmp(const Real& o) const { return mpfr_cmp(v_, o.v_); }
    friend bool operator<(const Real& a, const Real& b) { return a.cmp(b) < 0; }
    friend bool operator<=(const Real& a, const Real& b) { return a.cmp(b) <= 0; }
    friend bool operator>(const Real& a, const Real& b) { return a.cmp(b) > 0; }
    friend bool operator>=(const Real& a, const Real& b) { return a.cmp(b) >= 0; }
    friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }

    /// Exact dyadic decomposition of a finite nonzero value.
    Dyadic to_dyadic() const;

    /// Shortest-form scientific string for logs (not the exact serializer).
    std::string to_string(int digits = 20) const;

private:
    mpfr_t v_;
};

} // namespace sitlab
