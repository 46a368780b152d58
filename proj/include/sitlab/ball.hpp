#pragma once
#include <optional>
#include <string>

#include "sitlab/real.hpp"

namespace sitlab {

/// Precision of all radius arithmetic.  Radii only need a couple of correct
/// leading digits; what matters is that every radius operation rounds up.
inline constexpr Prec kRadPrec = 32;

/// A certified enclosure [center - radius, center + radius] of a real
/// quantity.  Every arithmetic routine below is outward-sound: whenever the
/// inputs enclose x and y, the output encloses the exact result.
///
/// Center precision is chosen per operation; the radius carries both the
/// propagated input radii and a one-ulp bound for the center rounding.
class Ball {
public:
    Ball() : c_(2), r_(kRadPrec) {}
    Ball(Real c, Real r) : c_(std::move(c)), r_(std::move(r)) {}

    static Ball exact_zero() { return Ball(); }
    static Ball from_long(long v, Prec p);
    static Ball from_rational(const Rational& q, Prec p);
    static Ball from_dyadic(const Dyadic& d);                    // exact, radius 0
    static Ball from_dyadic_approx(const Dyadic& value, const Dyadic& err);
    static Ball from_endpoints(const Real& lo, const Real& hi, Prec p);
    static Ball pi(Prec p);

    const Real& center() const { return c_; }
    const Real& radius() const { return r_; }
    bool is_exact() const { return r_.is_zero(); }
    bool is_finite() const { return c_.is_finite() && r_.is_finite(); }

    Real lower() const;   // rounded down
    Real upper() const;   // rounded up

    bool contains_zero() const;
    bool contains(const Rational& q) const;     // exact test
    bool is_positive() const;                   // certified  > 0
    bool is_negative() const;                   // certified  < 0
    bool contains_ball(const Ball& inner) const;
    bool intersects(const Ball& other) const;

    double approx() const { return c_.to_double(); }
    double radius_approx() const { return r_.to_double(); }
    std::string to_string(int digits = 17) const;

    /// Center re-rounded to precision p, rounding error absorbed into the
    /// radius.  Used to compress serialized output.
    Ball rounded(Prec p) const;

private:
    Real c_;
    Real r_;
};

// arithmetic --------------------------------------------------------------

Ball add(const Ball& a, const Ball& b, Prec p);
Ball sub(const Ball& a, const Ball& b, Prec p);
Ball neg(const Ball& a);
Ball mul(const Ball& a, const Ball& b, Prec p);
Ball sqr(const Ball& a, Prec p);                 // tight around zero
Ball div(const Ball& a, const Ball& b, Prec p);  // requires 0 not in b
Ball mul_si(const Ball& a, long k, Prec p);
Ball div_ui(const Ball& a, unsigned long k, Prec p);
Ball scale2(const Ball& a, long e);              // * 2^e, exact
Ball pow_ui(const Ball& a, unsigned long n, Prec p);

Ball sqrt_ball(const Ball& a, Prec p);           // domain: a >= 0
Ball cbrt_ball(const Ball& a, Prec p);
Ball exp_ball(const Ball& a, Prec p);
Ball log_ball(const Ball& a, Prec p);            // domain: a > 0
Ball sin_ball(const Ball& a, Prec p);
Ball cos_ball(const Ball& a, Prec p);
void sin_cos_ball(Ball& s, Ball& c, const Ball& a, Prec p);

/// b^x for certified b > 0 via exp(x log b).
Ball pow_ball(const Ball& b, const Ball& x, Prec p);

/// max(|a|) as an upward-rounded Real; min(|a|) rounded down (0 if 0 in a).
Real abs_upper(const Ball& a);
Real abs_lower(const Ball& a);

/// Intersection with a closed interval; throws DomainError when certified
/// empty.  Used e.g. to clamp cosine enclosures to [-1, 1].
Ball intersect_interval(const Ball& a, const Real& lo, const Real& hi, Prec p);

/// Convex hull of two enclosures.
Ball hull(const Ball& a, const Ball& b, Prec p);

/// a with radius enlarged by pad (pad >= 0).
Ball widen(const Ball& a, const Real& pad);

/// Certified accumulator for sums of products: the workhorse of the series
/// convolutions.  Centers are fused-multiply-added at precision p; the
/// radius collects the cross terms and one ulp per fused step, upward.
class DotAccum {
public:
    explicit DotAccum(Prec p);
    void add_product(const Ball& a, const Ball& b);
    void add(const Ball& a);
    Ball result() const;

private:
    Real c_;
    Real r_;
    Real t1_, t2_;   // scratch at radius precision
};

} // namespace sitlab
