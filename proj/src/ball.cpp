#include "sitlab/ball.hpp"
#include "sitlab/errors.hpp"

#include <algorithm>

namespace sitlab {

namespace {

// One-ulp bound on the rounding error of a just-computed center value.
// RNDN guarantees a half-ulp; a full ulp leaves slack for the exponent read.
Real ulp_bound(const Real& c) {
    Real u(kRadPrec);
    if (c.is_zero()) return u;
    if (!c.is_finite()) throw DomainError("non-finite center in ball arithmetic");
    mpfr_exp_t e = mpfr_get_exp(c.raw());
    mpfr_set_ui_2exp(u.raw(), 1, e - c.prec(), MPFR_RNDU);
    return u;
}

Real rad_add(const Real& a, const Real& b) {
    Real r(kRadPrec);
    mpfr_add(r.raw(), a.raw(), b.raw(), MPFR_RNDU);
    return r;
}

Real rad_abs(const Real& x) {
    Real r(kRadPrec);
    mpfr_abs(r.raw(), x.raw(), MPFR_RNDU);
    return r;
}

} // namespace

Ball Ball::from_long(long v, Prec p) {
    Real c(p);
    int t = mpfr_set_si(c.raw(), v, MPFR_RNDN);
    Real r(kRadPrec);
    if (t != 0) r = ulp_bound(c);
    return Ball(std::move(c), std::move(r));
}

Ball Ball::from_rational(const Rational& q, Prec p) {
    Real c(p);
    int t = mpfr_set_q(c.raw(), q.raw(), MPFR_RNDN);
    Real r(kRadPrec);
    if (t != 0) r = ulp_bound(c);
    return Ball(std::move(c), std::move(r));
}

Ball Ball::from_dyadic(const Dyadic& d) {
    return Ball(Real::from_dyadic(d), Real(kRadPrec));
}

Ball Ball::from_dyadic_approx(const Dyadic& value, const Dyadic& err) {
    Real r(kRadPrec);
    if (!err.is_zero()) {
        Real re = Real::from_dyadic(err);
        mpfr_abs(r.raw(), re.raw(), MPFR_RNDU);
    }
    return Ball(Real::from_dyadic(value), std::move(r));
}

Ball Ball::from_endpoints(const Real& lo, const Real& hi, Prec p) {
    if (lo > hi) throw DomainError("from_endpoints: lo > hi");
    Real c(p);
    mpfr_add(c.raw(), lo.raw(), hi.raw(), MPFR_RNDN);
    mpfr_div_2ui(c.raw(), c.raw(), 1, MPFR_RNDN);
    Real r1(kRadPrec), r2(kRadPrec);
    mpfr_sub(r1.raw(), hi.raw(), c.raw(), MPFR_RNDU);
    mpfr_sub(r2.raw(), c.raw(), lo.raw(), MPFR_RNDU);
    if (r2 > r1) r1 = r2;
    if (r1.sign() < 0) mpfr_set_zero(r1.raw(), 1);
    return Ball(std::move(c), std::move(r1));
}

Ball Ball::pi(Prec p) {
    Real c(p);
    mpfr_const_pi(c.raw(), MPFR_RNDN);
    Real r = ulp_bound(c);
    return Ball(std::move(c), std::move(r));
}

Real Ball::lower() const {
    Real v(c_.prec());
    mpfr_sub(v.raw(), c_.raw(), r_.raw(), MPFR_RNDD);
    return v;
}

Real Ball::upper() const {
    Real v(c_.prec());
    mpfr_add(v.raw(), c_.raw(), r_.raw(), MPFR_RNDU);
    return v;
}

bool Ball::contains_zero() const { return lower().sign() <= 0 && upper().sign() >= 0; }
bool Ball::is_positive() const { return lower().sign() > 0; }
bool Ball::is_negative() const { return upper().sign() < 0; }

bool Ball::contains(const Rational& q) const {
    // exact: endpoints are dyadic
    Rational lo = lower().is_zero() ? Rational(0) : lower().to_dyadic().to_rational();
    Rational hi = upper().is_zero() ? Rational(0) : upper().to_dyadic().to_rational();
    return lo <= q && q <= hi;
}

bool Ball::contains_ball(const Ball& inner) const {
    return lower() <= inner.lower() && inner.upper() <= upper();
}

bool Ball::intersects(const Ball& other) const {
    return !(upper() < other.lower() || other.upper() < lower());
}

std::string Ball::to_string(int digits) const {
    return c_.to_string(digits) + " +/- " + r_.to_string(5);
}

Ball Ball::rounded(Prec p) const {
    Real c(p);
    int t = mpfr_set(c.raw(), c_.raw(), MPFR_RNDN);
    Real r = r_;
    if (t != 0) r = rad_add(r, ulp_bound(c));
    return Ball(std::move(c), std::move(r));
}

Ball add(const Ball& a, const Ball& b, Prec p) {
    Real c(p);
    int t = mpfr_add(c.raw(), a.center().raw(), b.center().raw(), MPFR_RNDN);
    Real r = rad_add(a.radius(), b.radius());
    if (t != 0) r = rad_add(r, ulp_bound(c));
    return Ball(std::move(c), std::move(r));
}

Ball sub(const Ball& a, const Ball& b, Prec p) {
    Real c(p);
    int t = mpfr_sub(c.raw(), a.center().raw(), b.center().raw(), MPFR_RNDN);
    Real r = rad_add(a.radius(), b.radius());
    if (t != 0) r = rad_add(r, ulp_bound(c));
    return Ball(std::move(c), std::move(r));
}

Ball neg(const Ball& a) {
    Real c = a.center();
    mpfr_neg(c.raw(), c.raw(), MPFR_RNDN);   // exact
    return Ball(std::move(c), a.radius());
}

Ball mul(const Ball& a, const Ball& b, Prec p) {
    Real c(p);
    int t = mpfr_mul(c.raw(), a.center().raw(), b.center().raw(), MPFR_RNDN);
    // |ac|*rb + |bc|*ra + ra*rb, all upward
    Real t1(kRadPrec), t2(kRadPrec), t3(kRadPrec);
    mpfr_mul(t1.raw(), a.center().raw(), b.radius().raw(), MPFR_RNDU);
    mpfr_abs(t1.raw(), t1.raw(), MPFR_RNDU);
    mpfr_mul(t2.raw(), b.center().raw(), a.radius().raw(), MPFR_RNDU);
    mpfr_abs(t2.raw(), t2.raw(), MPFR_RNDU);
    mpfr_mul(t3.raw(), a.radius().raw(), b.radius().raw(), MPFR_RNDU);
    Real r = rad_add(rad_add(t1, t2), t3);
    if (t != 0) r = rad_add(r, ulp_bound(c));
    return Ball(std::move(c), std::move(r));
}

Ball sqr(const Ball& a, Prec p) {
    if (a.contains_zero()) {
        Real m = abs_upper(a);
        Real hi(p);
        mpfr_sqr(hi.raw(), m.raw(), MPFR_RNDU);
        Real lo(p);
        mpfr_set_zero(lo.raw(), 1);
        return Ball::from_endpoints(lo, hi, p);
    }
    return mul(a, a, p);
}

Ball div(const Ball& a, const Ball& b, Prec p) {
    // certified denominator bound |bc| - rb > 0
    Real den(kRadPrec);
    mpfr_abs(den.raw(), b.center().raw(), MPFR_RNDD);
    mpfr_sub(den.raw(), den.raw(), b.radius().raw(), MPFR_RNDD);
    if (den.sign() <= 0) throw DomainError("ball division by enclosure containing zero");

    Real c(p);
    int t = mpfr_div(c.raw(), a.center().raw(), b.center().raw(), MPFR_RNDN);
    Real u = ulp_bound(c);
    // (ra + (|c|+ulp)*rb) / (|bc| - rb), upward
    Real qc(kRadPrec);
    mpfr_abs(qc.raw(), c.raw(), MPFR_RNDU);
    mpfr_add(qc.raw(), qc.raw(), u.raw(), MPFR_RNDU);
    Real num(kRadPrec);
    mpfr_mul(num.raw(), qc.raw(), b.radius().raw(), MPFR_RNDU);
    mpfr_add(num.raw(), num.raw(), a.radius().raw(), MPFR_RNDU);
    Real r(kRadPrec);
    mpfr_div(r.raw(), num.raw(), den.raw(), MPFR_RNDU);
    if (t != 0) r = rad_add(r, u);
    return Ball(std::move(c), std::move(r));
}

Ball mul_si(const Ball& a, long k, Prec p) {
    Real c(p);
    int t = mpfr_mul_si(c.raw(), a.center().raw(), k, MPFR_RNDN);
    Real r(kRadPrec);
    mpfr_mul_si(r.raw(), a.radius().raw(), std::abs(k), MPFR_RNDU);
    if (t != 0) r = rad_add(r, ulp_bound(c));
    return Ball(std::move(c), std::move(r));
}

Ball div_ui(const Ball& a, unsigned long k, Prec p) {
    Real c(p);
    int t = mpfr_div_ui(c.raw(), a.center().raw(), k, MPFR_RNDN);
    Real r(kRadPrec);
    mpfr_div_ui(r.raw(), a.radius().raw(), k, MPFR_RNDU);
    if (t != 0) r = rad_add(r, ulp_bound(c));
    return Ball(std::move(c), std::move(r));
}

Ball scale2(const Ball& a, long e) {
    Real c = a.center(), r = a.radius();
    mpfr_mul_2si(c.raw(), c.raw(), e, MPFR_RNDN);   // exact
    mpfr_mul_2si(r.raw(), r.raw(), e, MPFR_RNDU);
    return Ball(std::move(c), std::move(r));
}

Ball pow_ui(const Ball& a, unsigned long n, Prec p) {
    if (n == 0) return Ball::from_long(1, p);
    Ball acc = a;
    Ball result = Ball::from_long(1, p);
    unsigned long k = n;
    while (k > 0) {
        if (k & 1ul) result = mul(result, acc, p);
        k >>= 1;
        if (k > 0) acc = sqr(acc, p);
    }
    return result;
}

Ball sqrt_ball(const Ball& a, Prec p) {
    Real lo = a.lower();
    if (lo.sign() < 0) throw DomainError("sqrt of enclosure containing negative values");
    Real slo(p), shi(p);
    mpfr_sqrt(slo.raw(), lo.raw(), MPFR_RNDD);
    Real hi = a.upper();
    mpfr_sqrt(shi.raw(), hi.raw(), MPFR_RNDU);
    return Ball::from_endpoints(slo, shi, p);
}

Ball cbrt_ball(const Ball& a, Prec p) {
    Real clo(p), chi(p);
    mpfr_cbrt(clo.raw(), a.lower().raw(), MPFR_RNDD);
    mpfr_cbrt(chi.raw(), a.upper().raw(), MPFR_RNDU);
    return Ball::from_endpoints(clo, chi, p);
}

Ball exp_ball(const Ball& a, Prec p) {
    Real elo(p), ehi(p);
    mpfr_exp(elo.raw(), a.lower().raw(), MPFR_RNDD);
    mpfr_exp(ehi.raw(), a.upper().raw(), MPFR_RNDU);
    return Ball::from_endpoints(elo, ehi, p);
}

Ball log_ball(const Ball& a, Prec p) {
    if (!a.is_positive()) throw DomainError("log of enclosure not certified positive");
    Real llo(p), lhi(p);
    mpfr_log(llo.raw(), a.lower().raw(), MPFR_RNDD);
    mpfr_log(lhi.raw(), a.upper().raw(), MPFR_RNDU);
    return Ball::from_endpoints(llo, lhi, p);
}

namespace {

// sin and cos are 1-Lipschitz: center mapped, radius carried over.
// Very wide input collapses to the trivial enclosure [-1, 1].
Ball lipschitz_trig(const Ball& a, Prec p, int (*fn)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t)) {
    Real four(kRadPrec);
    mpfr_set_ui(four.raw(), 4, MPFR_RNDN);
    if (a.radius() >= four) {
        Real c(p), r(kRadPrec);
        mpfr_set_ui(r.raw(), 1, MPFR_RNDU);
        return Ball(std::move(c), std::move(r));
    }
    Real c(p);
    int t = fn(c.raw(), a.center().raw(), MPFR_RNDN);
    Real r = a.radius();
    if (t != 0) r = rad_add(r, ulp_bound(c));
    Real one(kRadPrec);
    mpfr_set_ui(one.raw(), 1, MPFR_RNDN);
    Real spill = rad_add(rad_abs(c), r);   // no value of sin/cos exceeds 1
    if (spill > one) {
        Real neg_one(p), pos_one(p);
        mpfr_set_si(neg_one.raw(), -1, MPFR_RNDN);
        mpfr_set_si(pos_one.raw(), 1, MPFR_RNDN);
        return intersect_interval(Ball(std::move(c), std::move(r)), neg_one, pos_one, p);
    }
    return Ball(std::move(c), std::move(r));
}

} // namespace

Ball sin_ball(const Ball& a, Prec p) { return lipschitz_trig(a, p, mpfr_sin); }
Ball cos_ball(const Ball& a, Prec p) { return lipschitz_trig(a, p, mpfr_cos); }

void sin_cos_ball(Ball& s, Ball& c, const Ball& a, Prec p) {
    Real four(kRadPrec);
    mpfr_set_ui(four.raw(), 4, MPFR_RNDN);
    if (a.radius() >= four) {
        s = sin_ball(a, p);
        c = cos_ball(a, p);
        return;
    }
    Real sc(p), cc(p);
    mpfr_sin_cos(sc.raw(), cc.raw(), a.center().raw(), MPFR_RNDN);
    Real rs = rad_add(a.radius(), ulp_bound(sc));
    Real rc = rad_add(a.radius(), ulp_bound(cc));
    s = Ball(std::move(sc), std::move(rs));
    c = Ball(std::move(cc), std::move(rc));
}

Ball pow_ball(const Ball& b, const Ball& x, Prec p) {
    return exp_ball(mul(log_ball(b, p), x, p), p);
}

Real abs_upper(const Ball& a) {
    Real lo = a.lower(), hi = a.upper();
    Real r(kRadPrec);
    mpfr_abs(lo.raw(), lo.raw(), MPFR_RNDU);
    mpfr_abs(hi.raw(), hi.raw(), MPFR_RNDU);
    mpfr_max(r.raw(), lo.raw(), hi.raw(), MPFR_RNDU);
    return r;
}

Real abs_lower(const Ball& a) {
    Real r(kRadPrec);
    if (a.contains_zero()) {
        mpfr_set_zero(r.raw(), 1);
        return r;
    }
    Real lo = a.lower(), hi = a.upper();
    mpfr_abs(lo.raw(), lo.raw(), MPFR_RNDD);
    mpfr_abs(hi.raw(), hi.raw(), MPFR_RNDD);
    mpfr_min(r.raw(), lo.raw(), hi.raw(), MPFR_RNDD);
    return r;
}

Ball intersect_interval(const Ball& a, const Real& lo, const Real& hi, Prec p) {
    Real alo = a.lower(), ahi = a.upper();
    const Real& nlo = (alo > lo) ? alo : lo;
    const Real& nhi = (ahi < hi) ? ahi : hi;
    if (nlo > nhi) throw DomainError("empty intersection");
    return Ball::from_endpoints(nlo, nhi, p);
}

Ball hull(const Ball& a, const Ball& b, Prec p) {
    Real lo = a.lower(), blo = b.lower();
    Real hi = a.upper(), bhi = b.upper();
    if (blo < lo) lo = blo;
    if (bhi > hi) hi = bhi;
    return Ball::from_endpoints(lo, hi, p);
}

Ball widen(const Ball& a, const Real& pad) {
    if (pad.sign() < 0) throw DomainError("widen by negative pad");
    return Ball(a.center(), rad_add(a.radius(), pad));
}

DotAccum::DotAccum(Prec p) : c_(p), r_(kRadPrec), t1_(kRadPrec), t2_(kRadPrec) {}

void DotAccum::add_product(const Ball& a, const Ball& b) {
    // cross terms first: |ac| rb + |bc| ra + ra rb, all upward at kRadPrec
    mpfr_mul(t1_.raw(), a.center().raw(), b.radius().raw(), MPFR_RNDU);
    mpfr_abs(t1_.raw(), t1_.raw(), MPFR_RNDU);
    mpfr_add(r_.raw(), r_.raw(), t1_.raw(), MPFR_RNDU);
    mpfr_mul(t1_.raw(), b.center().raw(), a.radius().raw(), MPFR_RNDU);
    mpfr_abs(t1_.raw(), t1_.raw(), MPFR_RNDU);
    mpfr_add(r_.raw(), r_.raw(), t1_.raw(), MPFR_RNDU);
    mpfr_mul(t1_.raw(), a.radius().raw(), b.radius().raw(), MPFR_RNDU);
    mpfr_add(r_.raw(), r_.raw(), t1_.raw(), MPFR_RNDU);
    // fused center update plus a one-ulp rounding bound
    int t = mpfr_fma(c_.raw(), a.center().raw(), b.center().raw(), c_.raw(), MPFR_RNDN);
    if (t != 0 && !c_.is_zero()) {
        mpfr_set_ui_2exp(t2_.raw(), 1, mpfr_get_exp(c_.raw()) - c_.prec(), MPFR_RNDU);
        mpfr_add(r_.raw(), r_.raw(), t2_.raw(), MPFR_RNDU);
    }
}

void DotAccum::add(const Ball& a) {
    mpfr_add(r_.raw(), r_.raw(), a.radius().raw(), MPFR_RNDU);
    int t = mpfr_add(c_.raw(), c_.raw(), a.center().raw(), MPFR_RNDN);
    if (t != 0 && !c_.is_zero()) {
        mpfr_set_ui_2exp(t2_.raw(), 1, mpfr_get_exp(c_.raw()) - c_.prec(), MPFR_RNDU);
        mpfr_add(r_.raw(), r_.raw(), t2_.raw(), MPFR_RNDU);
    }
}

Ball DotAccum::result() const { return Ball(c_, r_); }

} // namespace sitlab
