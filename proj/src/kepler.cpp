#include "sitlab/kepler.hpp"
#include "sitlab/errors.hpp"

namespace sitlab {

void OrbitParams::validate() const {
    if (a.sign() <= 0) throw DomainError("orbit: a must be > 0");
    if (mu.sign() <= 0) throw DomainError("orbit: mu must be > 0");
    if (e.sign() < 0 || e >= Rational(1)) throw DomainError("orbit: e must be in [0, 1)");
    if (phi.sign() < 0) throw DomainError("orbit: phi must be in [0, 2*pi)");
    Ball two_pi = scale2(Ball::pi(128), 1);
    if (!(Ball::from_rational(phi, 128).upper() < two_pi.lower()))
        throw DomainError("orbit: phi must be in [0, 2*pi)");
}

Ball mean_motion(const OrbitParams& params, Prec p) {
    Ball a = Ball::from_rational(params.a, p);
    Ball mu = Ball::from_rational(params.mu, p);
    return sqrt_ball(div(mu, mul(a, sqr(a, p), p), p), p);
}

Ball period(const OrbitParams& params, Prec p) {
    return div(scale2(Ball::pi(p), 1), mean_motion(params, p), p);
}

Ball epoch(const OrbitParams& params, Prec p) {
    Ball phi = Ball::from_rational(params.phi, p);
    Ball e = Ball::from_rational(params.e, p);
    Ball m0 = sub(phi, mul(e, sin_ball(phi, p), p), p);   // phi - e sin phi
    return neg(div(m0, mean_motion(params, p), p));
}

Ball mean_anomaly(const OrbitParams& params, const Ball& t, Prec p) {
    Ball phi = Ball::from_rational(params.phi, p);
    Ball e = Ball::from_rational(params.e, p);
    Ball m0 = sub(phi, mul(e, sin_ball(phi, p), p), p);
    return add(mul(mean_motion(params, p), t, p), m0, p);
}

Ball mean_anomaly(const OrbitParams& params, const Rational& t, Prec p) {
    return mean_anomaly(params, Ball::from_rational(t, p), p);
}

namespace {

// |tol| as a (bits, Real) pair: smallest l with 2^-l <= tol guides precision.
long tol_bits(const Rational& tol) {
    if (tol.sign() <= 0) throw DomainError("tolerance must be > 0");
    // ceil(-log2 tol) via mpfr at low precision, rounded pessimistically
    Real t = Real::from_rational(tol, 64, MPFR_RNDD);
    long e = static_cast<long>(mpfr_get_exp(t.raw()));
    return std::max(1l, 2 - e);
}

} // namespace

Anomaly solve_eccentric_anomaly(const Rational& e, const Ball& M, const Rational& tol) {
    if (e.sign() < 0 || e >= Rational(1))
        throw DomainError("solve_eccentric_anomaly: e must be in [0, 1)");
    if (e.is_zero()) return Anomaly{M};   // circular orbit: E = M exactly

    const Rational one_minus_e = Rational(1) - e;
    const Rational target = tol / Rational(4);   // drive residual to tol/4

    long lbits = tol_bits(tol);
    for (Prec p = static_cast<Prec>(lbits + 64);; p *= 2) {
        // Newton with bracket safeguard, in plain floating point at prec p
        Real ec = Real::from_rational(e, p, MPFR_RNDN);
        Real mc(p);
        mpfr_set(mc.raw(), M.center().raw(), MPFR_RNDN);
        Real lo(p), hi(p);
        mpfr_sub(lo.raw(), mc.raw(), ec.raw(), MPFR_RNDD);
        mpfr_add(hi.raw(), mc.raw(), ec.raw(), MPFR_RNDU);

        Real E(p), s(p), c(p), g(p), gp(p), step(p);
        mpfr_sin(s.raw(), mc.raw(), MPFR_RNDN);
        mpfr_fma(E.raw(), ec.raw(), s.raw(), mc.raw(), MPFR_RNDN);   // E0 = M + e sin M

        Real limit(p);
        mpfr_set_ui_2exp(limit.raw(), 1, -static_cast<long>(p) + 8, MPFR_RNDN);
        for (int it = 0; it < 512; ++it) {
            mpfr_sin_cos(s.raw(), c.raw(), E.raw(), MPFR_RNDN);
            mpfr_fms(g.raw(), ec.raw(), s.raw(), E.raw(), MPFR_RNDN);
            mpfr_neg(g.raw(), g.raw(), MPFR_RNDN);
            mpfr_sub(g.raw(), g.raw(), mc.raw(), MPFR_RNDN);         // g = E - e sin E - M
            if (mpfr_cmpabs(g.raw(), limit.raw()) <= 0) break;
            // maintain bracket from the sign of g (g is increasing in E)
            if (g.sign() > 0) mpfr_set(hi.raw(), E.raw(), MPFR_RNDN);
            else mpfr_set(lo.raw(), E.raw(), MPFR_RNDN);
            mpfr_fms(gp.raw(), ec.raw(), c.raw(), Real::from_long(1, p).raw(), MPFR_RNDN);
            mpfr_neg(gp.raw(), gp.raw(), MPFR_RNDN);                 // g' = 1 - e cos E
            mpfr_div(step.raw(), g.raw(), gp.raw(), MPFR_RNDN);
            mpfr_sub(E.raw(), E.raw(), step.raw(), MPFR_RNDN);
            if (E < lo || E > hi) {                                  // bisect
                mpfr_add(E.raw(), lo.raw(), hi.raw(), MPFR_RNDN);
                mpfr_div_2ui(E.raw(), E.raw(), 1, MPFR_RNDN);
            }
        }

        // certify: ball residual at the candidate point
        Ball Eb(E, Real(kRadPrec));
        Ball res = sub(sub(Eb, mul(Ball::from_rational(e, p), sin_ball(Eb, p), p), p), M, p);
        Real res_hi = abs_upper(res);
        bool certified = res_hi.is_zero() || res_hi.to_dyadic().to_rational() <= target;
        if (certified) {
            // radius = (tol/4 + M.radius) / (1 - e): a fixed formula in tol,
            // so halving tol always halves the reported enclosure.
            Real num(kRadPrec);
            mpfr_set_q(num.raw(), target.raw(), MPFR_RNDU);
            mpfr_add(num.raw(), num.raw(), M.radius().raw(), MPFR_RNDU);
            Real den = Real::from_rational(one_minus_e, kRadPrec, MPFR_RNDD);
            Real rad(kRadPrec);
            mpfr_div(rad.raw(), num.raw(), den.raw(), MPFR_RNDU);
            return Anomaly{Ball(E, rad)};
        }
        if (p > 1l << 20) throw ResourceError("kepler solve: precision budget exhausted");
    }
}

Ball orbit_radius(const OrbitParams& params, const Anomaly& anomaly, Prec p) {
    Ball e = Ball::from_rational(params.e, p);
    Ball a = Ball::from_rational(params.a, p);
    Ball one = Ball::from_long(1, p);
    return mul(a, sub(one, mul(e, cos_ball(anomaly.E, p), p), p), p);
}

} // namespace sitlab
