#include "sitlab/analysis.hpp"
#include "sitlab/errors.hpp"

#include <chrono>

namespace sitlab {

Ball sturm_bound(const Ball& tau, const OrbitParams& params, Prec p) {
    Ball mu = Ball::from_rational(params.mu, p);
    Ball a = Ball::from_rational(params.a, p);
    Ball pi2 = sqr(Ball::pi(p), p);
    Ball x = div(scale2(mul(mu, sqr(tau, p), p), 1), pi2, p);   // 2 mu tau^2 / pi^2
    Ball x23 = cbrt_ball(sqr(x, p), p);                          // x^(2/3)
    Ball rad = sub(x23, sqr(a, p), p);
    if (rad.lower().sign() < 0)
        throw DomainError("sturm_bound: gap below Sturm threshold");
    return sqrt_ball(rad, p);
}

Ball oscillator_freq(const Ball& h, const OrbitParams& params, Prec p) {
    if (h.lower().sign() < 0)
        throw DomainError("oscillator_freq: h must be certified nonnegative");
    Ball mu = Ball::from_rational(params.mu, p);
    Ball a = Ball::from_rational(params.a, p);
    Ball u = add(sqr(h, p), sqr(a, p), p);
    return div(scale2(mu, 1), mul(u, sqrt_ball(u, p), p), p);
}

ChordVerdict verify_chord_property(const std::vector<SamplePoint>& arc, const Ball& h,
                                   const Ball& tau_a, const Ball& tau_b, Prec p) {
    if (arc.size() < 4) throw ShapeError("chord check: arc needs at least 4 samples");
    Rational ta_hi = tau_a.upper().to_dyadic().to_rational();
    Rational tb_lo = tau_b.lower().to_dyadic().to_rational();
    if (!(ta_hi < arc.front().t) || !(arc.back().t < tb_lo))
        throw ShapeError("chord check: arc samples must lie strictly between the roots");
    Ball gap = sub(tau_b, tau_a, p);
    if (!gap.is_positive()) throw ShapeError("chord check: roots not certified ordered");

    // one excursion: certified-nonzero samples must share one sign
    int sign = 0;
    for (const SamplePoint& s : arc) {
        int here = s.z.is_positive() ? 1 : (s.z.is_negative() ? -1 : 0);
        if (here == 0) continue;
        if (sign == 0) sign = here;
        else if (here != sign) throw ShapeError("chord check: arc crosses zero");
    }
    if (sign == 0) throw ShapeError("chord check: arc has no certified-nonzero sample");

    // certified max |z| must clear h
    Real best(kRadPrec);
    mpfr_set_zero(best.raw(), 1);
    for (const SamplePoint& s : arc) {
        Real lo = abs_lower(s.z);
        if (lo > best) best = lo;
    }
    if (!(best > abs_upper(h)))
        throw DomainError("chord check: certified max |z| does not exceed h");

    // longest contiguous run of samples with |z| > h/4 certified
    Real thr(kRadPrec);
    mpfr_div_2ui(thr.raw(), abs_upper(h).raw(), 2, MPFR_RNDU);
    Rational span(0);
    size_t i = 0;
    while (i < arc.size()) {
        if (!(abs_lower(arc[i].z) > thr)) {
            ++i;
            continue;
        }
        size_t j = i;
        while (j + 1 < arc.size() && abs_lower(arc[j + 1].z) > thr) ++j;
        Rational len = arc[j].t - arc[i].t;
        if (span < len) span = len;
        i = j + 1;
    }

    ChordVerdict out;
    out.span = span;
    out.gap = gap;
    out.fraction = div(Ball::from_rational(span, p), gap, p);
    // strict: span > (3/4) * upper(gap), decided in exact rational arithmetic
    Rational gap_hi = gap.upper().to_dyadic().to_rational();
    out.holds = span > Rational(3, 4) * gap_hi;
    return out;
}

RecoveryConfig recovery_params(long m, const OrbitParams& params, const Rational& safety,
                               Prec p) {
    if (m < 2 || m % 2 != 0)
        throw DomainError("recovery_params: m must be an even integer >= 2");
    if (!(safety > Rational(0)) || !(safety < Rational(1)))
        throw DomainError("recovery_params: safety must lie strictly in (0, 1)");

    RecoveryConfig cfg;
    cfg.m = m;
    cfg.P = period(params, p);
    Ball mP = mul_si(cfg.P, m, p);
    try {
        cfg.h = sturm_bound(mP, params, p);
    } catch (const DomainError&) {
        throw DomainError("recovery_params: m P is below the Sturm threshold; use a larger m");
    }
    if (!cfg.h.is_positive())
        throw DomainError("recovery_params: H(mP) not certified positive; use a larger m");

    // delta = safety * m P / 2, rounded down to denominator 4096
    Ball half_mP = scale2(mP, -1);
    Ball target = mul(Ball::from_rational(safety, p), half_mP, p);
    Real t_lo = target.lower();
    Real scaled(64);
    mpfr_mul_2ui(scaled.raw(), t_lo.raw(), 12, MPFR_RNDD);
    mpfr_floor(scaled.raw(), scaled.raw());
    long num = mpfr_get_si(scaled.raw(), MPFR_RNDD);
    if (num <= 0) throw DomainError("recovery_params: delta collapsed to zero");
    cfg.delta = Rational(num, 1ul << 12);

    // smallest l with 2^-l < safety * H(mP) / 4
    Ball quarter = scale2(mul(Ball::from_rational(safety, p), cfg.h, p), -2);
    Real q_lo = quarter.lower();
    if (q_lo.sign() <= 0) throw DomainError("recovery_params: H(mP)/4 margin vanished");
    long l = 1 - static_cast<long>(mpfr_get_exp(q_lo.raw()));
    if (l < 1) l = 1;
    while (!(Rational::pow2(-l) < q_lo.to_dyadic().to_rational())) ++l;
    cfg.eps = Rational::pow2(-l);

    cfg.validate();
    return cfg;
}

std::vector<ProbeRecord> probe_complexity(const OracleVector& x0,
                                          const std::vector<Rational>& t_list, long l,
                                          const IntegratorConfig& cfg) {
    for (size_t i = 1; i < t_list.size(); ++i)
        if (!(t_list[i - 1] < t_list[i]))
            throw DomainError("probe: t list must be sorted ascending");

    std::vector<ProbeRecord> out;
    for (const Rational& t : t_list) {
        IntegratorConfig c = cfg;
        c.eps_exp = l;
        auto start = std::chrono::steady_clock::now();
        CertifiedState st = integrate(x0, t, c);
        auto stop = std::chrono::steady_clock::now();
        ProbeRecord rec;
        rec.t = t;
        rec.l = l;
        rec.bits = max_bits_requested(st.log);
        rec.steps = st.stats.steps;
        rec.attempts = st.stats.attempts;
        rec.working_precision = st.stats.working_precision;
        rec.wall_seconds = std::chrono::duration<double>(stop - start).count();
        out.push_back(std::move(rec));
    }
    return out;
}

} // namespace sitlab
