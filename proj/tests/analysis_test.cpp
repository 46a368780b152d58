#include <doctest.h>

#include <cmath>

#include "sitlab/analysis.hpp"
#include "sitlab/errors.hpp"

using namespace sitlab;

namespace {

const Prec P = 160;

OrbitParams unit_orbit(const char* e = "0.1") {
    return OrbitParams{Rational(1), Rational::from_string(e), Rational(1), Rational(0)};
}

} // namespace

TEST_CASE("sturm bound pinned values") {
    OrbitParams op = unit_orbit();
    // tau = pi: h = sqrt(2^(2/3) - 1), frozen from a high-precision scalar run
    Ball h1 = sturm_bound(Ball::pi(P), op, P);
    CHECK(h1.approx() == doctest::Approx(0.7664209365408799).epsilon(1e-13));
    // tau = 4 pi: h = sqrt(32^(2/3) - 1), same oracle
    Ball h4 = sturm_bound(scale2(Ball::pi(P), 2), op, P);
    CHECK(h4.approx() == doctest::Approx(3.0131990307908612).epsilon(1e-13));
    // boundary: (2 mu tau^2/pi^2)^(2/3) = a^2 at tau = pi/sqrt(2 mu); the
    // exact boundary is undecidable in ball arithmetic, so probe both sides
    Ball tau0 = div(Ball::pi(P), sqrt_ball(Ball::from_long(2, P), P), P);
    Ball above = mul(tau0, Ball::from_rational(Rational(1) + Rational::pow2(-20), P), P);
    Ball h0 = sturm_bound(above, op, P);
    CHECK(h0.lower().sign() >= 0);
    CHECK(h0.upper().to_double() < 1e-2);
    Ball below = mul(tau0, Ball::from_rational(Rational(1) - Rational::pow2(-20), P), P);
    CHECK_THROWS_AS(sturm_bound(below, op, P), DomainError);
    // monotone: H(2 tau) > H(tau)
    Ball h2 = sturm_bound(scale2(Ball::pi(P), 1), op, P);
    CHECK(h2.lower() > h1.upper());
    // below threshold: domain error
    CHECK_THROWS_AS(sturm_bound(Ball::from_long(1, P), op, P), DomainError);
}

TEST_CASE("oscillator frequency and the sturm identity") {
    OrbitParams op = unit_orbit();
    // h=0, a=1, mu=1: q = 2
    Ball q0 = oscillator_freq(Ball::exact_zero(), op, P);
    CHECK(q0.contains(Rational(2)));
    // q decreasing in h
    Ball q1 = oscillator_freq(Ball::from_long(1, P), op, P);
    CHECK(q1.upper() < q0.lower());
    // pi / sqrt(q(H(tau))) = tau for tau above threshold
    for (long num : {7l, 11l, 20l}) {
        Ball tau = div(mul_si(Ball::pi(P), num, P), Ball::from_long(2, P), P);
        Ball h = sturm_bound(tau, op, P);
        Ball q = oscillator_freq(h, op, P);
        Ball back = div(Ball::pi(P), sqrt_ball(q, P), P);
        CHECK(back.intersects(tau));
    }
}

TEST_CASE("chord property on the sine arc") {
    // z(t) = sin t on [0, pi], h = 0.9: the set {z > 0.225} has measure
    // pi - 2 asin(0.225) ~ 0.8555 pi > 0.75 pi
    OrbitParams op = unit_orbit();
    std::vector<SamplePoint> arc;
    const long n = 4096;
    for (long i = 1; i < n; ++i) {
        Rational t = Rational(i, n) * Rational(355, 113);   // dense rational grid on ~[0, pi]
        Ball tb = Ball::from_rational(t, P);
        arc.push_back(SamplePoint{t, sin_ball(tb, P), cos_ball(tb, P), tb});
    }
    Ball h = Ball::from_rational(Rational(9, 10), P);
    Ball ta = Ball::exact_zero();
    Ball tb = Ball::pi(P);
    auto verdict = verify_chord_property(arc, h, ta, tb, P);
    CHECK(verdict.holds);
    CHECK(verdict.fraction.approx() == doctest::Approx(0.8555).epsilon(2e-3));
    (void)op;
}

TEST_CASE("chord property fails for a flat arc that barely clears h/4") {
    // triangle-like arc with peak 1: with h just below 1 the measured
    // fraction sits near 3/4; pushing h above the peak violates the
    // max-|z| precondition instead
    std::vector<SamplePoint> arc;
    const long n = 2048;
    for (long i = 1; i < n; ++i) {
        Rational t(i, n);
        Rational zq = (t < Rational(1, 2)) ? t * Rational(2) : (Rational(1) - t) * Rational(2);
        arc.push_back(SamplePoint{t, Ball::from_rational(zq, P), Ball::exact_zero(),
                                  Ball::exact_zero()});
    }
    Ball ta = Ball::exact_zero();
    Ball tb = Ball::from_long(1, P);
    // peak exactly 1 > h = 0.999: fraction of {|z| > h/4} is
    // 1 - h/4 / 1 ... for the triangle: 1 - 0.24975 ~ 0.750x, marginally above
    auto v1 = verify_chord_property(arc, Ball::from_rational(Rational(999, 1000), P), ta, tb, P);
    CHECK(v1.fraction.approx() == doctest::Approx(0.75).epsilon(2e-2));
    // h above the peak: precondition violated
    CHECK_THROWS_AS(
        verify_chord_property(arc, Ball::from_rational(Rational(101, 100), P), ta, tb, P),
        DomainError);
}

TEST_CASE("chord property rejects malformed arcs") {
    Ball ta = Ball::exact_zero(), tb = Ball::from_long(1, P);
    std::vector<SamplePoint> tiny{{Rational(1, 2), Ball::from_long(1, P), Ball(), Ball()}};
    CHECK_THROWS_AS(verify_chord_property(tiny, Ball::from_long(1, P), ta, tb, P), ShapeError);

    std::vector<SamplePoint> crossing;
    for (long i = 1; i < 64; ++i) {
        Rational t(i, 64);
        Rational zq = (t < Rational(1, 2)) ? Rational(1) : Rational(-1);
        crossing.push_back(SamplePoint{t, Ball::from_rational(zq, P), Ball(), Ball()});
    }
    CHECK_THROWS_AS(
        verify_chord_property(crossing, Ball::from_rational(Rational(1, 2), P), ta, tb, P),
        ShapeError);
}

TEST_CASE("recovery params: pinned m=2 unit orbit values") {
    OrbitParams op = unit_orbit();
    RecoveryConfig cfg = recovery_params(2, op, Rational(1, 2), P);
    // h = H(2 P) = H(4 pi) = 3.01319903...
    CHECK(cfg.h.approx() == doctest::Approx(3.0131990307908612).epsilon(1e-12));
    // safety h / 4 = 0.3766...: smallest l with 2^-l below it is l = 2
    CHECK(cfg.eps == Rational(1, 4));
    // delta = safety m P / 2 = pi, rounded down at denominator 4096
    CHECK(cfg.delta.to_double() == doctest::Approx(M_PI).epsilon(1e-3));
    CHECK(cfg.delta.to_double() <= M_PI);
    CHECK_NOTHROW(cfg.validate());

    // the produced parameters satisfy the strict invariants with margin
    Rational p_lo = cfg.P.lower().to_dyadic().to_rational();
    CHECK(cfg.delta < p_lo);                       // < m P/2 = P
    CHECK(Rational(2) * cfg.delta < p_lo * Rational(2));
}

TEST_CASE("recovery params: safety must be strict and m even") {
    OrbitParams op = unit_orbit();
    CHECK_THROWS_AS(recovery_params(2, op, Rational(1), P), DomainError);
    CHECK_THROWS_AS(recovery_params(2, op, Rational(0), P), DomainError);
    CHECK_THROWS_AS(recovery_params(3, op, Rational(1, 2), P), DomainError);
    CHECK_THROWS_AS(recovery_params(0, op, Rational(1, 2), P), DomainError);
}

TEST_CASE("recovery params: H(mP) scales with the orbit and stays defined") {
    // H(mP)^2 = a^2 (4 m^(4/3) - 1) for every valid orbit, so the threshold
    // can never bite at tau = mP; check the closed form instead
    OrbitParams op{Rational(40), Rational(1, 10), Rational(1, 1000), Rational(0)};
    RecoveryConfig cfg = recovery_params(2, op, Rational(1, 2), P);
    double expect = 40.0 * std::sqrt(4.0 * std::pow(2.0, 4.0 / 3.0) - 1.0);
    CHECK(cfg.h.approx() == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("probe: identity case and additive-l property") {
    OracleVector ov{{RealOracle::parse("rational:1"), RealOracle::parse("rational:1/10"),
                     RealOracle::parse("rational:1"), RealOracle::parse("rational:0"),
                     RealOracle::parse("rational:1"), RealOracle::parse("rational:0")}};
    IntegratorConfig cfg;
    // t = 0 entry: bits = l + fixed slack, zero steps
    auto recs = probe_complexity(ov, {Rational(0), Rational(2), Rational(4)}, 24, cfg);
    REQUIRE(recs.size() == 3);
    CHECK(recs[0].steps == 0);
    CHECK(recs[0].bits[kCoordZ0] == 24 + 32);
    // bits nondecreasing along t
    CHECK(recs[1].bits[kCoordZ0] <= recs[2].bits[kCoordZ0]);
    CHECK(recs[0].bits[kCoordZ0] <= recs[1].bits[kCoordZ0]);

    // doubling l at fixed t adds ~the l increment (both runs certify on the
    // first attempt in this short-horizon regime)
    auto r24 = probe_complexity(ov, {Rational(2)}, 24, cfg);
    auto r48 = probe_complexity(ov, {Rational(2)}, 48, cfg);
    REQUIRE(r24[0].attempts == 1);
    REQUIRE(r48[0].attempts == 1);
    CHECK(r48[0].bits[kCoordZ0] - r24[0].bits[kCoordZ0] == 24);

    CHECK_THROWS_AS(probe_complexity(ov, {Rational(2), Rational(1)}, 24, cfg), DomainError);
}
