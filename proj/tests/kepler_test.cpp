#include <doctest.h>

#include <random>

#include "sitlab/errors.hpp"
#include "sitlab/kepler.hpp"

using namespace sitlab;

namespace {

OrbitParams orbit(const char* a, const char* e, const char* mu, const char* phi = "0") {
    return OrbitParams{Rational::from_string(a), Rational::from_string(e),
                       Rational::from_string(mu), Rational::from_string(phi)};
}

// Independent Kepler oracle: bisection on g(E) = E - e sin E - M at high
// precision; g is increasing, so a plain sign bisection converges.
Real bisect_kepler(const Rational& e, const Rational& M, int steps, Prec p) {
    Real ec = Real::from_rational(e, p, MPFR_RNDN);
    Real mc = Real::from_rational(M, p, MPFR_RNDN);
    Real lo(p), hi(p), mid(p), g(p), s(p);
    mpfr_sub(lo.raw(), mc.raw(), ec.raw(), MPFR_RNDD);
    mpfr_add(hi.raw(), mc.raw(), ec.raw(), MPFR_RNDU);
    for (int i = 0; i < steps; ++i) {
        mpfr_add(mid.raw(), lo.raw(), hi.raw(), MPFR_RNDN);
        mpfr_div_2ui(mid.raw(), mid.raw(), 1, MPFR_RNDN);
        mpfr_sin(s.raw(), mid.raw(), MPFR_RNDN);
        mpfr_fms(g.raw(), ec.raw(), s.raw(), mid.raw(), MPFR_RNDN);
        mpfr_neg(g.raw(), g.raw(), MPFR_RNDN);
        mpfr_sub(g.raw(), g.raw(), mc.raw(), MPFR_RNDN);
        if (g.sign() <= 0) mpfr_set(lo.raw(), mid.raw(), MPFR_RNDN);
        else mpfr_set(hi.raw(), mid.raw(), MPFR_RNDN);
    }
    return mid;
}

} // namespace

TEST_CASE("period formula on pinned cases") {
    // a=1, mu=1: P = 2 pi
    Ball p1 = period(orbit("1", "0.5", "1"), 128);
    Ball two_pi = scale2(Ball::pi(128), 1);
    CHECK(p1.intersects(two_pi));
    CHECK(p1.radius_approx() < 1e-30);
    // a=4, mu=1: P = 16 pi
    Ball p2 = period(orbit("4", "0.1", "1"), 128);
    CHECK(p2.intersects(scale2(Ball::pi(128), 4)));
    // a=1, mu=4: P = pi
    Ball p3 = period(orbit("1", "0.1", "4"), 128);
    CHECK(p3.intersects(Ball::pi(128)));
}

TEST_CASE("mean anomaly epoch convention") {
    // phi=0, t=0: M=0
    Ball m = mean_anomaly(orbit("1", "0.3", "1"), Rational(0), 96);
    CHECK(m.contains(Rational(0)));
    CHECK(m.radius_approx() < 1e-20);
    // phi=0, a=mu=1, t=2pi: M = 2pi
    Ball t = scale2(Ball::pi(96), 1);
    Ball m2 = mean_anomaly(orbit("1", "0.3", "1"), t, 96);
    CHECK(m2.intersects(t));
    // phi=pi (to 60 bits), e=0.5: M(0) = phi - 0.5 sin(phi) stays within
    // (1+e)|phi - pi| of pi
    Rational phi_approx = Rational(3216, 1024);   // < pi, off by ~1e-3
    Ball m3 = mean_anomaly(orbit("1", "0.5", "1", "3216/1024"), Rational(0), 96);
    Ball pi_ball = Ball::pi(96);
    Real gap(kRadPrec);
    mpfr_sub(gap.raw(), pi_ball.center().raw(),
             Ball::from_rational(phi_approx, 96).center().raw(), MPFR_RNDU);
    mpfr_mul_ui(gap.raw(), gap.raw(), 2, MPFR_RNDU);
    CHECK(widen(m3, gap).intersects(pi_ball));
    // E(0) = phi: solving at M(0) returns phi
    Anomaly a0 = solve_eccentric_anomaly(Rational(1, 2), m3, Rational::pow2(-50));
    CHECK(a0.E.contains(phi_approx));
}

TEST_CASE("kepler solve: circular orbit is the identity") {
    Ball M = Ball::from_rational(Rational(7, 4), 96);
    Anomaly a = solve_eccentric_anomaly(Rational(0), M, Rational::pow2(-40));
    CHECK(a.E.contains(Rational(7, 4)));
    CHECK(a.E.radius_approx() < 1e-10);
}

TEST_CASE("kepler solve: symmetric point E = M = pi") {
    Ball M = Ball::pi(128);
    Anomaly a = solve_eccentric_anomaly(Rational(1, 2), M, Rational::pow2(-60));
    CHECK(a.E.intersects(Ball::pi(128)));
}

TEST_CASE("kepler solve matches the bisection oracle (e=0.1, M=1)") {
    Ball M = Ball::from_long(1, 128);
    Anomaly a = solve_eccentric_anomaly(Rational(1, 10), M, Rational::pow2(-60));
    // frozen from the independent bisection oracle
    Real ref = bisect_kepler(Rational(1, 10), Rational(1), 120, 256);
    CHECK(a.E.lower() <= ref);
    CHECK(ref <= a.E.upper());
    CHECK(a.E.approx() == doctest::Approx(1.0885977523978936).epsilon(1e-12));
}

TEST_CASE("kepler residual property: random (e, M), certified residual") {
    std::mt19937_64 gen(7130391u);
    std::uniform_int_distribution<long> de(0, 99), dm(0, (1l << 16) - 1);
    const Rational tol = Rational::pow2(-64);
    for (int i = 0; i < 200; ++i) {
        Rational e(de(gen), 100);
        Rational Mq = Rational(dm(gen), 1l << 16) * Rational(7);   // in [0, 7)
        Ball M = Ball::from_rational(Mq, 128);
        Anomaly a = solve_eccentric_anomaly(e, M, tol);
        // interval residual check
        Ball res = sub(sub(a.E, mul(Ball::from_rational(e, 160), sin_ball(a.E, 160), 160), 160),
                       M, 160);
        // the *center* residual is within tol; the ball residual adds the
        // reported radius blown up by g' <= 1+e
        Ball Ec(a.E.center(), Real(kRadPrec));
        Ball resc = sub(sub(Ec, mul(Ball::from_rational(e, 160), sin_ball(Ec, 160), 160), 160),
                        M, 160);
        CHECK(abs_upper(resc).to_dyadic().to_rational() <= tol);
        // true root inside the reported enclosure
        Real ref = bisect_kepler(e, Mq, 90, 256);
        CHECK(a.E.lower() <= ref);
        CHECK(ref <= a.E.upper());
        (void)res;
    }
}

TEST_CASE("kepler solve: monotone refinement") {
    Ball M = Ball::from_rational(Rational(5, 2), 128);
    Rational tol = Rational::pow2(-30);
    Real prev = solve_eccentric_anomaly(Rational(3, 10), M, tol).E.radius();
    for (int i = 0; i < 6; ++i) {
        tol = tol / Rational(2);
        Real cur = solve_eccentric_anomaly(Rational(3, 10), M, tol).E.radius();
        CHECK(cur <= prev);
        prev = cur;
    }
}

TEST_CASE("orbit radius enclosures and range") {
    OrbitParams o = orbit("1", "0.5", "1");
    // e=0.5, a=1, E=0 -> r=0.5 ; E=pi -> r=1.5
    Anomaly peri{Ball::from_long(0, 96)};
    CHECK(orbit_radius(o, peri, 96).contains(Rational(1, 2)));
    Anomaly apo{Ball::pi(96)};
    CHECK(orbit_radius(o, apo, 96).contains(Rational(3, 2)));
    // circular: r = a at any anomaly
    OrbitParams c = orbit("2", "0", "1");
    Anomaly anywhere{Ball::from_rational(Rational(7, 3), 96)};
    CHECK(orbit_radius(c, anywhere, 96).contains(Rational(2)));

    // range property with outward slack, random anomalies
    std::mt19937_64 gen(99u);
    std::uniform_int_distribution<long> dE(-(1l << 18), 1l << 18);
    Rational lo = Rational(1, 2) - Rational::pow2(-24);
    Rational hi = Rational(3, 2) + Rational::pow2(-24);
    for (int i = 0; i < 100; ++i) {
        Anomaly an{Ball::from_rational(Rational(dE(gen), 1l << 12), 96)};
        Ball r = orbit_radius(o, an, 96);
        CHECK(r.lower().to_dyadic().to_rational() >= lo);
        CHECK(r.upper().to_dyadic().to_rational() <= hi);
    }
}

TEST_CASE("periodicity of r(t) through the kepler chain") {
    OrbitParams o = orbit("1", "0.37", "1", "0.5");
    const Rational tol = Rational::pow2(-70);
    std::mt19937_64 gen(2024u);
    std::uniform_int_distribution<long> dt(0, 1l << 16);
    for (int i = 0; i < 20; ++i) {
        Rational t(dt(gen), 1l << 10);
        Ball P = period(o, 160);
        Ball m1 = mean_anomaly(o, Ball::from_rational(t, 160), 160);
        Ball m2 = mean_anomaly(o, add(Ball::from_rational(t, 160), P, 160), 160);
        Ball r1 = orbit_radius(o, solve_eccentric_anomaly(o.e, m1, tol), 160);
        Ball r2 = orbit_radius(o, solve_eccentric_anomaly(o.e, m2, tol), 160);
        CHECK(r1.intersects(r2));
    }
}

TEST_CASE("orbit params validation") {
    CHECK_THROWS_AS(orbit("0", "0.5", "1").validate(), DomainError);
    CHECK_THROWS_AS(orbit("1", "1", "1").validate(), DomainError);
    CHECK_THROWS_AS(orbit("1", "-0.1", "1").validate(), DomainError);
    CHECK_THROWS_AS(orbit("1", "0.5", "0").validate(), DomainError);
    CHECK_THROWS_AS(orbit("1", "0.5", "1", "6.3").validate(), DomainError);
    CHECK_NOTHROW(orbit("1", "0.5", "1", "6.28").validate());
    CHECK_NOTHROW(orbit("1", "0", "1").validate());
}
