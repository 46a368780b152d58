#include <doctest.h>

#include "sitlab/errors.hpp"
#include "sitlab/io.hpp"

using namespace sitlab;

TEST_CASE("orbit json parses exactly and rejects junk") {
    OrbitParams p = orbit_from_json(R"({"a":"1.0","e":"0.1","mu":"1.0","phi":"0.0"})");
    CHECK(p.a == Rational(1));
    CHECK(p.e == Rational(1, 10));

    CHECK_THROWS_AS(orbit_from_json(R"({"a":"1","e":"0.1","mu":"1"})"), ParseError);
    CHECK_THROWS_AS(orbit_from_json(R"({"a":"1","e":"0.1","mu":"1","phi":"0","x":"1"})"),
                    ParseError);
    CHECK_THROWS_AS(orbit_from_json(R"({"a":1.0,"e":"0.1","mu":"1","phi":"0"})"), ParseError);
    CHECK_THROWS_AS(orbit_from_json("not json"), ParseError);
    CHECK_THROWS_AS(orbit_from_json(R"({"a":"1","e":"1.5","mu":"1","phi":"0"})"), DomainError);
}

TEST_CASE("ball json round-trips to the identical value") {
    Ball b = Ball::from_rational(Rational(1, 3), 200);
    std::string s = ball_json(b, 64);
    // parse back the decimal strings and re-serialize: byte identical
    auto grab = [&](const std::string& text, const std::string& key) {
        auto pos = text.find('"' + key + '"');
        REQUIRE(pos != std::string::npos);
        auto from = text.find('"', text.find(':', pos)) + 1;
        auto to = text.find('"', from);
        return text.substr(from, to - from);
    };
    Rational c = Rational::from_string(grab(s, "center"));
    Rational r = Rational::from_string(grab(s, "radius"));
    Ball back = Ball::from_dyadic(Real::from_rational(c, 64, MPFR_RNDN).to_dyadic());
    back = widen(back, Real::from_rational(r, kRadPrec, MPFR_RNDU));
    CHECK(ball_json(back, 64) == s);
    // the compressed enclosure still contains the original value
    CHECK(back.contains(Rational(1, 3)));
}

TEST_CASE("real decimal rendering is exact dyadic decimal") {
    Real x(64);
    mpfr_set_d(x.raw(), 0.40625, MPFR_RNDN);
    CHECK(real_decimal(x) == "0.40625");
    mpfr_set_zero(x.raw(), 1);
    CHECK(real_decimal(x) == "0");
    mpfr_set_si(x.raw(), -12, MPFR_RNDN);
    CHECK(real_decimal(x) == "-12");
}

TEST_CASE("probe csv shape and deterministic no-timing mode") {
    ProbeRecord r;
    r.t = Rational(10);
    r.l = 24;
    r.bits = {100, 100, 100, 101, 102, 103};
    r.steps = 7;
    r.wall_seconds = 0.123456789;
    std::string csv = probe_csv({r}, false);
    CHECK(csv ==
          "t,l,bits_z,bits_v,bits_phi,steps,wall_seconds\n"
          "10/1,24,101,102,103,7,0.000000\n");
    std::string timed = probe_csv({r}, true);
    CHECK(timed.find("0.123457") != std::string::npos);
}

TEST_CASE("enumeration json is canonical") {
    Enumeration en;
    en.sequences = {{}, {2}, {2, 2}};
    std::string s = enumeration_json(en);
    CHECK(s.find("\"count\": 3") != std::string::npos);
    CHECK(s.find("[\n      2,\n      2\n    ]") != std::string::npos);
}
