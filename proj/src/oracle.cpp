#include "sitlab/oracle.hpp"
#include "sitlab/errors.hpp"

namespace sitlab {

const std::array<const char*, kNumCoords> kCoordNames = {"a", "e", "mu", "z0", "v0", "phi"};

RealOracle RealOracle::exact_rational(Rational q, std::string label) {
    return RealOracle(Kind::ExactRational, std::move(q), std::move(label));
}

RealOracle RealOracle::sqrt_rational(Rational q, std::string label) {
    if (q.sign() < 0)
        throw DomainError("sqrt oracle of negative rational " + q.to_fraction());
    return RealOracle(Kind::SqrtRational, std::move(q), std::move(label));
}

RealOracle RealOracle::dyadic_literal(Dyadic d, std::string label) {
    d.normalize();
    return RealOracle(Kind::DyadicLiteral, d.to_rational(), std::move(label));
}

namespace {

Dyadic parse_binary_literal(const std::string& body) {
    std::string s = body;
    bool neg = false;
    if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
        neg = s[0] == '-';
        s = s.substr(1);
    }
    if (!s.empty() && s.back() == 'b') s.pop_back();
    auto dot = s.find('.');
    std::string ip = (dot == std::string::npos) ? s : s.substr(0, dot);
    std::string fp = (dot == std::string::npos) ? "" : s.substr(dot + 1);
    if (ip.empty() && fp.empty()) throw ParseError("empty dyadic literal: '" + body + "'");
    for (const std::string* part : {&ip, &fp})
        for (char c : *part)
            if (c != '0' && c != '1') throw ParseError("bad binary digit in '" + body + "'");
    mpz_t m;
    mpz_init(m);
    std::string bits = ip + fp;
    if (bits.empty()) bits = "0";
    mpz_set_str(m, bits.c_str(), 2);
    if (neg) mpz_neg(m, m);
    Dyadic d = Dyadic::from_mpz(m, -static_cast<long>(fp.size()));
    mpz_clear(m);
    d.normalize();
    return d;
}

} // namespace

RealOracle RealOracle::parse(const std::string& spec) {
    auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw ParseError("oracle spec needs a kind tag: '" + spec + "'");
    std::string kind = spec.substr(0, colon), body = spec.substr(colon + 1);
    if (kind == "rational") {
        return exact_rational(Rational::from_string(body), spec);
    } else if (kind == "sqrt") {
        Rational q = Rational::from_string(body);
        return sqrt_rational(std::move(q), spec);
    } else if (kind == "dyadic") {
        return dyadic_literal(parse_binary_literal(body), spec);
    }
    throw ParseError("unknown oracle kind '" + kind + "' in '" + spec + "'");
}

bool RealOracle::is_exact_zero() const { return q_.is_zero(); }

namespace {

// Reduced denominator a power of two <=> the rational is dyadic.
bool dyadic_denominator(const Rational& q, long* out_exp) {
    mpz_srcptr den = mpq_denref(q.raw());
    unsigned long low = mpz_scan1(den, 0);
    if (mpz_sizeinbase(den, 2) != low + 1) return false;
    *out_exp = -static_cast<long>(low);
    return true;
}

} // namespace

DyadicApprox RealOracle::query(long bits) const {
    if (bits < 1) throw DomainError("oracle query needs bits >= 1");
    DyadicApprox out;
    switch (kind_) {
    case Kind::DyadicLiteral: {
        long e = 0;
        dyadic_denominator(q_, &e);
        Dyadic v = Dyadic::from_mpz(mpq_numref(q_.raw()), e);
        v.normalize();
        out.value = v;
        out.guaranteed_error = Dyadic(0, 0);
        return out;
    }
    case Kind::ExactRational: {
        long e = 0;
        if (dyadic_denominator(q_, &e)) {
            Dyadic v = Dyadic::from_mpz(mpq_numref(q_.raw()), e);
            v.normalize();
            out.value = v;
            out.guaranteed_error = Dyadic(0, 0);
            return out;
        }
        // mantissa = round-half-up(p * 2^bits / q), via
        // floor(x + 1/2) = floor((floor(2x) + 1) / 2); error <= 2^(-bits-1)
        mpz_t num, m;
        mpz_inits(num, m, nullptr);
        mpz_mul_2exp(num, mpq_numref(q_.raw()), static_cast<unsigned long>(bits + 1));
        mpz_fdiv_q(m, num, mpq_denref(q_.raw()));
        mpz_add_ui(m, m, 1);
        mpz_fdiv_q_2exp(m, m, 1);
        out.value = Dyadic::from_mpz(m, -bits);
        out.value.normalize();
        out.guaranteed_error = Dyadic(1, -bits - 1);
        mpz_clears(num, m, nullptr);
        return out;
    }
    case Kind::SqrtRational: {
        if (q_.is_zero()) {
            out.value = Dyadic(0, 0);
            out.guaranteed_error = Dyadic(0, 0);
            return out;
        }
        // m = floor(sqrt(p/q) * 2^bits) = isqrt(floor(p*4^bits / q))
        mpz_t num, m, chk;
        mpz_inits(num, m, chk, nullptr);
        mpz_mul_2exp(num, mpq_numref(q_.raw()), 2 * static_cast<unsigned long>(bits));
        mpz_fdiv_q(num, num, mpq_denref(q_.raw()));
        mpz_sqrt(m, num);
        // exact hit: m^2 * q == p * 4^bits
        mpz_mul(chk, m, m);
        mpz_mul(chk, chk, mpq_denref(q_.raw()));
        mpz_t lhs;
        mpz_init(lhs);
        mpz_mul_2exp(lhs, mpq_numref(q_.raw()), 2 * static_cast<unsigned long>(bits));
        if (mpz_cmp(chk, lhs) == 0) {
            out.value = Dyadic::from_mpz(m, -bits);
            out.value.normalize();
            out.guaranteed_error = Dyadic(0, 0);
        } else {
            // true value in (m*2^-b, (m+1)*2^-b); report the midpoint
            mpz_mul_2exp(m, m, 1);
            mpz_add_ui(m, m, 1);
            out.value = Dyadic::from_mpz(m, -bits - 1);
            out.guaranteed_error = Dyadic(1, -bits - 1);
        }
        mpz_clears(num, m, chk, lhs, nullptr);
        return out;
    }
    }
    throw DomainError("unreachable oracle kind");
}

std::array<long, kNumCoords> max_bits_requested(const QueryLog& log) {
    return log.max_bits;
}

std::array<Ball, kNumCoords> OracleVector::query_all(long bits, QueryLog& log) const {
    std::array<Ball, kNumCoords> out;
    for (int i = 0; i < kNumCoords; ++i) {
        log.record(static_cast<Coord>(i), bits);
        out[i] = coords[i].query(bits).to_ball();
    }
    return out;
}

} // namespace sitlab
