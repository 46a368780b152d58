#include "sitlab/rational.hpp"
#include "sitlab/errors.hpp"

#include <cctype>

namespace sitlab {

namespace {

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

} // namespace

Rational operator/(const Rational& a, const Rational& b) {
    if (b.is_zero()) throw DomainError("rational division by zero");
    Rational r;
    mpq_div(r.q_, a.q_, b.q_);
    return r;
}

Rational Rational::pow2(long e) {
    Rational r(1);
    if (e >= 0) {
        mpz_mul_2exp(mpq_numref(r.q_), mpq_numref(r.q_), static_cast<unsigned long>(e));
    } else {
        mpz_mul_2exp(mpq_denref(r.q_), mpq_denref(r.q_), static_cast<unsigned long>(-e));
    }
    mpq_canonicalize(r.q_);
    return r;
}

Rational Rational::from_string(const std::string& input) {
    std::string s = input;
    if (s.empty()) throw ParseError("empty number");
    bool neg = false;
    std::size_t pos = 0;
    if (s[0] == '+' || s[0] == '-') {
        neg = (s[0] == '-');
        pos = 1;
    }
    s = s.substr(pos);
    if (s.empty()) throw ParseError("sign without digits: '" + input + "'");

    Rational r;
    auto slash = s.find('/');
    auto dot = s.find('.');
    if (slash != std::string::npos) {
        if (dot != std::string::npos)
            throw ParseError("number mixes '.' and '/': '" + input + "'");
        std::string num = s.substr(0, slash), den = s.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den))
            throw ParseError("bad fraction: '" + input + "'");
        if (mpz_set_str(mpq_numref(r.q_), num.c_str(), 10) != 0)
            throw ParseError("bad numerator: '" + input + "'");
        if (mpz_set_str(mpq_denref(r.q_), den.c_str(), 10) != 0)
            throw ParseError("bad denominator: '" + input + "'");
        if (mpz_sgn(mpq_denref(r.q_)) == 0)
            throw ParseError("zero denominator: '" + input + "'");
    } else if (dot != std::string::npos) {
        std::string ip = s.substr(0, dot), fp = s.substr(dot + 1);
        if (ip.empty()) ip = "0";
        if (!all_digits(ip) || (!fp.empty() && !all_digits(fp)))
            throw ParseError("bad decimal: '" + input + "'");
        std::string digits = ip + fp;
        if (mpz_set_str(mpq_numref(r.q_), digits.c_str(), 10) != 0)
            throw ParseError("bad decimal: '" + input + "'");
        mpz_ui_pow_ui(mpq_denref(r.q_), 10, fp.size());
    } else {
        if (!all_digits(s)) throw ParseError("bad integer: '" + input + "'");
        if (mpz_set_str(mpq_numref(r.q_), s.c_str(), 10) != 0)
            throw ParseError("bad integer: '" + input + "'");
    }
    mpq_canonicalize(r.q_);
    if (neg) mpq_neg(r.q_, r.q_);
    return r;
}

bool Rational::has_finite_decimal() const {
    mpz_t d;
    mpz_init_set(d, mpq_denref(q_));
    for (unsigned long p : {2ul, 5ul}) {
        while (mpz_divisible_ui_p(d, p)) mpz_divexact_ui(d, d, p);
    }
    bool ok = (mpz_cmp_ui(d, 1) == 0);
    mpz_clear(d);
    return ok;
}

std::string Rational::to_decimal() const {
    if (!has_finite_decimal())
        throw DomainError("rational has no finite decimal expansion");
    // scale numerator by 10^k/den for the smallest k making it integral
    mpz_t den, num, ten;
    mpz_init_set(den, mpq_denref(q_));
    mpz_init(num);
    mpz_abs(num, mpq_numref(q_));
    mpz_init_set_ui(ten, 10);
    unsigned long k = 0;
    mpz_t rem, d;
    mpz_init(rem);
    mpz_init_set(d, den);
    while (mpz_cmp_ui(d, 1) != 0) {
        if (mpz_divisible_ui_p(d, 10)) { mpz_divexact_ui(d, d, 10); }
        else if (mpz_divisible_ui_p(d, 2)) { mpz_divexact_ui(d, d, 2); mpz_mul_ui(num, num, 5); }
        else { mpz_divexact_ui(d, d, 5); mpz_mul_ui(num, num, 2); }
        ++k;
    }
    char* cs = mpz_get_str(nullptr, 10, num);
    std::string digits(cs);
    void (*freefn)(void*, size_t);
    mp_get_memory_functions(nullptr, nullptr, &freefn);
    freefn(cs, digits.size() + 1);
    mpz_clears(den, num, ten, rem, d, nullptr);

    std::string out;
    if (k == 0) {
        out = digits;
    } else {
        if (digits.size() <= k) digits.insert(0, k + 1 - digits.size(), '0');
        out = digits.substr(0, digits.size() - k) + "." + digits.substr(digits.size() - k);
    }
    if (sign() < 0) out.insert(0, 1, '-');
    return out;
}

std::string Rational::to_fraction() const {
    char* cs = mpq_get_str(nullptr, 10, q_);
    std::string s(cs);
    void (*freefn)(void*, size_t);
    mp_get_memory_functions(nullptr, nullptr, &freefn);
    freefn(cs, s.size() + 1);
    if (s.find('/') == std::string::npos) s += "/1";
    return s;
}

void Dyadic::normalize() {
    if (mpz_sgn(m_) == 0) { exp_ = 0; return; }
    unsigned long tz = mpz_scan1(m_, 0);
    if (tz > 0) {
        mpz_tdiv_q_2exp(m_, m_, tz);
        exp_ += static_cast<long>(tz);
    }
}

Rational Dyadic::to_rational() const {
    Rational r;
    mpz_set(mpq_numref(r.raw()), m_);
    if (exp_ >= 0) {
        mpz_mul_2exp(mpq_numref(r.raw()), mpq_numref(r.raw()), static_cast<unsigned long>(exp_));
    } else {
        mpz_set_ui(mpq_denref(r.raw()), 1);
        mpz_mul_2exp(mpq_denref(r.raw()), mpq_denref(r.raw()), static_cast<unsigned long>(-exp_));
    }
    mpq_canonicalize(r.raw());
    return r;
}

std::string Dyadic::to_decimal() const { return to_rational().to_decimal(); }

bool operator==(const Dyadic& a, const Dyadic& b) {
    Dyadic x = a, y = b;
    x.normalize();
    y.normalize();
    return x.exp_ == y.exp_ && mpz_cmp(x.m_, y.m_) == 0;
}

} // namespace sitlab
