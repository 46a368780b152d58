#include "sitlab/real.hpp"

#include <algorithm>
#include <vector>

namespace sitlab {

Real Real::from_dyadic(const Dyadic& d, Prec min_prec) {
    if (d.is_zero()) return Real(std::max<Prec>(min_prec, 2));
    Prec need = static_cast<Prec>(mpz_sizeinbase(d.mantissa(), 2));
    Real r(std::max(need, std::max<Prec>(min_prec, 2)));
    int t = mpfr_set_z_2exp(r.v_, d.mantissa(), d.exponent(), MPFR_RNDN);
    (void)t;   // exact by construction: precision covers the mantissa
    return r;
}

Dyadic Real::to_dyadic() const {
    if (is_zero()) return Dyadic(0, 0);
    mpz_t m;
    mpz_init(m);
    mpfr_exp_t e = mpfr_get_z_2exp(m, v_);
    Dyadic d = Dyadic::from_mpz(m, static_cast<long>(e));
    mpz_clear(m);
    d.normalize();
    return d;
}

std::string Real::to_string(int digits) const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%%.%dRg", digits);
    std::vector<char> out(static_cast<size_t>(digits) + 64);
    mpfr_snprintf(out.data(), out.size(), buf, v_);
    return std::string(out.data());
}

} // namespace sitlab
