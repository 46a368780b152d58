#include "sitlab/symbolic.hpp"
#include "sitlab/errors.hpp"

#include <algorithm>
#include <optional>

namespace sitlab {

const char* to_string(SignClass c) {
    switch (c) {
    case SignClass::Positive: return "positive";
    case SignClass::Negative: return "negative";
    case SignClass::Undefined: return "undefined";
    }
    return "?";
}

void RecoveryConfig::validate() const {
    if (m < 2 || m % 2 != 0) throw DomainError("recovery: m must be an even integer >= 2");
    if (delta.sign() <= 0) throw DomainError("recovery: delta must be > 0");
    if (eps.sign() <= 0) throw DomainError("recovery: eps must be > 0");
    // delta < m P / 2 and eps < h / 4, certified against the lower ball edges
    Rational p_lo = P.lower().to_dyadic().to_rational();
    if (!(delta < Rational(m) * p_lo / Rational(2)))
        throw DomainError("recovery: delta must be < m P / 2");
    Rational h_lo = h.lower().to_dyadic().to_rational();
    if (!(eps < h_lo / Rational(4)))
        throw DomainError("recovery: eps must be < h / 4");
}

SignClass classify(const Ball& zball, const Rational& eps) {
    Real lim = Real::from_rational(eps, kRadPrec, MPFR_RNDD);
    if (zball.radius() > lim)
        throw DomainError("classify: enclosure radius exceeds eps");
    if (zball.is_positive()) return SignClass::Positive;
    if (zball.is_negative()) return SignClass::Negative;
    return SignClass::Undefined;
}

namespace {

struct Window {          // certified open interval containing one crossing
    Rational lo, hi;
};

} // namespace

SymbolSequence recover_sequence(const std::vector<SignClass>& classes,
                                const RecoveryConfig& cfg) {
    cfg.validate();
    SymbolSequence out;
    out.m = cfg.m;
    out.P = cfg.P;

    const long n = static_cast<long>(classes.size());
    bool any_definite = false;
    for (long i = 0; i < n; ++i)
        if (classes[i] != SignClass::Undefined) any_definite = true;
    if (!any_definite) return out;   // no crossings detectable (equilibrium)

    for (long i = 0; i + 1 < n; ++i)
        if (classes[i] == SignClass::Undefined && classes[i + 1] == SignClass::Undefined)
            throw InconsistencyError("two undefined nodes in a row at grid indices " +
                                     std::to_string(i) + "," + std::to_string(i + 1));

    // crossing windows: tau_0 = 0 is known exactly; later crossings sit
    // between the last node of one run and the first node of the next
    std::vector<Window> windows;
    windows.push_back(Window{Rational(0), Rational(0)});

    auto node_time = [&](long idx) { return Rational(idx + 1) * cfg.delta; };

    std::optional<SignClass> run_sign;
    long run_last = -1;
    for (long i = 0; i < n; ++i) {
        SignClass c = classes[i];
        if (c == SignClass::Undefined) continue;
        if (run_sign && c == *run_sign) {
            run_last = i;       // same run (any single U in between is absorbed)
            continue;
        }
        if (run_sign && c != *run_sign) {
            if (i - run_last > 2)
                throw InconsistencyError("more than one undefined node between runs at index " +
                                         std::to_string(i));
            windows.push_back(Window{node_time(run_last), node_time(i)});
        }
        run_sign = c;
        run_last = i;
    }

    // decode the gap between consecutive windows to the unique even symbol
    Rational p_lo = cfg.P.lower().to_dyadic().to_rational();
    Rational p_hi = cfg.P.upper().to_dyadic().to_rational();
    for (size_t k = 0; k + 1 < windows.size(); ++k) {
        Rational g_lo = windows[k + 1].lo - windows[k].hi;
        Rational g_hi = windows[k + 1].hi - windows[k].lo;
        if (g_hi <= Rational(cfg.m) * p_lo)
            throw InconsistencyError("gap " + std::to_string(k + 1) +
                                     " certified below m periods");
        std::vector<long> candidates;
        long s_min = cfg.m;
        // cells [sP, (s+1)P) that can intersect the open interval (g_lo, g_hi)
        for (long s = s_min; Rational(s) * p_lo < g_hi; s += 2) {
            if (Rational(s + 1) * p_hi > g_lo) candidates.push_back(s);
        }
        if (candidates.empty())
            throw InconsistencyError("no admissible even symbol for gap " +
                                     std::to_string(k + 1));
        if (candidates.size() > 1)
            throw InconsistencyError("ambiguous symbol for gap " + std::to_string(k + 1) +
                                     " (grid too coarse for this trajectory)");
        out.s.push_back(candidates.front());
    }
    return out;
}

Ball count_lower_bound(const Rational& T, long m, const Ball& P, Prec p) {
    if (m < 2 || m % 2 != 0) throw DomainError("count_lower_bound: m must be even >= 2");
    if (T.sign() <= 0) throw DomainError("count_lower_bound: T must be > 0");
    Ball base = Ball::from_long(m / 2 + 1, p);
    Ball expo = div(Ball::from_rational(T, p), mul_si(P, m + 1, p), p);
    return pow_ball(base, expo, p);
}

namespace {

// DFS in lexicographic order over even symbols >= m; weight(s) = s + 1,
// keep while total weight stays strictly below the cap.
void enumerate_rec(std::vector<long>& prefix, const Rational& weight,
                   const Rational& cap, long m, long budget,
                   std::vector<std::vector<long>>& out) {
    if (static_cast<long>(out.size()) >= budget)
        throw ResourceError("enumeration budget exceeded");
    out.push_back(prefix);
    for (long s = m;; s += 2) {
        Rational w = weight + Rational(s + 1);
        if (!(w < cap)) break;
        prefix.push_back(s);
        enumerate_rec(prefix, w, cap, m, budget, out);
        prefix.pop_back();
    }
}

} // namespace

Enumeration enumerate_sequences_periods(const Rational& kappa, long m, long budget) {
    if (m < 2 || m % 2 != 0) throw DomainError("enumerate: m must be even >= 2");
    if (kappa.sign() <= 0) throw DomainError("enumerate: T must be > 0");
    Enumeration en;
    std::vector<long> prefix;
    enumerate_rec(prefix, Rational(0), kappa, m, budget, en.sequences);
    std::sort(en.sequences.begin(), en.sequences.end());
    return en;
}

Enumeration enumerate_sequences(const Rational& T, long m, const Ball& P, long budget) {
    if (m < 2 || m % 2 != 0) throw DomainError("enumerate: m must be even >= 2");
    if (T.sign() <= 0) throw DomainError("enumerate: T must be > 0");
    // membership must be decidable for every candidate weight W: either
    // W * P < T certainly or W * P >= T certainly
    Rational p_lo = P.lower().to_dyadic().to_rational();
    Rational p_hi = P.upper().to_dyadic().to_rational();
    if (p_lo.sign() <= 0) throw DomainError("enumerate: period enclosure must be positive");

    Enumeration en;
    std::vector<std::vector<long>> stack_out;
    std::vector<long> prefix;
    // recursive lexicographic walk with certified comparisons
    struct Walker {
        long m, budget;
        const Rational &T, &p_lo, &p_hi;
        std::vector<std::vector<long>>& out;
        void rec(std::vector<long>& pre, const Rational& weight) {
            if (static_cast<long>(out.size()) >= budget)
                throw ResourceError("enumeration budget exceeded");
            out.push_back(pre);
            for (long s = m;; s += 2) {
                Rational w = weight + Rational(s + 1);
                bool surely_in = w * p_hi < T;
                bool surely_out = !(w * p_lo < T);
                if (surely_out) break;
                if (!surely_in)
                    throw ResourceError(
                        "enumerate: T indistinguishable from a period multiple at the "
                        "current period precision; use the exact period-multiple form");
                pre.push_back(s);
                rec(pre, w);
                pre.pop_back();
            }
        }
    } walker{m, budget, T, p_lo, p_hi, en.sequences};
    walker.rec(prefix, Rational(0));
    std::sort(en.sequences.begin(), en.sequences.end());
    return en;
}

} // namespace sitlab
