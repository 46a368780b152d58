#include "sitlab/integrator.hpp"
#include "sitlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace sitlab {

namespace {

// Internal signal: this attempt could not certify; retry with more precision.
struct CertFail : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr double kLog2E = 1.4426950408889634;

Real rad_real(double v) {
    Real r(kRadPrec);
    mpfr_set_d(r.raw(), v, MPFR_RNDU);
    return r;
}

double log2_abs_upper(const Ball& b) {
    Real m = abs_upper(b);
    if (m.is_zero()) return -1e18;
    return static_cast<double>(mpfr_get_exp(m.raw()));
}

// largest step of the form {1, 1.5} * 2^k not exceeding h
Rational dyadic_step_down(double h) {
    if (!(h > 0)) throw CertFail("step collapsed to zero");
    if (h > 1e6) h = 1e6;
    int e = 0;
    double m = std::frexp(h, &e);
    if (m >= 0.75) return Rational(3) * Rational::pow2(e - 2);
    return Rational::pow2(e - 1);
}

Real real_up_from_rational(const Rational& q, Prec p = kRadPrec) {
    return Real::from_rational(q, p, MPFR_RNDU);
}
Real real_down_from_rational(const Rational& q, Prec p = kRadPrec) {
    return Real::from_rational(q, p, MPFR_RNDD);
}

// --- small matrix helpers ---------------------------------------------

using Mat3R = std::array<std::array<Real, 3>, 3>;
using Mat3B = std::array<std::array<Ball, 3>, 3>;

Mat3R identity3(Prec p) {
    Mat3R m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i][j] = Real::from_long(i == j ? 1 : 0, p);
    return m;
}

Mat3B ball_view(const Mat3R& m) {
    Mat3B b;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) b[i][j] = Ball(m[i][j], Real(kRadPrec));
    return b;
}

Mat3B matmul(const Mat3B& a, const Mat3B& b, Prec p) {
    Mat3B c;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            Ball acc = mul(a[i][0], b[0][j], p);
            acc = add(acc, mul(a[i][1], b[1][j], p), p);
            c[i][j] = add(acc, mul(a[i][2], b[2][j], p), p);
        }
    return c;
}

Mat3R midpoint_matmul(const Mat3B& a, const Mat3R& b, Prec p) {
    Mat3R c;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            Real acc(p);
            mpfr_mul(acc.raw(), a[i][0].center().raw(), b[0][j].raw(), MPFR_RNDN);
            Real t(p);
            mpfr_mul(t.raw(), a[i][1].center().raw(), b[1][j].raw(), MPFR_RNDN);
            mpfr_add(acc.raw(), acc.raw(), t.raw(), MPFR_RNDN);
            mpfr_mul(t.raw(), a[i][2].center().raw(), b[2][j].raw(), MPFR_RNDN);
            mpfr_add(acc.raw(), acc.raw(), t.raw(), MPFR_RNDN);
            c[i][j] = acc;
        }
    return c;
}

// approximately orthonormal Q from modified Gram-Schmidt on the columns;
// degenerate columns fall back to coordinate axes so Q stays invertible
Mat3R qr_orthonormal(const Mat3R& C, Prec p) {
    Mat3R Q = identity3(p);
    for (int j = 0; j < 3; ++j) {
        std::array<Real, 3> v = {Real(p), Real(p), Real(p)};
        for (int i = 0; i < 3; ++i) mpfr_set(v[i].raw(), C[i][j].raw(), MPFR_RNDN);
        for (int attempt = 0; attempt < 2; ++attempt) {
            for (int k = 0; k < j; ++k) {
                Real dot(p);
                mpfr_set_zero(dot.raw(), 1);
                Real t(p);
                for (int i = 0; i < 3; ++i) {
                    mpfr_mul(t.raw(), Q[i][k].raw(), v[i].raw(), MPFR_RNDN);
                    mpfr_add(dot.raw(), dot.raw(), t.raw(), MPFR_RNDN);
                }
                for (int i = 0; i < 3; ++i) {
                    mpfr_mul(t.raw(), dot.raw(), Q[i][k].raw(), MPFR_RNDN);
                    mpfr_sub(v[i].raw(), v[i].raw(), t.raw(), MPFR_RNDN);
                }
            }
            Real nrm(p), t(p);
            mpfr_set_zero(nrm.raw(), 1);
            for (int i = 0; i < 3; ++i) {
                mpfr_sqr(t.raw(), v[i].raw(), MPFR_RNDN);
                mpfr_add(nrm.raw(), nrm.raw(), t.raw(), MPFR_RNDN);
            }
            mpfr_sqrt(nrm.raw(), nrm.raw(), MPFR_RNDN);
            Real floor_val(p);
            mpfr_set_ui_2exp(floor_val.raw(), 1, -(p / 2), MPFR_RNDN);
            if (nrm > floor_val) {
                for (int i = 0; i < 3; ++i)
                    mpfr_div(Q[i][j].raw(), v[i].raw(), nrm.raw(), MPFR_RNDN);
                break;
            }
            // degenerate: restart from the j-th axis
            for (int i = 0; i < 3; ++i)
                mpfr_set_si(v[i].raw(), i == j ? 1 : 0, MPFR_RNDN);
        }
    }
    return Q;
}

// certified inverse of a well-conditioned 3x3 real matrix (Gauss-Jordan
// in ball arithmetic)
Mat3B ball_inverse(const Mat3R& Q, Prec p) {
    Mat3B L = ball_view(Q);
    Mat3B R;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) R[i][j] = Ball::from_long(i == j ? 1 : 0, p);
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int i = col + 1; i < 3; ++i)
            if (abs_lower(L[i][col]) > abs_lower(L[piv][col])) piv = i;
        if (piv != col) {
            std::swap(L[piv], L[col]);
            std::swap(R[piv], R[col]);
        }
        if (L[col][col].contains_zero()) throw CertFail("QR frame not invertible");
        Ball d = L[col][col];
        for (int j = 0; j < 3; ++j) {
            L[col][j] = div(L[col][j], d, p);
            R[col][j] = div(R[col][j], d, p);
        }
        for (int i = 0; i < 3; ++i) {
            if (i == col) continue;
            Ball f = L[i][col];
            for (int j = 0; j < 3; ++j) {
                L[i][j] = sub(L[i][j], mul(f, L[col][j], p), p);
                R[i][j] = sub(R[i][j], mul(f, R[col][j], p), p);
            }
        }
    }
    return R;
}

// --- shared stepping helpers ------------------------------------------

// coarse enclosure of all trajectories from Y over [0, h]; may shrink h
template <class Flow>
std::array<Ball, Flow::kDim> picard_box(const std::array<Ball, Flow::kDim>& Y,
                                        Rational& h, Prec p) {
    constexpr int D = Flow::kDim;
    constexpr int E0 = Flow::kFirstEvolving;
    for (int halving = 0; halving < 40; ++halving) {
        try {
            Real hu = real_up_from_rational(h, p);
            Ball span = Ball::from_endpoints(Real(p), hu, p);   // [0, h]
            std::array<Ball, D> B = Y;
            auto F = Flow::rhs(B, p);
            for (int i = E0; i < D; ++i) {
                Ball move = mul(span, F[i], p);
                B[i] = hull(Y[i], add(Y[i], move, p), p);
                Real pad(kRadPrec);
                mpfr_div_2ui(pad.raw(), B[i].radius().raw(), 3, MPFR_RNDU);
                B[i] = widen(B[i], pad);
            }
            for (int it = 0; it < 25; ++it) {
                F = Flow::rhs(B, p);
                std::array<Ball, D> cand = Y;
                bool ok = true;
                for (int i = E0; i < D; ++i)
                    cand[i] = add(Y[i], mul(span, F[i], p), p);
                for (int i = E0; i < D; ++i)
                    if (!B[i].contains_ball(cand[i])) ok = false;
                if (ok) return cand;
                // inflate only the violated components so coupled pairs
                // cannot chase each other's inflation
                for (int i = E0; i < D; ++i) {
                    if (B[i].contains_ball(cand[i])) continue;
                    Ball merged = hull(B[i], cand[i], p);
                    Real pad(kRadPrec);
                    mpfr_div_2ui(pad.raw(), merged.radius().raw(), 3, MPFR_RNDU);
                    B[i] = widen(merged, pad);
                }
            }
        } catch (const DomainError&) {
            // box escaped the field's domain: shrink and retry
        }
        h = h / Rational(2);
        if (h < Rational::pow2(-48)) break;
    }
    throw CertFail("coarse enclosure failed");
}

// step-size guess from the series tail so that |c_N| h^N <= tau * h
double step_estimate(double log2_cN, double log2_cNm1, double log2_tau, int N) {
    double conv = log2_cNm1 - log2_cN;            // log2 of the convergence radius
    if (conv > 60) conv = 60;
    double budget = (log2_tau - log2_cN) / (N - 1);
    double guess = std::min(budget, conv - 1.5);
    if (guess > 30) guess = 30;
    if (guess < -46) guess = -46;
    return std::pow(2.0, guess);
}

struct SitAttemptOut {
    std::array<Ball, 6> final_state;
    std::vector<StepModel> models;
    long steps = 0;
};

// one certification attempt of the Sitnikov IVP with coordinate-frame
// (QR) propagation of the uncertainty box
SitAttemptOut run_sitnikov_attempt(const std::array<Ball, 6>& init, const Rational& T,
                                   const IntegratorConfig& cfg, Prec p, const Real& tau_rate,
                                   bool keep_models, const Real* gronwall_L) {
    const int N = cfg.order;
    const Ball a = init[0], e = init[1], mu = init[2];

    std::array<Real, 3> yc;
    std::array<Real, 3> r;
    for (int i = 0; i < 3; ++i) {
        Ball b = init[3 + i].rounded(p);
        yc[i] = b.center();
        r[i] = b.radius();
    }
    Mat3R A = identity3(p);

    SitAttemptOut out;
    Rational t(0);
    const double log2_tau = tau_rate.is_zero() ? -100000.0
                                               : static_cast<double>(mpfr_get_exp(tau_rate.raw()));

    while (t < T) {
        if (++out.steps > cfg.max_steps) throw ResourceError("integrate: step budget exhausted");

        // current hull
        std::array<Ball, 6> Y = {a, e, mu, Ball(), Ball(), Ball()};
        Real max_rad(kRadPrec);
        for (int i = 0; i < 3; ++i) {
            Real rowsum(kRadPrec), term(kRadPrec);
            mpfr_set_zero(rowsum.raw(), 1);
            for (int j = 0; j < 3; ++j) {
                mpfr_mul(term.raw(), A[i][j].raw(), r[j].raw(), MPFR_RNDU);
                mpfr_abs(term.raw(), term.raw(), MPFR_RNDU);
                mpfr_add(rowsum.raw(), rowsum.raw(), term.raw(), MPFR_RNDU);
            }
            Y[3 + i] = Ball(yc[i], rowsum);
            if (rowsum > max_rad) max_rad = rowsum;
        }
        if (max_rad > rad_real(1.0)) throw CertFail("enclosure too wide to continue");

        // point expansion
        std::array<Ball, 6> Ypt = {a, e, mu, Ball(yc[0], Real(kRadPrec)),
                                   Ball(yc[1], Real(kRadPrec)), Ball(yc[2], Real(kRadPrec))};
        auto PS = sitnikov_series(Ypt, N, p);

        double lcN = -1e18, lcNm1 = -1e18;
        for (int i = 3; i < 6; ++i) {
            lcN = std::max(lcN, log2_abs_upper(PS[N][i]));
            lcNm1 = std::max(lcNm1, log2_abs_upper(PS[N - 1][i]));
        }
        double h_guess;
        if (lcN < -1e17) {
            h_guess = 1e9;   // all derivatives vanish (equilibrium)
        } else {
            h_guess = step_estimate(lcN, lcNm1, log2_tau, N);
        }
        double h_cap = std::min(cfg.max_step.to_double(), h_guess);
        Rational h = dyadic_step_down(h_cap);
        Rational remaining = T - t;
        if (h > remaining) h = remaining;

        // coarse enclosure + remainder budget
        std::array<Ball, 6> B;
        SitnikovVariationalSeries VS;
        for (;;) {
            Rational h_in = h;
            B = picard_box<SitnikovFlow>(Y, h_in, p);
            h = h_in;
            bool ok = true;
            try {
                VS = sitnikov_series_variational(B, N, p);
            } catch (const DomainError&) {
                ok = false;
            }
            if (ok && !tau_rate.is_zero()) {
                Real hu = real_up_from_rational(h);
                Real hN(kRadPrec);
                mpfr_pow_ui(hN.raw(), hu.raw(), static_cast<unsigned long>(N), MPFR_RNDU);
                Real allowance(kRadPrec);
                Real hd = real_down_from_rational(h);
                mpfr_mul(allowance.raw(), tau_rate.raw(), hd.raw(), MPFR_RNDD);
                for (int i = 0; i < 3 && ok; ++i) {
                    Real rem_sz(kRadPrec);
                    mpfr_mul(rem_sz.raw(), abs_upper(VS.state[N][i]).raw(), hN.raw(), MPFR_RNDU);
                    if (rem_sz > allowance) ok = false;
                }
            }
            if (ok) break;
            h = h / Rational(2);
            if (h < Rational::pow2(-48)) throw CertFail("step size collapsed");
        }

        Ball sigma = Ball::from_rational(h, p);

        // transition matrix Phi over the step
        auto J6 = sitnikov_jacobian(SitnikovState::from_array(B), p);
        Real Jnorm(kRadPrec);
        mpfr_set_zero(Jnorm.raw(), 1);
        for (int i = 3; i < 6; ++i) {
            Real rowsum(kRadPrec);
            mpfr_set_zero(rowsum.raw(), 1);
            for (int j = 3; j < 6; ++j) {
                Real term = abs_upper(J6[i][j]);
                mpfr_add(rowsum.raw(), rowsum.raw(), term.raw(), MPFR_RNDU);
            }
            if (rowsum > Jnorm) Jnorm = rowsum;
        }
        Real eta(kRadPrec);
        mpfr_mul(eta.raw(), Jnorm.raw(), real_up_from_rational(h).raw(), MPFR_RNDU);
        mpfr_exp(eta.raw(), eta.raw(), MPFR_RNDU);
        Real one_r(kRadPrec);
        mpfr_set_ui(one_r.raw(), 1, MPFR_RNDN);
        mpfr_sub(eta.raw(), eta.raw(), one_r.raw(), MPFR_RNDU);   // e^{|J| h} - 1

        Mat3B Mbox;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                Mbox[i][j] = Ball(Real::from_long(i == j ? 1 : 0, p), eta);
        Mat3B Phi = matmul(VS.vari[N], Mbox, p);
        for (int d = N - 1; d >= 0; --d)
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    Phi[i][j] = add(mul(Phi[i][j], sigma, p), VS.vari[d][i][j], p);

        // advance the point, collecting the leftover widths
        std::array<Real, 3> yn, delta;
        for (int i = 0; i < 3; ++i) {
            Ball acc = VS.state[N][i];
            for (int d = N - 1; d >= 0; --d) acc = add(mul(acc, sigma, p), PS[d][3 + i], p);
            yn[i] = acc.center();
            delta[i] = acc.radius();
        }

        // rotate the box frame
        Mat3R C = midpoint_matmul(Phi, A, p);
        Mat3R Q = qr_orthonormal(C, p);
        Mat3B Qinv = ball_inverse(Q, p);
        Mat3B T2 = matmul(matmul(Qinv, Phi, p), ball_view(A), p);
        std::array<Real, 3> rn;
        for (int i = 0; i < 3; ++i) {
            Real acc(kRadPrec), term(kRadPrec);
            mpfr_set_zero(acc.raw(), 1);
            for (int j = 0; j < 3; ++j) {
                mpfr_mul(term.raw(), abs_upper(T2[i][j]).raw(), r[j].raw(), MPFR_RNDU);
                mpfr_add(acc.raw(), acc.raw(), term.raw(), MPFR_RNDU);
                mpfr_mul(term.raw(), abs_upper(Qinv[i][j]).raw(), delta[j].raw(), MPFR_RNDU);
                mpfr_add(acc.raw(), acc.raw(), term.raw(), MPFR_RNDU);
            }
            rn[i] = acc;
        }

        if (cfg.debug_gronwall && gronwall_L != nullptr) {
            // new hull <= e^{L h} * old hull + remainder + working slack
            Real lhs(kRadPrec);
            mpfr_set_zero(lhs.raw(), 1);
            for (int i = 0; i < 3; ++i) {
                Real rowsum(kRadPrec), term(kRadPrec);
                mpfr_set_zero(rowsum.raw(), 1);
                for (int j = 0; j < 3; ++j) {
                    mpfr_mul(term.raw(), Q[i][j].raw(), rn[j].raw(), MPFR_RNDU);
                    mpfr_abs(term.raw(), term.raw(), MPFR_RNDU);
                    mpfr_add(rowsum.raw(), rowsum.raw(), term.raw(), MPFR_RNDU);
                }
                if (rowsum > lhs) lhs = rowsum;
            }
            Real rhs(kRadPrec);
            mpfr_mul(rhs.raw(), gronwall_L->raw(), real_up_from_rational(h).raw(), MPFR_RNDU);
            mpfr_exp(rhs.raw(), rhs.raw(), MPFR_RNDU);
            mpfr_mul(rhs.raw(), rhs.raw(), max_rad.raw(), MPFR_RNDU);
            // remainder, point rounding and frame slack
            Real slack(kRadPrec);
            mpfr_set_zero(slack.raw(), 1);
            for (int i = 0; i < 3; ++i) mpfr_add(slack.raw(), slack.raw(), delta[i].raw(), MPFR_RNDU);
            mpfr_mul_ui(slack.raw(), slack.raw(), 4, MPFR_RNDU);
            mpfr_add(rhs.raw(), rhs.raw(), slack.raw(), MPFR_RNDU);
            mpfr_mul_ui(rhs.raw(), rhs.raw(), 2, MPFR_RNDU);
            if (lhs > rhs)
                throw DomainError("gronwall debug check failed: per-step growth exceeded e^{Lh}");
        }

        if (keep_models) {
            auto HS = sitnikov_series(Y, N, p);
            StepModel m;
            m.t0 = t;
            m.h = h;
            m.poly.resize(static_cast<size_t>(N));
            for (int d = 0; d < N; ++d)
                m.poly[d] = {HS[d][3], HS[d][4], HS[d][5]};
            m.rem = {VS.state[N][0], VS.state[N][1], VS.state[N][2]};
            out.models.push_back(std::move(m));
        }

        A = Q;
        r = rn;
        yc = yn;
        t = t + h;
    }

    // final hull
    std::array<Ball, 6> F = {a, e, mu, Ball(), Ball(), Ball()};
    for (int i = 0; i < 3; ++i) {
        Real rowsum(kRadPrec), term(kRadPrec);
        mpfr_set_zero(rowsum.raw(), 1);
        for (int j = 0; j < 3; ++j) {
            mpfr_mul(term.raw(), A[i][j].raw(), r[j].raw(), MPFR_RNDU);
            mpfr_abs(term.raw(), term.raw(), MPFR_RNDU);
            mpfr_add(rowsum.raw(), rowsum.raw(), term.raw(), MPFR_RNDU);
        }
        F[3 + i] = Ball(yc[i], rowsum);
    }
    out.final_state = F;
    return out;
}

// --- oracle-driven attempt ladder ---------------------------------------

struct LadderResult {
    Trajectory traj;
};

void validate_initial(const std::array<Ball, 6>& balls, const OracleVector& x0) {
    const Ball& a = balls[kCoordA];
    const Ball& e = balls[kCoordE];
    const Ball& mu = balls[kCoordMu];
    if (!a.is_positive()) throw DomainError("integrate: a must be certified positive");
    if (!mu.is_positive()) throw DomainError("integrate: mu must be certified positive");
    Real one(kRadPrec);
    mpfr_set_ui(one.raw(), 1, MPFR_RNDN);
    if (!(e.upper() < one))
        throw DomainError("integrate: e enclosure touches 1");
    bool exact_zero = x0.coords[kCoordE].is_exact_zero();
    if (!exact_zero && !e.is_positive())
        throw DomainError("integrate: e enclosure touches 0 without being exactly zero");
    if (e.lower().sign() < 0 && !exact_zero)
        throw DomainError("integrate: e enclosure extends below 0");
}

Real lipschitz_from_balls(const std::array<Ball, 6>& balls) {
    // mirror of lipschitz_bound, evaluated on the queried enclosures
    const Prec p = 96;
    Ball a = balls[kCoordA], e = balls[kCoordE], mu = balls[kCoordMu];
    Ball one = Ball::from_long(1, p);
    Ball one_m_e = sub(one, e, p);
    Ball c = mul(a, one_m_e, p);
    Ball c2 = sqr(c, p);
    Ball c3 = mul(c2, c, p);
    Ball K1 = div(mul_si(sqrt_ball(Ball::from_long(15, p), p), 6, p), Ball::from_long(125, p), p);
    Ball K2 = div(scale2(sqrt_ball(Ball::from_long(3, p), p), 1), Ball::from_long(9, p), p);
    Ball row_v = div(scale2(mul(mu, add(one, mul_si(K1, 3, p), p), p), 1), c3, p);
    row_v = add(row_v, div(mul(mul_si(mul(mu, e, p), 6, p), K2, p), mul(one_m_e, c2, p), p), p);
    Ball n = sqrt_ball(div(mu, mul(a, sqr(a, p), p), p), p);
    Ball row_E = div(mul(n, e, p), sqr(one_m_e, p), p);
    Real L = Real::from_long(1, kRadPrec);
    if (row_v.upper() > L) L = row_v.upper();
    if (row_E.upper() > L) L = row_E.upper();
    Real out(kRadPrec);
    mpfr_set(out.raw(), L.raw(), MPFR_RNDU);
    return out;
}

long initial_oracle_bits(long eps_exp, const Real& L, const Rational& T) {
    // l + ceil(L T / ln 2) + 32
    Real lt(kRadPrec);
    mpfr_mul(lt.raw(), L.raw(), real_up_from_rational(T).raw(), MPFR_RNDU);
    mpfr_mul_d(lt.raw(), lt.raw(), kLog2E, MPFR_RNDU);
    long extra = mpfr_get_si(lt.raw(), MPFR_RNDU);
    if (extra < 0) extra = 0;
    return eps_exp + extra + 32;
}

bool radii_within(const std::array<Ball, 6>& st, const Rational& eps) {
    Real lim = real_down_from_rational(eps);
    for (const Ball& b : st)
        if (b.radius() > lim) return false;
    return true;
}

// run the doubling ladder until the per-attempt run certifies and the
// given post-check accepts the trajectory
Trajectory run_ladder(const OracleVector& x0, const Rational& T, const IntegratorConfig& cfg,
                      bool keep_models,
                      const std::function<bool(const Trajectory&)>& accept) {
    if (T.sign() < 0) throw DomainError("integrate: t must be >= 0");
    if (cfg.order < 2) throw DomainError("integrate: taylor order must be >= 2");

    QueryLog log;
    auto probe_balls = x0.query_all(cfg.eps_exp + 32, log);
    validate_initial(probe_balls, x0);
    Real L = lipschitz_from_balls(probe_balls);

    long bits = initial_oracle_bits(cfg.eps_exp, L, T);
    Prec prec = static_cast<Prec>(cfg.eps_exp + 64);
    const Rational eps = cfg.eps();

    std::string last_reason = "never attempted";
    long shortfall = 0;   // measured extra bits needed after a failed attempt
    for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
        if (prec > cfg.precision_cap)
            throw ResourceError("integrate: precision ceiling " + std::to_string(cfg.precision_cap) +
                                " bits reached (" + last_reason + ")");
        auto balls = x0.query_all(bits, log);

        Trajectory traj;
        traj.initial = balls;
        traj.prec = prec;
        traj.end.t = T;
        traj.end.stats.attempts = attempt + 1;
        traj.end.stats.working_precision = prec;
        traj.end.stats.oracle_bits = bits;

        if (T.is_zero()) {
            traj.end.x = SitnikovState::from_array(balls);
            traj.end.log = log;
            if (!radii_within(balls, eps))
                throw ResourceError("integrate: oracle enclosures wider than eps at t=0");
            return traj;
        }

        // tighter local budget on later attempts
        Real tau(kRadPrec);
        mpfr_set_q(tau.raw(), eps.raw(), MPFR_RNDD);
        mpfr_div(tau.raw(), tau.raw(), real_up_from_rational(T).raw(), MPFR_RNDD);
        mpfr_div_2ui(tau.raw(), tau.raw(), static_cast<unsigned long>(16 + 16 * attempt), MPFR_RNDD);

        try {
            auto res = run_sitnikov_attempt(balls, T, cfg, prec, tau,
                                            keep_models, cfg.debug_gronwall ? &L : nullptr);
            traj.end.x = SitnikovState::from_array(res.final_state);
            traj.end.stats.steps = res.steps;
            traj.models = std::move(res.models);
            traj.end.log = log;
            if (radii_within(res.final_state, eps) && accept(traj)) return traj;
            last_reason = "radii above eps";
            // measure how many bits were missing so the next attempt can
            // jump straight past the shortfall (doubling stays the floor)
            for (const Ball& b : res.final_state) {
                if (b.radius().is_zero()) continue;
                long over = static_cast<long>(mpfr_get_exp(b.radius().raw())) + cfg.eps_exp;
                if (over > shortfall) shortfall = over;
            }
        } catch (const CertFail& f) {
            last_reason = f.what();
        } catch (const DomainError& f) {
            // mid-run domain certificates (rho > 0, nonzero denominators)
            // fail when enclosures are too wide: retry with more precision
            last_reason = f.what();
        }
        long jump = std::max(bits * 2, bits + shortfall + 64);
        bits = jump;
        prec = static_cast<Prec>(std::max<long>(prec * 2, prec + shortfall + 64));
    }
    throw ResourceError("integrate: attempts exhausted (" + last_reason + ")");
}

} // namespace

// --- trajectory evaluation ----------------------------------------------

namespace {

Ball model_eval(const StepModel& m, int comp, const Ball& sigma, Prec p) {
    Ball acc = m.rem[comp];
    for (int d = static_cast<int>(m.poly.size()) - 1; d >= 0; --d)
        acc = add(mul(acc, sigma, p), m.poly[d][comp], p);
    return acc;
}

const StepModel& locate_model(const std::vector<StepModel>& models, const Rational& t) {
    // first model with t0 <= t <= t0 + h
    size_t lo = 0, hi = models.size();
    while (lo < hi) {
        size_t mid = (lo + hi) / 2;
        if (models[mid].t0 + models[mid].h < t) lo = mid + 1;
        else hi = mid;
    }
    if (lo >= models.size()) throw DomainError("trajectory evaluation outside [0, T]");
    return models[lo];
}

} // namespace

std::array<Ball, 3> Trajectory::eval(const Rational& t) const {
    const StepModel& m = locate_model(models, t);
    Ball sigma = Ball::from_rational(t - m.t0, prec);
    return {model_eval(m, 0, sigma, prec), model_eval(m, 1, sigma, prec),
            model_eval(m, 2, sigma, prec)};
}

std::array<Ball, 3> Trajectory::eval_range(const Rational& ta, const Rational& tb) const {
    if (tb < ta) throw DomainError("eval_range: tb < ta");
    std::array<Ball, 3> acc;
    bool first = true;
    Rational cur = ta;
    for (size_t i = 0; i < models.size(); ++i) {
        const StepModel& m = models[i];
        Rational end = m.t0 + m.h;
        if (end < cur && i + 1 < models.size()) continue;
        if (m.t0 > tb) break;
        Rational lo = std::max(cur, m.t0, std::less<Rational>());
        Rational hi = std::min(tb, end, std::less<Rational>());
        if (hi < lo) continue;
        Ball sigma = Ball::from_endpoints(
            Real::from_rational(lo - m.t0, prec, MPFR_RNDD),
            Real::from_rational(hi - m.t0, prec, MPFR_RNDU), prec);
        for (int c = 0; c < 3; ++c) {
            Ball piece = model_eval(m, c, sigma, prec);
            acc[c] = first ? piece : hull(acc[c], piece, prec);
        }
        first = false;
        cur = hi;
        if (!(cur < tb)) break;
    }
    if (first) throw DomainError("eval_range: empty intersection with trajectory");
    return acc;
}

// --- public API ----------------------------------------------------------

CertifiedState integrate(const OracleVector& x0, const Rational& t, const IntegratorConfig& cfg) {
    Trajectory traj = run_ladder(x0, t, cfg, false, [](const Trajectory&) { return true; });
    return traj.end;
}

Trajectory integrate_trajectory(const OracleVector& x0, const Rational& T,
                                const IntegratorConfig& cfg) {
    if (T.sign() <= 0) throw DomainError("integrate_trajectory: T must be > 0");
    return run_ladder(x0, T, cfg, true, [](const Trajectory&) { return true; });
}

SampledTrajectory sample_trajectory(const OracleVector& x0, const GridSpec& grid,
                                    const IntegratorConfig& cfg) {
    if (grid.delta.sign() <= 0) throw DomainError("sample_trajectory: delta must be > 0");
    if (grid.T < grid.delta) throw DomainError("sample_trajectory: need T >= delta");

    // sample count = floor(T / delta)
    Rational ratio = grid.T / grid.delta;
    mpz_t fl;
    mpz_init(fl);
    mpz_fdiv_q(fl, mpq_numref(ratio.raw()), mpq_denref(ratio.raw()));
    long count = mpz_get_si(fl);
    mpz_clear(fl);

    const Rational eps = cfg.eps();
    std::vector<Rational> times;
    times.reserve(static_cast<size_t>(count));
    for (long i = 1; i <= count; ++i) times.push_back(Rational(i) * grid.delta);

    auto accept = [&](const Trajectory& traj) {
        Real lim = real_down_from_rational(eps);
        for (const Rational& ti : times) {
            auto v = traj.eval(ti);
            for (int c = 0; c < 3; ++c)
                if (v[c].radius() > lim) return false;
        }
        return true;
    };
    Trajectory traj = run_ladder(x0, times.back(), cfg, true, accept);

    SampledTrajectory out;
    out.log = traj.end.log;
    out.stats = traj.end.stats;
    out.initial = traj.initial;
    for (const Rational& ti : times) {
        auto v = traj.eval(ti);
        out.samples.push_back(SamplePoint{ti, v[0], v[1], v[2]});
    }
    return out;
}

// --- root isolation -------------------------------------------------------

namespace {

struct Piece {
    int kind;   // +1 / -1 definite sign, 0 exact-zero, 2 undetermined
    Rational a, b;
};

void classify_rec(const Trajectory& traj, const Rational& a, const Rational& b,
                  const Rational& wmin, std::vector<Piece>& out) {
    auto v = traj.eval_range(a, b);
    const Ball& z = v[0];
    if (z.is_positive()) {
        out.push_back(Piece{+1, a, b});
        return;
    }
    if (z.is_negative()) {
        out.push_back(Piece{-1, a, b});
        return;
    }
    if (z.is_exact() && z.center().is_zero()) {
        out.push_back(Piece{0, a, b});
        return;
    }
    if (b - a <= wmin) {
        out.push_back(Piece{2, a, b});
        return;
    }
    Rational mid = (a + b) / Rational(2);
    classify_rec(traj, a, mid, wmin, out);
    classify_rec(traj, mid, b, wmin, out);
}

// merge adjacent pieces of equal kind
std::vector<Piece> merged_pieces(std::vector<Piece> in) {
    std::vector<Piece> out;
    for (auto& p : in) {
        if (!out.empty() && out.back().kind == p.kind && out.back().b == p.a) {
            out.back().b = p.b;
        } else {
            out.push_back(p);
        }
    }
    return out;
}

struct RootScanShort : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<Ball> scan_roots(const Trajectory& traj, const Rational& T, const Rational& eps) {
    const Rational wmin = eps / Rational(8);
    std::vector<Piece> pieces;
    for (const StepModel& m : traj.models) {
        if (m.t0 >= T) break;
        Rational hi = m.t0 + m.h;
        if (hi > T) hi = T;
        classify_rec(traj, m.t0, hi, wmin, pieces);
    }
    pieces = merged_pieces(std::move(pieces));

    std::vector<Ball> roots;
    roots.push_back(Ball::exact_zero());

    int last_sign = 0;
    bool have_last = false;
    bool prev_definite = false;
    size_t i = 0;
    while (i < pieces.size()) {
        const Piece& pc = pieces[i];
        if (pc.kind == +1 || pc.kind == -1) {
            if (prev_definite && last_sign == -pc.kind) {
                // definite pieces of opposite sign must be separated by an
                // undetermined piece; adjacency would be a contradiction
                throw InconsistencyError("root scan: opposite definite signs touch");
            }
            last_sign = pc.kind;
            have_last = true;
            prev_definite = true;
            ++i;
            continue;
        }
        prev_definite = false;
        if (pc.kind == 0) {
            ++i;   // identically-zero stretch (equilibrium): no crossing
            continue;
        }
        // undetermined run: look at the next definite piece
        size_t j = i;
        Rational lo = pc.a, hi = pc.b;
        while (j + 1 < pieces.size() && pieces[j + 1].kind == 2) {
            ++j;
            hi = pieces[j].b;
        }
        int next_sign = 0;
        if (j + 1 < pieces.size() &&
            (pieces[j + 1].kind == 1 || pieces[j + 1].kind == -1))
            next_sign = pieces[j + 1].kind;

        auto vr = traj.eval_range(lo, hi);
        bool v_definite = vr[1].is_positive() || vr[1].is_negative();
        if (!have_last || lo.is_zero()) {
            // run attached to the known crossing tau_0 = 0
            if (!v_definite)
                throw RootScanShort("cannot separate initial crossing on [" +
                                    lo.to_fraction() + ", " + hi.to_fraction() + "]");
        } else if (next_sign == 0) {
            // trailing run at T: no closing flank, ignore
        } else if (next_sign == -last_sign) {
            if (!v_definite)
                throw RootScanShort("cannot isolate root in [" + lo.to_fraction() + ", " +
                                    hi.to_fraction() + "]");
            if (hi - lo > eps)
                throw RootScanShort("root enclosure wider than eps in [" + lo.to_fraction() +
                                    ", " + hi.to_fraction() + "]");
            roots.push_back(Ball::from_endpoints(Real::from_rational(lo, 96, MPFR_RNDD),
                                                 Real::from_rational(hi, 96, MPFR_RNDU), 96));
        } else {
            // same flanks: certified no crossing only if z is monotone
            if (!v_definite)
                throw RootScanShort("possible tangency in [" + lo.to_fraction() + ", " +
                                    hi.to_fraction() + "]");
        }
        i = j + 1;
    }
    return roots;
}

} // namespace

RootList find_roots(const OracleVector& x0, const Rational& T, const IntegratorConfig& cfg) {
    if (T.sign() <= 0) throw DomainError("find_roots: T must be > 0");
    if (!x0.coords[kCoordZ0].is_exact_zero())
        throw DomainError("find_roots: z0 oracle must enclose 0 exactly");

    if (x0.coords[kCoordV0].is_exact_zero()) {
        // z0 = v0 = 0 pins the invariant manifold z == 0: no crossings
        QueryLog log;
        auto balls = x0.query_all(cfg.eps_exp + 32, log);
        validate_initial(balls, x0);
        RootList out;
        out.roots.push_back(Ball::exact_zero());
        out.log = log;
        return out;
    }

    std::string last;
    for (long extra : {8l, 24l, 56l}) {
        IntegratorConfig c = cfg;
        c.eps_exp = cfg.eps_exp + extra;
        Trajectory traj = run_ladder(x0, T, c, true, [](const Trajectory&) { return true; });
        try {
            std::vector<Ball> roots = scan_roots(traj, T, cfg.eps());
            RootList out;
            out.roots = std::move(roots);
            out.log = traj.end.log;
            out.stats = traj.end.stats;
            out.trajectory = std::move(traj);
            return out;
        } catch (const RootScanShort& s) {
            last = s.what();
        }
    }
    throw ResourceError("find_roots: " + last);
}

// --- three-body certified run ---------------------------------------------

namespace {

struct TBAttemptOut {
    std::array<Ball, 21> final_state;
    std::vector<std::array<Ball, 21>> recorded;
    long steps = 0;
};

TBAttemptOut run_three_body_attempt(const std::array<Ball, 21>& init, const Rational& T,
                                    const std::vector<Rational>& record_at,
                                    const IntegratorConfig& cfg, Prec p, const Real& tau_rate) {
    const int N = cfg.order;
    std::array<Ball, 21> Y;
    for (int i = 0; i < 21; ++i) Y[i] = init[i].rounded(p);

    TBAttemptOut out;
    out.recorded.resize(record_at.size());
    std::vector<bool> done(record_at.size(), false);

    Rational t(0);
    const double log2_tau = tau_rate.is_zero() ? -100000.0
                                               : static_cast<double>(mpfr_get_exp(tau_rate.raw()));
    size_t rec = 0;
    while (rec < record_at.size() && record_at[rec].is_zero()) {
        out.recorded[rec] = Y;
        done[rec] = true;
        ++rec;
    }

    while (t < T) {
        if (++out.steps > cfg.max_steps) throw ResourceError("three-body: step budget exhausted");
        // blowup guard on positions
        for (int i = 3; i < 21; ++i)
            if (mpfr_cmp_ui(Y[i].radius().raw(), 2) > 0) throw CertFail("three-body enclosure too wide");

        auto PS = three_body_series(Y, N, p);
        double lcN = -1e18, lcNm1 = -1e18;
        for (int i = 3; i < 21; ++i) {
            lcN = std::max(lcN, log2_abs_upper(PS[N][i]));
            lcNm1 = std::max(lcNm1, log2_abs_upper(PS[N - 1][i]));
        }
        double h_guess = (lcN < -1e17) ? 1e9 : step_estimate(lcN, lcNm1, log2_tau, N);
        Rational h = dyadic_step_down(std::min(cfg.max_step.to_double(), h_guess));
        Rational remaining = T - t;
        if (h > remaining) h = remaining;

        std::array<Ball, 21> B;
        std::vector<std::array<Ball, 21>> BS;
        for (;;) {
            Rational h_in = h;
            B = picard_box<ThreeBodyFlow>(Y, h_in, p);
            h = h_in;
            bool ok = true;
            try {
                BS = three_body_series(B, N, p);
            } catch (const DomainError&) {
                ok = false;
            }
            if (ok && !tau_rate.is_zero()) {
                Real hu = real_up_from_rational(h);
                Real hN(kRadPrec);
                mpfr_pow_ui(hN.raw(), hu.raw(), static_cast<unsigned long>(N), MPFR_RNDU);
                Real allowance(kRadPrec);
                mpfr_mul(allowance.raw(), tau_rate.raw(), real_down_from_rational(h).raw(), MPFR_RNDD);
                for (int i = 3; i < 21 && ok; ++i) {
                    Real rem_sz(kRadPrec);
                    mpfr_mul(rem_sz.raw(), abs_upper(BS[N][i]).raw(), hN.raw(), MPFR_RNDU);
                    if (rem_sz > allowance) ok = false;
                }
            }
            if (ok) break;
            h = h / Rational(2);
            if (h < Rational::pow2(-48)) throw CertFail("three-body step collapsed");
        }

        auto eval_at = [&](const Rational& sig) {
            Ball sb = Ball::from_rational(sig, p);
            std::array<Ball, 21> st;
            for (int i = 0; i < 3; ++i) st[i] = Y[i];
            for (int i = 3; i < 21; ++i) {
                Ball acc = BS[N][i];
                for (int d = N - 1; d >= 0; --d) acc = add(mul(acc, sb, p), PS[d][i], p);
                st[i] = acc;
            }
            return st;
        };

        Rational t_next = t + h;
        while (rec < record_at.size() && record_at[rec] <= t_next) {
            out.recorded[rec] = eval_at(record_at[rec] - t);
            done[rec] = true;
            ++rec;
        }
        Y = eval_at(h);
        t = t_next;
    }
    out.final_state = Y;
    for (bool d : done)
        if (!d) throw DomainError("three-body: record time outside [0, T]");
    return out;
}

} // namespace

ThreeBodyRun integrate_three_body(const std::array<Ball, 21>& x0, const Rational& T,
                                  const std::vector<Rational>& record_at,
                                  const IntegratorConfig& cfg) {
    if (T.sign() < 0) throw DomainError("three-body: T must be >= 0");
    for (size_t i = 1; i < record_at.size(); ++i)
        if (record_at[i] < record_at[i - 1])
            throw DomainError("three-body: record times must be sorted");

    const Rational eps = cfg.eps();
    Prec prec = static_cast<Prec>(cfg.eps_exp + 64);
    std::string last_reason = "never attempted";
    for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
        if (prec > cfg.precision_cap)
            throw ResourceError("three-body: precision ceiling reached (" + last_reason + ")");
        Real tau(kRadPrec);
        mpfr_set_q(tau.raw(), eps.raw(), MPFR_RNDD);
        if (T.sign() > 0)
            mpfr_div(tau.raw(), tau.raw(), real_up_from_rational(T).raw(), MPFR_RNDD);
        mpfr_div_2ui(tau.raw(), tau.raw(), static_cast<unsigned long>(16 + 16 * attempt), MPFR_RNDD);
        try {
            auto res = run_three_body_attempt(x0, T, record_at, cfg, prec, tau);
            bool ok = true;
            Real lim = real_down_from_rational(eps);
            for (const auto& st : res.recorded)
                for (const Ball& b : st)
                    if (b.radius() > lim) ok = false;
            for (const Ball& b : res.final_state)
                if (b.radius() > lim) ok = false;
            if (ok) {
                ThreeBodyRun out;
                out.at_times = std::move(res.recorded);
                out.end = res.final_state;
                out.stats.steps = res.steps;
                out.stats.attempts = attempt + 1;
                out.stats.working_precision = prec;
                return out;
            }
            last_reason = "radii above eps";
        } catch (const CertFail& f) {
            last_reason = f.what();
        } catch (const DomainError& f) {
            last_reason = f.what();
        }
        prec *= 2;
    }
    throw ResourceError("three-body: attempts exhausted (" + last_reason + ")");
}

} // namespace sitlab
