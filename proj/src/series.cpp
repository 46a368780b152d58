#include "sitlab/series.hpp"
#include "sitlab/errors.hpp"

namespace sitlab {

namespace {

using BSeries = std::vector<Ball>;

// degree-k coefficient of a*b (both known through degree k)
Ball conv_at(const BSeries& a, const BSeries& b, int k, Prec p) {
    DotAccum acc(p);
    for (int j = 0; j <= k; ++j) acc.add_product(a[j], b[k - j]);
    return acc.result();
}

// extend g = u^alpha to degree k+1 given u through k+1 and g through k:
//   (k+1) u0 g_{k+1} = sum_{j=0..k} (alpha (k+1-j) - j) u_{k+1-j} g_j
Ball pow_series_next(const BSeries& u, const BSeries& g, const Ball& alpha, int k, Prec p) {
    DotAccum acc(p);
    for (int j = 0; j <= k; ++j) {
        Ball factor = sub(mul_si(alpha, k + 1 - j, p), Ball::from_long(j, p), p);
        acc.add_product(factor, mul(u[k + 1 - j], g[j], p));
    }
    return div_ui(div(acc.result(), u[0], p), static_cast<unsigned long>(k + 1), p);
}

// extend beta = 1/rho to degree k+1 given rho through k+1, beta through k
Ball recip_series_next(const BSeries& rho, const BSeries& beta, int k, Prec p) {
    DotAccum acc(p);
    for (int j = 1; j <= k + 1; ++j) acc.add_product(rho[j], beta[k + 1 - j]);
    return neg(mul(acc.result(), beta[0], p));
}

} // namespace

std::vector<std::array<Ball, 6>> sitnikov_series(const std::array<Ball, 6>& x0,
                                                 int order, Prec p) {
    if (order < 2) throw DomainError("taylor order must be >= 2");
    const int N = order;
    const Ball& a = x0[0];
    const Ball& e = x0[1];
    const Ball& mu = x0[2];

    BSeries z(N + 1), v(N + 1), E(N + 1), c(N + 1), s(N + 1),
        rho(N + 1), beta(N + 1), u(N + 1), g(N + 1);
    z[0] = x0[3];
    v[0] = x0[4];
    E[0] = x0[5];
    sin_cos_ball(s[0], c[0], E[0], p);

    Ball one = Ball::from_long(1, p);
    rho[0] = sub(one, mul(e, c[0], p), p);
    if (!rho[0].is_positive())
        throw DomainError("series: 1 - e cos E not certified positive");
    beta[0] = div(one, rho[0], p);
    Ball a2 = sqr(a, p);
    u[0] = add(sqr(z[0], p), mul(a2, sqr(rho[0], p), p), p);
    if (!u[0].is_positive()) throw DomainError("series: w^2 not certified positive");
    g[0] = div(one, mul(u[0], sqrt_ball(u[0], p), p), p);           // u^(-3/2)

    Ball n = sqrt_ball(div(mu, mul(a, a2, p), p), p);               // sqrt(mu/a^3)
    Ball alpha = Ball::from_rational(Rational(-3, 2), p);
    Ball two_mu = scale2(mu, 1);

    for (int k = 0; k < N; ++k) {
        unsigned long k1 = static_cast<unsigned long>(k + 1);
        z[k + 1] = div_ui(v[k], k1, p);
        v[k + 1] = neg(div_ui(mul(two_mu, conv_at(z, g, k, p), p), k1, p));
        // Edot_j = n beta_j
        E[k + 1] = div_ui(mul(n, beta[k], p), k1, p);
        // c' = -s Edot, s' = c Edot
        DotAccum cs(p), ss(p);
        for (int j = 0; j <= k; ++j) {
            Ball ed = mul(n, beta[j], p);
            cs.add_product(ed, s[k - j]);
            ss.add_product(ed, c[k - j]);
        }
        c[k + 1] = neg(div_ui(cs.result(), k1, p));
        s[k + 1] = div_ui(ss.result(), k1, p);
        rho[k + 1] = neg(mul(e, c[k + 1], p));
        u[k + 1] = add(conv_at(z, z, k + 1, p), mul(a2, conv_at(rho, rho, k + 1, p), p), p);
        g[k + 1] = pow_series_next(u, g, alpha, k, p);
        beta[k + 1] = recip_series_next(rho, beta, k, p);
    }

    std::vector<std::array<Ball, 6>> out(static_cast<size_t>(N) + 1);
    for (int k = 0; k <= N; ++k) {
        out[k][0] = (k == 0) ? a : Ball::exact_zero();
        out[k][1] = (k == 0) ? e : Ball::exact_zero();
        out[k][2] = (k == 0) ? mu : Ball::exact_zero();
        out[k][3] = z[k];
        out[k][4] = v[k];
        out[k][5] = E[k];
    }
    return out;
}

SitnikovVariationalSeries sitnikov_series_variational(const std::array<Ball, 6>& x0,
                                                      int order, Prec p) {
    if (order < 2) throw DomainError("taylor order must be >= 2");
    const int N = order;
    const Ball& a = x0[0];
    const Ball& e = x0[1];
    const Ball& mu = x0[2];

    BSeries z(N + 1), v(N + 1), E(N + 1), c(N + 1), s(N + 1),
        rho(N + 1), beta(N + 1), u(N + 1), g(N + 1), g5(N + 1);
    z[0] = x0[3];
    v[0] = x0[4];
    E[0] = x0[5];
    sin_cos_ball(s[0], c[0], E[0], p);

    Ball one = Ball::from_long(1, p);
    rho[0] = sub(one, mul(e, c[0], p), p);
    if (!rho[0].is_positive())
        throw DomainError("series: 1 - e cos E not certified positive");
    beta[0] = div(one, rho[0], p);
    Ball a2 = sqr(a, p);
    u[0] = add(sqr(z[0], p), mul(a2, sqr(rho[0], p), p), p);
    if (!u[0].is_positive()) throw DomainError("series: w^2 not certified positive");
    g[0] = div(one, mul(u[0], sqrt_ball(u[0], p), p), p);
    g5[0] = div(g[0], u[0], p);                                     // u^(-5/2)

    Ball n = sqrt_ball(div(mu, mul(a, a2, p), p), p);
    Ball alpha = Ball::from_rational(Rational(-3, 2), p);
    Ball two_mu = scale2(mu, 1);

    for (int k = 0; k < N; ++k) {
        unsigned long k1 = static_cast<unsigned long>(k + 1);
        z[k + 1] = div_ui(v[k], k1, p);
        v[k + 1] = neg(div_ui(mul(two_mu, conv_at(z, g, k, p), p), k1, p));
        E[k + 1] = div_ui(mul(n, beta[k], p), k1, p);
        DotAccum cs(p), ss(p);
        for (int j = 0; j <= k; ++j) {
            Ball ed = mul(n, beta[j], p);
            cs.add_product(ed, s[k - j]);
            ss.add_product(ed, c[k - j]);
        }
        c[k + 1] = neg(div_ui(cs.result(), k1, p));
        s[k + 1] = div_ui(ss.result(), k1, p);
        rho[k + 1] = neg(mul(e, c[k + 1], p));
        u[k + 1] = add(conv_at(z, z, k + 1, p), mul(a2, conv_at(rho, rho, k + 1, p), p), p);
        g[k + 1] = pow_series_next(u, g, alpha, k, p);
        beta[k + 1] = recip_series_next(rho, beta, k, p);
        // g5 = g/u: g5_{k+1} = (g_{k+1} - sum_{j=1..k+1} u_j g5_{k+1-j}) / u_0
        Ball acc = g[k + 1];
        for (int j = 1; j <= k + 1; ++j) acc = sub(acc, mul(u[j], g5[k + 1 - j], p), p);
        g5[k + 1] = div(acc, u[0], p);
    }

    // Jacobian entry series along the expansion:
    //   Azz = -2 mu (g - 3 z^2 g5)
    //   AzE =  6 mu a^2 e * (z rho s g5)
    //   AEE = -n e * (s beta^2)
    BSeries Azz(N + 1), AzE(N + 1), AEE(N + 1);
    BSeries zz(N + 1), z2g5(N + 1), zs(N + 1), zsrho(N + 1), b2(N + 1), sb2(N + 1);
    for (int k = 0; k <= N; ++k) zz[k] = conv_at(z, z, k, p);
    for (int k = 0; k <= N; ++k) z2g5[k] = conv_at(zz, g5, k, p);
    for (int k = 0; k <= N; ++k) zs[k] = conv_at(z, s, k, p);
    for (int k = 0; k <= N; ++k) zsrho[k] = conv_at(zs, rho, k, p);
    for (int k = 0; k <= N; ++k) b2[k] = conv_at(beta, beta, k, p);
    for (int k = 0; k <= N; ++k) sb2[k] = conv_at(s, b2, k, p);
    Ball six_mu_a2_e = mul(mul_si(mu, 6, p), mul(a2, e, p), p);
    Ball ne = mul(n, e, p);
    for (int k = 0; k <= N; ++k) {
        Azz[k] = neg(mul(two_mu, sub(g[k], mul_si(z2g5[k], 3, p), p), p));
        AzE[k] = mul(six_mu_a2_e, conv_at(zsrho, g5, k, p), p);
        AEE[k] = neg(mul(ne, sb2[k], p));
    }

    // variational recurrence, M(0) = I
    SitnikovVariationalSeries out;
    out.state.resize(static_cast<size_t>(N) + 1);
    out.vari.resize(static_cast<size_t>(N) + 1);
    for (int k = 0; k <= N; ++k) out.state[k] = {z[k], v[k], E[k]};

    std::array<std::array<BSeries, 3>, 3> M;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            M[i][j].resize(N + 1);
            M[i][j][0] = (i == j) ? one : Ball::exact_zero();
        }
    for (int k = 0; k < N; ++k) {
        unsigned long k1 = static_cast<unsigned long>(k + 1);
        for (int j = 0; j < 2; ++j) {
            // columns over z0, v0: the E-row stays identically zero
            M[0][j][k + 1] = div_ui(M[1][j][k], k1, p);
            M[1][j][k + 1] = div_ui(conv_at(Azz, M[0][j], k, p), k1, p);
            M[2][j][k + 1] = Ball::exact_zero();
        }
        M[0][2][k + 1] = div_ui(M[1][2][k], k1, p);
        Ball row2 = add(conv_at(Azz, M[0][2], k, p), conv_at(AzE, M[2][2], k, p), p);
        M[1][2][k + 1] = div_ui(row2, k1, p);
        M[2][2][k + 1] = div_ui(conv_at(AEE, M[2][2], k, p), k1, p);
    }
    for (int k = 0; k <= N; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) out.vari[k][i][j] = M[i][j][k];
    return out;
}

ThreeBodyFlow::State ThreeBodyFlow::rhs(const State& x, Prec p) {
    ThreeBodyDerivative d = nbody_rhs(unpack(x), p);
    State out;
    for (int i = 0; i < 3; ++i) out[i] = Ball::exact_zero();
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) {
            out[3 + 3 * i + k] = d.dpos[i][k];
            out[12 + 3 * i + k] = d.dvel[i][k];
        }
    return out;
}

ThreeBodyFlow::State ThreeBodyFlow::pack(const ThreeBodyState& s) {
    State x;
    for (int i = 0; i < 3; ++i) x[i] = s.mass[i];
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) {
            x[3 + 3 * i + k] = s.pos[i][k];
            x[12 + 3 * i + k] = s.vel[i][k];
        }
    return x;
}

ThreeBodyState ThreeBodyFlow::unpack(const State& x) {
    ThreeBodyState s;
    for (int i = 0; i < 3; ++i) s.mass[i] = x[i];
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) {
            s.pos[i][k] = x[3 + 3 * i + k];
            s.vel[i][k] = x[12 + 3 * i + k];
        }
    return s;
}

std::vector<std::array<Ball, 21>> three_body_series(const std::array<Ball, 21>& x0,
                                                    int order, Prec p) {
    if (order < 2) throw DomainError("taylor order must be >= 2");
    const int N = order;
    const std::array<Ball, 3> mass = {x0[0], x0[1], x0[2]};
    const bool massless[3] = {
        mass[0].is_exact() && mass[0].center().is_zero(),
        mass[1].is_exact() && mass[1].center().is_zero(),
        mass[2].is_exact() && mass[2].center().is_zero(),
    };

    // pos[i][k], vel[i][k]: series; pairs (0,1),(0,2),(1,2): d, u, g series
    BSeries pos[3][3], vel[3][3];
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) {
            pos[i][k].resize(N + 1);
            vel[i][k].resize(N + 1);
            pos[i][k][0] = x0[3 + 3 * i + k];
            vel[i][k][0] = x0[12 + 3 * i + k];
        }
    static constexpr int kPairA[3] = {0, 0, 1};
    static constexpr int kPairB[3] = {1, 2, 2};
    BSeries dd[3][3], uu[3], gg[3];
    bool pair_used[3];
    Ball one = Ball::from_long(1, p);
    Ball alpha = Ball::from_rational(Rational(-3, 2), p);
    for (int q = 0; q < 3; ++q) {
        int i = kPairA[q], j = kPairB[q];
        pair_used[q] = !(massless[i] && massless[j]);
        for (int k = 0; k < 3; ++k) {
            dd[q][k].resize(N + 1);
            dd[q][k][0] = sub(pos[j][k][0], pos[i][k][0], p);
        }
        uu[q].resize(N + 1);
        gg[q].resize(N + 1);
        if (!pair_used[q]) continue;
        uu[q][0] = add(add(sqr(dd[q][0][0], p), sqr(dd[q][1][0], p), p), sqr(dd[q][2][0], p), p);
        if (!uu[q][0].is_positive())
            throw DomainError("three-body series: pair distance not certified positive");
        gg[q][0] = div(one, mul(uu[q][0], sqrt_ball(uu[q][0], p), p), p);
    }

    for (int k = 0; k < N; ++k) {
        unsigned long k1 = static_cast<unsigned long>(k + 1);
        // accelerations at degree k
        Ball acc[3][3];
        for (int i = 0; i < 3; ++i)
            for (int c = 0; c < 3; ++c) acc[i][c] = Ball::exact_zero();
        for (int q = 0; q < 3; ++q) {
            if (!pair_used[q]) continue;
            int i = kPairA[q], j = kPairB[q];
            for (int c = 0; c < 3; ++c) {
                Ball f = conv_at(dd[q][c], gg[q], k, p);   // (d * u^-3/2)_k
                if (!massless[j]) acc[i][c] = add(acc[i][c], mul(mass[j], f, p), p);
                if (!massless[i]) acc[j][c] = sub(acc[j][c], mul(mass[i], f, p), p);
            }
        }
        for (int i = 0; i < 3; ++i)
            for (int c = 0; c < 3; ++c) {
                pos[i][c][k + 1] = div_ui(vel[i][c][k], k1, p);
                vel[i][c][k + 1] = div_ui(acc[i][c], k1, p);
            }
        for (int q = 0; q < 3; ++q) {
            int i = kPairA[q], j = kPairB[q];
            for (int c = 0; c < 3; ++c)
                dd[q][c][k + 1] = sub(pos[j][c][k + 1], pos[i][c][k + 1], p);
            if (!pair_used[q]) continue;
            uu[q][k + 1] = add(add(conv_at(dd[q][0], dd[q][0], k + 1, p),
                                   conv_at(dd[q][1], dd[q][1], k + 1, p), p),
                               conv_at(dd[q][2], dd[q][2], k + 1, p), p);
            gg[q][k + 1] = pow_series_next(uu[q], gg[q], alpha, k, p);
        }
    }

    std::vector<std::array<Ball, 21>> out(static_cast<size_t>(N) + 1);
    for (int k = 0; k <= N; ++k) {
        for (int i = 0; i < 3; ++i) out[k][i] = (k == 0) ? mass[i] : Ball::exact_zero();
        for (int i = 0; i < 3; ++i)
            for (int c = 0; c < 3; ++c) {
                out[k][3 + 3 * i + c] = pos[i][c][k];
                out[k][12 + 3 * i + c] = vel[i][c][k];
            }
    }
    return out;
}

} // namespace sitlab
