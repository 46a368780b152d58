#include "sitlab/dynamics.hpp"
#include "sitlab/errors.hpp"

namespace sitlab {

namespace {

// rho = 1 - e cos E, certified positive for e < 1
Ball rho_of(const Ball& e, const Ball& E, Prec p) {
    Ball rho = sub(Ball::from_long(1, p), mul(e, cos_ball(E, p), p), p);
    if (!rho.is_positive())
        throw DomainError("1 - e cos E not certified positive (e too close to 1 or state too wide)");
    return rho;
}

} // namespace

std::array<Ball, 6> sitnikov_rhs(const SitnikovState& x, Prec p) {
    Ball rho = rho_of(x.e, x.E, p);
    Ball u = add(sqr(x.z, p), mul(sqr(x.a, p), sqr(rho, p), p), p);   // w^2
    if (!u.is_positive()) throw DomainError("w^2 not certified positive");
    Ball w3 = mul(u, sqrt_ball(u, p), p);                             // (w^2)^(3/2)
    Ball zdd = neg(div(scale2(mul(x.mu, x.z, p), 1), w3, p));
    Ball n = sqrt_ball(div(x.mu, mul(x.a, sqr(x.a, p), p), p), p);    // sqrt(mu/a^3)
    Ball Edot = div(n, rho, p);
    return {Ball::exact_zero(), Ball::exact_zero(), Ball::exact_zero(), x.v, zdd, Edot};
}

std::array<std::array<Ball, 6>, 6> sitnikov_jacobian(const SitnikovState& x, Prec p) {
    std::array<std::array<Ball, 6>, 6> J;
    for (auto& row : J)
        for (auto& cell : row) cell = Ball::exact_zero();

    Ball rho = rho_of(x.e, x.E, p);
    Ball sinE = sin_ball(x.E, p);
    Ball z2 = sqr(x.z, p);
    Ball a2 = sqr(x.a, p);
    Ball u = add(z2, mul(a2, sqr(rho, p), p), p);                     // w^2
    Ball w = sqrt_ball(u, p);
    Ball w3 = mul(u, w, p);
    Ball w5 = mul(w3, u, p);

    // d(zdot)/dv = 1
    J[3][4] = Ball::from_long(1, p);
    // d(zdd)/dz = -2 mu (1/w^3 - 3 z^2 / w^5)
    Ball term = sub(div(Ball::from_long(1, p), w3, p),
                    mul_si(div(z2, w5, p), 3, p), p);
    J[4][3] = neg(scale2(mul(x.mu, term, p), 1));
    // d(zdd)/dE = 6 mu z a^2 (1 - e cos E) e sin E / w^5
    Ball num = mul(mul(mul(x.mu, x.z, p), mul(a2, rho, p), p), mul(x.e, sinE, p), p);
    J[4][5] = mul_si(div(num, w5, p), 6, p);
    // d(Edot)/dE = -sqrt(mu/a^3) e sin E / (1 - e cos E)^2
    Ball n = sqrt_ball(div(x.mu, mul(x.a, sqr(x.a, p), p), p), p);
    J[5][5] = neg(div(mul(n, mul(x.e, sinE, p), p), sqr(rho, p), p));
    return J;
}

LipschitzBound lipschitz_bound(const OrbitParams& params, Prec p) {
    if (params.e.sign() < 0 || params.e >= Rational(1))
        throw DomainError("lipschitz_bound: needs 0 <= e < 1");
    if (params.a.sign() <= 0 || params.mu.sign() <= 0)
        throw DomainError("lipschitz_bound: needs a > 0, mu > 0");

    Ball a = Ball::from_rational(params.a, p);
    Ball e = Ball::from_rational(params.e, p);
    Ball mu = Ball::from_rational(params.mu, p);
    Ball one = Ball::from_long(1, p);
    Ball one_m_e = sub(one, e, p);
    Ball c = mul(a, one_m_e, p);                       // min of a(1 - e cos E)
    Ball c2 = sqr(c, p);
    Ball c3 = mul(c2, c, p);

    // sup z^2/w^5 = K1 / c^3 at z^2 = (2/3) c^2, K1 = 6 sqrt(15)/125
    Ball K1 = div(mul_si(sqrt_ball(Ball::from_long(15, p), p), 6, p),
                  Ball::from_long(125, p), p);
    // sup |z|/w^3 = K2 / c^2 at z^2 = c^2/2, K2 = 2 sqrt(3)/9
    Ball K2 = div(scale2(sqrt_ball(Ball::from_long(3, p), p), 1),
                  Ball::from_long(9, p), p);

    // |d zdd/dz| <= 2 mu (1 + 3 K1)/c^3
    Ball row_v = div(scale2(mul(mu, add(one, mul_si(K1, 3, p), p), p), 1), c3, p);
    // |d zdd/dE| <= 6 mu e K2 / ((1-e) c^2), using a^2 rho / w^2 <= 1/(1-e)
    Ball t2 = div(mul(mul_si(mul(mu, e, p), 6, p), K2, p), mul(one_m_e, c2, p), p);
    row_v = add(row_v, t2, p);
    // |d Edot/dE| <= sqrt(mu/a^3) e / (1-e)^2
    Ball n = sqrt_ball(div(mu, mul(a, sqr(a, p), p), p), p);
    Ball row_E = div(mul(n, e, p), sqr(one_m_e, p), p);

    Real L = Real::from_long(1, kRadPrec);             // row_z = |d zdot/dv| = 1
    Real rv = row_v.upper(), rE = row_E.upper();
    if (rv > L) L = rv;
    if (rE > L) L = rE;
    Real out(kRadPrec);
    mpfr_set(out.raw(), L.raw(), MPFR_RNDU);
    return LipschitzBound{out};
}

namespace {

Ball dist_squared(const std::array<Ball, 3>& pa, const std::array<Ball, 3>& pb, Prec p) {
    Ball s = Ball::exact_zero();
    for (int k = 0; k < 3; ++k) s = add(s, sqr(sub(pa[k], pb[k], p), p), p);
    return s;
}

} // namespace

ThreeBodyDerivative nbody_rhs(const ThreeBodyState& s, Prec p) {
    ThreeBodyDerivative d;
    d.dpos = s.vel;
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) d.dvel[i][k] = Ball::exact_zero();

    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            if (i == j) continue;
            if (s.mass[j].contains_zero() && s.mass[j].is_exact() && s.mass[j].center().is_zero()) {
                continue;   // exactly massless attractor contributes nothing
            }
            Ball u = dist_squared(s.pos[i], s.pos[j], p);
            if (!u.is_positive())
                throw DomainError("nbody_rhs: bodies " + std::to_string(i) + "," +
                                  std::to_string(j) + " not certified separated (collision)");
            Ball w3 = mul(u, sqrt_ball(u, p), p);
            for (int k = 0; k < 3; ++k) {
                Ball delta = sub(s.pos[j][k], s.pos[i][k], p);
                d.dvel[i][k] = add(d.dvel[i][k], div(mul(s.mass[j], delta, p), w3, p), p);
            }
        }
    }
    return d;
}

ThreeBodyState embed_three_body(const OrbitParams& params, const SitnikovState& x, Prec p) {
    Ball a = Ball::from_rational(params.a, p);
    Ball e = Ball::from_rational(params.e, p);
    Ball mu = Ball::from_rational(params.mu, p);
    Ball sinE, cosE;
    sin_cos_ball(sinE, cosE, x.E, p);
    Ball b = sqrt_ball(sub(Ball::from_long(1, p), sqr(e, p), p), p);   // sqrt(1-e^2)

    // barycentric ellipse of primary 1, periapsis along +X:
    //   pos = (a (cos E - e), a b sin E)
    // physical anomaly rate for two equal-mass primaries: the barycentric
    // orbit has GM* = mu/4, so Edot = (1/2) sqrt(mu/a^3) / (1 - e cos E)
    Ball px = mul(a, sub(cosE, e, p), p);
    Ball py = mul(mul(a, b, p), sinE, p);
    Ball rho = rho_of(e, x.E, p);
    Ball n_phys = scale2(sqrt_ball(div(mu, mul(a, sqr(a, p), p), p), p), -1);
    Ball Edot = div(n_phys, rho, p);
    Ball vx = neg(mul(mul(a, sinE, p), Edot, p));
    Ball vy = mul(mul(mul(a, b, p), cosE, p), Edot, p);

    ThreeBodyState s;
    Ball zero = Ball::exact_zero();
    s.mass = {mu, mu, zero};
    s.pos[0] = {px, py, zero};
    s.pos[1] = {neg(px), neg(py), zero};
    s.pos[2] = {zero, zero, x.z};
    s.vel[0] = {vx, vy, zero};
    s.vel[1] = {neg(vx), neg(vy), zero};
    s.vel[2] = {zero, zero, x.v};
    return s;
}

namespace {

// |value| certified below tol * scale?
bool small_against(const Ball& value, const Real& tol_scale) {
    return abs_upper(value) <= tol_scale;
}

Real tol_times(const Rational& tol, const Real& scale_hi) {
    Real t = Real::from_rational(tol, kRadPrec, MPFR_RNDU);
    Real r(kRadPrec);
    mpfr_mul(r.raw(), t.raw(), scale_hi.raw(), MPFR_RNDU);
    return r;
}

Ball atan2_ball(const Ball& y, const Ball& x, Prec p) {
    // Lipschitz propagation: |grad atan2| = 1/r with r^2 = x^2 + y^2
    Ball r2 = add(sqr(x, p), sqr(y, p), p);
    if (!r2.is_positive()) throw DomainError("atan2 of enclosure containing the origin");
    Real r_lo(kRadPrec);
    mpfr_sqrt(r_lo.raw(), abs_lower(r2).raw(), MPFR_RNDD);
    Real c(p);
    mpfr_atan2(c.raw(), y.center().raw(), x.center().raw(), MPFR_RNDN);
    Real spread(kRadPrec);
    mpfr_add(spread.raw(), x.radius().raw(), y.radius().raw(), MPFR_RNDU);
    Real rad(kRadPrec);
    mpfr_div(rad.raw(), spread.raw(), r_lo.raw(), MPFR_RNDU);
    Real u(kRadPrec);
    mpfr_set_ui_2exp(u.raw(), 1, static_cast<long>(mpfr_get_exp(c.raw())) - p, MPFR_RNDU);
    if (c.is_zero()) mpfr_set_zero(u.raw(), 1);
    mpfr_add(rad.raw(), rad.raw(), u.raw(), MPFR_RNDU);
    return Ball(std::move(c), std::move(rad));
}

} // namespace

SitnikovState project_sitnikov(const ThreeBodyState& s, Prec p, const ProjectOptions& opt) {
    // shape checks, relative to the system scale
    Real scale = abs_upper(s.pos[0][0]);
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 3; ++k) {
            Real m = abs_upper(s.pos[i][k]);
            if (m > scale) scale = m;
        }
    Real one(kRadPrec);
    mpfr_set_ui(one.raw(), 1, MPFR_RNDN);
    if (scale < one) scale = one;
    Real tol = tol_times(opt.rel_tol, scale);

    if (!small_against(sub(s.mass[0], s.mass[1], p), tol_times(opt.rel_tol, abs_upper(s.mass[0]))))
        throw ShapeError("projection: primaries must have equal masses");
    if (!small_against(s.mass[2], tol_times(opt.rel_tol, abs_upper(s.mass[0]))))
        throw ShapeError("projection: third body must be massless");
    for (int k = 0; k < 3; ++k) {
        if (!small_against(add(s.pos[0][k], s.pos[1][k], p), tol))
            throw ShapeError("projection: primaries not symmetric about the origin");
        if (!small_against(add(s.vel[0][k], s.vel[1][k], p), tol))
            throw ShapeError("projection: primary velocities not opposite");
    }
    if (!small_against(s.pos[0][2], tol) || !small_against(s.vel[0][2], tol))
        throw ShapeError("projection: primaries must move in the XY plane");
    if (!small_against(s.pos[2][0], tol) || !small_against(s.pos[2][1], tol) ||
        !small_against(s.vel[2][0], tol) || !small_against(s.vel[2][1], tol))
        throw ShapeError("projection: third body must stay on the Z axis");

    Ball mu = s.mass[0];
    Ball gm = scale2(mu, -2);                                    // GM* = mu/4
    Ball r2 = add(sqr(s.pos[0][0], p), sqr(s.pos[0][1], p), p);
    if (!r2.is_positive()) throw ShapeError("projection: primaries at the origin");
    Ball r = sqrt_ball(r2, p);
    Ball v2 = add(sqr(s.vel[0][0], p), sqr(s.vel[0][1], p), p);
    // vis-viva: 1/a = 2/r - v^2/GM*
    Ball inv_a = sub(div(Ball::from_long(2, p), r, p), div(v2, gm, p), p);
    if (!inv_a.is_positive())
        throw ShapeError("projection: primary orbit not elliptic");
    Ball a = div(Ball::from_long(1, p), inv_a, p);
    // angular momentum: h = x vy - y vx ; e^2 = 1 - h^2/(GM* a)
    Ball h = sub(mul(s.pos[0][0], s.vel[0][1], p), mul(s.pos[0][1], s.vel[0][0], p), p);
    Ball e2 = sub(Ball::from_long(1, p), div(sqr(h, p), mul(gm, a, p), p), p);
    Real e2lo = e2.lower();
    Ball e_ball = e2.upper().sign() <= 0
                      ? Ball::exact_zero()
                      : (e2lo.sign() < 0
                             ? sqrt_ball(intersect_interval(e2, Real(p), abs_upper(e2), p), p)
                             : sqrt_ball(e2, p));

    Ball E;
    Ball two_pi = scale2(Ball::pi(p), 1);
    if (e_ball.contains_zero()) {
        // circular convention: E is the polar angle of primary 1
        E = atan2_ball(s.pos[0][1], s.pos[0][0], p);
        if (E.center().sign() < 0) E = add(E, two_pi, p);
    } else {
        // cos E = (1 - r/a)/e, quadrant fixed by the radial velocity sign
        Ball cosE = div(sub(Ball::from_long(1, p), div(r, a, p), p), e_ball, p);
        cosE = intersect_interval(cosE, Real::from_long(-1, p), Real::from_long(1, p), p);
        Real alo(p), ahi(p);
        mpfr_acos(alo.raw(), cosE.upper().raw(), MPFR_RNDD);
        mpfr_acos(ahi.raw(), cosE.lower().raw(), MPFR_RNDU);
        E = Ball::from_endpoints(alo, ahi, p);
        Ball rdot = add(mul(s.pos[0][0], s.vel[0][0], p), mul(s.pos[0][1], s.vel[0][1], p), p);
        if (rdot.is_negative()) {
            E = sub(two_pi, E, p);                               // sin E < 0 branch
        } else if (!rdot.is_positive() && !rdot.center().is_zero()) {
            // sign genuinely undetermined away from the axis turning points
            Ball sinE = sin_ball(E, p);
            if (!sinE.contains_zero())
                throw ShapeError("projection: anomaly quadrant undetermined");
        }
    }

    return SitnikovState{a, e_ball, mu, s.pos[2][2], s.vel[2][2], E};
}

} // namespace sitlab
