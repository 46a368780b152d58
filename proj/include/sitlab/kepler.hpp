#pragma once
#include "sitlab/ball.hpp"
#include "sitlab/rational.hpp"

namespace sitlab {

/// Two-body ellipse constants: semimajor axis a, eccentricity e,
/// gravitational parameter of one primary mu, and the eccentric anomaly
/// phi = E(0) fixing the phase.  All exact rationals; e = 0 is admitted as
/// a degenerate (circular) configuration used by the conservation checks.
struct OrbitParams {
    Rational a;
    Rational e;
    Rational mu;
    Rational phi;

    /// Throws DomainError unless a > 0, mu > 0, 0 <= e < 1, 0 <= phi < 2*pi.
    void validate() const;
};

/// Eccentric anomaly with a certified error radius.
struct Anomaly {
    Ball E;
};

/// Orbital period 2*pi*sqrt(a^3/mu) as a certified enclosure.
Ball period(const OrbitParams& params, Prec p);

/// Mean motion sqrt(mu/a^3).
Ball mean_motion(const OrbitParams& params, Prec p);

/// Epoch t0 with E(t0-phase) ... derived from phi so that E(0) = phi:
/// t0 = -(phi - e sin phi) / sqrt(mu/a^3).
Ball epoch(const OrbitParams& params, Prec p);

/// Mean anomaly M(t) = sqrt(mu/a^3) (t - t0) = sqrt(mu/a^3) t + (phi - e sin phi).
Ball mean_anomaly(const OrbitParams& params, const Rational& t, Prec p);
Ball mean_anomaly(const OrbitParams& params, const Ball& t, Prec p);

/// Solve E - e sin E = M for the unique root (0 <= e < 1).
///
/// Newton iteration seeded at M + e sin M with bisection fallback on
/// [M - e, M + e]; the result is certified by a residual enclosure:
/// |E - e sin E - M| <= tol, error radius <= tol/(1 - e).
Anomaly solve_eccentric_anomaly(const Rational& e, const Ball& M, const Rational& tol);

/// Primary's distance from the barycenter, r = a (1 - e cos E).
/// The enclosure lies within [a(1-e), a(1+e)] up to outward rounding.
Ball orbit_radius(const OrbitParams& params, const Anomaly& anomaly, Prec p);

} // namespace sitlab
