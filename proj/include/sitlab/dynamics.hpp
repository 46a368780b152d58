#pragma once
#include <array>

#include "sitlab/ball.hpp"
#include "sitlab/kepler.hpp"

namespace sitlab {

/// Six-component Sitnikov state (a, e, mu, z, v, E).  The first three are
/// constants of motion carried in the state vector; z and v are the third
/// body's coordinate and velocity on the Z axis, E the primaries' eccentric
/// anomaly.
struct SitnikovState {
    Ball a, e, mu, z, v, E;

    std::array<Ball, 6> to_array() const { return {a, e, mu, z, v, E}; }
    static SitnikovState from_array(const std::array<Ball, 6>& x) {
        return SitnikovState{x[0], x[1], x[2], x[3], x[4], x[5]};
    }
};

/// Full three-body state: three gravitational parameters, positions and
/// velocities in R^3 (21 components).
struct ThreeBodyState {
    std::array<Ball, 3> mass;                   // mu_1, mu_2, mu_3
    std::array<std::array<Ball, 3>, 3> pos;
    std::array<std::array<Ball, 3>, 3> vel;
};

/// Certified global bound on the row-sum norm of the Sitnikov Jacobian
/// for fixed orbit constants.
struct LipschitzBound {
    Real L;   // upper bound, rounded up
};

/// Right-hand side of the Sitnikov system:
///   (0, 0, 0, v, zdd, Edot)
///   zdd  = -2 mu z / (z^2 + a^2 (1 - e cos E)^2)^(3/2)
///   Edot = sqrt(mu/a^3) / (1 - e cos E)
/// The Edot rate keeps the Kepler relation exact along the flow.
std::array<Ball, 6> sitnikov_rhs(const SitnikovState& x, Prec p);

/// 6x6 Jacobian of sitnikov_rhs with respect to the state, zero rows for
/// the constants.  The nonzero entries are
///   d(zdot)/dv, d(zdd)/dz, d(zdd)/dE, d(Edot)/dE.
std::array<std::array<Ball, 6>, 6> sitnikov_jacobian(const SitnikovState& x, Prec p);

/// Closed-form certified supremum of the Jacobian row-sum norm over the
/// whole (z, v, E) domain.  Finite for 0 <= e < 1; diverges as e -> 1.
LipschitzBound lipschitz_bound(const OrbitParams& params, Prec p);

/// N=3 gravitational right-hand side: 18 derivative components
/// (3 velocity vectors, then 3 acceleration vectors).
/// Throws DomainError when a pairwise distance cannot be certified nonzero.
struct ThreeBodyDerivative {
    std::array<std::array<Ball, 3>, 3> dpos;
    std::array<std::array<Ball, 3>, 3> dvel;
};
ThreeBodyDerivative nbody_rhs(const ThreeBodyState& s, Prec p);

/// The reduction map G: place the primaries on their ellipse at eccentric
/// anomaly x.E with the two-body closed-form velocities, the third body at
/// (0,0,z) with velocity (0,0,v).
ThreeBodyState embed_three_body(const OrbitParams& params, const SitnikovState& x, Prec p);

/// The inverse map H: recover (a,e,mu,z,v,E) from an embedded state.
/// Throws ShapeError when the configuration is not of Sitnikov type within
/// the relative tolerance (default 2^-40).
struct ProjectOptions {
    Rational rel_tol = Rational::pow2(-40);
};
SitnikovState project_sitnikov(const ThreeBodyState& s, Prec p,
                               const ProjectOptions& opt = ProjectOptions{});

} // namespace sitlab
