#pragma once
#include <array>
#include <vector>

#include "sitlab/ball.hpp"
#include "sitlab/dynamics.hpp"

namespace sitlab {

/// Taylor coefficients of the Sitnikov flow around a state.
///
/// coeffs[k][i] is the degree-k coefficient of component i in the order
/// (a, e, mu, z, v, E); the constants only have a degree-0 entry.  The
/// recurrence propagates the auxiliary series cos E, sin E, rho = 1-e cos E,
/// 1/rho, w^2 and (w^2)^(-3/2) degree by degree, so evaluating order N costs
/// O(N^2) ball multiplications.
std::vector<std::array<Ball, 6>> sitnikov_series(const std::array<Ball, 6>& x0,
                                                 int order, Prec p);

/// Same for the three-body flow.  Component order:
/// (mu1, mu2, mu3, p1, p2, p3, v1, v2, v3) with each vector in x,y,z — 21
/// components, first three constant.
std::vector<std::array<Ball, 21>> three_body_series(const std::array<Ball, 21>& x0,
                                                    int order, Prec p);

/// Taylor coefficients of the evolving Sitnikov block (z, v, E) together
/// with the variational matrix M(t), M' = J M, M(0) = I, expanded around
/// the same base state.  Used by the coordinate-transformed (Lohner)
/// propagation of enclosure boxes.
struct SitnikovVariationalSeries {
    // state[k] = degree-k coefficients of (z, v, E)
    std::vector<std::array<Ball, 3>> state;
    // vari[k][i][j] = degree-k coefficient of M_ij, rows/cols over (z, v, E)
    std::vector<std::array<std::array<Ball, 3>, 3>> vari;
};
SitnikovVariationalSeries sitnikov_series_variational(const std::array<Ball, 6>& x0,
                                                      int order, Prec p);

/// Flow adapters used by the generic certified stepper.
struct SitnikovFlow {
    static constexpr int kDim = 6;
    static constexpr int kFirstEvolving = 3;
    using State = std::array<Ball, 6>;

    static std::vector<State> series(const State& x0, int order, Prec p) {
        return sitnikov_series(x0, order, p);
    }
    static State rhs(const State& x, Prec p) {
        return sitnikov_rhs(SitnikovState::from_array(x), p);
    }
};

struct ThreeBodyFlow {
    static constexpr int kDim = 21;
    static constexpr int kFirstEvolving = 3;
    using State = std::array<Ball, 21>;

    static std::vector<State> series(const State& x0, int order, Prec p) {
        return three_body_series(x0, order, p);
    }
    static State rhs(const State& x, Prec p);

    static State pack(const ThreeBodyState& s);
    static ThreeBodyState unpack(const State& x);
};

} // namespace sitlab
