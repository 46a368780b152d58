#pragma once
#include <vector>

#include "sitlab/dynamics.hpp"
#include "sitlab/oracle.hpp"
#include "sitlab/series.hpp"

namespace sitlab {

/// Knobs of the certified solver.
///
/// eps = 2^-eps_exp is the radius every output enclosure must reach.
/// Working precision starts at eps_exp + 64 bits; every failed
/// certification attempt doubles both the working precision and the oracle
/// request until precision_cap/max_attempts run out.
struct IntegratorConfig {
    long eps_exp = 30;
    Rational max_step = Rational(1, 2);
    int order = 20;                  // Taylor order, >= 2
    long max_steps = 1000000;
    Prec precision_cap = 65536;      // 2^16-bit ceiling
    int max_attempts = 10;
    bool debug_gronwall = false;     // per-step growth assertion

    Rational eps() const { return Rational::pow2(-eps_exp); }
};

struct WorkStats {
    long steps = 0;
    Prec working_precision = 0;
    int attempts = 0;
    long oracle_bits = 0;            // bits requested on the final attempt
};

/// Output of `integrate`: six certified enclosures at time t plus the
/// oracle audit trail and work accounting.
struct CertifiedState {
    SitnikovState x;
    Rational t;
    QueryLog log;
    WorkStats stats;
};

/// Local Taylor model of the evolving block (z, v, E) on [t0, t0+h]:
/// coefficients are valid for every trajectory entering the step, the
/// remainder is the order-N coefficient over the step enclosure, so
/// y(t0+s) lies in sum poly[d] s^d + rem s^N for s in [0, h].
struct StepModel {
    Rational t0;
    Rational h;
    std::vector<std::array<Ball, 3>> poly;
    std::array<Ball, 3> rem;
};

struct Trajectory {
    std::vector<StepModel> models;
    CertifiedState end;
    std::array<Ball, 6> initial;
    Prec prec = 0;

    /// Enclosure of (z, v, E) at a rational time in [0, T].
    std::array<Ball, 3> eval(const Rational& t) const;
    /// Enclosure of (z, v, E) over a closed rational time interval.
    std::array<Ball, 3> eval_range(const Rational& ta, const Rational& tb) const;
};

/// Solve the Sitnikov initial value problem from oracle initial data with
/// every output radius certified <= 2^-eps_exp.
CertifiedState integrate(const OracleVector& x0, const Rational& t, const IntegratorConfig& cfg);

/// Same run, but keeps the per-step Taylor models for later evaluation.
Trajectory integrate_trajectory(const OracleVector& x0, const Rational& T,
                                const IntegratorConfig& cfg);

struct GridSpec {
    Rational T;
    Rational delta;
};
struct SamplePoint {
    Rational t;
    Ball z, v, E;
};
struct SampledTrajectory {
    std::vector<SamplePoint> samples;
    QueryLog log;
    WorkStats stats;
    std::array<Ball, 6> initial;
};

/// z (and v, E) enclosures on the uniform grid t_i = i delta, 0 < i <= T/delta,
/// all against the same oracles with one cumulative query log.
SampledTrajectory sample_trajectory(const OracleVector& x0, const GridSpec& grid,
                                    const IntegratorConfig& cfg);

struct RootList {
    std::vector<Ball> roots;   // tau_0 = 0 included
    QueryLog log;
    WorkStats stats;
    Trajectory trajectory;     // the certified run the roots were isolated on
};

/// Certified enclosures of all sign changes of z on (0, T], each of width
/// <= 2^-eps_exp.  Requires the z0 oracle to be exactly zero.
RootList find_roots(const OracleVector& x0, const Rational& T, const IntegratorConfig& cfg);

/// Certified three-body integration from ball initial data (the reduction
/// cross-check path).  Records enclosures at the requested times.
struct ThreeBodyRun {
    std::vector<std::array<Ball, 21>> at_times;
    std::array<Ball, 21> end;
    WorkStats stats;
};
ThreeBodyRun integrate_three_body(const std::array<Ball, 21>& x0, const Rational& T,
                                  const std::vector<Rational>& record_at,
                                  const IntegratorConfig& cfg);

} // namespace sitlab
