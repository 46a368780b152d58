#pragma once
#include <vector>

#include "sitlab/integrator.hpp"
#include "sitlab/kepler.hpp"
#include "sitlab/symbolic.hpp"

namespace sitlab {

/// Amplitude floor between roots separated by tau:
/// H(tau) = sqrt((2 mu tau^2 / pi^2)^(2/3) - a^2).
/// Throws DomainError ("gap below Sturm threshold") when the radicand is
/// not certified nonnegative.
Ball sturm_bound(const Ball& tau, const OrbitParams& params, Prec p);

/// Comparison oscillator frequency q = 2 mu / (h^2 + a^2)^(3/2); by
/// construction pi/sqrt(q(H(tau))) = tau.
Ball oscillator_freq(const Ball& h, const OrbitParams& params, Prec p);

/// Chord-property check on one sampled excursion between two certified
/// roots: the time fraction with |z| > h/4 must exceed 3/4 strictly.
/// Counting is one-sided: a node contributes only when |z| > h/4 is
/// certified, so "holds" verdicts are conservative.
struct ChordVerdict {
    bool holds = false;
    Ball fraction;          // measured span / gap
    Rational span;          // certified span with |z| > h/4
    Ball gap;               // tau_b - tau_a
};
ChordVerdict verify_chord_property(const std::vector<SamplePoint>& arc, const Ball& h,
                                   const Ball& tau_a, const Ball& tau_b, Prec p);

/// Theorem-conformant recovery parameters for symbol recovery with margin:
/// delta = safety * m P / 2 (rounded down to denominator 4096) and the
/// smallest l with 2^-l < safety * H(mP) / 4.
RecoveryConfig recovery_params(long m, const OrbitParams& params, const Rational& safety,
                               Prec p);

/// One measurement of the oracle-bit cost of integrating to (t, 2^-l).
struct ProbeRecord {
    Rational t;
    long l = 0;
    std::array<long, kNumCoords> bits{};
    long steps = 0;
    int attempts = 0;
    Prec working_precision = 0;
    double wall_seconds = 0;
};

/// Fresh integration per entry; deterministic apart from wall_seconds.
std::vector<ProbeRecord> probe_complexity(const OracleVector& x0,
                                          const std::vector<Rational>& t_list, long l,
                                          const IntegratorConfig& cfg);

} // namespace sitlab
