#pragma once
#include <vector>

#include "sitlab/ball.hpp"
#include "sitlab/rational.hpp"

namespace sitlab {

/// Certified sign of a sampled z value: Positive/Negative only when the
/// enclosure excludes zero.
enum class SignClass { Positive, Negative, Undefined };

const char* to_string(SignClass c);

/// Recovered plane-crossing symbols s_1..s_k with the parameters they were
/// produced under.
struct SymbolSequence {
    long m = 0;
    Ball P;
    std::vector<long> s;
};

/// Parameters of one recovery run.  Invariants (checked by validate):
/// m even >= 2, delta < m P / 2, eps < h / 4 with h the amplitude floor
/// for gaps of m periods.
struct RecoveryConfig {
    long m = 2;
    Ball P;
    Rational delta;
    Rational eps;
    Ball h;

    void validate() const;
};

/// Classify one grid sample.  Precondition: the enclosure radius is at most
/// eps; wider input is a contract violation, not an Undefined answer.
SignClass classify(const Ball& zball, const Rational& eps);

/// Reconstruct the symbol sequence from grid classifications.
///
/// Crossings are located between adjacent opposite-sign nodes, or across a
/// single Undefined node separating opposite signs; an Undefined node
/// between same-sign nodes joins the run.  Each gap between consecutive
/// crossing windows is decoded to the unique even symbol >= m whose period
/// cell meets the certified gap interval; zero or multiple candidates raise
/// InconsistencyError, as do two Undefined nodes in a row.  A trailing run
/// with no closing crossing is discarded.  An all-Undefined grid (the
/// equilibrium trajectory) yields the empty sequence.
SymbolSequence recover_sequence(const std::vector<SignClass>& classes,
                                const RecoveryConfig& cfg);

/// Certified enclosure of (m/2+1)^(T/((m+1)P)).
Ball count_lower_bound(const Rational& T, long m, const Ball& P, Prec p);

/// Exact enumeration of the admissible symbol sequences: even entries
/// s_i >= m whose crossings necessarily fit inside [0, T], including the
/// empty sequence.  Membership uses the worst-case packing
/// sum (s_i + 1) P < T.  Output is in lexicographic order.
struct Enumeration {
    std::vector<std::vector<long>> sequences;
    long count() const { return static_cast<long>(sequences.size()); }
};

/// T expressed as an exact multiple kappa of the period (exact arithmetic,
/// no Ball comparisons needed).
Enumeration enumerate_sequences_periods(const Rational& kappa, long m,
                                        long budget = 2000000);

/// T as an absolute rational time; comparisons against multiples of the
/// period ball must be decidable, otherwise a ResourceError suggests the
/// period-multiple interface.
Enumeration enumerate_sequences(const Rational& T, long m, const Ball& P,
                                long budget = 2000000);

} // namespace sitlab
