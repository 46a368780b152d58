#pragma once
#include <array>
#include <string>

#include "sitlab/ball.hpp"
#include "sitlab/rational.hpp"

namespace sitlab {

/// A dyadic approximation handed out by an oracle: value = mantissa * 2^exp,
/// with |value - true| <= guaranteed_error <= 2^(-requested bits).
struct DyadicApprox {
    Dyadic value;
    Dyadic guaranteed_error;

    Ball to_ball() const { return Ball::from_dyadic_approx(value, guaranteed_error); }
};

/// A real number accessible only through finite-precision queries.
///
/// Three kinds: exact rationals, square roots of nonnegative rationals
/// (genuinely infinite digit streams), and dyadic literals.  Oracles are
/// immutable after construction; malformed specs fail at construction,
/// never at query time.
class RealOracle {
public:
    enum class Kind { ExactRational, SqrtRational, DyadicLiteral };

    static RealOracle exact_rational(Rational q, std::string label = {});
    static RealOracle sqrt_rational(Rational q, std::string label = {});   // q >= 0
    static RealOracle dyadic_literal(Dyadic d, std::string label = {});

    /// Parse a tagged spec string:
    ///   rational:<int>[/<uint>]     e.g.  rational:-1/3
    ///   sqrt:<uint>[/<uint>]        e.g.  sqrt:2/1
    ///   dyadic:[-]bits[.bits][b]    e.g.  dyadic:0.101b   (binary point)
    static RealOracle parse(const std::string& spec);

    Kind kind() const { return kind_; }
    const std::string& label() const { return label_; }

    /// Dyadic approximation with guaranteed_error <= 2^(-bits).
    /// Deterministic: identical queries return identical results.
    DyadicApprox query(long bits) const;

    /// True when the oracle's value is exactly zero.
    bool is_exact_zero() const;

private:
    RealOracle(Kind k, Rational q, std::string label)
        : kind_(k), q_(std::move(q)), label_(std::move(label)) {}

    Kind kind_;
    Rational q_;           // the rational payload (radicand for sqrt)
    std::string label_;
};

/// Names for the six initial-value coordinates.
enum Coord : int { kCoordA = 0, kCoordE, kCoordMu, kCoordZ0, kCoordV0, kCoordPhi };
inline constexpr int kNumCoords = 6;
extern const std::array<const char*, kNumCoords> kCoordNames;

/// Audit trail of oracle reads for one integration run.
struct QueryLog {
    std::array<long, kNumCoords> max_bits{};
    long total_queries = 0;

    void record(Coord c, long bits) {
        if (bits > max_bits[c]) max_bits[c] = bits;
        ++total_queries;
    }
};

/// Exact maximum bits requested per coordinate; zeros for untouched ones.
std::array<long, kNumCoords> max_bits_requested(const QueryLog& log);

/// The six initial-value oracles of one problem instance.
struct OracleVector {
    std::array<RealOracle, kNumCoords> coords;

    /// Query every coordinate at `bits`, recording into `log`.
    std::array<Ball, kNumCoords> query_all(long bits, QueryLog& log) const;
};

} // namespace sitlab
