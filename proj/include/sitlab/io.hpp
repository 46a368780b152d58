#pragma once
#include <string>
#include <vector>

#include "sitlab/analysis.hpp"
#include "sitlab/integrator.hpp"
#include "sitlab/kepler.hpp"
#include "sitlab/symbolic.hpp"

namespace sitlab {

/// Exact decimal string of a dyadic floating value.  "0" for zero.
std::string real_decimal(const Real& v);

/// {"center": "...", "radius": "..."} with the center outward-compressed to
/// out_prec bits before exact printing, so files stay small and re-parse to
/// the identical value.
std::string ball_json(const Ball& b, Prec out_prec);

/// Parse {"a":"1.0","e":"0.1","mu":"1.0","phi":"0.0"}; unknown fields are
/// rejected, all values parsed exactly.
OrbitParams orbit_from_json(const std::string& text);
OrbitParams orbit_from_file(const std::string& path);

std::string state_json(const CertifiedState& st, Prec out_prec);
std::string samples_csv(const SampledTrajectory& s, Prec out_prec);
std::string roots_json(const RootList& r, Prec out_prec);
std::string sequence_json(const SymbolSequence& seq, Prec out_prec);
std::string recovery_json(const SymbolSequence& seq, const RecoveryConfig& cfg,
                          const SampledTrajectory& samples,
                          const std::vector<SignClass>& classes, Prec out_prec);
std::string enumeration_json(const Enumeration& en);
std::string probe_csv(const std::vector<ProbeRecord>& recs, bool with_timing);
std::string lipschitz_json(const LipschitzBound& L);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

} // namespace sitlab
