#include "sitlab/io.hpp"
#include "sitlab/errors.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace sitlab {

using ordered_json = nlohmann::ordered_json;

std::string real_decimal(const Real& v) {
    if (v.is_zero()) return "0";
    return v.to_dyadic().to_decimal();
}

namespace {

ordered_json ball_obj(const Ball& b, Prec out_prec) {
    Ball r = b.rounded(out_prec);
    return ordered_json{{"center", real_decimal(r.center())},
                        {"radius", real_decimal(r.radius())}};
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

} // namespace

std::string ball_json(const Ball& b, Prec out_prec) { return dump(ball_obj(b, out_prec)); }

OrbitParams orbit_from_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& ex) {
        throw ParseError(std::string("orbit json: ") + ex.what());
    }
    if (!j.is_object()) throw ParseError("orbit json: expected an object");
    OrbitParams p;
    bool seen_a = false, seen_e = false, seen_mu = false, seen_phi = false;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        if (!it.value().is_string())
            throw ParseError("orbit json: field '" + key + "' must be a decimal string");
        std::string val = it.value().get<std::string>();
        if (key == "a") { p.a = Rational::from_string(val); seen_a = true; }
        else if (key == "e") { p.e = Rational::from_string(val); seen_e = true; }
        else if (key == "mu") { p.mu = Rational::from_string(val); seen_mu = true; }
        else if (key == "phi") { p.phi = Rational::from_string(val); seen_phi = true; }
        else throw ParseError("orbit json: unknown field '" + key + "'");
    }
    if (!seen_a || !seen_e || !seen_mu || !seen_phi)
        throw ParseError("orbit json: fields a, e, mu, phi are all required");
    p.validate();
    return p;
}

OrbitParams orbit_from_file(const std::string& path) {
    return orbit_from_json(read_file(path));
}

std::string state_json(const CertifiedState& st, Prec out_prec) {
    ordered_json j;
    j["t"] = st.t.to_fraction();
    j["a"] = ball_obj(st.x.a, out_prec);
    j["e"] = ball_obj(st.x.e, out_prec);
    j["mu"] = ball_obj(st.x.mu, out_prec);
    j["z"] = ball_obj(st.x.z, out_prec);
    j["v"] = ball_obj(st.x.v, out_prec);
    j["E"] = ball_obj(st.x.E, out_prec);
    ordered_json bits;
    auto mb = max_bits_requested(st.log);
    for (int i = 0; i < kNumCoords; ++i) bits[kCoordNames[i]] = mb[i];
    j["oracle_bits"] = bits;
    j["oracle_queries"] = st.log.total_queries;
    j["steps"] = st.stats.steps;
    j["attempts"] = st.stats.attempts;
    j["working_precision"] = static_cast<long>(st.stats.working_precision);
    return dump(j);
}

std::string samples_csv(const SampledTrajectory& s, Prec out_prec) {
    std::ostringstream os;
    os << "t,z_center,z_radius,v_center,v_radius,E_center,E_radius\n";
    for (const SamplePoint& sp : s.samples) {
        Ball z = sp.z.rounded(out_prec), v = sp.v.rounded(out_prec), E = sp.E.rounded(out_prec);
        os << sp.t.to_fraction() << ',' << real_decimal(z.center()) << ','
           << real_decimal(z.radius()) << ',' << real_decimal(v.center()) << ','
           << real_decimal(v.radius()) << ',' << real_decimal(E.center()) << ','
           << real_decimal(E.radius()) << '\n';
    }
    return os.str();
}

std::string roots_json(const RootList& r, Prec out_prec) {
    ordered_json j;
    j["count"] = r.roots.size();
    ordered_json arr = ordered_json::array();
    for (const Ball& b : r.roots) arr.push_back(ball_obj(b, out_prec));
    j["roots"] = arr;
    ordered_json bits;
    auto mb = max_bits_requested(r.log);
    for (int i = 0; i < kNumCoords; ++i) bits[kCoordNames[i]] = mb[i];
    j["oracle_bits"] = bits;
    return dump(j);
}

namespace {

ordered_json sequence_obj(const SymbolSequence& seq, Prec out_prec) {
    ordered_json j;
    j["m"] = seq.m;
    j["P"] = real_decimal(seq.P.rounded(out_prec).center());
    j["s"] = seq.s;
    return j;
}

} // namespace

std::string sequence_json(const SymbolSequence& seq, Prec out_prec) {
    return dump(sequence_obj(seq, out_prec));
}

std::string recovery_json(const SymbolSequence& seq, const RecoveryConfig& cfg,
                          const SampledTrajectory& samples,
                          const std::vector<SignClass>& classes, Prec out_prec) {
    ordered_json j = sequence_obj(seq, out_prec);
    j["delta"] = cfg.delta.to_fraction();
    j["eps"] = cfg.eps.to_fraction();
    j["h"] = real_decimal(cfg.h.rounded(out_prec).center());
    ordered_json trace = ordered_json::array();
    for (size_t i = 0; i < classes.size(); ++i) {
        Ball z = samples.samples[i].z.rounded(out_prec);
        trace.push_back(ordered_json{{"i", i + 1},
                                     {"t", samples.samples[i].t.to_fraction()},
                                     {"class", to_string(classes[i])},
                                     {"z_center", real_decimal(z.center())},
                                     {"z_radius", real_decimal(z.radius())}});
    }
    j["grid"] = trace;
    return dump(j);
}

std::string enumeration_json(const Enumeration& en) {
    ordered_json j;
    j["count"] = en.count();
    j["sequences"] = en.sequences;
    return dump(j);
}

std::string probe_csv(const std::vector<ProbeRecord>& recs, bool with_timing) {
    std::ostringstream os;
    os << "t,l,bits_z,bits_v,bits_phi,steps,wall_seconds\n";
    for (const ProbeRecord& r : recs) {
        os << r.t.to_fraction() << ',' << r.l << ',' << r.bits[kCoordZ0] << ','
           << r.bits[kCoordV0] << ',' << r.bits[kCoordPhi] << ',' << r.steps << ',';
        if (with_timing) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.6f", r.wall_seconds);
            os << buf;
        } else {
            os << "0.000000";
        }
        os << '\n';
    }
    return os.str();
}

std::string lipschitz_json(const LipschitzBound& L) {
    ordered_json j;
    j["L_upper"] = real_decimal(L.L);
    return dump(j);
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open for writing: " + path);
    f << content;
    if (!f) throw ParseError("write failed: " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open: " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

} // namespace sitlab
