// sitlab — certified Sitnikov problem laboratory.
//
// Subcommands: integrate, sample, roots, recover, count, probe, lipschitz,
// embed-check.  All numeric inputs are exact strings (decimals or p/q
// fractions); outputs are canonical JSON/CSV with exact decimal fields.
// Exit codes: 0 ok, 2 parse error, 3 domain error, 4 resource exhausted,
// 5 inconsistent grid data.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sitlab/analysis.hpp"
#include "sitlab/dynamics.hpp"
#include "sitlab/errors.hpp"
#include "sitlab/integrator.hpp"
#include "sitlab/io.hpp"
#include "sitlab/kepler.hpp"
#include "sitlab/symbolic.hpp"

namespace {

using namespace sitlab;

struct CommonArgs {
    std::string orbit_path;
    std::string out_path;
    std::string z0_spec = "rational:0/1";
    std::string v0_spec;
    std::string phi_spec;
    long eps_exp = 30;
    long budget_steps = 1000000;
    long budget_bits = 65536;
};

void emit(const CommonArgs& c, const std::string& content) {
    if (c.out_path.empty()) {
        std::cout << content;
    } else {
        write_file(c.out_path, content);
    }
}

OrbitParams load_orbit(const CommonArgs& c) {
    if (c.orbit_path.empty()) throw ParseError("--orbit is required");
    return orbit_from_file(c.orbit_path);
}

OracleVector make_oracles(const CommonArgs& c, const OrbitParams& orbit) {
    if (c.v0_spec.empty()) throw ParseError("--v0 oracle spec is required");
    std::string phi = c.phi_spec.empty()
                          ? "rational:" + orbit.phi.to_fraction()
                          : c.phi_spec;
    return OracleVector{{RealOracle::exact_rational(orbit.a, "a"),
                         RealOracle::exact_rational(orbit.e, "e"),
                         RealOracle::exact_rational(orbit.mu, "mu"),
                         RealOracle::parse(c.z0_spec),
                         RealOracle::parse(c.v0_spec),
                         RealOracle::parse(phi)}};
}

IntegratorConfig make_config(const CommonArgs& c) {
    IntegratorConfig cfg;
    cfg.eps_exp = c.eps_exp;
    cfg.max_steps = c.budget_steps;
    cfg.precision_cap = static_cast<Prec>(c.budget_bits);
    return cfg;
}

Prec out_prec(long eps_exp) { return static_cast<Prec>(std::max(64l, eps_exp + 16)); }

// T given either directly or as a multiple of the period
Rational resolve_T(const std::optional<std::string>& t_str,
                   const std::optional<std::string>& t_periods,
                   const OrbitParams& orbit) {
    if (t_str && t_periods) throw ParseError("give either --T or --T-periods, not both");
    if (t_str) return Rational::from_string(*t_str);
    if (!t_periods) throw ParseError("one of --T / --T-periods is required");
    Rational k = Rational::from_string(*t_periods);
    // rational upper bound of k * P, exact in dyadic form
    Ball P = period(orbit, 192);
    Rational p_hi = P.upper().to_dyadic().to_rational();
    return k * p_hi;
}

void add_common(CLI::App* cmd, CommonArgs& c, bool with_oracles = true) {
    cmd->add_option("--orbit", c.orbit_path, "orbit parameter JSON file");
    cmd->add_option("--out", c.out_path, "output path (default: stdout)");
    cmd->add_option("--eps-exp", c.eps_exp, "certify radii below 2^-eps-exp");
    cmd->add_option("--budget-steps", c.budget_steps, "integration step budget");
    cmd->add_option("--budget-bits", c.budget_bits, "working precision ceiling in bits");
    if (with_oracles) {
        cmd->add_option("--z0", c.z0_spec, "z0 oracle spec (default rational:0/1)");
        cmd->add_option("--v0", c.v0_spec, "v0 oracle spec");
        cmd->add_option("--phi", c.phi_spec, "phi oracle spec (default: orbit file phi)");
    }
}

int dispatch(int argc, char** argv) {
    CLI::App app{"certified Sitnikov initial-value laboratory"};
    app.require_subcommand(1);

    CommonArgs ci;
    std::string t_str;
    auto* integrate_cmd = app.add_subcommand("integrate", "certified state at time t");
    add_common(integrate_cmd, ci);
    integrate_cmd->add_option("--t", t_str, "target time (exact rational)")->required();

    CommonArgs cs;
    std::optional<std::string> sample_T, sample_Tp;
    std::string delta_str;
    auto* sample_cmd = app.add_subcommand("sample", "z enclosures on a uniform grid");
    add_common(sample_cmd, cs);
    sample_cmd->add_option("--T", sample_T, "grid horizon (exact rational)");
    sample_cmd->add_option("--T-periods", sample_Tp, "horizon as a multiple of the period");
    sample_cmd->add_option("--delta", delta_str, "grid step (exact rational)")->required();

    CommonArgs cr;
    std::optional<std::string> roots_T, roots_Tp;
    auto* roots_cmd = app.add_subcommand("roots", "certified plane crossings on (0, T]");
    add_common(roots_cmd, cr);
    roots_cmd->add_option("--T", roots_T, "horizon (exact rational)");
    roots_cmd->add_option("--T-periods", roots_Tp, "horizon as a multiple of the period");

    CommonArgs cv;
    std::optional<std::string> rec_T, rec_Tp, rec_delta;
    long rec_m = 2;
    std::string safety_str = "1/2";
    auto* recover_cmd = app.add_subcommand("recover", "symbol sequence from coarse samples");
    add_common(recover_cmd, cv);
    recover_cmd->add_option("--T", rec_T, "horizon (exact rational)");
    recover_cmd->add_option("--T-periods", rec_Tp, "horizon as a multiple of the period");
    recover_cmd->add_option("--m", rec_m, "even symbol floor m >= 2");
    recover_cmd->add_option("--safety", safety_str, "strict margin factor in (0,1)");
    recover_cmd->add_option("--delta", rec_delta, "grid step override (must be < m P/2)");

    CommonArgs cc;
    std::optional<std::string> cnt_T, cnt_Tp;
    long cnt_m = 2;
    long cnt_budget = 2000000;
    auto* count_cmd = app.add_subcommand("count", "enumerate admissible symbol sequences");
    add_common(count_cmd, cc, false);
    count_cmd->add_option("--T", cnt_T, "horizon (exact rational)");
    count_cmd->add_option("--T-periods", cnt_Tp, "horizon as a multiple of the period");
    count_cmd->add_option("--m", cnt_m, "even symbol floor m >= 2");
    count_cmd->add_option("--budget", cnt_budget, "enumeration budget");

    CommonArgs cp;
    std::string probe_ts;
    bool no_timing = false;
    auto* probe_cmd = app.add_subcommand("probe", "oracle-bit cost at increasing horizons");
    add_common(probe_cmd, cp);
    probe_cmd->add_option("--t", probe_ts, "comma-separated ascending times")->required();
    probe_cmd->add_flag("--no-timing", no_timing, "zero the wall_seconds column");

    CommonArgs cl;
    auto* lip_cmd = app.add_subcommand("lipschitz", "global Jacobian norm bound");
    add_common(lip_cmd, cl, false);

    CommonArgs ce;
    std::string ec_z = "0", ec_v = "0";
    auto* embed_cmd = app.add_subcommand("embed-check", "three-body embedding round trip");
    add_common(embed_cmd, ce, false);
    embed_cmd->add_option("--z", ec_z, "third-body coordinate (exact rational)");
    embed_cmd->add_option("--v", ec_v, "third-body velocity (exact rational)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);   // --help
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    }

    if (integrate_cmd->parsed()) {
        OrbitParams orbit = load_orbit(ci);
        CertifiedState st = integrate(make_oracles(ci, orbit), Rational::from_string(t_str),
                                      make_config(ci));
        emit(ci, state_json(st, out_prec(ci.eps_exp)));
    } else if (sample_cmd->parsed()) {
        OrbitParams orbit = load_orbit(cs);
        GridSpec grid{resolve_T(sample_T, sample_Tp, orbit), Rational::from_string(delta_str)};
        auto s = sample_trajectory(make_oracles(cs, orbit), grid, make_config(cs));
        emit(cs, samples_csv(s, out_prec(cs.eps_exp)));
    } else if (roots_cmd->parsed()) {
        OrbitParams orbit = load_orbit(cr);
        auto r = find_roots(make_oracles(cr, orbit), resolve_T(roots_T, roots_Tp, orbit),
                            make_config(cr));
        emit(cr, roots_json(r, out_prec(cr.eps_exp)));
    } else if (recover_cmd->parsed()) {
        OrbitParams orbit = load_orbit(cv);
        Rational T = resolve_T(rec_T, rec_Tp, orbit);
        RecoveryConfig rc = recovery_params(rec_m, orbit, Rational::from_string(safety_str),
                                            192);
        if (rec_delta) {
            Rational d = Rational::from_string(*rec_delta);
            Rational cap = Rational(rec_m) *
                           rc.P.lower().to_dyadic().to_rational() / Rational(2);
            if (!(d > Rational(0)) || !(d < cap))
                throw ParseError("--delta must satisfy 0 < delta < m P / 2");
            rc.delta = d;
        }
        IntegratorConfig cfg = make_config(cv);
        long l = 1;
        while (Rational::pow2(-l) >= rc.eps) ++l;
        cfg.eps_exp = std::max(cfg.eps_exp, l);
        auto samples = sample_trajectory(make_oracles(cv, orbit), GridSpec{T, rc.delta}, cfg);
        std::vector<SignClass> classes;
        classes.reserve(samples.samples.size());
        for (const auto& sp : samples.samples) classes.push_back(classify(sp.z, rc.eps));
        SymbolSequence seq = recover_sequence(classes, rc);
        emit(cv, recovery_json(seq, rc, samples, classes, out_prec(cfg.eps_exp)));
    } else if (count_cmd->parsed()) {
        Enumeration en;
        if (cnt_Tp) {
            en = enumerate_sequences_periods(Rational::from_string(*cnt_Tp), cnt_m, cnt_budget);
        } else if (cnt_T) {
            OrbitParams orbit = load_orbit(cc);
            Ball P = period(orbit, 256);
            en = enumerate_sequences(Rational::from_string(*cnt_T), cnt_m, P, cnt_budget);
        } else {
            throw ParseError("count: one of --T / --T-periods is required");
        }
        emit(cc, enumeration_json(en));
    } else if (probe_cmd->parsed()) {
        OrbitParams orbit = load_orbit(cp);
        std::vector<Rational> ts;
        std::string cur;
        for (char ch : probe_ts + ",") {
            if (ch == ',') {
                if (!cur.empty()) ts.push_back(Rational::from_string(cur));
                cur.clear();
            } else {
                cur += ch;
            }
        }
        if (ts.empty()) throw ParseError("probe: empty time list");
        auto recs = probe_complexity(make_oracles(cp, orbit), ts, cp.eps_exp, make_config(cp));
        emit(cp, probe_csv(recs, !no_timing));
    } else if (lip_cmd->parsed()) {
        OrbitParams orbit = load_orbit(cl);
        emit(cl, lipschitz_json(lipschitz_bound(orbit, 192)));
    } else if (embed_cmd->parsed()) {
        OrbitParams orbit = load_orbit(ce);
        const Prec p = 192;
        SitnikovState x{Ball::from_rational(orbit.a, p), Ball::from_rational(orbit.e, p),
                        Ball::from_rational(orbit.mu, p),
                        Ball::from_rational(Rational::from_string(ec_z), p),
                        Ball::from_rational(Rational::from_string(ec_v), p),
                        Ball::from_rational(orbit.phi, p)};
        ThreeBodyState s = embed_three_body(orbit, x, p);
        SitnikovState back = project_sitnikov(s, p);
        auto residual = [&](const Ball& got, const Rational& want) {
            Ball diff = sub(got, Ball::from_rational(want, p), p);
            return real_decimal(abs_upper(diff));
        };
        std::string body = std::string("{\n") +
            "  \"a_residual\": \"" + residual(back.a, orbit.a) + "\",\n" +
            "  \"e_residual\": \"" + residual(back.e, orbit.e) + "\",\n" +
            "  \"mu_residual\": \"" + residual(back.mu, orbit.mu) + "\",\n" +
            "  \"z_residual\": \"" + residual(back.z, Rational::from_string(ec_z)) + "\",\n" +
            "  \"v_residual\": \"" + residual(back.v, Rational::from_string(ec_v)) + "\",\n" +
            "  \"E_residual\": \"" + residual(back.E, orbit.phi) + "\"\n}\n";
        emit(ce, body);
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const sitlab::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return sitlab::kExitParse;
    } catch (const sitlab::InconsistencyError& e) {
        std::cerr << "inconsistency: " << e.what() << "\n";
        return sitlab::kExitInconsistency;
    } catch (const sitlab::ResourceError& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return sitlab::kExitResource;
    } catch (const sitlab::DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return sitlab::kExitDomain;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return sitlab::kExitFailure;
    }
}
