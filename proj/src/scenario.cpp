#include "flatlab/scenario.hpp"

#include "flatlab/dbar.hpp"
#include "flatlab/error.hpp"
#include "flatlab/family.hpp"
#include "flatlab/jump.hpp"
#include "flatlab/simd.hpp"
#include "flatlab/theta.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#ifndef FLATLAB_DEFAULT_EXAMPLES
#define FLATLAB_DEFAULT_EXAMPLES "scenarios"
#endif

namespace flatlab::scenario {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
using cplx = std::complex<double>;

json num(double x) {
    if (std::isfinite(x)) return x;
    return std::isnan(x) ? json("nan") : json(x > 0 ? "inf" : "-inf");
}

json cjson(cplx z) { return json::array({num(z.real()), num(z.imag())}); }

cplx cfrom(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
    throw Error(ErrorKind::Schema, "complex value must be a number or [re, im]");
}

template <class T>
T get_or(const json& j, const char* key, T dflt) {
    return j.contains(key) ? j.at(key).get<T>() : dflt;
}

// Collects verdicts and applies threshold overrides.
class Judge {
public:
    Judge(const json& scenario, const RunOptions& opt) : opt_(opt) {
        if (scenario.contains("tolerances")) overrides_ = scenario.at("tolerances");
    }

    // tolerance-type upper bound: measured < threshold
    void below(const std::string& name, double measured, double threshold) {
        add(name, measured, pick(name, threshold), "<");
    }
    // tolerance-type lower bound: measured >= -threshold
    void above_neg(const std::string& name, double measured, double threshold) {
        add(name, measured, -pick(name, threshold), ">=");
    }
    // fixed comparisons (counts, orders, bounds from theory)
    void at_most(const std::string& name, double measured, double threshold) { add(name, measured, fixed(name, threshold), "<="); }
    void at_least(const std::string& name, double measured, double threshold) { add(name, measured, fixed(name, threshold), ">="); }
    void count_zero(const std::string& name, double measured) { add(name, measured, fixed(name, 0.0), "<="); }

    std::vector<Verdict> take() { return std::move(v_); }

private:
    double pick(const std::string& name, double dflt) const {
        if (overrides_.is_object() && overrides_.contains(name)) return overrides_.at(name).get<double>();
        if (opt_.tol) return *opt_.tol;
        return dflt;
    }
    double fixed(const std::string& name, double dflt) const {
        if (overrides_.is_object() && overrides_.contains(name)) return overrides_.at(name).get<double>();
        return dflt;
    }
    void add(const std::string& name, double m, double t, const std::string& rel) {
        bool pass = false;
        if (std::isfinite(m) || std::isinf(m)) {
            if (rel == "<") pass = m < t;
            else if (rel == "<=") pass = m <= t;
            else if (rel == ">=") pass = m >= t;
            else pass = m > t;
        }
        v_.push_back({name, m, t, rel, pass});
    }

    const RunOptions& opt_;
    json overrides_;
    std::vector<Verdict> v_;
};

struct Context {
    const json& payload;
    const std::string mode;
    const RunOptions& opt;
    const std::string dir;
    std::uint64_t seed;
    Judge& judge;
    json results = json::object();
    json table;
    json provenance = json::object();
};

// ---------------------------------------------------------------- cech

void run_cech(Context& c) {
    const cech::Datum d = resolve_datum(c.payload.at("datum"), c.dir);
    cech::require_valid(d);
    const double tol = get_or(c.payload, "rank_tol", kDefaultRankTol);
    const int top = d.top_dim();
    json counts = json::array();
    for (int nu = 0; nu <= top; ++nu) counts.push_back(d.count(nu));
    c.results["simplex_counts"] = counts;
    const long chi = cech::euler_characteristic(d);
    c.results["euler_characteristic"] = chi;
    c.provenance["rank_tol"] = tol;

    auto euler_of = [&](const std::vector<std::size_t>& dims) {
        long s = 0;
        for (std::size_t p = 0; p < dims.size(); ++p) s += (p % 2 ? -1 : 1) * static_cast<long>(dims[p]);
        return s;
    };
    double composite = 0.0;
    auto composite_check = [&](const cech::Character& g) {
        for (int nu = 0; nu + 1 < top; ++nu) {
            const MatrixXcd a = cech::coboundary(d, g, nu), b = cech::coboundary(d, g, nu + 1);
            if (a.rows() && b.rows()) composite = std::max(composite, (b * a).cwiseAbs().maxCoeff());
        }
    };

    int euler_bad = 0, disagree = 0, expected_bad = 0;
    json per = json::array();
    const json chars = c.payload.value("characters", json::array());
    const json expected = c.payload.value("expected", json::array());
    for (std::size_t i = 0; i < chars.size(); ++i) {
        const cech::Character g = cech::character_from_json(d, chars[i]);
        std::vector<std::size_t> nd;
        for (int p = 0; p <= top; ++p) nd.push_back(cech::cohomology_dim(d, g, p, tol));
        json row = {{"character", cech::character_to_json(g)}, {"dims", nd}};
        std::optional<std::vector<std::size_t>> ed;
        try {
            const cech::ExactCharacter ge = cech::exact_character_from_json(d, chars[i]);
            std::vector<std::size_t> e;
            for (int p = 0; p <= top; ++p) e.push_back(cech::cohomology_dim_exact(d, ge, p));
            ed = e;
            row["dims_exact"] = e;
        } catch (const Error& err) {
            if (err.kind() != ErrorKind::Schema) throw;
            row["dims_exact"] = nullptr;
        }
        if (euler_of(nd) != chi) ++euler_bad;
        if (ed && (*ed != nd || euler_of(*ed) != chi)) ++disagree, euler_bad += euler_of(*ed) != chi;
        if (i < expected.size()) {
            const auto want = expected[i].get<std::vector<std::size_t>>();
            for (std::size_t p = 0; p < want.size(); ++p)
                if (p >= nd.size() || nd[p] != want[p]) ++expected_bad;
        }
        composite_check(g);
        per.push_back(row);
    }
    c.results["characters"] = per;

    const int nrand = get_or(c.payload, "random", 0);
    std::mt19937_64 rng(c.seed);
    int rand_bad = 0, rand_disagree = 0;
    std::set<std::vector<std::size_t>> seen;
    for (int i = 0; i < nrand; ++i) {
        const cech::ExactCharacter ge = cech::random_exact_character(d, rng);
        const cech::Character g = cech::to_numeric(d, ge);
        std::vector<std::size_t> e, nd;
        for (int p = 0; p <= top; ++p) {
            e.push_back(cech::cohomology_dim_exact(d, ge, p));
            nd.push_back(cech::cohomology_dim(d, g, p, tol));
        }
        if (euler_of(e) != chi || euler_of(nd) != chi) ++rand_bad;
        if (e != nd) ++rand_disagree;
        seen.insert(e);
        const cech::Character gn = cech::random_character(d, rng);
        std::vector<std::size_t> dn;
        for (int p = 0; p <= top; ++p) dn.push_back(cech::cohomology_dim(d, gn, p, tol));
        if (euler_of(dn) != chi) ++rand_bad;
        composite_check(gn);
    }
    if (nrand) {
        c.results["random_characters"] = nrand;
        json dims = json::array();
        for (const auto& s : seen) dims.push_back(s);
        c.results["random_dims_seen"] = dims;
    }
    c.results["max_composite_entry"] = composite;
    c.judge.count_zero("euler_identity_failures", euler_bad + rand_bad);
    c.judge.count_zero("exact_numeric_disagreements", disagree + rand_disagree);
    if (!expected.empty()) c.judge.count_zero("expected_dims_mismatches", expected_bad);
    c.judge.below("coboundary_composite", composite, 1e-10);
}

// ---------------------------------------------------------------- jump loci

void run_jump(Context& c) {
    const cech::Datum d = resolve_datum(c.payload.at("datum"), c.dir);
    cech::require_valid(d);
    const int p = get_or(c.payload, "p", 0);
    const cech::ExactCharacter g0 = c.payload.contains("gamma0") ? cech::exact_character_from_json(d, c.payload.at("gamma0"))
                                                                   : cech::trivial_character(d);
    const std::size_t samples = get_or<std::size_t>(c.payload, "samples", 100);
    const double budget = get_or(c.payload, "budget", 1e5);
    const jump::JumpReport r = jump::jump_report(d, p, g0, c.seed, samples, budget);
    c.results = jump::report_to_json(r);
    c.judge.count_zero("membership_disagreements", static_cast<double>(r.membership_disagreements));
    if (c.payload.contains("expected_generators")) {
        std::set<std::string> want, got;
        for (const auto& s : c.payload.at("expected_generators")) want.insert(s.get<std::string>());
        for (const auto& g : r.ideal.generators) got.insert(g.to_string());
        std::vector<std::string> diff;
        std::set_symmetric_difference(want.begin(), want.end(), got.begin(), got.end(), std::back_inserter(diff));
        c.judge.count_zero("generator_mismatches", static_cast<double>(diff.size()));
    }
    int max_order = 0;
    for (const auto& pt : r.zero_set) max_order = std::max(max_order, pt.order);
    c.judge.at_most("max_torsion_order", max_order, get_or(c.payload, "max_torsion_order", 6));
    if (c.payload.contains("expected_zero_set_size"))
        c.judge.count_zero("zero_set_size_mismatch",
                           std::abs(static_cast<double>(r.zero_set.size()) - c.payload.at("expected_zero_set_size").get<double>()));
    json tab = {{"columns", {"k", "order", "dim", "definitional_member"}}, {"rows", json::array()}};
    for (std::size_t i = 0; i < r.zero_set.size(); ++i)
        tab["rows"].push_back({i, r.zero_set[i].order, r.zero_set[i].dim, r.zero_set[i].definitional});
    c.table = tab;
}

// ---------------------------------------------------------------- theta

theta::VectorXcd random_point(std::mt19937_64& rng, int l, double box) {
    std::uniform_real_distribution<double> u(-box, box);
    theta::VectorXcd z(l);
    for (int i = 0; i < l; ++i) z(i) = cplx(u(rng), u(rng));
    return z;
}

// direct summation over |n|_inf <= R + 5
cplx brute_theta(const theta::ThetaParams& p, const theta::VectorXcd& z) {
    const int l = p.dim();
    const int R = theta::theta_eval(p, z).radius + 5;
    std::vector<long> n(l, -R);
    cplx s = 0.0;
    for (;;) {
        cplx e = 0.0;
        for (int i = 0; i < l; ++i) {
            for (int k = 0; k < l; ++k) e += double(n[i]) * p.Z(i, k) * double(n[k]);
            e += 2.0 * double(n[i]) * z(i);
        }
        s += std::exp(cplx(0.0, kPi) * e);
        int i = l - 1;
        while (i >= 0 && n[i] == R) n[i--] = -R;
        if (i < 0) break;
        ++n[i];
    }
    return s;
}

theta::ThetaTriple triple_from(const theta::ThetaParams& p, const json& j) {
    return {p, theta::cvec_from_json(j.at("v1"), p.dim()), theta::cvec_from_json(j.at("v2"), p.dim())};
}

void run_theta(Context& c) {
    const theta::ThetaParams p = theta::params_from_json(c.payload.at("params"));
    const int l = p.dim();
    std::mt19937_64 rng(c.seed);
    auto want = [&](const char* section) { return (c.mode.empty() || c.mode == section) && c.payload.contains(section); };
    if (want("eval")) {
        const json& e = c.payload.at("eval");
        json vals = json::array();
        double err = 0.0, brute = 0.0;
        const json pts = e.value("points", json::array());
        const json exp = e.value("expected", json::array());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const theta::VectorXcd z = theta::cvec_from_json(pts[i], l);
            const theta::ThetaValue v = theta::theta_eval(p, z);
            vals.push_back({{"zeta", theta::cvec_to_json(z)}, {"value", cjson(v.value)}, {"radius", v.radius}, {"tail_bound", num(v.tail)}});
            if (i < exp.size()) err = std::max(err, std::abs(v.value - cfrom(exp[i])));
            brute = std::max(brute, std::abs(v.value - brute_theta(p, z)));
        }
        const int nb = get_or(e, "random_brute_force", 0);
        for (int i = 0; i < nb; ++i) {
            const theta::VectorXcd z = random_point(rng, l, 1.0);
            brute = std::max(brute, std::abs(theta::theta(p, z) - brute_theta(p, z)));
        }
        c.results["eval"] = vals;
        if (!exp.empty()) c.judge.below("eval_expected_error", err, get_or(e, "tol", 1e-12));
        c.judge.below("eval_brute_force_error", brute, 2 * p.eps + 1e-15);
        const int nev = get_or(e, "evenness", 0);
        if (nev) {
            double ev = 0.0;
            for (int i = 0; i < nev; ++i) {
                const theta::VectorXcd z = random_point(rng, l, 1.0);
                ev = std::max(ev, std::abs(theta::theta(p, z) - theta::theta(p, -z)));
            }
            c.results["evenness_residual"] = ev;
            c.judge.below("evenness_residual", ev, 1e-12);
        }
    }
    if (want("quasi")) {
        const json& q = c.payload.at("quasi");
        const int n = get_or(q, "random", 20);
        const long lmax = get_or(q, "lambda_max", 2L);
        std::uniform_int_distribution<long> li(-lmax, lmax);
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            const theta::VectorXcd z = random_point(rng, l, 0.5);
            theta::LatticePoint lp;
            for (int k = 0; k < l; ++k) lp.p.push_back(li(rng)), lp.q.push_back(li(rng));
            const double scale = std::max(1.0, std::abs(theta::multiplier(p, lp, z) * theta::theta(p, z)));
            worst = std::max(worst, theta::quasi_periodicity_residual(p, z, lp) / scale);
        }
        c.results["quasi_max_relative_residual"] = worst;
        c.results["quasi_samples"] = n;
        c.judge.below("quasi_periodicity_residual", worst, get_or(q, "tol", 1e-10));
    }
    if (want("triple")) {
        const json& t = c.payload.at("triple");
        const theta::ThetaTriple tr = triple_from(p, t);
        const theta::LatticePoint lp = theta::lattice_from_json(t.at("lambda"), l);
        const theta::VectorXcd sh = theta::lattice_shift(p, lp);
        double worst = 0.0;
        json vals = json::array();
        for (int i = 0; i < get_or(t, "random", 10); ++i) {
            const theta::VectorXcd z = random_point(rng, l, 0.5);
            const cplx v = theta::triple_eval(tr, z);
            const cplx m = theta::multiplier(p, lp, z - tr.v1) * theta::multiplier(p, lp, z - tr.v2) *
                           theta::multiplier(p, lp, z + tr.v1 + tr.v2);
            const cplx shifted = theta::triple_eval(tr, z + sh);
            worst = std::max(worst, std::abs(shifted - m * v) / std::max(1.0, std::abs(shifted)));
            vals.push_back({{"zeta", theta::cvec_to_json(z)}, {"value", cjson(v)}});
        }
        c.results["triple"] = {{"values", vals}, {"max_relative_residual", worst}};
        c.judge.below("triple_quasi_periodicity", worst, 1e-10);
    }
    if (want("fit")) {
        const json& f = c.payload.at("fit");
        const theta::ThetaQuotient qt{triple_from(p, f.at("num")), triple_from(p, f.at("den"))};
        json fits = json::array();
        double worst = 0.0, integer_worst = 0.0;
        for (const json& lj : f.at("lambdas")) {
            const theta::LatticePoint lp = theta::lattice_from_json(lj, l);
            const theta::RatioFit r = theta::transition_ratio_fit(qt, lp, get_or(f, "samples", 20), c.seed);
            json b = json::array();
            for (cplx x : r.b) b.push_back(cjson(x));
            fits.push_back({{"lambda", lj}, {"c", cjson(r.c)}, {"b", b}, {"residual", r.residual}});
            worst = std::max(worst, r.residual);
            bool integer = true;
            for (long v : lp.q) integer = integer && v == 0;
            if (integer) {
                integer_worst = std::max(integer_worst, std::abs(r.c) + std::abs(r.residual));
                for (cplx x : r.b) integer_worst = std::max(integer_worst, std::abs(x));
            }
        }
        c.results["fit"] = fits;
        c.judge.below("fit_residual", worst, get_or(f, "tol", 1e-8));
        c.judge.below("integer_translation_deviation", integer_worst, 1e-10);
    }
}

// ---------------------------------------------------------------- family

void run_family(Context& c) {
    const json& pl = c.payload;
    family::ChartFamily cf;
    if (pl.contains("family")) {
        cf = family::family_from_json(pl.at("family"));
    } else {
        const json g = pl.value("chart_grid", json::object());
        cf = family::grid_family(get_or(g, "n", 3), get_or(g, "half_width", 0.25), get_or<std::uint64_t>(g, "seed", 7));
    }
    const std::string sign_s = get_or<std::string>(pl, "sign", "plus");
    if (sign_s != "plus" && sign_s != "minus") throw Error(ErrorKind::Schema, "sign must be plus or minus");
    const family::MetricSign sign = sign_s == "plus" ? family::MetricSign::plus : family::MetricSign::minus;
    c.results["sign"] = sign_s;
    c.results["family"] = family::family_to_json(cf);
    const std::string want = c.mode;
    if (want.empty() || want == "identities") {
        const family::IdentityReport r = family::identity_report(cf, get_or(pl, "identity_samples", 10), c.seed, sign);
        c.results["identities"] = {{"edges", r.edges},
                                   {"triples", r.triples},
                                   {"samples_per_edge", r.samples},
                                   {"line_cocycle", r.line_cocycle},
                                   {"jet_cocycle", r.jet_cocycle},
                                   {"compatibility", r.compatibility},
                                   {"jet_compatibility", r.jet_compatibility},
                                   {"jet_compatibility_conj_form", r.jet_compatibility_conj_form},
                                   {"det_h", r.det_h},
                                   {"det_g", r.det_g},
                                   {"c_spread", r.c_spread},
                                   {"dbar_residual", r.dbar_residual},
                                   {"dbar_halving_ratio", r.dbar_ratio},
                                   {"fiber_curvature", r.fiber_curvature}};
        c.judge.below("line_cocycle", r.line_cocycle, 1e-12);
        c.judge.below("jet_cocycle", r.jet_cocycle, 1e-12);
        c.judge.below("metric_compatibility", r.compatibility, 1e-10);
        c.judge.below("jet_metric_compatibility", r.jet_compatibility, 1e-10);
        c.judge.below("jet_det", r.det_h, 1e-12);
        c.judge.at_least("dbar_tau_halving_ratio", r.dbar_ratio, 3.5);
        c.judge.below("fiber_curvature", r.fiber_curvature, 1e-6);
    }
    if (want.empty() || want == "curvature") {
        family::CurvatureGrid grid;
        const json g = pl.value("curvature_grid", json::object());
        grid.per_axis = c.opt.grid ? *c.opt.grid : get_or(g, "per_axis", grid.per_axis);
        grid.tau_radii = get_or(g, "tau_radii", grid.tau_radii);
        grid.tau_angles = get_or(g, "tau_angles", grid.tau_angles);
        grid.step = get_or(g, "step", grid.step);
        grid.divisor_clearance = get_or(g, "divisor_clearance", grid.divisor_clearance);
        c.provenance["curvature_grid"] = {{"per_axis", grid.per_axis}, {"tau_radii", grid.tau_radii}, {"tau_angles", grid.tau_angles},
                                          {"step", grid.step}, {"richardson_step", grid.step / 2}};
        family::MetricSpec spec;
        spec.eta = get_or(pl, "eta", 0.1);
        spec.divisor_scale = get_or(pl, "divisor_scale", 1.0);
        spec.sign = sign;
        json modes = json::object();
        json tab = {{"columns", {"mode", "min_eigenvalue", "tau_margin", "full_margin", "richardson_diff", "points", "skipped"}},
                    {"rows", json::array()}};
        for (int k : {1, 2}) {
            spec.k = k;
            const family::CurvatureReport r = family::curvature_semipositivity(cf, spec, grid);
            const std::string name = k == 1 ? "eta" : "two_eta";
            modes[name] = {{"min_eigenvalue", r.min_eigenvalue}, {"min_at_z", cjson(r.min_at_z)}, {"min_at_tau", cjson(r.min_at_tau)},
                           {"min_chart", r.min_chart}, {"tau_margin", r.tau_margin}, {"full_margin", r.full_margin},
                           {"richardson_diff", r.richardson_diff}, {"points", r.points}, {"skipped", r.skipped}};
            tab["rows"].push_back({name, r.min_eigenvalue, r.tau_margin, r.full_margin, r.richardson_diff, r.points, r.skipped});
            if (k == 1) c.judge.above_neg("eta_mode_min_eigenvalue", r.min_eigenvalue, 1e-4);
            else c.judge.above_neg("two_eta_tau_margin", r.tau_margin, 1e-4);
        }
        family::MetricSpec flat;
        flat.theta_divisor = false;
        flat.zero_primitive = true;
        flat.eta = 1e9;
        const family::CurvatureReport fr = family::curvature_semipositivity(cf, flat, grid);
        modes["flat"] = {{"min_eigenvalue", fr.min_eigenvalue}, {"points", fr.points}};
        c.judge.below("flat_hessian", std::abs(fr.min_eigenvalue), 1e-6);
        c.results["curvature"] = modes;
        c.results["eta"] = spec.eta;
        c.table = tab;
    }
}

// ---------------------------------------------------------------- dbar

dbar::CutoffSpec cutoff_from(const json& j) {
    dbar::CutoffSpec s;
    s.r1 = get_or(j, "r1", s.r1);
    s.r2 = get_or(j, "r2", s.r2);
    s.m = get_or(j, "m", s.m);
    dbar::validate(s);
    return s;
}

std::vector<dbar::Monomial> monomials_from(const json& j) {
    std::vector<dbar::Monomial> out;
    for (const json& t : j) out.push_back({cfrom(t.at("c")), t.value("p", 0), t.value("q", 0)});
    return out;
}

dbar::SearchBox box_from(const json& j) {
    dbar::SearchBox b;
    if (!j.is_object()) return b;
    b.r1_lo = get_or(j, "r1_lo", b.r1_lo);
    b.r1_hi = get_or(j, "r1_hi", b.r1_hi);
    b.r2_lo = get_or(j, "r2_lo", b.r2_lo);
    b.r2_hi = get_or(j, "r2_hi", b.r2_hi);
    return b;
}

void run_dbar(Context& c) {
    const json& pl = c.payload;
    const std::string op = c.mode.empty() ? pl.at("op").get<std::string>() : c.mode;
    c.results["op"] = op;
    if (op == "cutoff") {
        const dbar::CutoffSpec s = cutoff_from(pl);
        const int n = get_or(pl, "profile_points", 64);
        const double lo = std::pow(s.r1, s.m), hi = std::pow(s.r2, s.m);
        json tab = {{"columns", {"r", "lambda", "dbar_abs"}}, {"rows", json::array()}};
        int range_bad = 0;
        for (int i = 1; i <= n; ++i) {
            const double r = double(i) / (n + 1);
            const double v = dbar::cutoff_eval(s, r);
            range_bad += (v < 0.0 || v > 1.0);
            tab["rows"].push_back({r, v, std::abs(dbar::dbar_cutoff_eval(s, r))});
        }
        c.table = tab;
        const double inner = dbar::cutoff_eval(s, 0.5 * lo), outer = dbar::cutoff_eval(s, 0.5 * (hi + 1.0));
        const double fr = get_or(pl, "fd_radius", 0.5 * (lo + hi));
        double fd_err = 0.0;
        for (double ang : {0.0, 0.9, 2.2, 4.0}) {
            const cplx w = std::polar(fr, ang);
            const double h = 1e-6 * fr;
            auto f = [&](cplx z) { return dbar::cutoff_eval(s, z); };
            const cplx fd = 0.5 * ((f(w + h) - f(w - h)) / (2 * h) + cplx(0, 1) * (f(w + cplx(0, h)) - f(w - cplx(0, h))) / (2 * h));
            const cplx an = dbar::dbar_cutoff_eval(s, w);
            fd_err = std::max(fd_err, std::abs(an - fd) / std::max(std::abs(an), 1e-300));
        }
        c.results["cutoff"] = {{"r1", s.r1}, {"r2", s.r2}, {"m", s.m}, {"inner_radius", lo}, {"outer_radius", hi},
                               {"eta", dbar::cutoff_eta()}, {"inner_value", inner}, {"outer_value", outer},
                               {"fd_radius", fr}, {"fd_relative_error", fd_err}};
        c.judge.below("inner_plateau_error", std::abs(inner - 1.0), 1e-14);
        c.judge.below("outer_plateau_error", std::abs(outer), 1e-14);
        c.judge.count_zero("range_violations", range_bad);
        c.judge.below("dbar_fd_relative_error", fd_err, 1e-6);
        std::vector<double> radii;
        for (int i = 1; i < 100; ++i) radii.push_back(i / 100.0);
        const double hyp = dbar::hyperbolic_invariance_defect(s.m == 1 ? 2 : s.m, radii);
        c.results["hyperbolic_invariance_defect"] = hyp;
        c.judge.below("hyperbolic_invariance_defect", hyp, 1e-12);
    } else if (op == "pushforward") {
        json cases = json::array();
        json tab = {{"columns", {"case", "m", "a", "b", "lhs", "rhs", "ratio"}}, {"rows", json::array()}};
        double worst = 0.0, analytic = 0.0;
        int k = 0;
        for (const json& cs : pl.at("cases")) {
            const auto U = monomials_from(cs.at("U"));
            const int m = cs.at("m").get<int>();
            const double a = cs.at("a").get<double>(), b = cs.at("b").get<double>();
            const dbar::PushforwardResult r = dbar::pushforward_integral_check(U, m, a, b);
            cases.push_back({{"m", m}, {"a", a}, {"b", b}, {"lhs", r.lhs}, {"rhs_inner", r.rhs_inner}, {"rhs", r.rhs}, {"ratio", r.ratio}});
            tab["rows"].push_back({k++, m, a, b, r.lhs, r.rhs, r.ratio});
            worst = std::max(worst, std::abs(r.ratio - 1.0));
            if (U.size() == 1 && U[0].p == 0 && U[0].q == 0) {
                const double exact = std::norm(U[0].c) * 4 * kPi * std::log(b / a);
                analytic = std::max(analytic, std::abs(r.lhs - exact) / exact);
            }
        }
        c.results["cases"] = cases;
        c.table = tab;
        c.judge.below("ratio_deviation", worst, 1e-3);
        c.judge.below("constant_integrand_vs_4pi_log", analytic, 1e-3);
        if (pl.contains("radial")) {
            const json& rj = pl.at("radial");
            const dbar::RadialIntegral ri = dbar::radial_integral_eval(rj.at("r1").get<double>(), rj.at("r2").get<double>());
            c.results["radial_integral"] = {{"quadrature", ri.quadrature}, {"closed_form", ri.closed_form},
                                            {"without_half_pi", ri.without_half_pi}, {"refinement_change", ri.refinement_change}};
            c.judge.below("radial_closed_form_error", std::abs(ri.quadrature - ri.closed_form) / ri.closed_form, 1e-8);
            c.judge.below("radial_refinement_change", ri.refinement_change, 1e-6);
        }
    } else if (op == "solve") {
        const int n = c.opt.grid ? *c.opt.grid : get_or(pl, "grid", 128);
        const double rmin = get_or(pl, "rho_min", 1e-3), rmax = get_or(pl, "rho_max", 0.8);
        const double phi_q = get_or(pl, "phi_quad", 1.0), psi_q = get_or(pl, "psi_quad", 1.0);
        const auto V = monomials_from(pl.value("v", json::array({{{"c", 1.0}}})));
        const dbar::Field v = [&](cplx w) { return dbar::eval_monomials(V, w); };
        const dbar::Scalar W = [&](cplx w) { return std::exp(-(phi_q + psi_q) * std::norm(w)); };
        const dbar::Scalar th = [&](cplx) { return psi_q; };
        json tab = {{"columns", {"grid", "iterations", "norm2", "bound", "consistency_residual"}}, {"rows", json::array()}};
        double res_prev = 0.0, ratio = 0.0, worst_alg = 0.0, est = 0.0;
        for (int g : {n / 2 + (n / 2) % 2, n}) {
            const dbar::PolarGrid grid = dbar::make_polar_grid(rmin, rmax, g, g);
            const dbar::SolveResult s = dbar::dbar_solve(grid, v, W);
            const double bound = dbar::hormander_bound(grid, v, W, th);
            const double res = dbar::consistency_residual(grid, s.u, v);
            tab["rows"].push_back({g, s.iterations, s.norm2, bound, res});
            worst_alg = std::max(worst_alg, s.algebraic_residual);
            if (g == n) {
                ratio = res_prev > 0 ? res / res_prev : 0.0;
                est = bound > 0 ? s.norm2 / bound : 0.0;
                c.results["solve"] = {{"grid", g}, {"norm2", s.norm2}, {"bound", bound}, {"iterations", s.iterations},
                                      {"consistency_residual", res}, {"algebraic_residual", s.algebraic_residual}};
            }
            res_prev = res;
        }
        c.provenance["grid"] = n;
        c.table = tab;
        c.judge.at_most("estimate_ratio", est, 1.05);
        c.judge.below("refinement_residual_ratio", ratio, 1.0);
        c.judge.below("algebraic_residual", worst_alg, 1e-8);
    } else if (op == "ot-constant") {
        const dbar::LVariant var = dbar::lvariant_from_name(get_or<std::string>(pl, "variant", "difference"));
        json vals = json::object();
        if (pl.contains("r1")) {
            const double r1 = pl.at("r1").get<double>(), r2 = pl.at("r2").get<double>();
            for (dbar::LVariant v : {dbar::LVariant::difference, dbar::LVariant::log_ratio}) {
                try {
                    vals[dbar::lvariant_name(v)] = dbar::ot_constant(r1, r2, v);
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::OutOfAdmissibleRegion) throw;
                    vals[dbar::lvariant_name(v)] = nullptr;
                }
            }
            c.results["value"] = vals;
            if (pl.contains("expected")) {
                const double want = pl.at("expected").get<double>();
                const double got = dbar::ot_constant(r1, r2, var);
                c.judge.below("expected_relative_error", std::abs(got - want) / want, 1e-3);
            }
        }
        const dbar::OtOptimum o = dbar::ot_constant_optimize(box_from(pl.value("box", json())), var);
        c.results["optimum"] = {{"variant", dbar::lvariant_name(var)}, {"r1", o.r1}, {"r2", o.r2}, {"c", o.c}, {"shrink_change", o.shrink_change}};
        c.judge.at_least("optimum_at_least_pi", o.c, kPi);
        c.judge.below("optimum_shrink_change", o.shrink_change, 1e-6);
    } else if (op == "ot-extend") {
        const dbar::CutoffSpec s = cutoff_from(pl);
        dbar::ExtensionOptions eo;
        eo.nr = eo.nt = c.opt.grid ? *c.opt.grid : get_or(pl, "grid", 256);
        eo.rho_min = get_or(pl, "rho_min", eo.rho_min);
        eo.variant = dbar::lvariant_from_name(get_or<std::string>(pl, "variant", "difference"));
        const dbar::PhiSpec phi{get_or(pl, "phi_quad", 0.0)};
        const cplx f0 = pl.contains("f0") ? cfrom(pl.at("f0")) : cplx(1.0);
        const dbar::ExtensionResult r = dbar::ot_extension_experiment(s, phi, f0, eo);
        const dbar::OtOptimum o = dbar::ot_constant_optimize(box_from(pl.value("box", json())), eo.variant);
        c.provenance["grid"] = eo.nr;
        c.results["extension"] = {{"F_origin", cjson(r.F_origin)}, {"ratio", r.ratio}, {"bound_at_radii", r.bound},
                                  {"optimized_bound", o.c}, {"optimum_r1", o.r1}, {"optimum_r2", o.r2},
                                  {"residual", r.residual}, {"residual_coarse", r.residual_coarse}, {"iterations", r.iterations},
                                  {"variant", dbar::lvariant_name(eo.variant)}};
        json tab = {{"columns", {"r", "re_F", "im_F"}}, {"rows", json::array()}};
        const int stride = std::max(1, eo.nr / 64);
        for (int i = 0; i <= eo.nr; i += stride) {
            const double r0 = eo.rho_min * std::pow(1.0 / eo.rho_min, double(i) / eo.nr);
            const cplx F = r.F[static_cast<std::size_t>(i) * eo.nt];
            tab["rows"].push_back({r0, F.real(), F.imag()});
        }
        c.table = tab;
        c.judge.below("origin_value_error", std::abs(r.F_origin - f0), 1e-6);
        c.judge.below("refinement_residual_ratio", r.residual_coarse > 0 ? r.residual / r.residual_coarse : 0.0, 1.0);
        if (std::abs(f0) > 0) {
            c.judge.at_most("ratio_over_optimized_bound", r.ratio / o.c, 1.1);
            c.judge.at_most("ratio_over_bound_at_radii", r.ratio / r.bound, 1.1);
            if (phi.quad == 0.0) c.judge.at_least("ratio_over_pi", r.ratio / kPi, 1.0 - 1e-3);
        }
    } else if (op == "curvature") {
        const double eps = get_or(pl, "eps", 0.5), step = get_or(pl, "step", 1e-3);
        std::vector<cplx> samples;
        if (pl.contains("points"))
            for (const json& p : pl.at("points")) samples.push_back(cfrom(p));
        const int n = get_or(pl, "samples", 50);
        const auto rnd = dbar::annulus_samples(n, get_or(pl, "rmin", 0.05), get_or(pl, "rmax", 0.6), c.seed);
        samples.insert(samples.end(), rnd.begin(), rnd.end());
        const dbar::IdentityCheck ic = dbar::curvature_identity_check(eps, samples, step);
        json tab = {{"columns", {"step", "max_residual"}}, {"rows", json::array()}};
        std::vector<double> steps = {4e-2, 2e-2, 1e-2, 5e-3};
        std::vector<double> res;
        for (double h : steps) {
            res.push_back(dbar::curvature_identity_check(eps, rnd, h).max_residual);
            tab["rows"].push_back({h, res.back()});
        }
        double ring_spread = 0.0;
        {
            std::vector<double> ring;
            for (int k = 0; k < 16; ++k) ring.push_back(dbar::curvature_identity_check(eps, {std::polar(0.2, k * kPi / 8)}, step).max_residual);
            const auto [mn, mx] = std::minmax_element(ring.begin(), ring.end());
            ring_spread = *mx - *mn;
        }
        c.table = tab;
        c.results["identity"] = {{"eps", eps}, {"step", step}, {"samples", samples.size()}, {"max_residual", ic.max_residual},
                                 {"max_residual_limit_form", num(ic.max_limit_form_residual)}, {"ring_spread", ring_spread},
                                 {"halving_ratio", res[2] / res[3]}};
        c.judge.below("identity_residual", ic.max_residual, 1e-5);
        c.judge.at_least("second_order_halving_ratio", res[1] / res[2], 3.5);
        c.judge.below("radial_symmetry_spread", ring_spread, 1e-8);
    } else if (op == "two-weight") {
        const dbar::PhiSpec phi{get_or(pl, "phi_quad", 1.0)};
        const auto eps_list = get_or(pl, "eps", std::vector<double>{0.1, 0.2, 0.3});
        const auto samples = dbar::annulus_samples(get_or(pl, "samples", 50), get_or(pl, "rmin", 0.05), get_or(pl, "rmax", 0.7), c.seed);
        json tab = {{"columns", {"eps", "c0", "min_slack", "sup_w_beta", "min_alpha", "max_beta"}}, {"rows", json::array()}};
        json per = json::array();
        double c0min = INFINITY, slack = INFINITY;
        for (double e : eps_list) {
            const dbar::TwoWeightReport r = dbar::two_weight_pointwise_check(e, phi, samples, get_or(pl, "step", 1e-3));
            tab["rows"].push_back({e, r.c0, r.min_slack, r.sup_w_beta, r.min_alpha, r.max_beta});
            per.push_back({{"eps", e}, {"c0", r.c0}, {"min_slack", r.min_slack}, {"sup_w_beta", r.sup_w_beta},
                           {"min_alpha", r.min_alpha}, {"max_beta", r.max_beta}});
            c0min = std::min(c0min, r.c0);
            slack = std::min(slack, r.min_slack);
        }
        c.table = tab;
        c.results["two_weight"] = per;
        c.judge.at_least("min_c0_positive", c0min, 0.0);
        c.judge.at_least("min_slack_nonnegative", slack, 0.0);
    } else {
        throw Error(ErrorKind::Schema, "unknown dbar op '" + op + "'");
    }
}

std::string csv_cell(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

}  // namespace

bool Report::all_pass() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

json Report::to_json() const {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["scenario"] = scenario;
    j["results"] = results;
    json vs = json::array();
    for (const Verdict& v : verdicts)
        vs.push_back({{"name", v.name}, {"measured", num(v.measured)}, {"threshold", num(v.threshold)}, {"relation", v.relation}, {"pass", v.pass}});
    j["verdicts"] = vs;
    j["provenance"] = provenance;
    j["pass"] = all_pass();
    if (!table.is_null()) j["table"] = table;
    return j;
}

std::string Report::to_csv() const {
    std::ostringstream os;
    if (!table.is_null()) {
        const json& cols = table.at("columns");
        for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i].get<std::string>();
        os << "\n";
        for (const json& row : table.at("rows")) {
            for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
            os << "\n";
        }
        return os.str();
    }
    os << "name,measured,relation,threshold,pass\n";
    for (const Verdict& v : verdicts)
        os << v.name << "," << num(v.measured).dump() << "," << v.relation << "," << num(v.threshold).dump() << "," << (v.pass ? "true" : "false") << "\n";
    return os.str();
}

std::string Report::summary() const {
    std::ostringstream os;
    const std::string name = scenario.value("name", std::string("scenario"));
    for (const Verdict& v : verdicts)
        os << (v.pass ? "PASS " : "FAIL ") << name << " " << v.name << " measured=" << num(v.measured).dump() << " " << v.relation << " "
           << num(v.threshold).dump() << "\n";
    os << (all_pass() ? "PASS " : "FAIL ") << name << " (" << verdicts.size() << " verdicts)\n";
    return os.str();
}

std::string examples_dir() {
    if (const char* e = std::getenv("FLATLAB_EXAMPLES"); e && *e) return e;
    return FLATLAB_DEFAULT_EXAMPLES;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Parse, "cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Parse, "'" + path + "': " + e.what());
    }
}

std::vector<CatalogEntry> list_examples(const std::string& dir) {
    std::vector<CatalogEntry> out;
    if (!fs::is_directory(dir)) return out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file() || e.path().extension() != ".json") continue;
        const json j = load_json_file(e.path().string());
        if (!j.is_object() || !j.contains("kind") || !j.contains("name")) continue;
        out.push_back({j.at("name").get<std::string>(), j.at("kind").get<std::string>(), j.value("description", std::string()),
                       e.path().string()});
    }
    std::sort(out.begin(), out.end(), [](const CatalogEntry& a, const CatalogEntry& b) { return a.name < b.name; });
    return out;
}

json load_scenario(const std::string& ref, const std::string& dir) {
    if (fs::exists(ref)) return load_json_file(ref);
    if (ref.find('/') == std::string::npos && ref.find(".json") == std::string::npos)
        for (const CatalogEntry& e : list_examples(dir))
            if (e.name == ref) return load_json_file(e.path);
    return load_json_file(ref);
}

cech::Datum resolve_datum(const json& ref, const std::string& dir) {
    if (ref.is_object()) return cech::datum_from_json(ref);
    if (!ref.is_string()) throw Error(ErrorKind::Schema, "datum must be a name, a path or an object");
    const std::string s = ref.get<std::string>();
    if (s.size() > 5 && s.substr(s.size() - 5) == ".json") {
        if (fs::exists(s)) return cech::datum_from_json(load_json_file(s));
        return cech::datum_from_json(load_json_file((fs::path(dir) / s).string()));
    }
    return cech::datum_from_json(load_json_file((fs::path(dir) / "data" / (s + ".json")).string()));
}

Report run_scenario(const json& sc, const RunOptions& opt) {
    if (!sc.is_object()) throw Error(ErrorKind::Schema, "scenario must be a JSON object");
    if (sc.contains("schema_version") && sc.at("schema_version").get<int>() != kSchemaVersion)
        throw Error(ErrorKind::Schema, "unsupported scenario schema_version");
    if (!sc.contains("kind") || !sc.at("kind").is_string()) throw Error(ErrorKind::Schema, "scenario needs a kind");
    if (!sc.contains("payload") || !sc.at("payload").is_object()) throw Error(ErrorKind::Schema, "scenario needs a payload object");
    const std::string kind = sc.at("kind").get<std::string>();
    const std::uint64_t seed = opt.seed ? *opt.seed : sc.value("seed", std::uint64_t{1});
    const std::string dir = opt.examples_dir.empty() ? examples_dir() : opt.examples_dir;
    Judge judge(sc, opt);
    Context c{sc.at("payload"), sc.value("mode", std::string()), opt, dir, seed, judge, json::object(), json(), json::object()};
    if (kind == "cech") run_cech(c);
    else if (kind == "jumploci") run_jump(c);
    else if (kind == "theta") run_theta(c);
    else if (kind == "family") run_family(c);
    else if (kind == "dbar") run_dbar(c);
    else throw Error(ErrorKind::Schema, "unknown scenario kind '" + kind + "'");

    Report r;
    r.scenario = sc;
    r.results = c.results;
    r.table = c.table;
    r.verdicts = judge.take();
    json prov = c.provenance;
    prov["flatlab_version"] = kVersion;
    prov["schema_version"] = kSchemaVersion;
    prov["seed"] = seed;
    prov["tolerance_override"] = opt.tol ? json(*opt.tol) : json(nullptr);
    prov["grid_override"] = opt.grid ? json(*opt.grid) : json(nullptr);
    prov["simd"] = simd::isa_name(simd::active().isa);
    r.provenance = prov;
    return r;
}

}  // namespace flatlab::scenario
