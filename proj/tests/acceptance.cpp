// One PASS/FAIL line per acceptance criterion; exit status 0 iff all pass.
#include "flatlab/cech.hpp"
#include "flatlab/dbar.hpp"
#include "flatlab/family.hpp"
#include "flatlab/jump.hpp"
#include "flatlab/scenario.hpp"
#include "flatlab/theta.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

using namespace flatlab;
using nlohmann::json;
using cplx = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

cech::Datum load(const std::string& name) {
    std::ifstream in(std::string(FLATLAB_DATA_DIR) + "/" + name + ".json");
    return cech::datum_from_json(json::parse(in));
}

// Coboundary rank straight from the alternating-sum definition.
std::size_t oracle_rank(const cech::Datum& d, const cech::Character& g, int nu) {
    if (nu < 0 || nu + 1 > d.top_dim()) return 0;
    const auto& rows = d.simplices[nu + 1];
    const auto& cols = d.simplices[nu];
    MatrixXcd m = MatrixXcd::Zero(rows.size(), cols.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t l = 0; l < rows[r].size(); ++l) {
            cech::Simplex f = rows[r];
            f.erase(f.begin() + l);
            const std::size_t c = std::find(cols.begin(), cols.end(), f) - cols.begin();
            cplx v = (l % 2) ? -1.0 : 1.0;
            if (l == 0) {
                const cech::ExpVec a = d.exponent(rows[r][0], rows[r][1]);
                for (int i = 0; i < d.free_rank; ++i) v *= std::pow(g.free[i], double(a[i]));
                for (std::size_t t = 0; t < g.torsion.size(); ++t) v *= std::pow(g.torsion[t], double(a[d.free_rank + t]));
            }
            m(r, c) += v;
        }
    }
    Eigen::FullPivLU<MatrixXcd> lu(m);
    lu.setThreshold(1e-9);
    return static_cast<std::size_t>(lu.rank());
}

std::size_t oracle_dim(const cech::Datum& d, const cech::Character& g, int p) {
    return d.count(p) - oracle_rank(d, g, p) - oracle_rank(d, g, p - 1);
}

long alternating(const std::vector<long>& v) {
    long s = 0;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i % 2 ? -1 : 1) * v[i];
    return s;
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double limit_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && s < limit_s;
    failures += !pass;
    std::printf("%s %2d %-34s %s  [%.2f s, limit %.0f s]\n", pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), s, limit_s);
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... a) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, a...);
    return buf;
}

theta::ThetaParams params(int l) {
    theta::ThetaParams p;
    if (l == 1) {
        p.Z = MatrixXcd::Constant(1, 1, cplx(0, 1));
        p.m = {1};
    } else {
        p.Z.resize(2, 2);
        p.Z << cplx(0, 1), 0.3, 0.3, cplx(0, 2);
        p.m = {1, 2};
    }
    return p;
}

cplx brute_theta(const theta::ThetaParams& p, const theta::VectorXcd& z, int R) {
    cplx s = 0;
    if (p.dim() == 1) {
        for (int n = -R; n <= R; ++n) s += std::exp(cplx(0, kPi) * (double(n * n) * p.Z(0, 0) + 2.0 * double(n) * z(0)));
        return s;
    }
    for (int a = -R; a <= R; ++a)
        for (int b = -R; b <= R; ++b) {
            const cplx q = double(a * a) * p.Z(0, 0) + 2.0 * double(a * b) * p.Z(0, 1) + double(b * b) * p.Z(1, 1);
            s += std::exp(cplx(0, kPi) * (q + 2.0 * (double(a) * z(0) + double(b) * z(1))));
        }
    return s;
}

}  // namespace

int main() {
    criterion(1, "Euler characteristic invariance", 10, [] {
        long worst_exact = 0, worst_num = 0, checked = 0;
        for (const char* name : {"circle3", "torus9", "wedge2", "genus2"}) {
            const cech::Datum d = load(name);
            std::vector<long> counts;
            for (int nu = 0; nu <= d.top_dim(); ++nu) counts.push_back(long(d.simplices[nu].size()));
            const long chi = alternating(counts);
            std::mt19937_64 rng(1000 + checked);
            for (int s = 0; s < 100; ++s, ++checked) {
                const cech::ExactCharacter ge = cech::random_exact_character(d, rng);
                const cech::Character gn = cech::random_character(d, rng);
                std::vector<long> e, n;
                for (int p = 0; p <= d.top_dim(); ++p) {
                    e.push_back(long(cech::cohomology_dim_exact(d, ge, p)));
                    n.push_back(long(cech::cohomology_dim(d, gn, p)));
                }
                worst_exact = std::max(worst_exact, std::abs(alternating(e) - chi));
                worst_num = std::max(worst_num, std::abs(alternating(n) - chi));
            }
        }
        return Outcome{worst_exact == 0 && worst_num == 0,
                       fmt("%ld characters, max |defect| exact %ld numeric %ld", checked, worst_exact, worst_num)};
    });

    criterion(2, "known cohomology vs rank oracle", 30, [] {
        struct Case {
            const char* datum;
            std::vector<cplx> free;
            std::vector<std::size_t> dims;
        };
        const cplx g1(std::cos(2.1), std::sin(2.1)), g2(0.7, 0.4);
        const std::vector<Case> cases{
            {"circle3", {1.0}, {1, 1}},           {"circle3", {2.0}, {0, 0}},
            {"wedge2", {g1, g2}, {0, 1}},         {"wedge2", {1.0, 1.0}, {1, 2}},
            {"genus2", {g1, g2, 1.5, g1 * g2}, {0, 2, 0}}, {"torus9", {1.0, 1.0}, {1, 2, 1, 0}}};
        int bad = 0;
        for (const Case& c : cases) {
            const cech::Datum d = load(c.datum);
            const cech::Character g{c.free, {}};
            for (int p = 0; p < int(c.dims.size()); ++p) {
                const std::size_t got = cech::cohomology_dim(d, g, p);
                bad += got != c.dims[p] || oracle_dim(d, g, p) != c.dims[p];
            }
        }
        return Outcome{bad == 0, fmt("%zu configurations, %d mismatches", cases.size(), bad)};
    });

    criterion(3, "circle3 jump ideal", 10, [] {
        const cech::Datum d = load("circle3");
        const jump::JumpReport r = jump::jump_report(d, 1, cech::trivial_character(d), 5, 100);
        const bool gens = r.ideal.generators.size() == 1 && r.ideal.generators[0].to_string() == "g1 - 1";
        const bool zero = r.zero_set.size() == 1 && r.zero_set[0].order == 1;
        std::mt19937_64 rng(77);
        int disagree = 0;
        for (int s = 0; s < 100; ++s) {
            const cech::Character g = cech::random_character(d, rng);
            disagree += jump::in_zero_set(d, r.ideal, g) != (oracle_dim(d, g, 1) >= r.ideal.base_dim);
        }
        return Outcome{gens && zero && disagree == 0 && r.membership_disagreements == 0,
                       fmt("generators {%s}, zero set %zu point(s) of order %d, disagreements %d",
                           gens ? "g1 - 1" : "?", r.zero_set.size(), r.zero_set.empty() ? 0 : r.zero_set[0].order, disagree)};
    });

    criterion(4, "theta laws", 5, [] {
        const theta::ThetaParams p1 = params(1);
        const cplx t0 = theta::theta(p1, theta::VectorXcd::Zero(1));
        const double e_const = std::abs(t0 - 1.086434811213308);
        const double e_brute = std::abs(t0 - brute_theta(p1, theta::VectorXcd::Zero(1), 12));
        std::mt19937_64 rng(4);
        std::uniform_real_distribution<double> u(-0.5, 0.5);
        std::uniform_int_distribution<long> li(-2, 2);
        double quasi = 0, even = 0;
        for (int l : {1, 2}) {
            const theta::ThetaParams p = params(l);
            for (int s = 0; s < 20; ++s) {
                theta::VectorXcd z(l);
                for (int i = 0; i < l; ++i) z(i) = cplx(u(rng), u(rng));
                theta::LatticePoint lp;
                for (int i = 0; i < l; ++i) lp.p.push_back(li(rng)), lp.q.push_back(li(rng));
                const cplx lhs = brute_theta(p, z + theta::lattice_shift(p, lp), 14);
                const cplx rhs = theta::multiplier(p, lp, z) * theta::theta(p, z);
                quasi = std::max(quasi, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
                even = std::max(even, std::abs(theta::theta(p, z) - theta::theta(p, -z)));
            }
        }
        return Outcome{e_const < 1e-12 && e_brute < 1e-12 && quasi < 1e-10 && even < 1e-12,
                       fmt("|T(0)-ref| %.1e, |T(0)-direct| %.1e, quasi %.1e, evenness %.1e", e_const, e_brute, quasi, even)};
    });

    criterion(5, "transition-ratio log-affinity", 5, [] {
        double fit = 0, integer = 0;
        int configs = 0;
        for (const auto& e : scenario::list_examples(FLATLAB_SCENARIO_DIR)) {
            if (e.kind != "theta") continue;
            json sc = scenario::load_json_file(e.path);
            if (!sc.at("payload").contains("fit")) continue;
            sc["mode"] = "fit";
            const scenario::Report r = scenario::run_scenario(sc);
            configs += int(r.results.at("fit").size());
            for (const auto& v : r.verdicts) {
                if (v.name == "fit_residual") fit = std::max(fit, v.measured);
                if (v.name == "integer_translation_deviation") integer = std::max(integer, v.measured);
            }
        }
        return Outcome{configs > 0 && fit < 1e-8 && integer < 1e-10,
                       fmt("%d lattice shifts, max residual %.1e, integer-shift deviation %.1e", configs, fit, integer)};
    });

    criterion(6, "flat-family identities", 30, [] {
        const family::ChartFamily cf = family::grid_family(3, 0.25, 7);
        family::IdentityReport w;
        for (auto sign : {family::MetricSign::minus, family::MetricSign::plus}) {
            const family::IdentityReport r = family::identity_report(cf, 10, 3, sign);
            w.line_cocycle = std::max(w.line_cocycle, r.line_cocycle);
            w.jet_cocycle = std::max(w.jet_cocycle, r.jet_cocycle);
            w.compatibility = std::max(w.compatibility, std::max(r.compatibility, r.jet_compatibility));
            w.det_h = std::max(w.det_h, r.det_h);
            w.fiber_curvature = std::max(w.fiber_curvature, r.fiber_curvature);
            w.dbar_ratio = w.dbar_ratio == 0 ? r.dbar_ratio : std::min(w.dbar_ratio, r.dbar_ratio);
        }
        const bool ok = w.line_cocycle < 1e-12 && w.jet_cocycle < 1e-12 && w.compatibility < 1e-10 && w.det_h < 1e-12 &&
                        w.dbar_ratio >= 3.5 && w.fiber_curvature < 1e-6;
        return Outcome{ok, fmt("cocycles %.1e/%.1e, compat %.1e, det %.1e, dbar halving %.1f, fiber %.1e", w.line_cocycle,
                               w.jet_cocycle, w.compatibility, w.det_h, w.dbar_ratio, w.fiber_curvature)};
    });

    criterion(7, "curvature semipositivity", 60, [] {
        const family::ChartFamily cf = family::grid_family(3, 0.25, 7);
        family::MetricSpec spec;
        spec.eta = 0.1;
        spec.k = 1;
        const family::CurvatureReport a = family::curvature_semipositivity(cf, spec, {});
        spec.k = 2;
        const family::CurvatureReport b = family::curvature_semipositivity(cf, spec, {});
        return Outcome{a.min_eigenvalue >= -1e-4 && b.tau_margin >= -1e-4,
                       fmt("eta-mode min eigenvalue %.3e, 2eta tau margin %.1e (%zu points)", a.min_eigenvalue, b.tau_margin,
                           a.points + b.points)};
    });

    criterion(8, "cyclic-cover transform", 10, [] {
        const std::vector<dbar::Monomial> one{{1.0, 0, 0}};
        const std::vector<dbar::Monomial> poly{{1.0, 0, 0}, {cplx(0.5, 0.25), 1, 0}, {0.3, 0, 2}};
        double ratio = 0, analytic = 0;
        for (int m : {1, 2, 3}) {
            for (const auto& U : {one, poly}) {
                const dbar::PushforwardResult r = dbar::pushforward_integral_check(U, m, 0.1, 0.5);
                ratio = std::max(ratio, std::abs(r.ratio - 1.0));
            }
            const double lhs = dbar::pushforward_integral_check(one, m, 0.1, 0.5).lhs;
            analytic = std::max(analytic, std::abs(lhs / (4 * kPi * std::log(5.0)) - 1.0));
        }
        return Outcome{ratio < 1e-3 && analytic < 1e-3, fmt("max |ratio-1| %.1e, U=1 vs 4 pi ln(b/a) %.1e", ratio, analytic)};
    });

    criterion(9, "OT constant and extension", 120, [] {
        const dbar::OtOptimum o = dbar::ot_constant_optimize({});
        dbar::ExtensionOptions eo;
        eo.nr = eo.nt = 256;
        const dbar::ExtensionResult r = dbar::ot_extension_experiment({}, {0.0}, 1.0, eo);
        const double f0 = std::abs(r.F_origin - 1.0);
        const bool ok = o.c >= kPi && f0 < 1e-6 && r.residual < r.residual_coarse && r.ratio <= 1.1 * o.c;
        return Outcome{ok, fmt("C* %.4f at (%.3f, %.3f), |F(0)-1| %.1e, residual %.2e < %.2e, ratio %.4f", o.c, o.r1, o.r2, f0,
                               r.residual, r.residual_coarse, r.ratio)};
    });

    criterion(10, "smoothed curvature identity", 30, [] {
        const auto samples = dbar::annulus_samples(50, 0.05, 0.6, 9);
        const double r1 = dbar::curvature_identity_check(0.5, samples, 1e-3).max_residual;
        const double r2 = dbar::curvature_identity_check(0.5, samples, 2e-2).max_residual;
        const double r3 = dbar::curvature_identity_check(0.5, samples, 1e-2).max_residual;
        double c0 = INFINITY, slack = INFINITY;
        for (double eps : {0.1, 0.2, 0.3}) {
            const dbar::TwoWeightReport t = dbar::two_weight_pointwise_check(eps, {1.0}, samples, 1e-3);
            c0 = std::min(c0, t.c0);
            slack = std::min(slack, t.min_slack);
        }
        return Outcome{r1 < 1e-5 && r2 / r3 >= 3.5 && c0 > 0 && slack >= 0,
                       fmt("residual %.2e, halving ratio %.2f, c0 %.4f, min slack %.3e", r1, r2 / r3, c0, slack)};
    });

    std::printf("%s: %d of 10 criteria failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
