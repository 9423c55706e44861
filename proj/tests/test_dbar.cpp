#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "flatlab/dbar.hpp"
#include "flatlab/error.hpp"

#include <cmath>
#include <numbers>

using flatlab::Error;
using flatlab::ErrorKind;
using namespace flatlab::dbar;

namespace {

const cplx I(0.0, 1.0);
constexpr double kPi = std::numbers::pi;

ErrorKind kind_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error");
    return ErrorKind::Parse;
}

cplx fd_dbar(const CutoffSpec& c, cplx w, double h) {
    auto f = [&](cplx z) { return cutoff_eval(c, z); };
    return 0.5 * ((f(w + h) - f(w - h)) / (2 * h) + I * (f(w + I * h) - f(w - I * h)) / (2 * h));
}

// midpoint rule in s = log r for int_a^b g(r) r dr
double radial_midpoint(double a, double b, auto&& g) {
    const int n = 200000;
    const double s0 = std::log(a), ds = (std::log(b) - s0) / n;
    double t = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = std::exp(s0 + (i + 0.5) * ds);
        t += g(r) * r * r * ds;
    }
    return t;
}

}  // namespace

TEST_CASE("cutoff plateaus, range and derivative") {
    const CutoffSpec c{0.3, 0.6, 2};
    CHECK(cutoff_eval(c, 0.05) == 1.0);
    CHECK(cutoff_eval(c, 0.5) == 0.0);
    for (int k = 1; k < 200; ++k) {
        const double v = cutoff_eval(c, std::polar(k / 200.0, 0.3 * k));
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    for (int m : {1, 2, 3})
        for (double ang : {0.0, 1.1, 2.9, -2.0}) {
            const CutoffSpec cm{0.3, 0.6, m};
            const cplx w = std::polar(std::pow(0.45, m), ang);
            const cplx a = dbar_cutoff_eval(cm, w), f = fd_dbar(cm, w, 1e-6 * std::abs(w));
            CHECK(std::abs(a - f) < 1e-6 * std::abs(a));
        }
    const cplx w = std::polar(0.2, 0.7);
    const cplx a = dbar_cutoff_eval(c, w);
    CHECK(std::abs(a - fd_dbar(c, w, 1e-6)) < 1e-6 * std::abs(a));
    const double e1 = std::abs(a - fd_dbar(c, w, 4e-3)), e2 = std::abs(a - fd_dbar(c, w, 2e-3));
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
    CHECK(cutoff_eta() == doctest::Approx(1.875));
    CHECK(kind_of([&] { cutoff_eval(c, 0.0); }) == ErrorKind::OutOfDomain);
    CHECK(kind_of([&] { cutoff_eval(c, 1.0); }) == ErrorKind::OutOfDomain);
    CHECK(kind_of([&] { cutoff_eval({0.6, 0.3, 1}, 0.1); }) == ErrorKind::InvalidCutoff);
}

TEST_CASE("cyclic cover transform keeps the factor m") {
    const PushforwardResult one = pushforward_integral_check({{1.0, 0, 0}}, 2, 0.25, 0.5);
    CHECK(one.lhs == doctest::Approx(4 * kPi * std::log(2.0)).epsilon(1e-10));
    CHECK(one.ratio == doctest::Approx(1.0).epsilon(1e-10));
    const PushforwardResult id = pushforward_integral_check({{0.5, 1, 2}, {1.0 - 2.0 * I, 0, 1}}, 1, 0.2, 0.7);
    CHECK(id.lhs == id.rhs);
    for (int m : {1, 2, 3}) {
        const PushforwardResult r = pushforward_integral_check({{1.0, 1, 0}}, m, 0.25, 0.5);
        CHECK(r.ratio == doctest::Approx(1.0).epsilon(1e-3));
        // |w|^2 against 2 dx dy / |w|^2 integrates to 2 pi (b^2 - a^2)
        CHECK(r.lhs == doctest::Approx(2 * kPi * (0.25 - 0.0625)).epsilon(1e-10));
    }
    CHECK(kind_of([] { pushforward_integral_check({{1.0, 0, 0}}, 2, 0.0, 0.5); }) == ErrorKind::QuadratureFailure);
}

TEST_CASE("radial integral against the antiderivative") {
    const RadialIntegral r = radial_integral_eval(0.25, 0.5);
    CHECK(r.quadrature == doctest::Approx(1.1331).epsilon(1e-4));
    CHECK(r.quadrature == doctest::Approx(0.5 * kPi * (1 / std::log(2.0) - 1 / std::log(4.0))).epsilon(1e-12));
    CHECK(std::abs(r.closed_form - r.quadrature) < 1e-10);
    CHECK(r.without_half_pi == doctest::Approx(r.closed_form * 2 / kPi));
    CHECK(r.refinement_change < 1e-6);
    const double oracle = 2 * kPi * radial_midpoint(0.25, 0.5, [](double x) { return 1.0 / (x * x * std::pow(std::log(1 / (x * x)), 2)); });
    CHECK(r.quadrature == doctest::Approx(oracle).epsilon(1e-8));
    CHECK(radial_integral_eval(0.4, 0.4 + 1e-9).quadrature < 1e-7);
}

TEST_CASE("log log(1/r) changes by log m under the power map") {
    std::vector<double> radii;
    for (int k = 1; k < 100; ++k) radii.push_back(k / 100.0);
    for (int m : {1, 2, 3, 7}) CHECK(hyperbolic_invariance_defect(m, radii) < 1e-12);
}

TEST_CASE("polar grid quadrature") {
    for (int n : {8, 32, 256}) {
        const PolarGrid g = make_polar_grid(1e-3, 0.8, n, 16);
        std::vector<double> one(g.nodes(), 1.0), r2(g.nodes());
        for (int i = 0; i <= g.nr; ++i)
            for (int j = 0; j < g.nt; ++j) r2[g.idx(i, j)] = std::norm(g.node(i, j));
        CHECK(grid_integral(g, one) == doctest::Approx(kPi * (0.64 - 1e-6)).epsilon(1e-12));
        if (n == 256) CHECK(grid_integral(g, r2) == doctest::Approx(kPi * (std::pow(0.8, 4) - 1e-12) / 2).epsilon(1e-6));
    }
    CHECK(kind_of([] { make_polar_grid(1e-3, 0.8, 7, 16); }) == ErrorKind::Schema);
}

TEST_CASE("minimal weighted-norm dbar solve") {
    const Scalar W = [](cplx w) { return std::exp(-2 * std::norm(w)); };
    const Field one = [](cplx) { return cplx(1.0); };
    {
        const PolarGrid g = make_polar_grid(1e-3, 0.8, 32, 32);
        const SolveResult z = dbar_solve(g, [](cplx) { return cplx(0.0); }, W);
        CHECK(z.norm2 == 0.0);
        for (cplx x : z.u) CHECK(x == cplx(0.0));
    }
    // on the annulus the minimal solution is conj(w) - c/w with c = <conj w, 1/w> / |1/w|^2
    const double num = radial_midpoint(1e-3, 0.8, [](double r) { return std::exp(-2 * r * r); });
    const double den = radial_midpoint(1e-3, 0.8, [](double r) { return std::exp(-2 * r * r) / (r * r); });
    const double c = num / den;
    double prev_res = INFINITY;
    for (int n : {32, 64, 128}) {
        const PolarGrid g = make_polar_grid(1e-3, 0.8, n, n);
        const SolveResult s = dbar_solve(g, one, W);
        CHECK(s.algebraic_residual < 1e-9);
        double err = 0, ref = 0;
        for (int i = 0; i <= g.nr; ++i)
            for (int j = 0; j < g.nt; ++j) {
                const cplx w = g.node(i, j);
                const cplx exact = std::conj(w) - c / w;
                err += g.quad[g.idx(i, j)] * W(w) * std::norm(s.u[g.idx(i, j)] - exact);
                ref += g.quad[g.idx(i, j)] * W(w) * std::norm(exact);
            }
        if (n == 128) CHECK(std::sqrt(err / ref) < 1e-2);
        const double bound = hormander_bound(g, one, W, [](cplx) { return 1.0; });
        CHECK(s.norm2 <= 1.05 * bound);
        const double res = consistency_residual(g, s.u, one);
        CHECK(res < prev_res);
        prev_res = res;
    }
    const PolarGrid g = make_polar_grid(1e-3, 0.8, 16, 16);
    CHECK(kind_of([&] { dbar_solve(g, one, [](cplx) { return 0.0; }); }) == ErrorKind::SingularWeight);
    SolveOptions capped;
    capped.cap = 1;
    CHECK(kind_of([&] { dbar_solve(g, one, W, capped); }) == ErrorKind::SolverDivergence);
}

TEST_CASE("explicit extension constant") {
    CHECK(ot_constant(0.5, 0.9, LVariant::log_ratio) == doctest::Approx(625.1).epsilon(1e-3));
    const double a = std::log(1 / 0.3), b = std::log(1 / 0.6);
    CHECK(ot_constant(0.3, 0.6) == doctest::Approx(kPi / (0.09 * std::log(a / b)) * (1 / b - 1 / a)).epsilon(1e-14));
    CHECK(kind_of([] { ot_constant(0.5, 0.6, LVariant::log_ratio); }) == ErrorKind::OutOfAdmissibleRegion);
    CHECK(kind_of([] { ot_constant(0.6, 0.5); }) == ErrorKind::OutOfAdmissibleRegion);
    // pi e^{2a}/a is the r2 -> r1 limit of the difference form, minimized at a = 1/2
    CHECK(ot_constant(std::exp(-0.5), std::exp(-0.5) + 1e-7) == doctest::Approx(2 * kPi * std::exp(1.0)).epsilon(1e-5));
    for (LVariant v : {LVariant::difference, LVariant::log_ratio}) {
        const OtOptimum o = ot_constant_optimize({}, v);
        CHECK(o.c >= kPi);
        CHECK(o.shrink_change < 1e-6);
        // independent dense scan
        double best = INFINITY;
        for (int i = 0; i <= 400; ++i)
            for (int j = 0; j <= 400; ++j) {
                const double r1 = 0.05 + 0.55 * i / 400, r2 = 0.65 + 0.34 * j / 400;
                try {
                    best = std::min(best, ot_constant(r1, r2, v));
                } catch (const Error&) {
                }
            }
        CHECK(o.c <= best + 1e-9);
        CHECK(o.c >= best * (1 - 1e-3));
    }
}

TEST_CASE("extension from the origin") {
    const CutoffSpec c{0.3, 0.6, 2};
    ExtensionOptions opt;
    opt.nr = opt.nt = 128;
    const ExtensionResult e = ot_extension_experiment(c, {}, 1.0, opt);
    CHECK(std::abs(e.F_origin - 1.0) < 1e-6);
    CHECK(e.residual < e.residual_coarse);
    CHECK(e.ratio >= kPi * (1 - 1e-3));
    CHECK(e.ratio <= e.bound);
    const ExtensionResult z = ot_extension_experiment(c, {}, 0.0, opt);
    for (cplx x : z.F) CHECK(x == cplx(0.0));
    // the constant is the minimal extension for a radial weight
    const ExtensionResult q = ot_extension_experiment(c, {1.0}, 2.0 - I, opt);
    CHECK(std::abs(q.F_origin - (2.0 - I)) < 1e-6);
    CHECK(q.ratio >= kPi * (1 - std::exp(-1.0)) * (1 - 1e-3));
    CHECK(q.ratio <= 1.1 * q.bound);
    CHECK(kind_of([&] { ot_extension_experiment(c, {-1.0}, 1.0, opt); }) == ErrorKind::NotSubharmonic);
}

TEST_CASE("smoothed curvature identity") {
    const IdentityCheck one = curvature_identity_check(0.5, {0.3 + 0.1 * I}, 1e-3);
    CHECK(one.max_residual < 1e-5);
    CHECK(one.max_limit_form_residual > 1.0);
    const std::vector<cplx> s = annulus_samples(50, 0.05, 0.6, 4);
    const double r1 = curvature_identity_check(0.5, s, 2e-2).max_residual;
    const double r2 = curvature_identity_check(0.5, s, 1e-2).max_residual;
    CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.1));
    std::vector<double> ring;
    for (int k = 0; k < 12; ++k) {
        const double v = curvature_identity_check(0.5, {std::polar(0.2, k * kPi / 6)}, 1e-3).max_residual;
        ring.push_back(v);
    }
    for (double v : ring) CHECK(std::abs(v - ring[0]) < 1e-8);
    CHECK(kind_of([] { curvature_identity_check(0.5, {0.87}, 1e-3); }) == ErrorKind::StencilOutOfDomain);
}

TEST_CASE("two-weight pointwise inequalities") {
    const std::vector<cplx> s = annulus_samples(50, 0.05, 0.7, 2);
    for (double eps : {0.1, 0.2, 0.3}) {
        const TwoWeightReport r = two_weight_pointwise_check(eps, {1.0}, s, 1e-3);
        // the defect in (i) is exactly eps^2/A^2, i.e. 2 pi times the smoothed Dirac density
        CHECK(r.c0 == doctest::Approx(2 * kPi).epsilon(1e-4));
        CHECK(r.min_slack >= 0.0);
        double rmax = 0.0;
        for (cplx w : s) rmax = std::max(rmax, std::abs(w));
        const double A = rmax * rmax + eps * eps;
        CHECK(r.min_slack == doctest::Approx(eps * eps / (A * A)).epsilon(1e-4));
    }
    // near |w|^2 + eps^2 = 1 the metric log(1/A) vanishes and beta tends to gamma^{1/2}
    const double eps = 0.3, rr = std::sqrt(1 - eps * eps) - 1e-6;
    const TwoWeightReport edge = two_weight_pointwise_check(eps, {1.0}, {rr}, 1e-7);
    CHECK(edge.min_alpha < 2e-3);
    CHECK(edge.max_beta == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(kind_of([&] { two_weight_pointwise_check(0.3, {0.5}, s, 1e-3); }) == ErrorKind::OutOfAdmissibleRegion);
}
