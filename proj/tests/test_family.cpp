#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "flatlab/error.hpp"
#include "flatlab/family.hpp"

#include <cmath>
#include <numbers>
#include <random>

using flatlab::Error;
using flatlab::ErrorKind;
using namespace flatlab::family;

namespace {

const cplx I(0.0, 1.0);
constexpr double kPi = std::numbers::pi;

ChartFamily fam() { return grid_family(3, 0.25, 7); }

ErrorKind kind_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error");
    return ErrorKind::Parse;
}

// random point of the torus lying in charts j, k (and l if >= 0), by rejection
bool sample_common(const ChartFamily& cf, std::mt19937_64& rng, int j, int k, int l, cplx& z) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 4000; ++t) {
        z = u(rng) + u(rng) * cf.tau0;
        if (in_chart(cf, j, z) && in_chart(cf, k, z) && (l < 0 || in_chart(cf, l, z))) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("chart grid: pair and triple overlaps") {
    const ChartFamily cf = fam();
    const int n = static_cast<int>(cf.charts.size());
    REQUIRE(n == 9);
    std::mt19937_64 rng(3);
    int triples = 0;
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) CHECK(overlaps(cf, j, k));
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k)
            for (int l = k + 1; l < n; ++l) {
                cplx z;
                const bool sampled = sample_common(cf, rng, j, k, l, z);
                CHECK(overlaps(cf, j, k, l) == sampled);
                triples += overlaps(cf, j, k, l);
            }
    CHECK(triples == 36);
}

TEST_CASE("primitive differences are constant and form a cocycle") {
    const ChartFamily cf = fam();
    const int n = static_cast<int>(cf.charts.size());
    std::mt19937_64 rng(5);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            CHECK(c_spread(cf, j, k) < 1e-12);
            cplx z;
            REQUIRE(sample_common(cf, rng, j, k, -1, z));
            CHECK(std::abs(primitive(cf, k, z) - primitive(cf, j, z) - c_const(cf, j, k)) < 1e-12);
        }
    const cplx taus[] = {0.0, 0.7 - 0.2 * I, 1.3 * I, -1.1 + 0.4 * I};
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
                if (!overlaps(cf, j, k, l) && !(j == k || k == l || j == l)) continue;
                CHECK(std::abs(c_const(cf, j, k) + c_const(cf, k, l) - c_const(cf, j, l)) < 1e-12);
                for (cplx tau : taus)
                    for (MetricSign s : {MetricSign::minus, MetricSign::plus}) {
                        const cplx lhs = family_transition(cf, tau, j, k, s) * family_transition(cf, tau, k, l, s);
                        CHECK(std::abs(lhs - family_transition(cf, tau, j, l, s)) < 1e-12 * std::max(1.0, std::abs(lhs)));
                    }
            }
}

TEST_CASE("metrics are compatible with transitions") {
    const ChartFamily cf = fam();
    std::mt19937_64 rng(9);
    const int n = static_cast<int>(cf.charts.size());
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            cplx z;
            REQUIRE(sample_common(cf, rng, j, k, -1, z));
            for (cplx tau : {cplx(0.3, 0.8), cplx(-1.2, 0.1)})
                for (MetricSign s : {MetricSign::minus, MetricSign::plus}) {
                    const double hk = family_metric(cf, tau, k, z, s);
                    const double lhs = family_metric(cf, tau, j, z, s) * std::norm(family_transition(cf, tau, j, k, s));
                    CHECK(std::abs(lhs - hk) < 1e-10 * hk);
                }
        }
}

TEST_CASE("transition at tau = pi i with c = 1 and trivial base is -1") {
    ChartFamily cf;
    cf.phase1 = cf.phase2 = 0.0;
    for (double a : {0.0, 1.0 / 3, 2.0 / 3})
        for (double b : {0.0, 1.0 / 3, 2.0 / 3}) cf.charts.push_back({a, b, 0.0, 1.0});
    validate(cf);
    // chart 0 centered at 0, chart 6 at 2/3: the overlap sits at x = -1/6 in chart 0
    CHECK(std::abs(c_const(cf, 0, 6) - 1.0) < 1e-14);
    CHECK(std::abs(base_transition(cf, 0, 6) - 1.0) < 1e-14);
    CHECK(std::abs(family_transition(cf, kPi * I, 0, 6) + 1.0) < 1e-12);
}

TEST_CASE("sections solve dbar s = tau s with second-order residual") {
    const ChartFamily cf = fam();
    const cplx z = 0.05 + 0.03 * I, tau = 0.8 - 0.6 * I;
    const double r1 = dbar_tau_residual(cf, tau, 0, z, 1e-2);
    const double r2 = dbar_tau_residual(cf, tau, 0, z, 5e-3);
    CHECK(r1 < 1e-3);
    // the h^2 terms of the x and y differences cancel for antiholomorphic s
    CHECK(r1 / r2 == doctest::Approx(16.0).epsilon(0.05));
    CHECK(kind_of([&] { dbar_tau_residual(cf, tau, 0, 0.24, 0.02); }) == ErrorKind::StencilOutOfDomain);
    CHECK(kind_of([&] { lift(cf, 0, 0.5 + 0.5 * I); }) == ErrorKind::OutOfChart);
    CHECK(kind_of([&] { overlap(cf, 0, 12); }) == ErrorKind::BadIndex);
}

TEST_CASE("fiber metrics are flat") {
    const ChartFamily cf = fam();
    for (int j : {0, 4, 8})
        for (MetricSign s : {MetricSign::minus, MetricSign::plus}) {
            const cplx z = cf.charts[j].a + 0.01 + (cf.charts[j].b - 0.02) * cf.tau0;
            CHECK(fiber_curvature(cf, cplx(0.9, -0.4), j, z, 1e-3, s) < 1e-6);
        }
}

TEST_CASE("jet bundle: cocycle, compatibility, positivity") {
    const ChartFamily cf = fam();
    std::mt19937_64 rng(11);
    const int n = static_cast<int>(cf.charts.size());
    const cplx tau(0.4, -0.7);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            cplx z;
            REQUIRE(sample_common(cf, rng, j, k, -1, z));
            const Mat2 G = jet_transition(cf, tau, j, k, z);
            const Mat2 Hj = jet_metric(cf, tau, j, z), Hk = jet_metric(cf, tau, k, z);
            const double scale = Hk.cwiseAbs().maxCoeff();
            CHECK((G.transpose() * Hj * G.conjugate() - Hk).cwiseAbs().maxCoeff() < 1e-10 * scale);
            const double h = family_metric(cf, tau, j, z);
            CHECK(std::abs(Hj.determinant() - h * h) < 1e-10 * h * h);
            Eigen::SelfAdjointEigenSolver<Mat2> es(Hj);
            CHECK(es.eigenvalues()(0) > 0.0);
            Mat2 D = Mat2::Zero();
            D(0, 0) = D(1, 1) = h;
            const Mat2 F = jet_frame_change(cf, j, z);
            CHECK((F.transpose() * D * F.conjugate() - Hj).cwiseAbs().maxCoeff() < 1e-10 * Hj.cwiseAbs().maxCoeff());
            CHECK(std::abs(G.determinant() - std::pow(family_transition(cf, tau, j, k), 2)) < 1e-10 * std::norm(G(0, 0)));
        }
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
                if (!overlaps(cf, j, k, l)) continue;
                cplx z;
                REQUIRE(sample_common(cf, rng, j, k, l, z));
                const Mat2 lhs = jet_transition(cf, tau, j, k, z) * jet_transition(cf, tau, k, l, z);
                CHECK((lhs - jet_transition(cf, tau, j, l, z)).cwiseAbs().maxCoeff() < 1e-12 * lhs.cwiseAbs().maxCoeff());
            }
}

TEST_CASE("complex Hessian of the weight matches the closed form") {
    const ChartFamily cf = fam();
    for (int k : {1, 2})
        for (MetricSign s : {MetricSign::minus, MetricSign::plus}) {
            MetricSpec spec;
            spec.k = k;
            spec.sign = s;
            const cplx z = 0.1 + 0.05 * I, tau = 0.6 + 0.9 * I;
            const Mat2 H = complex_hessian(cf, spec, 0, z, tau, 1e-3);
            const double sg = s == MetricSign::plus ? 1.0 : -1.0;
            CHECK(H(0, 0).real() == doctest::Approx(k * spec.eta * kPi).epsilon(1e-5));
            CHECK(std::abs(H(0, 1) + sg) < 1e-5);
            CHECK(std::abs(H(1, 0) + sg) < 1e-5);
            CHECK(H(1, 1).real() == doctest::Approx(1.0 / (2 * spec.eta)).epsilon(1e-5));
        }
}

TEST_CASE("curvature of the family weight") {
    const ChartFamily cf = fam();
    CurvatureGrid grid;
    grid.per_axis = 3;
    grid.tau_angles = 4;
    for (int k : {1, 2}) {
        MetricSpec spec;
        spec.k = k;
        const CurvatureReport r = curvature_semipositivity(cf, spec, grid);
        CHECK(r.points > 0);
        CHECK(r.min_eigenvalue > 0.0);
        CHECK(std::abs(r.tau_margin) < 1e-4);
        CHECK(r.full_margin < 0.0);
        CHECK(r.richardson_diff < 1e-4);
    }
    MetricSpec flat;
    flat.theta_divisor = false;
    flat.zero_primitive = true;
    flat.eta = 1e9;
    const CurvatureReport r = curvature_semipositivity(cf, flat, grid);
    CHECK(std::abs(r.min_eigenvalue) < 1e-6);
    MetricSpec bad;
    CHECK(kind_of([&] { weight(cf, bad, 4, 0.5 + 0.5 * I, 1.0); }) == ErrorKind::DivisorTooClose);
}

TEST_CASE("family json round trip") {
    const ChartFamily cf = fam();
    const ChartFamily back = family_from_json(family_to_json(cf));
    REQUIRE(back.charts.size() == cf.charts.size());
    for (size_t i = 0; i < cf.charts.size(); ++i) CHECK(back.charts[i].s == cf.charts[i].s);
    nlohmann::json j = family_to_json(cf);
    j["half_width"] = 0.4;
    CHECK(kind_of([&] { family_from_json(j); }) == ErrorKind::Schema);
}
