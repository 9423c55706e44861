#include "flatlab/family.hpp"

#include "flatlab/error.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace flatlab::family {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

double wrap(double t) { return t - std::round(t); }

void check_index(const ChartFamily& cf, int j) {
    if (j < 0 || j >= static_cast<int>(cf.charts.size()))
        throw Error(ErrorKind::BadIndex, "chart index " + std::to_string(j) + " out of range");
}

// Lattice coordinates (x, y) of z = x + y tau0.
void lattice_coords(const ChartFamily& cf, cplx z, double& x, double& y) {
    y = z.imag() / cf.tau0.imag();
    x = z.real() - y * cf.tau0.real();
}

cplx from_lattice(const ChartFamily& cf, double x, double y) { return x + y * cf.tau0; }

// Chart-local coordinate inside the window, without wrapping.
bool in_window(const ChartFamily& cf, int j, cplx zl, double margin = 0.0) {
    double x, y;
    lattice_coords(cf, zl, x, y);
    const Chart& c = cf.charts[j];
    return std::abs(x - c.a) < cf.half_width - margin && std::abs(y - c.b) < cf.half_width - margin;
}

void need_window(const ChartFamily& cf, int j, cplx zl) {
    if (!in_window(cf, j, zl)) throw Error(ErrorKind::StencilOutOfDomain, "stencil leaves chart " + std::to_string(j));
}

double sgn(MetricSign s) { return s == MetricSign::plus ? 1.0 : -1.0; }

double metric_local(const ChartFamily& cf, cplx tau, int j, cplx zl, MetricSign sign) {
    const cplx f = zl + cf.charts[j].s;
    // Re(conj(tau) f) = Re(tau conj(f))
    return cf.charts[j].h0 * std::exp(2.0 * sgn(sign) * std::real(tau * std::conj(f)));
}

}  // namespace

ChartFamily grid_family(int n, double half_width, std::uint64_t seed) {
    ChartFamily cf;
    cf.half_width = half_width;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> s(-0.2, 0.2), h(0.5, 2.0);
    for (int ia = 0; ia < n; ++ia)
        for (int ib = 0; ib < n; ++ib) {
            Chart c;
            c.a = static_cast<double>(ia) / n;
            c.b = static_cast<double>(ib) / n;
            c.s = cplx(s(rng), s(rng));
            c.h0 = h(rng);
            cf.charts.push_back(c);
        }
    cf.phase1 = 0.125;
    cf.phase2 = 0.375;
    validate(cf);
    return cf;
}

void validate(const ChartFamily& cf) {
    if (!(cf.tau0.imag() > 0.0)) throw Error(ErrorKind::DegenerateLattice, "Im tau0 must be positive");
    if (!(cf.half_width > 0.0 && cf.half_width <= 0.25))
        throw Error(ErrorKind::Schema, "half_width must lie in (0, 1/4] so that overlaps are connected");
    if (cf.charts.empty()) throw Error(ErrorKind::Schema, "no charts");
    for (const Chart& c : cf.charts)
        if (!(c.h0 > 0.0)) throw Error(ErrorKind::Schema, "base metric constants must be positive");
    // every point of a fine lattice grid lies in some chart
    const int n = 24;
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const cplx z = from_lattice(cf, (i + 0.5) / n, (k + 0.5) / n);
            bool covered = false;
            for (int j = 0; j < static_cast<int>(cf.charts.size()) && !covered; ++j) covered = in_chart(cf, j, z);
            if (!covered) throw Error(ErrorKind::Schema, "charts do not cover the torus");
        }
}

bool in_chart(const ChartFamily& cf, int j, cplx z, double margin) {
    check_index(cf, j);
    double x, y;
    lattice_coords(cf, z, x, y);
    const Chart& c = cf.charts[j];
    return std::abs(wrap(x - c.a)) < cf.half_width - margin && std::abs(wrap(y - c.b)) < cf.half_width - margin;
}

cplx lift(const ChartFamily& cf, int j, cplx z) {
    if (!in_chart(cf, j, z)) throw Error(ErrorKind::OutOfChart, "point outside chart " + std::to_string(j));
    double x, y;
    lattice_coords(cf, z, x, y);
    const Chart& c = cf.charts[j];
    return from_lattice(cf, c.a + wrap(x - c.a), c.b + wrap(y - c.b));
}

bool overlaps(const ChartFamily& cf, int j, int k) {
    check_index(cf, j);
    check_index(cf, k);
    const Chart &a = cf.charts[j], &b = cf.charts[k];
    return std::abs(wrap(b.a - a.a)) < 2 * cf.half_width && std::abs(wrap(b.b - a.b)) < 2 * cf.half_width;
}

bool overlaps(const ChartFamily& cf, int j, int k, int l) {
    if (!overlaps(cf, j, k) || !overlaps(cf, j, l) || !overlaps(cf, k, l)) return false;
    const Chart &a = cf.charts[j], &b = cf.charts[k], &c = cf.charts[l];
    const double w = cf.half_width;
    auto meet = [w](double d1, double d2) {
        const double lo = std::max({-w, d1 - w, d2 - w});
        const double hi = std::min({w, d1 + w, d2 + w});
        return lo < hi;
    };
    return meet(wrap(b.a - a.a), wrap(c.a - a.a)) && meet(wrap(b.b - a.b), wrap(c.b - a.b));
}

Overlap overlap(const ChartFamily& cf, int j, int k) {
    if (!overlaps(cf, j, k))
        throw Error(ErrorKind::NoOverlap, "charts " + std::to_string(j) + " and " + std::to_string(k) + " do not meet");
    const Chart &a = cf.charts[j], &b = cf.charts[k];
    const double x = a.a + 0.5 * wrap(b.a - a.a), y = a.b + 0.5 * wrap(b.b - a.b);
    Overlap o;
    o.sample = from_lattice(cf, x, y);
    const cplx zj = lift(cf, j, o.sample), zk = lift(cf, k, o.sample);
    double dx, dy;
    lattice_coords(cf, zj - zk, dx, dy);
    o.p = std::lround(dx);
    o.q = std::lround(dy);
    return o;
}

cplx primitive(const ChartFamily& cf, int j, cplx z) { return lift(cf, j, z) + cf.charts[j].s; }

cplx c_const(const ChartFamily& cf, int j, int k) {
    const Overlap o = overlap(cf, j, k);
    return primitive(cf, k, o.sample) - primitive(cf, j, o.sample);
}

double c_spread(const ChartFamily& cf, int j, int k, int n) {
    const Overlap o = overlap(cf, j, k);
    const Chart &a = cf.charts[j], &b = cf.charts[k];
    const double w = cf.half_width;
    const double dx = wrap(b.a - a.a), dy = wrap(b.b - a.b);
    const double x0 = std::max(-w, dx - w), x1 = std::min(w, dx + w);
    const double y0 = std::max(-w, dy - w), y1 = std::min(w, dy + w);
    const cplx ref = primitive(cf, k, o.sample) - primitive(cf, j, o.sample);
    double spread = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = (i + 0.5) / n;
        const double u = std::fmod(0.618 * (i + 1), 1.0) * 0.8 + 0.1;
        const cplx z = from_lattice(cf, a.a + x0 + (x1 - x0) * (0.1 + 0.8 * t), a.b + y0 + (y1 - y0) * u);
        spread = std::max(spread, std::abs(primitive(cf, k, z) - primitive(cf, j, z) - ref));
    }
    return spread;
}

cplx base_transition(const ChartFamily& cf, int j, int k) {
    const Overlap o = overlap(cf, j, k);
    const double mod = std::sqrt(cf.charts[k].h0 / cf.charts[j].h0);
    return mod * std::exp(2.0 * kPi * kI * (cf.phase1 * o.p + cf.phase2 * o.q));
}

cplx family_transition(const ChartFamily& cf, cplx tau, int j, int k, MetricSign sign) {
    return std::exp(sgn(sign) * tau * std::conj(c_const(cf, j, k))) * base_transition(cf, j, k);
}

double family_metric(const ChartFamily& cf, cplx tau, int j, cplx z, MetricSign sign) {
    return metric_local(cf, tau, j, lift(cf, j, z), sign);
}

double dbar_tau_residual(const ChartFamily& cf, cplx tau, int j, cplx z, double h) {
    const cplx zl = lift(cf, j, z);
    auto s = [&](cplx w) {
        need_window(cf, j, w);
        return std::exp(tau * std::conj(w + cf.charts[j].s));
    };
    const cplx sx = (s(zl + h) - s(zl - h)) / (2 * h);
    const cplx sy = (s(zl + kI * h) - s(zl - kI * h)) / (2 * h);
    return std::abs(0.5 * (sx + kI * sy) - tau * s(zl));
}

Mat2 jet_transition(const ChartFamily& cf, cplx tau, int j, int k, cplx z) {
    const cplx fj = primitive(cf, j, z), fk = primitive(cf, k, z);
    Mat2 n;
    n << 1.0, 0.0, 2.0 * std::conj(fj) - 2.0 * std::conj(fk), 1.0;
    return family_transition(cf, tau, j, k, MetricSign::minus) * n;
}

Mat2 jet_metric(const ChartFamily& cf, cplx tau, int j, cplx z) {
    const cplx f = primitive(cf, j, z);
    const double h = family_metric(cf, tau, j, z, MetricSign::minus);
    Mat2 m;
    m << 1.0 + 4.0 * std::norm(f), -2.0 * std::conj(f), -2.0 * f, 1.0;
    return h * m;
}

Mat2 jet_frame_change(const ChartFamily& cf, int j, cplx z) {
    Mat2 m;
    m << 1.0, 0.0, -2.0 * std::conj(primitive(cf, j, z)), 1.0;
    return m;
}

double fiber_curvature(const ChartFamily& cf, cplx tau, int j, cplx z, double h, MetricSign sign) {
    const cplx zl = lift(cf, j, z);
    auto psi = [&](cplx w) {
        need_window(cf, j, w);
        return -std::log(metric_local(cf, tau, j, w, sign));
    };
    const double lap = (psi(zl + h) + psi(zl - h) + psi(zl + kI * h) + psi(zl - kI * h) - 4 * psi(zl)) / (h * h);
    return std::abs(0.25 * lap);
}

double weight(const ChartFamily& cf, const MetricSpec& spec, int j, cplx zl, cplx tau) {
    check_index(cf, j);
    need_window(cf, j, zl);
    const double keta = spec.k * spec.eta;
    double psi = -std::log(cf.charts[j].h0) + (std::norm(tau) - 1.0) / (2.0 * spec.eta);
    if (!spec.zero_primitive) psi -= sgn(spec.sign) * 2.0 * std::real(std::conj(tau) * (zl + cf.charts[j].s));
    if (spec.theta_divisor) {
        theta::ThetaParams tp;
        tp.Z = MatrixXcd::Constant(1, 1, cf.tau0);
        tp.m = {1};
        const cplx s = theta::theta(tp, theta::VectorXcd::Constant(1, zl));
        if (std::abs(s) <= 1e-3) throw Error(ErrorKind::DivisorTooClose, "divisor section below 1e-3 at a sample");
        const double chi = spec.divisor_scale * 2.0 * kPi * zl.imag() * zl.imag() / cf.tau0.imag();
        psi += keta * (chi - std::log(std::norm(s)));
    }
    return psi;
}

Mat2 complex_hessian(const ChartFamily& cf, const MetricSpec& spec, int j, cplx z, cplx tau, double h) {
    // real variables (x, y, u, v) with z = x + iy, tau = u + iv
    auto f = [&](const double d[4]) { return weight(cf, spec, j, z + cplx(d[0], d[1]), tau + cplx(d[2], d[3])); };
    double H[4][4];
    const double zero[4] = {0, 0, 0, 0};
    const double f0 = f(zero);
    for (int a = 0; a < 4; ++a) {
        double p[4] = {0, 0, 0, 0}, m[4] = {0, 0, 0, 0};
        p[a] = h;
        m[a] = -h;
        H[a][a] = (f(p) - 2 * f0 + f(m)) / (h * h);
        for (int b = a + 1; b < 4; ++b) {
            double pp[4] = {0, 0, 0, 0}, pm[4] = {0, 0, 0, 0}, mp[4] = {0, 0, 0, 0}, mm[4] = {0, 0, 0, 0};
            pp[a] = h, pp[b] = h;
            pm[a] = h, pm[b] = -h;
            mp[a] = -h, mp[b] = h;
            mm[a] = -h, mm[b] = -h;
            H[a][b] = H[b][a] = (f(pp) - f(pm) - f(mp) + f(mm)) / (4 * h * h);
        }
    }
    Mat2 out;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const int xa = 2 * a, ya = 2 * a + 1, xb = 2 * b, yb = 2 * b + 1;
            out(a, b) = 0.25 * cplx(H[xa][xb] + H[ya][yb], H[xa][yb] - H[ya][xb]);
        }
    return out;
}

CurvatureReport curvature_semipositivity(const ChartFamily& cf, const MetricSpec& spec, const CurvatureGrid& grid) {
    validate(cf);
    if (!(spec.eta > 0.0)) throw Error(ErrorKind::Schema, "eta must be positive");
    if (spec.k != 1 && spec.k != 2) throw Error(ErrorKind::Schema, "mode must be 1 (eta) or 2 (2 eta)");
    CurvatureReport rep;
    rep.min_eigenvalue = INFINITY;
    rep.tau_margin = INFINITY;
    rep.full_margin = INFINITY;
    const double w = cf.half_width, h = grid.step;
    const cplx zero_pt = 0.5 + 0.5 * cf.tau0;
    for (int j = 0; j < static_cast<int>(cf.charts.size()); ++j) {
        const Chart& c = cf.charts[j];
        for (int ix = 0; ix < grid.per_axis; ++ix)
            for (int iy = 0; iy < grid.per_axis; ++iy) {
                const double x = c.a - w + 2 * w * (ix + 0.5) / grid.per_axis;
                const double y = c.b - w + 2 * w * (iy + 0.5) / grid.per_axis;
                const cplx zl = from_lattice(cf, x, y);
                double dist = INFINITY;
                for (int m = -2; m <= 2; ++m)
                    for (int n = -2; n <= 2; ++n) dist = std::min(dist, std::abs(zl - zero_pt - double(m) - double(n) * cf.tau0));
                if (dist < grid.divisor_clearance) {
                    ++rep.skipped;
                    continue;
                }
                if (!in_window(cf, j, zl, 2 * h)) throw Error(ErrorKind::StencilOutOfDomain, "grid point too close to chart edge");
                for (double r : grid.tau_radii)
                    for (int ia = 0; ia < grid.tau_angles; ++ia) {
                        const cplx tau = std::polar(r, 2 * kPi * ia / grid.tau_angles);
                        const Mat2 H = complex_hessian(cf, spec, j, zl, tau, h) / (2 * kPi);
                        const Mat2 H2 = complex_hessian(cf, spec, j, zl, tau, h / 2) / (2 * kPi);
                        rep.richardson_diff = std::max(rep.richardson_diff, (H - H2).cwiseAbs().maxCoeff());
                        Eigen::SelfAdjointEigenSolver<Mat2> es(0.5 * (H + H.adjoint()));
                        const double ev = es.eigenvalues()(0);
                        if (ev < rep.min_eigenvalue) {
                            rep.min_eigenvalue = ev;
                            rep.min_at_z = zl;
                            rep.min_at_tau = tau;
                            rep.min_chart = j;
                        }
                        const double floor = 1.0 / (4 * kPi * spec.eta);
                        rep.tau_margin = std::min(rep.tau_margin, H(1, 1).real() - floor);
                        Mat2 D = 0.5 * (H + H.adjoint());
                        D(1, 1) -= floor;
                        Eigen::SelfAdjointEigenSolver<Mat2> ed(D);
                        rep.full_margin = std::min(rep.full_margin, ed.eigenvalues()(0));
                        ++rep.points;
                    }
            }
    }
    return rep;
}

namespace {

// point of the common part of the listed charts, (u, v) in (0, 1)^2
cplx common_point(const ChartFamily& cf, const std::vector<int>& idx, double u, double v) {
    const Chart& a = cf.charts[idx[0]];
    const double w = cf.half_width;
    double x0 = -w, x1 = w, y0 = -w, y1 = w;
    for (int k : idx) {
        const double dx = wrap(cf.charts[k].a - a.a), dy = wrap(cf.charts[k].b - a.b);
        x0 = std::max(x0, dx - w), x1 = std::min(x1, dx + w);
        y0 = std::max(y0, dy - w), y1 = std::min(y1, dy + w);
    }
    if (!(x0 < x1 && y0 < y1)) throw Error(ErrorKind::NoOverlap, "charts have no common point");
    const double x = x0 + (x1 - x0) * (0.05 + 0.9 * u), y = y0 + (y1 - y0) * (0.05 + 0.9 * v);
    return from_lattice(cf, a.a + x, a.b + y);
}

}  // namespace

IdentityReport identity_report(const ChartFamily& cf, int samples, std::uint64_t seed, MetricSign sign) {
    validate(cf);
    IdentityReport r;
    r.samples = samples;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0), t(-2.0, 2.0);
    const int n = static_cast<int>(cf.charts.size());
    auto rel = [](double err, double scale) { return err / std::max(scale, 1e-300); };
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            if (j == k || !overlaps(cf, j, k)) continue;
            ++r.edges;
            r.c_spread = std::max(r.c_spread, c_spread(cf, j, k));
            for (int s = 0; s < samples; ++s) {
                const cplx tau(t(rng), t(rng));
                const cplx z = common_point(cf, {j, k}, u(rng), u(rng));
                const double hk = family_metric(cf, tau, k, z, sign);
                const double hj = family_metric(cf, tau, j, z, sign);
                const cplx g = family_transition(cf, tau, j, k, sign);
                r.compatibility = std::max(r.compatibility, rel(std::abs(hj * std::norm(g) - hk), hk));
                const Mat2 G = jet_transition(cf, tau, j, k, z);
                const Mat2 Hj = jet_metric(cf, tau, j, z), Hk = jet_metric(cf, tau, k, z);
                const double sc = Hk.cwiseAbs().maxCoeff();
                r.jet_compatibility = std::max(r.jet_compatibility, rel((G.transpose() * Hj * G.conjugate() - Hk).cwiseAbs().maxCoeff(), sc));
                r.jet_compatibility_conj_form =
                    std::max(r.jet_compatibility_conj_form, rel((G.adjoint() * Hj * G - Hk).cwiseAbs().maxCoeff(), sc));
                const double h = family_metric(cf, tau, j, z);
                r.det_h = std::max(r.det_h, rel(std::abs(Hj.determinant() - h * h), h * h));
                const cplx gm = family_transition(cf, tau, j, k);
                r.det_g = std::max(r.det_g, rel(std::abs(G.determinant() - gm * gm), std::norm(gm)));
            }
        }
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
                if (j == k || k == l || j == l || !overlaps(cf, j, k, l)) continue;
                ++r.triples;
                for (int s = 0; s < samples; ++s) {
                    const cplx tau(t(rng), t(rng));
                    const cplx z = common_point(cf, {j, k, l}, u(rng), u(rng));
                    const cplx lhs = family_transition(cf, tau, j, k, sign) * family_transition(cf, tau, k, l, sign);
                    const cplx rhs = family_transition(cf, tau, j, l, sign);
                    r.line_cocycle = std::max(r.line_cocycle, rel(std::abs(lhs - rhs), std::abs(rhs)));
                    const Mat2 L = jet_transition(cf, tau, j, k, z) * jet_transition(cf, tau, k, l, z);
                    const Mat2 R = jet_transition(cf, tau, j, l, z);
                    r.jet_cocycle = std::max(r.jet_cocycle, rel((L - R).cwiseAbs().maxCoeff(), R.cwiseAbs().maxCoeff()));
                }
            }
    const cplx tau(0.8, -0.6);
    for (int j = 0; j < n; ++j) {
        const cplx z = from_lattice(cf, cf.charts[j].a + 0.05, cf.charts[j].b - 0.03);
        r.fiber_curvature = std::max(r.fiber_curvature, fiber_curvature(cf, tau, j, z, 1e-3, sign));
    }
    const cplx z0 = from_lattice(cf, cf.charts[0].a + 0.05, cf.charts[0].b + 0.03);
    r.dbar_residual = dbar_tau_residual(cf, tau, 0, z0, 1e-2);
    r.dbar_ratio = r.dbar_residual / dbar_tau_residual(cf, tau, 0, z0, 5e-3);
    return r;
}

ChartFamily family_from_json(const json& j) {
    if (!j.is_object() || !j.contains("charts")) throw Error(ErrorKind::Schema, "family config needs charts");
    ChartFamily cf;
    if (j.contains("tau0")) {
        const json& t = j.at("tau0");
        if (!t.is_array() || t.size() != 2) throw Error(ErrorKind::Schema, "tau0 must be [re, im]");
        cf.tau0 = cplx(t[0].get<double>(), t[1].get<double>());
    }
    if (j.contains("half_width")) cf.half_width = j.at("half_width").get<double>();
    if (j.contains("phases")) {
        const auto ph = j.at("phases").get<std::vector<double>>();
        if (ph.size() != 2) throw Error(ErrorKind::Schema, "phases must have two entries");
        cf.phase1 = ph[0];
        cf.phase2 = ph[1];
    }
    for (const json& c : j.at("charts")) {
        Chart ch;
        const auto ctr = c.at("center").get<std::vector<double>>();
        const auto s = c.at("shift").get<std::vector<double>>();
        if (ctr.size() != 2 || s.size() != 2) throw Error(ErrorKind::Schema, "center and shift must have two entries");
        ch.a = ctr[0];
        ch.b = ctr[1];
        ch.s = cplx(s[0], s[1]);
        ch.h0 = c.at("h0").get<double>();
        cf.charts.push_back(ch);
    }
    validate(cf);
    return cf;
}

json family_to_json(const ChartFamily& cf) {
    json j;
    j["tau0"] = {cf.tau0.real(), cf.tau0.imag()};
    j["half_width"] = cf.half_width;
    j["phases"] = {cf.phase1, cf.phase2};
    json charts = json::array();
    for (const Chart& c : cf.charts)
        charts.push_back({{"center", {c.a, c.b}}, {"shift", {c.s.real(), c.s.imag()}}, {"h0", c.h0}});
    j["charts"] = charts;
    return j;
}

}  // namespace flatlab::family
