#include "flatlab/dbar.hpp"

#include "flatlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace flatlab::dbar {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

double smoothstep(double t) {
    t = std::clamp(t, 0.0, 1.0);
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double smoothstep_d(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double s = t * (1.0 - t);
    return 30.0 * s * s;
}

struct Band {
    double lo, width;  // log log variable
};

Band band(const CutoffSpec& c) {
    const double x1 = std::log(std::log(1.0 / (c.r1 * c.r1)));
    const double x2 = std::log(std::log(1.0 / (c.r2 * c.r2)));
    return {x2, x1 - x2};
}

// Lambda_m without the domain check; 0 outside the outer radius, 1 inside the inner one.
double lambda_m(const CutoffSpec& c, const Band& b, double r) {
    if (r >= std::pow(c.r2, c.m)) return 0.0;
    if (r <= std::pow(c.r1, c.m)) return 1.0;
    const double x = std::log(-2.0 * std::log(r) / c.m);
    return smoothstep((x - b.lo) / b.width);
}

cplx dbar_lambda_m(const CutoffSpec& c, const Band& b, cplx w) {
    const double r = std::abs(w);
    if (r >= std::pow(c.r2, c.m) || r <= std::pow(c.r1, c.m)) return 0.0;
    const double ell = -2.0 * std::log(r);
    const double x = std::log(ell / c.m);
    const double d = smoothstep_d((x - b.lo) / b.width) / b.width;
    return -d / (std::conj(w) * ell);
}

// composite Simpson weights on n (even) intervals
std::vector<double> simpson(int n, double h) {
    std::vector<double> w(n + 1);
    for (int i = 0; i <= n; ++i) w[i] = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    for (double& x : w) x *= h / 3.0;
    return w;
}

// 2 * int_{s0}^{s1} int_0^{2 pi} f(e^{s + i theta}) dtheta ds
template <class F>
double log_polar_integral(F&& f, double s0, double s1, int ns, int nth) {
    const std::vector<double> ws = simpson(ns, (s1 - s0) / ns);
    const double dt = 2.0 * kPi / nth;
    double total = 0.0;
    for (int i = 0; i <= ns; ++i) {
        double ring = 0.0;
        for (int j = 0; j < nth; ++j) ring += f(std::exp(cplx(s0 + i * (s1 - s0) / ns, j * dt)));
        total += ws[i] * ring * dt;
    }
    return 2.0 * total;
}

}  // namespace

void validate(const CutoffSpec& c) {
    if (!(c.r1 > 0.0 && c.r1 < c.r2 && c.r2 < 1.0))
        throw Error(ErrorKind::InvalidCutoff, "cutoff radii must satisfy 0 < r1 < r2 < 1");
    if (c.m < 1) throw Error(ErrorKind::InvalidCutoff, "cutoff power m must be positive");
}

double cutoff_eval(const CutoffSpec& c, cplx w) {
    validate(c);
    const double r = std::abs(w);
    if (!(r > 0.0 && r < 1.0)) throw Error(ErrorKind::OutOfDomain, "cutoff needs 0 < |w| < 1");
    return lambda_m(c, band(c), r);
}

cplx dbar_cutoff_eval(const CutoffSpec& c, cplx w) {
    validate(c);
    const double r = std::abs(w);
    if (!(r > 0.0 && r < 1.0)) throw Error(ErrorKind::OutOfDomain, "cutoff needs 0 < |w| < 1");
    return dbar_lambda_m(c, band(c), w);
}

double cutoff_eta() { return 30.0 / 16.0; }

cplx eval_monomials(const std::vector<Monomial>& u, cplx w) {
    cplx s = 0.0;
    for (const Monomial& t : u) s += t.c * std::pow(w, t.p) * std::pow(std::conj(w), t.q);
    return s;
}

PushforwardResult pushforward_integral_check(const std::vector<Monomial>& u, int m, double a, double b) {
    if (!(a > 0.0 && b > a)) throw Error(ErrorKind::QuadratureFailure, "annulus needs 0 < a < b");
    if (m < 1) throw Error(ErrorKind::QuadratureFailure, "power m must be positive");
    int deg = 0;
    for (const Monomial& t : u) deg = std::max(deg, std::abs(t.p) + std::abs(t.q));
    const int nth = 4 * (deg * m + 4);
    auto lhs_f = [&](cplx w) { return std::norm(eval_monomials(u, w)); };
    auto rhs_f = [&](cplx z) { return std::norm(eval_monomials(u, std::pow(z, m))); };
    const double la = std::log(a), lb = std::log(b);
    PushforwardResult r;
    r.lhs = log_polar_integral(lhs_f, la, lb, 2048, nth);
    r.rhs_inner = log_polar_integral(rhs_f, la / m, lb / m, 2048, nth);
    const double check = log_polar_integral(lhs_f, la, lb, 1024, nth);
    if (std::abs(check - r.lhs) > 1e-8 * std::max(1.0, std::abs(r.lhs)))
        throw Error(ErrorKind::QuadratureFailure, "pushforward quadrature did not settle");
    r.rhs = m * r.rhs_inner;
    r.ratio = r.rhs != 0.0 ? r.lhs / r.rhs : (r.lhs == 0.0 ? 1.0 : INFINITY);
    return r;
}

RadialIntegral radial_integral_eval(double r1, double r2) {
    if (!(r1 > 0.0 && r1 < r2 && r2 < 1.0)) throw Error(ErrorKind::OutOfDomain, "radii must satisfy 0 < r1 < r2 < 1");
    auto quad = [&](int n) {
        // 2 pi int r dr / (r^2 log(1/r^2)^2) = (pi/2) int ds / s^2 with s = log r
        const double s0 = std::log(r1), s1 = std::log(r2);
        const std::vector<double> w = simpson(n, (s1 - s0) / n);
        double t = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double s = s0 + i * (s1 - s0) / n;
            t += w[i] / (s * s);
        }
        return 0.5 * kPi * t;
    };
    RadialIntegral r;
    r.quadrature = quad(4096);
    r.refinement_change = std::abs(r.quadrature - quad(2048)) / std::max(r.quadrature, 1e-300);
    r.without_half_pi = 1.0 / std::log(1.0 / r2) - 1.0 / std::log(1.0 / r1);
    r.closed_form = 0.5 * kPi * r.without_half_pi;
    return r;
}

double hyperbolic_invariance_defect(int m, const std::vector<double>& radii) {
    double d = 0.0;
    for (double r : radii) {
        const double v = std::log(std::log(1.0 / r)) - std::log(std::log(1.0 / std::pow(r, 1.0 / m)));
        d = std::max(d, std::abs(v - std::log(static_cast<double>(m))));
    }
    return d;
}

cplx PolarGrid::node(int i, int j) const { return std::exp(cplx(std::log(rho_min) + i * ds, j * dt)); }

cplx PolarGrid::center(int i, int j) const {
    return std::exp(cplx(std::log(rho_min) + (i + 0.5) * ds, (j + 0.5) * dt));
}

PolarGrid make_polar_grid(double rho_min, double rho_max, int nr, int nt) {
    if (!(rho_min > 0.0 && rho_max > rho_min)) throw Error(ErrorKind::Schema, "grid needs 0 < rho_min < rho_max");
    if (nr < 2 || nr % 2 || nt < 4) throw Error(ErrorKind::Schema, "grid needs an even radial count >= 2 and >= 4 angles");
    PolarGrid g;
    g.nr = nr;
    g.nt = nt;
    g.rho_min = rho_min;
    g.rho_max = rho_max;
    g.ds = std::log(rho_max / rho_min) / nr;
    g.dt = 2.0 * kPi / nt;
    // product Simpson rule: quadratic interpolation of the integrand against r^2 ds
    const double beta = 2.0 * g.ds;
    double mom[3] = {0, 0, 0};
    {
        const int n = 2000;
        const std::vector<double> w = simpson(n, 2.0 / n);
        for (int k = 0; k <= n; ++k) {
            const double t = 2.0 * k / n, e = w[k] * std::exp(beta * t);
            mom[0] += e * 0.5 * (t - 1) * (t - 2);
            mom[1] += e * t * (2 - t);
            mom[2] += e * 0.5 * t * (t - 1);
        }
    }
    std::vector<double> ws(nr + 1, 0.0);
    for (int k = 0; k < nr; k += 2) {
        const double base = rho_min * rho_min * std::exp(2.0 * k * g.ds) * g.ds;
        for (int a = 0; a < 3; ++a) ws[k + a] += base * mom[a];
    }
    g.quad.resize(g.nodes());
    double area = 0.0;
    for (int i = 0; i <= nr; ++i) {
        for (int j = 0; j < nt; ++j) {
            g.quad[g.idx(i, j)] = ws[i] * g.dt;
            area += g.quad[g.idx(i, j)];
        }
    }
    const double exact = kPi * (rho_max * rho_max - rho_min * rho_min);
    if (std::abs(area - exact) > 1e-6 * exact)
        throw Error(ErrorKind::QuadratureFailure, "grid quadrature misses the annulus area");
    return g;
}

double grid_integral(const PolarGrid& g, const std::vector<double>& f) {
    double s = 0.0;
    for (std::size_t k = 0; k < g.nodes(); ++k) s += g.quad[k] * f[k];
    return s;
}

namespace {

struct BoxSystem {
    const PolarGrid& g;
    const simd::KernelTable& k;
    double cs, ct;
    bool pin;
    double pin_coef;

    std::size_t rows() const { return static_cast<std::size_t>(g.nr) * g.nt + (pin ? 1 : 0); }

    void apply(const cplx* u, cplx* out) const {
        const std::size_t nt = g.nt;
        for (int i = 0; i < g.nr; ++i) k.box_apply(u + i * nt, u + (i + 1) * nt, cs, ct, out + i * nt, nt);
        if (pin) {
            cplx s = 0.0;
            for (std::size_t j = 0; j < nt; ++j) s += u[j];
            out[g.nr * nt] = pin_coef * s;
        }
    }

    void adjoint(const cplx* y, cplx* u) const {
        const std::size_t nt = g.nt;
        std::fill(u, u + g.nodes(), cplx(0.0));
        for (int i = 0; i < g.nr; ++i) k.box_adjoint(y + i * nt, cs, ct, u + i * nt, u + (i + 1) * nt, nt);
        if (pin)
            for (std::size_t j = 0; j < nt; ++j) u[j] += pin_coef * y[g.nr * nt];
    }
};

}  // namespace

SolveResult dbar_solve(const PolarGrid& g, const Field& v, const Scalar& weight, const SolveOptions& opt) {
    const simd::KernelTable& k = opt.kernels ? *opt.kernels : simd::active();
    const std::size_t n = g.nodes(), nt = g.nt;
    std::vector<double> D(n), Dinv(n);
    for (int i = 0; i <= g.nr; ++i)
        for (int j = 0; j < g.nt; ++j) {
            const double w = weight(g.node(i, j));
            if (!(w > 0.0) || !std::isfinite(w)) throw Error(ErrorKind::SingularWeight, "weight must be positive and finite on the grid");
            D[g.idx(i, j)] = g.quad[g.idx(i, j)] * w;
            Dinv[g.idx(i, j)] = 1.0 / D[g.idx(i, j)];
        }
    BoxSystem A{g, k, 0.5 / g.ds, 0.5 / g.dt, opt.pin == Pin::origin_mean, 0.5 / g.dt / std::sqrt(double(nt))};
    const std::size_t m = A.rows();
    std::vector<cplx> b(m, 0.0);
    for (int i = 0; i < g.nr; ++i)
        for (int j = 0; j < g.nt; ++j) {
            const cplx c = g.center(i, j);
            const cplx val = v(c);
            if (!std::isfinite(val.real()) || !std::isfinite(val.imag())) throw Error(ErrorKind::NonFiniteEntry, "right side not finite");
            b[i * nt + j] = 2.0 * std::conj(c) * val;
        }
    // Jacobi preconditioner: diagonal of A D^{-1} A^*
    std::vector<double> P(m);
    const double c2 = A.cs * A.cs + A.ct * A.ct;
    for (int i = 0; i < g.nr; ++i)
        for (int j = 0; j < g.nt; ++j) {
            const int jp = (j + 1) % g.nt;
            P[i * nt + j] = 1.0 / (c2 * (Dinv[g.idx(i, j)] + Dinv[g.idx(i, jp)] + Dinv[g.idx(i + 1, j)] + Dinv[g.idx(i + 1, jp)]));
        }
    if (A.pin) {
        double s = 0.0;
        for (std::size_t j = 0; j < nt; ++j) s += A.pin_coef * A.pin_coef * Dinv[j];
        P[m - 1] = 1.0 / s;
    }

    SolveResult res;
    res.u.assign(n, 0.0);
    const double bnorm = std::sqrt(k.weighted_norm2(nullptr, b.data(), m));
    if (bnorm == 0.0) return res;

    std::vector<cplx> y(m, 0.0), r = b, z(m), p(m), q(m), t(n);
    auto applyM = [&](const cplx* x, cplx* out) {
        A.adjoint(x, t.data());
        k.scale(Dinv.data(), t.data(), t.data(), n);
        A.apply(t.data(), out);
    };
    k.scale(P.data(), r.data(), z.data(), m);
    p = z;
    double rz = k.weighted_dot(P.data(), r.data(), r.data(), m).real();
    long it = 0;
    double rnorm = bnorm;
    while (rnorm > opt.tol * bnorm) {
        if (it >= opt.cap) throw Error(ErrorKind::SolverDivergence, "conjugate gradient hit the iteration cap");
        applyM(p.data(), q.data());
        const double pq = k.weighted_dot(nullptr, p.data(), q.data(), m).real();
        if (!(pq > 0.0)) break;
        const double alpha = rz / pq;
        k.axpy(alpha, p.data(), y.data(), m);
        k.axpy(-alpha, q.data(), r.data(), m);
        rnorm = std::sqrt(k.weighted_norm2(nullptr, r.data(), m));
        k.scale(P.data(), r.data(), z.data(), m);
        const double rz_new = k.weighted_dot(P.data(), r.data(), r.data(), m).real();
        k.xpby(z.data(), rz_new / rz, p.data(), m);
        rz = rz_new;
        ++it;
    }
    A.adjoint(y.data(), res.u.data());
    k.scale(Dinv.data(), res.u.data(), res.u.data(), n);
    res.iterations = it;
    res.norm2 = k.weighted_norm2(D.data(), res.u.data(), n);
    // algebraic residual of the recovered u
    std::vector<cplx> Au(m);
    A.apply(res.u.data(), Au.data());
    k.axpy(-1.0, b.data(), Au.data(), m);
    res.algebraic_residual = std::sqrt(k.weighted_norm2(nullptr, Au.data(), m)) / bnorm;
    return res;
}

double consistency_residual(const PolarGrid& g, const std::vector<cplx>& u, const Field& v) {
    if (u.size() != g.nodes()) throw Error(ErrorKind::DimensionMismatch, "field does not match the grid");
    double num = 0.0, den = 0.0;
    for (int i = 1; i < g.nr; ++i)
        for (int j = 0; j < g.nt; ++j) {
            const int jp = (j + 1) % g.nt, jm = (j + g.nt - 1) % g.nt;
            const cplx w = g.node(i, j);
            const cplx us = (u[g.idx(i + 1, j)] - u[g.idx(i - 1, j)]) / (2.0 * g.ds);
            const cplx ut = (u[g.idx(i, jp)] - u[g.idx(i, jm)]) / (2.0 * g.dt);
            const cplx d = (us + kI * ut) / (2.0 * std::conj(w));
            const cplx vv = v(w);
            num += g.quad[g.idx(i, j)] * std::norm(d - vv);
            den += g.quad[g.idx(i, j)] * std::norm(vv);
        }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

double hormander_bound(const PolarGrid& g, const Field& v, const Scalar& weight, const Scalar& theta_psi) {
    double s = 0.0;
    for (int i = 0; i <= g.nr; ++i)
        for (int j = 0; j < g.nt; ++j) {
            const cplx w = g.node(i, j);
            const double th = theta_psi(w);
            if (!(th > 0.0)) throw Error(ErrorKind::SingularWeight, "curvature of psi must be positive");
            s += g.quad[g.idx(i, j)] * weight(w) * std::norm(v(w)) / th;
        }
    return s;
}

const char* lvariant_name(LVariant v) { return v == LVariant::log_ratio ? "log-ratio" : "difference"; }

LVariant lvariant_from_name(const std::string& s) {
    if (s == "difference") return LVariant::difference;
    if (s == "log-ratio") return LVariant::log_ratio;
    throw Error(ErrorKind::Schema, "unknown log-log variant '" + s + "'");
}

double ot_constant(double r1, double r2, LVariant v) {
    if (!(r1 > 0.0 && r1 < r2 && r2 < 1.0)) throw Error(ErrorKind::OutOfAdmissibleRegion, "radii must satisfy 0 < r1 < r2 < 1");
    const double a = std::log(1.0 / r1), b = std::log(1.0 / r2);
    const double L = v == LVariant::log_ratio ? std::log(2.0 * (a - b)) : std::log(a / b);
    if (!(L > 0.0)) throw Error(ErrorKind::OutOfAdmissibleRegion, "log-log factor is not positive at these radii");
    return kPi / (r1 * r1 * L) * (1.0 / b - 1.0 / a);
}

namespace {

OtOptimum optimize_once(const SearchBox& box, LVariant v) {
    OtOptimum best;
    best.c = INFINITY;
    auto consider = [&](double r1, double r2) {
        if (!(r1 > 0.0 && r1 < r2 && r2 < 1.0)) return;
        const double a = std::log(1.0 / r1), b = std::log(1.0 / r2);
        if (v == LVariant::log_ratio && !(2.0 * (a - b) > 1.0)) return;
        const double c = ot_constant(r1, r2, v);
        if (c < best.c) best = {r1, r2, c, 0.0};
    };
    const int n = 80;
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j)
            consider(box.r1_lo + (box.r1_hi - box.r1_lo) * i / n, box.r2_lo + (box.r2_hi - box.r2_lo) * j / n);
    if (!std::isfinite(best.c)) throw Error(ErrorKind::OutOfAdmissibleRegion, "search box has no admissible point");
    double h1 = (box.r1_hi - box.r1_lo) / n, h2 = (box.r2_hi - box.r2_lo) / n;
    while (h1 > 1e-13 || h2 > 1e-13) {
        const double c1 = best.r1, c2 = best.r2;
        for (int i = -5; i <= 5; ++i)
            for (int j = -5; j <= 5; ++j) {
                const double r1 = std::clamp(c1 + h1 * i / 5, box.r1_lo, box.r1_hi);
                const double r2 = std::clamp(c2 + h2 * j / 5, box.r2_lo, box.r2_hi);
                consider(r1, r2);
            }
        h1 *= 0.5;
        h2 *= 0.5;
    }
    return best;
}

}  // namespace

OtOptimum ot_constant_optimize(const SearchBox& box, LVariant v) {
    if (!(box.r1_lo > 0.0 && box.r1_lo < box.r1_hi && box.r2_lo < box.r2_hi && box.r2_hi < 1.0))
        throw Error(ErrorKind::OutOfAdmissibleRegion, "search box must lie in 0 < r < 1");
    OtOptimum best = optimize_once(box, v);
    SearchBox small;
    const double w1 = 0.25 * (box.r1_hi - box.r1_lo), w2 = 0.25 * (box.r2_hi - box.r2_lo);
    small.r1_lo = std::max(box.r1_lo, best.r1 - w1);
    small.r1_hi = std::min(box.r1_hi, best.r1 + w1);
    small.r2_lo = std::max(box.r2_lo, best.r2 - w2);
    small.r2_hi = std::min(box.r2_hi, best.r2 + w2);
    best.shrink_change = std::abs(optimize_once(small, v).c - best.c);
    return best;
}

ExtensionResult ot_extension_experiment(const CutoffSpec& c, const PhiSpec& phi, cplx f0, const ExtensionOptions& opt) {
    validate(c);
    if (4.0 * phi.quad < -1e-8) throw Error(ErrorKind::NotSubharmonic, "phi has negative Laplacian");
    const Band bd = band(c);
    const double inv_m = 1.0 / c.m;
    Field v = [&](cplx w) { return f0 * dbar_lambda_m(c, bd, w); };
    Scalar weight = [&](cplx w) {
        const double t = std::pow(std::norm(w), inv_m);
        return std::exp(-phi.eval(w)) / (t * (1.0 + t) * (1.0 + t));
    };
    SolveOptions so = opt.solve;
    so.pin = Pin::origin_mean;
    auto run = [&](int nr, int nt, ExtensionResult& out, bool full) {
        const PolarGrid g = make_polar_grid(opt.rho_min, 1.0, nr, nt);
        // finite-difference subharmonicity on the grid
        const double h = 1e-3;
        for (int i = 0; i <= g.nr; i += std::max(1, g.nr / 8)) {
            const cplx w = g.node(i, 0);
            const double lap = (phi.eval(w + h) + phi.eval(w - h) + phi.eval(w + kI * h) + phi.eval(w - kI * h) - 4 * phi.eval(w)) / (h * h);
            if (lap < -1e-8) throw Error(ErrorKind::NotSubharmonic, "phi has negative Laplacian");
        }
        SolveResult s = dbar_solve(g, v, weight, so);
        const double res = consistency_residual(g, s.u, v);
        if (!full) {
            out.residual_coarse = res;
            return;
        }
        out.residual = res;
        out.iterations = s.iterations;
        out.F.resize(g.nodes());
        std::vector<double> dens(g.nodes());
        cplx origin = 0.0;
        for (int i = 0; i <= g.nr; ++i)
            for (int j = 0; j < g.nt; ++j) {
                const cplx w = g.node(i, j);
                const cplx F = lambda_m(c, bd, std::abs(w)) * f0 - s.u[g.idx(i, j)];
                out.F[g.idx(i, j)] = F;
                dens[g.idx(i, j)] = std::norm(F) * std::exp(-phi.eval(w));
                if (i == 0) origin += F;
            }
        out.F_origin = origin / double(g.nt);
        const double norm = std::norm(f0) * std::exp(-phi.eval(0.0));
        out.ratio = norm > 0.0 ? grid_integral(g, dens) / norm : 0.0;
    };
    ExtensionResult r;
    run(opt.nr, opt.nt, r, true);
    run(opt.nr / 2 + (opt.nr / 2) % 2, opt.nt / 2, r, false);
    r.bound = ot_constant(c.r1, c.r2, opt.variant);
    return r;
}

namespace {

// d^2/dw dwbar with the nine-point stencil; its h^2 error term is isotropic
double lap4(const std::function<double(cplx)>& f, cplx w, double h) {
    const double edge = f(w + h) + f(w - h) + f(w + kI * h) + f(w - kI * h);
    const double corner = f(w + cplx(h, h)) + f(w + cplx(h, -h)) + f(w + cplx(-h, h)) + f(w + cplx(-h, -h));
    return (4.0 * edge + corner - 20.0 * f(w)) / (24.0 * h * h);
}

void need_admissible(double eps, cplx w, double h) {
    for (cplx d : {cplx(h, h), cplx(h, -h), cplx(-h, h), cplx(-h, -h), cplx(h), cplx(-h), cplx(0.0, h), cplx(0.0, -h)})
        if (!(std::norm(w + d) + eps * eps < 1.0)) throw Error(ErrorKind::StencilOutOfDomain, "stencil leaves |w|^2 + eps^2 < 1");
}

}  // namespace

IdentityCheck curvature_identity_check(double eps, const std::vector<cplx>& samples, double step) {
    if (!(eps > 0.0)) throw Error(ErrorKind::OutOfDomain, "eps must be positive");
    auto L = [eps](cplx w) { return -std::log(std::norm(w) + eps * eps); };
    std::function<double(cplx)> kappa = [&](cplx w) { return -std::log(L(w)); };
    IdentityCheck out;
    for (cplx w : samples) {
        need_admissible(eps, w, step);
        const double A = std::norm(w) + eps * eps, l = L(w);
        const double lhs = l * lap4(kappa, w, step);
        const double rhs = eps * eps / (A * A) + std::norm(w) / (A * A * l);
        out.max_residual = std::max(out.max_residual, std::abs(lhs - rhs));
        if (std::norm(w) > 0.0) {
            const double limit_form = eps * eps / (A * A) + 1.0 / (std::norm(w) * l);
            out.max_limit_form_residual = std::max(out.max_limit_form_residual, std::abs(-lhs - limit_form));
        } else {
            out.max_limit_form_residual = INFINITY;
        }
    }
    return out;
}

TwoWeightReport two_weight_pointwise_check(double eps, const PhiSpec& phi, const std::vector<cplx>& samples, double step) {
    if (!(eps > 0.0)) throw Error(ErrorKind::OutOfDomain, "eps must be positive");
    auto L = [eps](cplx w) { return -std::log(std::norm(w) + eps * eps); };
    std::function<double(cplx)> kappa = [&](cplx w) { return -std::log(L(w)); };
    std::function<double(cplx)> ph = [&](cplx w) { return phi.eval(w); };
    TwoWeightReport r;
    r.c0 = INFINITY;
    r.min_slack = INFINITY;
    r.min_alpha = INFINITY;
    for (cplx w : samples) {
        need_admissible(eps, w, step);
        const double A = std::norm(w) + eps * eps, l = L(w), gamma = 1.0 / A;
        const double theta_k = lap4(kappa, w, step);
        const double kx = (kappa(w + step) - kappa(w - step)) / (2 * step);
        const double ky = (kappa(w + kI * step) - kappa(w - kI * step)) / (2 * step);
        const double omega2 = 0.25 * (kx * kx + ky * ky);  // |d kappa / dw|^2
        const double dirac = eps * eps / (A * A) / (2.0 * kPi);
        r.c0 = std::min(r.c0, (l * theta_k - l * omega2) / dirac);
        const double theta_phi = lap4(ph, w, step);
        if (theta_phi < 1.0 - 1e-6) throw Error(ErrorKind::OutOfAdmissibleRegion, "Theta_phi must dominate the area form");
        r.min_slack = std::min(r.min_slack, gamma * theta_phi - l * l * omega2);
        const double alpha = std::sqrt(l), beta = std::sqrt(gamma + l);
        r.min_alpha = std::min(r.min_alpha, alpha);
        r.max_beta = std::max(r.max_beta, beta);
        r.sup_w_beta = std::max(r.sup_w_beta, std::abs(w) * beta);
    }
    return r;
}

std::vector<cplx> annulus_samples(int n, double rmin, double rmax, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> rad(rmin, rmax), ang(0.0, 2.0 * kPi);
    std::vector<cplx> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double r = rad(rng);
        out.push_back(std::polar(r, ang(rng)));
    }
    return out;
}

}  // namespace flatlab::dbar
