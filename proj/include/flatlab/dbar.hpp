#pragma once

#include "flatlab/simd.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace flatlab::dbar {

using cplx = std::complex<double>;

// Lambda_m(w) = Lambda(log log(1/|w|^{2/m})) with a quintic smoothstep ramp
// across [log log(1/r2^2), log log(1/r1^2)].
struct CutoffSpec {
    double r1 = 0.3;
    double r2 = 0.6;
    int m = 1;
};

void validate(const CutoffSpec& c);
double cutoff_eval(const CutoffSpec& c, cplx w);
// coefficient of dwbar in dbar Lambda_m
cplx dbar_cutoff_eval(const CutoffSpec& c, cplx w);
// sup |Lambda'| times the band width in the log log variable
double cutoff_eta();

struct Monomial {
    cplx c;
    int p = 0;  // power of w
    int q = 0;  // power of conj(w)
};
cplx eval_monomials(const std::vector<Monomial>& u, cplx w);

struct PushforwardResult {
    double lhs = 0;        // int |U(w)|^2 |dw|^2/|w|^2 over a < |w| < b
    double rhs_inner = 0;  // int |U(zeta^m)|^2 |dzeta|^2/|zeta|^2 over the preimage annulus
    double rhs = 0;        // m * rhs_inner
    double ratio = 0;
};
// |dw|^2 = i dw ^ dwbar = 2 dx dy
PushforwardResult pushforward_integral_check(const std::vector<Monomial>& u, int m, double a, double b);

struct RadialIntegral {
    double quadrature = 0;
    double closed_form = 0;   // (pi/2)(1/log(1/r2) - 1/log(1/r1))
    double without_half_pi = 0;   // same without the pi/2
    double refinement_change = 0;
};
RadialIntegral radial_integral_eval(double r1, double r2);

// max over radii of |(log log(1/r) - log log(1/r^{1/m})) - log m|
double hyperbolic_invariance_defect(int m, const std::vector<double>& radii);

// Polar grid uniform in s = log r and theta; nr cells radially (even), nt angles.
struct PolarGrid {
    int nr = 0, nt = 0;
    double rho_min = 0, rho_max = 0, ds = 0, dt = 0;
    std::vector<double> quad;  // area weights at nodes (Simpson in s, trapezoid in theta)

    std::size_t nodes() const { return static_cast<std::size_t>(nr + 1) * nt; }
    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * nt + j; }
    cplx node(int i, int j) const;
    cplx center(int i, int j) const;
};
PolarGrid make_polar_grid(double rho_min, double rho_max, int nr, int nt);

enum class Pin { none, origin_mean };

struct SolveOptions {
    double tol = 1e-10;
    long cap = 100000;
    Pin pin = Pin::none;
    const simd::KernelTable* kernels = nullptr;  // null selects the dispatched table
};

struct SolveResult {
    std::vector<cplx> u;
    double norm2 = 0;  // sum quad * weight * |u|^2
    long iterations = 0;
    double algebraic_residual = 0;
};

using Field = std::function<cplx(cplx)>;
using Scalar = std::function<double(cplx)>;

// Minimal weighted-norm solution of the box discretization of dbar u = v.
SolveResult dbar_solve(const PolarGrid& g, const Field& v, const Scalar& weight, const SolveOptions& opt = {});
// Relative L2 residual of dbar u - v with node-centered differences on interior rings.
double consistency_residual(const PolarGrid& g, const std::vector<cplx>& u, const Field& v);
// ((Theta_psi)^{-1} v, v) with the given weight
double hormander_bound(const PolarGrid& g, const Field& v, const Scalar& weight, const Scalar& theta_psi);
double grid_integral(const PolarGrid& g, const std::vector<double>& f);

enum class LVariant { difference, log_ratio };
const char* lvariant_name(LVariant v);
LVariant lvariant_from_name(const std::string& s);

double ot_constant(double r1, double r2, LVariant v = LVariant::difference);

struct SearchBox {
    double r1_lo = 0.05, r1_hi = 0.6, r2_lo = 0.65, r2_hi = 0.99;
};
struct OtOptimum {
    double r1 = 0, r2 = 0, c = 0;
    double shrink_change = 0;  // change of the optimum when the box is shrunk around it
};
OtOptimum ot_constant_optimize(const SearchBox& box, LVariant v = LVariant::difference);

// phi(w) = quad |w|^2
struct PhiSpec {
    double quad = 0.0;
    double eval(cplx w) const { return quad * std::norm(w); }
};

struct ExtensionOptions {
    int nr = 256, nt = 256;
    double rho_min = 1e-4;
    LVariant variant = LVariant::difference;
    SolveOptions solve;
};

struct ExtensionResult {
    std::vector<cplx> F;
    cplx F_origin;
    double ratio = 0;   // int |F|^2 e^{-phi} / (|f0|^2 e^{-phi(0)})
    double bound = 0;   // ot_constant(r1, r2)
    double residual = 0;
    double residual_coarse = 0;
    long iterations = 0;
};
ExtensionResult ot_extension_experiment(const CutoffSpec& c, const PhiSpec& phi, cplx f0, const ExtensionOptions& opt = {});

struct IdentityCheck {
    double max_residual = 0;             // against the identity below
    double max_limit_form_residual = 0;  // against eps^2/A^2 + 1/(|w|^2 L) with the opposite sign on the left
};
// L sqrt(-1) ddbar(-log L) versus eps^2/A^2 + |w|^2/(A^2 L), A = |w|^2 + eps^2, L = log(1/A)
IdentityCheck curvature_identity_check(double eps, const std::vector<cplx>& samples, double step);

struct TwoWeightReport {
    double c0 = 0;          // largest admissible constant in (i)
    double min_slack = 0;   // min of gamma Theta_phi - |e^{-kappa} omega|^2
    double sup_w_beta = 0;  // sup |w| beta over samples
    double min_alpha = 0, max_beta = 0;
};
TwoWeightReport two_weight_pointwise_check(double eps, const PhiSpec& phi, const std::vector<cplx>& samples, double step);

std::vector<cplx> annulus_samples(int n, double rmin, double rmax, std::uint64_t seed);

}  // namespace flatlab::dbar
