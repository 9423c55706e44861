#pragma once

#include "flatlab/theta.hpp"

#include "json.hpp"

#include <complex>
#include <cstdint>
#include <vector>

namespace flatlab::family {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;

// Sign of the tau-term: -1 uses g = e^{-tau conj(c)} g0 and h = h0 e^{-2 Re(tau conj f)};
// +1 uses g = e^{+tau conj(c)} g0 and h = h0 e^{+2 Re(conj(tau) f)}.
enum class MetricSign { minus = -1, plus = 1 };

struct Chart {
    double a = 0.0, b = 0.0;  // center in lattice coordinates
    cplx s;                   // f_j = z + s
    double h0 = 1.0;
};

// Elliptic curve C/(Z + tau0 Z) covered by parallelogram charts
// |x - a_j| < w, |y - b_j| < w in lattice coordinates z = x + y tau0.
struct ChartFamily {
    cplx tau0{0.0, 1.0};
    double half_width = 0.25;
    std::vector<Chart> charts;
    double phase1 = 0.0, phase2 = 0.0;  // unitary character of L^(0), in turns
};

ChartFamily grid_family(int n, double half_width, std::uint64_t seed);
void validate(const ChartFamily& cf);

struct Overlap {
    long p = 0, q = 0;  // z_j - z_k = p + q tau0 on the overlap
    cplx sample;        // a point of the overlap
};

bool overlaps(const ChartFamily& cf, int j, int k);
Overlap overlap(const ChartFamily& cf, int j, int k);
// Triple overlap nonempty.
bool overlaps(const ChartFamily& cf, int j, int k, int l);

// Chart-local coordinate of a torus point; OutOfChart if outside.
cplx lift(const ChartFamily& cf, int j, cplx z);
bool in_chart(const ChartFamily& cf, int j, cplx z, double margin = 0.0);

cplx primitive(const ChartFamily& cf, int j, cplx z);  // f_j
cplx c_const(const ChartFamily& cf, int j, int k);     // f_k - f_j on the overlap
// Spread of f_k - f_j over n points of the overlap.
double c_spread(const ChartFamily& cf, int j, int k, int n = 5);
cplx base_transition(const ChartFamily& cf, int j, int k);  // g0_jk

cplx family_transition(const ChartFamily& cf, cplx tau, int j, int k, MetricSign sign = MetricSign::minus);
double family_metric(const ChartFamily& cf, cplx tau, int j, cplx z, MetricSign sign = MetricSign::minus);
// |dbar s - tau s| for s = e^{tau conj(f_j)}, central differences.
double dbar_tau_residual(const ChartFamily& cf, cplx tau, int j, cplx z, double h);

Mat2 jet_transition(const ChartFamily& cf, cplx tau, int j, int k, cplx z);
Mat2 jet_metric(const ChartFamily& cf, cplx tau, int j, cplx z);
// (s, d_tau s) -> (s, nabla_tau s)
Mat2 jet_frame_change(const ChartFamily& cf, int j, cplx z);

// Hessian of -log h_j in z at fixed tau, central differences; should vanish.
double fiber_curvature(const ChartFamily& cf, cplx tau, int j, cplx z, double h, MetricSign sign = MetricSign::minus);

struct MetricSpec {
    double eta = 0.1;
    int k = 1;                  // 1: eta-mode, 2: 2eta-mode
    double divisor_scale = 1.0; // chi = scale * 2 pi y^2 / Im tau0
    bool theta_divisor = true;  // false: h_D = 1 and s_D = 1
    bool zero_primitive = false;
    MetricSign sign = MetricSign::plus;
};

struct CurvatureGrid {
    int per_axis = 5;                       // z samples per chart axis
    std::vector<double> tau_radii{0.5, 1.0, 1.5};
    int tau_angles = 8;
    double step = 1e-3;
    double divisor_clearance = 0.2;
};

struct CurvatureReport {
    double min_eigenvalue = 0.0;        // of the 2pi-normalized Hessian
    cplx min_at_z, min_at_tau;
    int min_chart = 0;
    double tau_margin = 0.0;            // min (H_tt/2pi - 1/(4 pi eta))
    double full_margin = 0.0;           // min eig of H/2pi - diag(0, 1/(4 pi eta))
    double richardson_diff = 0.0;       // max |H(h) - H(h/2)| / 2pi
    std::size_t points = 0;
    std::size_t skipped = 0;
};

// psi = -log of the modified metric at (z in chart j, tau).
double weight(const ChartFamily& cf, const MetricSpec& spec, int j, cplx z, cplx tau);
// 2x2 complex Hessian [[psi_zz', psi_zt'],[psi_tz', psi_tt']] (unnormalized).
Mat2 complex_hessian(const ChartFamily& cf, const MetricSpec& spec, int j, cplx z, cplx tau, double h);

CurvatureReport curvature_semipositivity(const ChartFamily& cf, const MetricSpec& spec, const CurvatureGrid& grid);

struct IdentityReport {
    double line_cocycle = 0;       // max |g_jk g_kl - g_jl| / |g_jl| over triples
    double jet_cocycle = 0;
    double compatibility = 0;      // max |h_j |g_jk|^2 - h_k| / h_k over edges
    double jet_compatibility = 0;  // G^T H_j conj(G) = H_k
    double jet_compatibility_conj_form = 0;  // conj(G)^T H_j G = H_k, reported only
    double det_h = 0;              // |det H_j - h_j^2| / h_j^2
    double det_g = 0;              // |det G - g^2| / |g|^2
    double c_spread = 0;
    double dbar_residual = 0;      // at step 1e-2
    double dbar_ratio = 0;         // residual(h) / residual(h/2)
    double fiber_curvature = 0;    // at step 1e-3
    int edges = 0, triples = 0, samples = 0;
};
IdentityReport identity_report(const ChartFamily& cf, int samples, std::uint64_t seed, MetricSign sign = MetricSign::minus);

ChartFamily family_from_json(const nlohmann::json& j);
nlohmann::json family_to_json(const ChartFamily& cf);

}  // namespace flatlab::family
