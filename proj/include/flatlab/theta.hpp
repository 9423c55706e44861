#pragma once

#include "flatlab/numeric_rank.hpp"

#include "json.hpp"

#include <complex>
#include <cstdint>
#include <vector>

namespace flatlab::theta {

using cplx = std::complex<double>;
using VectorXcd = Eigen::Matrix<cplx, Eigen::Dynamic, 1>;

struct ThetaParams {
    MatrixXcd Z;
    std::vector<int> m;   // polarization, m_i >= 1
    double eps = 1e-14;   // absolute truncation tolerance
    int cap = 200;        // largest admissible truncation radius

    int dim() const { return static_cast<int>(Z.rows()); }
};

void validate(const ThetaParams& p);
double min_imag_eigenvalue(const ThetaParams& p);

// Analytic bound on the sum over |lambda|_inf > R.
double tail_bound(const ThetaParams& p, double im_inf, int R);
int truncation_radius(const ThetaParams& p, double im_inf);

struct ThetaValue {
    cplx value;
    int radius = 0;
    double tail = 0.0;
};

ThetaValue theta_eval(const ThetaParams& p, const VectorXcd& zeta);
cplx theta(const ThetaParams& p, const VectorXcd& zeta);

// Represents sum_j p_j u_j + sum_j q_j m_j Z u_j.
struct LatticePoint {
    std::vector<long> p, q;
};

VectorXcd lattice_shift(const ThetaParams& par, const LatticePoint& l);
// Theta(zeta + shift) = multiplier * Theta(zeta)
cplx multiplier(const ThetaParams& par, const LatticePoint& l, const VectorXcd& zeta);
double quasi_periodicity_residual(const ThetaParams& par, const VectorXcd& zeta, const LatticePoint& l);

struct ThetaTriple {
    ThetaParams params;
    VectorXcd v1, v2;
};

// Theta(z - v1) Theta(z - v2) Theta(z + v1 + v2)
cplx triple_eval(const ThetaTriple& t, const VectorXcd& zeta);

struct ThetaQuotient {
    ThetaTriple num, den;
};

cplx quotient_eval(const ThetaQuotient& f, const VectorXcd& zeta);

struct RatioFit {
    cplx c;
    std::vector<cplx> b;
    std::vector<cplx> b_over_2pi_i;
    double residual = 0.0;
    std::vector<VectorXcd> samples;
    std::uint64_t seed = 0;
};

// Samples zeta = base + sum_j t_j u_j + sum_j t_{l+j} m_j Z u_j with
// t in (0, 1/4), fits log(F(zeta + shift)/F(zeta)) ~ c + b.zeta.
RatioFit transition_ratio_fit(const ThetaQuotient& f, const LatticePoint& l, int samples, std::uint64_t seed,
                              const VectorXcd& base = VectorXcd());

ThetaParams params_from_json(const nlohmann::json& j);
VectorXcd cvec_from_json(const nlohmann::json& j, int dim);
nlohmann::json cvec_to_json(const VectorXcd& v);
nlohmann::json cplx_to_json(cplx z);
LatticePoint lattice_from_json(const nlohmann::json& j, int dim);

}  // namespace flatlab::theta
