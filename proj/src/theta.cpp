#include "flatlab/theta.hpp"

#include "flatlab/error.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace flatlab::theta {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

double imag_inf(const VectorXcd& z) {
    double m = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) m = std::max(m, std::abs(z(i).imag()));
    return m;
}

void check_dim(const ThetaParams& p, const VectorXcd& z) {
    if (z.size() != p.dim()) throw Error(ErrorKind::DimensionMismatch, "argument dimension does not match Z");
}

}  // namespace

void validate(const ThetaParams& p) {
    const int l = p.dim();
    if (l < 1 || p.Z.cols() != l) throw Error(ErrorKind::DimensionMismatch, "Z must be square and nonempty");
    if (static_cast<int>(p.m.size()) != l) throw Error(ErrorKind::DimensionMismatch, "need one polarization integer per dimension");
    for (int v : p.m)
        if (v < 1) throw Error(ErrorKind::Schema, "polarization integers must be >= 1");
    if (!(p.eps > 0.0)) throw Error(ErrorKind::Schema, "truncation tolerance must be positive");
    for (int i = 0; i < l; ++i)
        for (int j = 0; j < l; ++j) {
            if (!std::isfinite(p.Z(i, j).real()) || !std::isfinite(p.Z(i, j).imag()))
                throw Error(ErrorKind::NonFiniteEntry, "Z has a non-finite entry");
            if (std::abs(p.Z(i, j) - p.Z(j, i)) > 1e-12) throw Error(ErrorKind::NotSymmetric, "Z is not symmetric");
        }
    if (!(min_imag_eigenvalue(p) > 0.0)) throw Error(ErrorKind::NotPositiveDefinite, "Im Z is not positive definite");
}

double min_imag_eigenvalue(const ThetaParams& p) {
    const Eigen::MatrixXd im = p.Z.imag();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (im + im.transpose()));
    return es.eigenvalues()(0);
}

double tail_bound(const ThetaParams& p, double im_inf, int R) {
    const double mu = min_imag_eigenvalue(p);
    const int l = p.dim();
    const double peak = l * im_inf / mu;
    double total = 0.0;
    for (long k = R + 1;; ++k) {
        const double shell = std::pow(2.0 * k + 1, l) - std::pow(2.0 * k - 1, l);
        const double ex = -kPi * mu * k * k + 2 * kPi * l * k * im_inf + std::log(shell);
        total += std::exp(ex);
        if (k > peak && ex < -745.0) break;
        if (k > 100000) return INFINITY;
    }
    return total;
}

int truncation_radius(const ThetaParams& p, double im_inf) {
    for (int R = 0; R <= p.cap; ++R)
        if (tail_bound(p, im_inf, R) < p.eps) return R;
    throw Error(ErrorKind::TruncationFailure, "truncation radius would exceed " + std::to_string(p.cap));
}

ThetaValue theta_eval(const ThetaParams& p, const VectorXcd& zeta) {
    validate(p);
    check_dim(p, zeta);
    ThetaValue out;
    const double y = imag_inf(zeta);
    out.radius = truncation_radius(p, y);
    out.tail = tail_bound(p, y, out.radius);
    const int l = p.dim(), R = out.radius;
    std::vector<long> lam(l, -R);
    Eigen::VectorXd lv(l);
    cplx sum(0.0, 0.0);
    for (;;) {
        for (int i = 0; i < l; ++i) lv(i) = static_cast<double>(lam[i]);
        const cplx quad = lv.dot((p.Z * lv.cast<cplx>()).eval());
        const cplx lin = (lv.cast<cplx>().transpose() * zeta)(0);
        sum += std::exp(kI * kPi * (quad + 2.0 * lin));
        int i = l - 1;
        while (i >= 0 && lam[i] == R) lam[i--] = -R;
        if (i < 0) break;
        ++lam[i];
    }
    out.value = sum;
    return out;
}

cplx theta(const ThetaParams& p, const VectorXcd& zeta) { return theta_eval(p, zeta).value; }

VectorXcd lattice_shift(const ThetaParams& par, const LatticePoint& l) {
    const int d = par.dim();
    if (static_cast<int>(l.p.size()) != d || static_cast<int>(l.q.size()) != d)
        throw Error(ErrorKind::DimensionMismatch, "lattice point dimension does not match Z");
    VectorXcd a(d), n(d);
    for (int i = 0; i < d; ++i) {
        a(i) = static_cast<double>(l.p[i]);
        n(i) = static_cast<double>(l.q[i] * par.m[i]);
    }
    return a + par.Z * n;
}

cplx multiplier(const ThetaParams& par, const LatticePoint& l, const VectorXcd& zeta) {
    const int d = par.dim();
    VectorXcd n(d);
    for (int i = 0; i < d; ++i) n(i) = static_cast<double>(l.q.at(i) * par.m.at(i));
    const cplx quad = (n.transpose() * par.Z * n)(0);
    const cplx lin = (n.transpose() * zeta)(0);
    return std::exp(kI * kPi * (-quad - 2.0 * lin));
}

double quasi_periodicity_residual(const ThetaParams& par, const VectorXcd& zeta, const LatticePoint& l) {
    const VectorXcd shift = lattice_shift(par, l);
    bool zero = true;
    for (long v : l.p) zero = zero && v == 0;
    for (long v : l.q) zero = zero && v == 0;
    if (zero) return 0.0;
    return std::abs(theta(par, zeta + shift) - multiplier(par, l, zeta) * theta(par, zeta));
}

cplx triple_eval(const ThetaTriple& t, const VectorXcd& zeta) {
    check_dim(t.params, zeta);
    if (t.v1.size() != zeta.size() || t.v2.size() != zeta.size())
        throw Error(ErrorKind::DimensionMismatch, "shift dimension does not match Z");
    return theta(t.params, zeta - t.v1) * theta(t.params, zeta - t.v2) * theta(t.params, zeta + t.v1 + t.v2);
}

cplx quotient_eval(const ThetaQuotient& f, const VectorXcd& zeta) {
    const cplx den = triple_eval(f.den, zeta);
    if (std::abs(den) <= 1e-6) throw Error(ErrorKind::NearZeroSample, "denominator triple vanishes near sample");
    return triple_eval(f.num, zeta) / den;
}

RatioFit transition_ratio_fit(const ThetaQuotient& f, const LatticePoint& l, int samples, std::uint64_t seed,
                              const VectorXcd& base) {
    const ThetaParams& par = f.num.params;
    const int d = par.dim();
    if (samples < d + 1) throw Error(ErrorKind::DegenerateFit, "need at least dim + 1 samples");
    const VectorXcd shift = lattice_shift(par, l);
    const VectorXcd b0 = base.size() ? base : VectorXcd::Zero(d);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> t(0.0, 0.25);
    RatioFit fit;
    fit.seed = seed;
    MatrixXcd A(samples, d + 1);
    VectorXcd rhs(samples);
    auto guarded = [](const ThetaTriple& tr, const VectorXcd& z) {
        const cplx v = triple_eval(tr, z);
        if (std::abs(v) <= 1e-6) throw Error(ErrorKind::NearZeroSample, "theta triple vanishes near a sample point");
        return v;
    };
    for (int s = 0; s < samples; ++s) {
        VectorXcd z = b0;
        for (int j = 0; j < d; ++j) {
            const double a = t(rng);
            const double c = t(rng);
            z(j) += a;
            z += c * par.m[j] * par.Z.col(j);
        }
        const cplx r = (guarded(f.num, z + shift) / guarded(f.den, z + shift)) / (guarded(f.num, z) / guarded(f.den, z));
        A(s, 0) = 1.0;
        for (int j = 0; j < d; ++j) A(s, j + 1) = z(j);
        rhs(s) = std::log(r);
        fit.samples.push_back(z);
    }
    const VectorXcd x = A.colPivHouseholderQr().solve(rhs);
    fit.c = x(0);
    for (int j = 0; j < d; ++j) {
        fit.b.push_back(x(j + 1));
        fit.b_over_2pi_i.push_back(x(j + 1) / (2.0 * kPi * kI));
    }
    fit.residual = (A * x - rhs).cwiseAbs().maxCoeff();
    return fit;
}

namespace {

cplx cplx_from_json(const json& v) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw Error(ErrorKind::Schema, "complex value must be a number or [re, im]");
}

}  // namespace

VectorXcd cvec_from_json(const json& j, int dim) {
    if (!j.is_array() || static_cast<int>(j.size()) != dim)
        throw Error(ErrorKind::DimensionMismatch, "complex vector must have " + std::to_string(dim) + " entries");
    VectorXcd v(dim);
    for (int i = 0; i < dim; ++i) v(i) = cplx_from_json(j[i]);
    return v;
}

json cplx_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json cvec_to_json(const VectorXcd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(cplx_to_json(v(i)));
    return a;
}

ThetaParams params_from_json(const json& j) {
    if (!j.is_object() || !j.contains("Z")) throw Error(ErrorKind::Schema, "theta params need Z");
    const json& z = j.at("Z");
    if (!z.is_array() || z.empty()) throw Error(ErrorKind::Schema, "Z must be a nonempty matrix");
    const int l = static_cast<int>(z.size());
    ThetaParams p;
    p.Z.resize(l, l);
    for (int i = 0; i < l; ++i) {
        if (!z[i].is_array() || static_cast<int>(z[i].size()) != l) throw Error(ErrorKind::DimensionMismatch, "Z must be square");
        for (int k = 0; k < l; ++k) p.Z(i, k) = cplx_from_json(z[i][k]);
    }
    if (j.contains("m")) p.m = j.at("m").get<std::vector<int>>();
    else p.m.assign(l, 1);
    if (j.contains("eps")) p.eps = j.at("eps").get<double>();
    if (j.contains("cap")) p.cap = j.at("cap").get<int>();
    validate(p);
    return p;
}

LatticePoint lattice_from_json(const json& j, int dim) {
    LatticePoint l;
    if (!j.is_object() || !j.contains("p") || !j.contains("q")) throw Error(ErrorKind::Schema, "lattice point needs p and q");
    l.p = j.at("p").get<std::vector<long>>();
    l.q = j.at("q").get<std::vector<long>>();
    if (static_cast<int>(l.p.size()) != dim || static_cast<int>(l.q.size()) != dim)
        throw Error(ErrorKind::DimensionMismatch, "lattice point dimension does not match Z");
    return l;
}

}  // namespace flatlab::theta
