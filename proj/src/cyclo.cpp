#include "flatlab/cyclo.hpp"

#include "flatlab/error.hpp"

#include <cmath>
#include <numbers>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

namespace flatlab::exact {
namespace {

using Poly = std::vector<Rational>;

void trim(Poly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

// Remainder of p modulo a monic polynomial m.
void reduce_monic(Poly& p, const Poly& m) {
    const std::size_t d = m.size() - 1;
    for (std::size_t k = p.size(); k-- > d;) {
        if (p[k] == 0) continue;
        const Rational lead = p[k];
        for (std::size_t i = 0; i <= d; ++i) p[k - d + i] -= lead * m[i];
    }
    p.resize(d);
}

// q, r with a = q b + r over Q.
void divmod(const Poly& a, const Poly& b, Poly& q, Poly& r) {
    r = a;
    trim(r);
    q.assign(r.size() >= b.size() ? r.size() - b.size() + 1 : 0, Rational(0));
    const Rational inv_lead = 1 / b.back();
    while (r.size() >= b.size() && !r.empty()) {
        const std::size_t shift = r.size() - b.size();
        const Rational f = r.back() * inv_lead;
        q[shift] = f;
        for (std::size_t i = 0; i < b.size(); ++i) r[shift + i] -= f * b[i];
        trim(r);
    }
}

Poly mul(const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    Poly out(a.size() + b.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

Poly sub(const Poly& a, const Poly& b) {
    Poly out(std::max(a.size(), b.size()), Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) out[i] -= b[i];
    trim(out);
    return out;
}

Poly compute_cyclotomic(int n) {
    // x^n - 1 divided by Phi_d for every proper divisor d
    Poly p(n + 1, Rational(0));
    p[0] = -1;
    p[n] = 1;
    for (int d = 1; d < n; ++d) {
        if (n % d) continue;
        Poly q, r;
        divmod(p, cyclotomic_polynomial(d), q, r);
        p = q;
    }
    return p;
}

}  // namespace

int euler_phi(int n) {
    int result = n;
    for (int p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        while (n % p == 0) n /= p;
        result -= result / p;
    }
    if (n > 1) result -= result / n;
    return result;
}

long lcm_conductor(long a, long b) { return std::lcm(a, b); }

const std::vector<Rational>& cyclotomic_polynomial(int n) {
    static std::mutex mu;
    static std::map<int, Poly> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(n);
        if (it != cache.end()) return it->second;
    }
    if (n < 1) throw Error(ErrorKind::InvalidCharacter, "cyclotomic index must be positive");
    Poly p = compute_cyclotomic(n);
    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(n, std::move(p)).first->second;
}

Cyclo::Cyclo() : n_(1), c_{Rational(0)} {}

Cyclo::Cyclo(long v) : n_(1), c_{Rational(v)} {}

Cyclo::Cyclo(const Rational& q, int conductor) : n_(conductor), c_(euler_phi(conductor), Rational(0)) {
    c_[0] = q;
}

Cyclo::Cyclo(int conductor, std::vector<Rational> coeffs) : n_(conductor), c_(std::move(coeffs)) {
    const auto& m = cyclotomic_polynomial(n_);
    if (c_.size() >= m.size()) reduce_monic(c_, m);
    c_.resize(m.size() - 1, Rational(0));
}

Cyclo Cyclo::root_of_unity(int order, long k) {
    if (order < 1) throw Error(ErrorKind::InvalidCharacter, "root of unity order must be positive");
    k %= order;
    if (k < 0) k += order;
    std::vector<Rational> p(k + 1, Rational(0));
    p[k] = 1;
    return Cyclo(order, std::move(p));
}

bool Cyclo::is_zero() const {
    for (const auto& q : c_)
        if (q != 0) return false;
    return true;
}

bool Cyclo::is_rational() const {
    for (std::size_t i = 1; i < c_.size(); ++i)
        if (c_[i] != 0) return false;
    return true;
}

Cyclo Cyclo::lifted(int conductor) const {
    if (conductor == n_) return *this;
    if (conductor % n_) throw Error(ErrorKind::DimensionMismatch, "conductor does not divide target");
    const int step = conductor / n_;
    std::vector<Rational> p((c_.size() - 1) * step + 1, Rational(0));
    for (std::size_t i = 0; i < c_.size(); ++i) p[i * step] = c_[i];
    return Cyclo(conductor, std::move(p));
}

Cyclo Cyclo::inverse() const {
    if (is_zero()) throw Error(ErrorKind::DivisionByZero, "inverse of zero cyclotomic element");
    // extended Euclid on (a, Phi_N); Phi_N is irreducible so the gcd is a unit
    Poly r0 = cyclotomic_polynomial(n_), r1 = c_;
    trim(r1);
    Poly s0, s1{Rational(1)};
    while (r1.size() > 1) {
        Poly q, r;
        divmod(r0, r1, q, r);
        Poly s = sub(s0, mul(q, s1));
        r0 = std::move(r1);
        r1 = std::move(r);
        s0 = std::move(s1);
        s1 = std::move(s);
    }
    const Rational g = r1.at(0);
    for (auto& x : s1) x /= g;
    return Cyclo(n_, std::move(s1));
}

Cyclo Cyclo::pow(long e) const {
    Cyclo base = e < 0 ? inverse() : *this;
    unsigned long k = e < 0 ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
    Cyclo out(Rational(1), n_);
    while (k) {
        if (k & 1) out *= base;
        k >>= 1;
        if (k) base *= base;
    }
    return out;
}

std::complex<double> Cyclo::to_complex() const {
    std::complex<double> z(0.0, 0.0);
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0) continue;
        const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / n_;
        z += c_[i].get_d() * std::complex<double>(std::cos(a), std::sin(a));
    }
    return z;
}

std::string Cyclo::to_string() const {
    if (is_rational()) return c_[0].get_str();
    std::ostringstream os;
    os << "(";
    bool first = true;
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0) continue;
        if (!first) os << (c_[i] > 0 ? " + " : " - ");
        else if (c_[i] < 0) os << "-";
        first = false;
        const Rational a = abs(c_[i]);
        if (i == 0) {
            os << a.get_str();
            continue;
        }
        if (a != 1) os << a.get_str() << "*";
        os << "z" << n_;
        if (i > 1) os << "^" << i;
    }
    os << ")";
    return os.str();
}

Cyclo Cyclo::operator-() const {
    Cyclo out = *this;
    for (auto& q : out.c_) q = -q;
    return out;
}

Cyclo& Cyclo::operator+=(const Cyclo& o) {
    if (o.n_ != n_) {
        const int m = static_cast<int>(lcm_conductor(n_, o.n_));
        *this = lifted(m);
        return *this += o.lifted(m);
    }
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

Cyclo& Cyclo::operator-=(const Cyclo& o) { return *this += -o; }

Cyclo& Cyclo::operator*=(const Cyclo& o) {
    if (o.n_ != n_) {
        const int m = static_cast<int>(lcm_conductor(n_, o.n_));
        *this = lifted(m);
        return *this *= o.lifted(m);
    }
    if (c_.size() == 1) {
        c_[0] *= o.c_[0];
        return *this;
    }
    Poly p = mul(c_, o.c_);
    reduce_monic(p, cyclotomic_polynomial(n_));
    p.resize(c_.size(), Rational(0));
    c_ = std::move(p);
    return *this;
}

Cyclo& Cyclo::operator/=(const Cyclo& o) { return *this *= o.inverse(); }

bool operator==(const Cyclo& a, const Cyclo& b) {
    if (a.n_ != b.n_) {
        const int m = static_cast<int>(lcm_conductor(a.n_, b.n_));
        return a.lifted(m) == b.lifted(m);
    }
    return a.c_ == b.c_;
}

bool operator<(const Cyclo& a, const Cyclo& b) {
    if (a.n_ != b.n_) {
        const int m = static_cast<int>(lcm_conductor(a.n_, b.n_));
        return a.lifted(m) < b.lifted(m);
    }
    return a.c_ < b.c_;
}

Rational parse_rational(const std::string& s) {
    try {
        Rational q(s);
        if (q.get_den() == 0) throw Error(ErrorKind::Parse, "zero denominator in '" + s + "'");
        q.canonicalize();
        return q;
    } catch (const std::invalid_argument&) {
        throw Error(ErrorKind::Parse, "malformed rational '" + s + "'");
    }
}

}  // namespace flatlab::exact
