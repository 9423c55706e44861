#pragma once

#include <gmpxx.h>

#include <complex>
#include <string>
#include <vector>

namespace flatlab::exact {

using Rational = mpq_class;

int euler_phi(int n);
long lcm_conductor(long a, long b);

// Integer coefficients of the n-th cyclotomic polynomial, constant term first.
const std::vector<Rational>& cyclotomic_polynomial(int n);

// Element of Q(zeta_N) in the power basis 1, z, ..., z^{phi(N)-1}, z = exp(2 pi i / N).
class Cyclo {
public:
    Cyclo();
    Cyclo(long v);  // NOLINT: rationals promote implicitly
    Cyclo(const Rational& q, int conductor = 1);
    Cyclo(int conductor, std::vector<Rational> coeffs);

    static Cyclo root_of_unity(int order, long k);

    int conductor() const { return n_; }
    const std::vector<Rational>& coeffs() const { return c_; }
    bool is_zero() const;
    bool is_rational() const;

    Cyclo lifted(int conductor) const;
    Cyclo inverse() const;
    Cyclo pow(long e) const;
    std::complex<double> to_complex() const;
    std::string to_string() const;

    Cyclo operator-() const;
    Cyclo& operator+=(const Cyclo& o);
    Cyclo& operator-=(const Cyclo& o);
    Cyclo& operator*=(const Cyclo& o);
    Cyclo& operator/=(const Cyclo& o);

    friend Cyclo operator+(Cyclo a, const Cyclo& b) { return a += b; }
    friend Cyclo operator-(Cyclo a, const Cyclo& b) { return a -= b; }
    friend Cyclo operator*(Cyclo a, const Cyclo& b) { return a *= b; }
    friend Cyclo operator/(Cyclo a, const Cyclo& b) { return a /= b; }
    friend bool operator==(const Cyclo& a, const Cyclo& b);
    friend bool operator!=(const Cyclo& a, const Cyclo& b) { return !(a == b); }
    // Total order on elements of a common conductor; mixed conductors compare after lifting.
    friend bool operator<(const Cyclo& a, const Cyclo& b);

private:
    int n_;
    std::vector<Rational> c_;
};

Rational parse_rational(const std::string& s);

}  // namespace flatlab::exact
