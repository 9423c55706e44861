#pragma once

#include "flatlab/cyclo.hpp"

#include <complex>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace flatlab::exact {

using Exponent = std::vector<long>;

// Laurent polynomial in n variables over Q(zeta_N). Terms are kept in
// lexicographic exponent order with nonzero coefficients only.
class LaurentPoly {
public:
    explicit LaurentPoly(std::size_t nvars = 0) : nvars_(nvars) {}

    static LaurentPoly constant(std::size_t nvars, const Cyclo& c);
    static LaurentPoly monomial(const Exponent& e, const Cyclo& c);
    // gamma_i - 1
    static LaurentPoly variable_minus_one(std::size_t nvars, std::size_t i);

    std::size_t nvars() const { return nvars_; }
    const std::map<Exponent, Cyclo>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }
    // Units of the Laurent ring over a field: one nonzero term.
    bool is_unit() const { return terms_.size() == 1; }
    int conductor() const;

    void add_term(const Exponent& e, const Cyclo& c);

    LaurentPoly operator-() const;
    LaurentPoly& operator+=(const LaurentPoly& o);
    LaurentPoly& operator-=(const LaurentPoly& o);
    friend LaurentPoly operator+(LaurentPoly a, const LaurentPoly& b) { return a += b; }
    friend LaurentPoly operator-(LaurentPoly a, const LaurentPoly& b) { return a -= b; }
    friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b);
    friend bool operator==(const LaurentPoly& a, const LaurentPoly& b);
    friend bool operator<(const LaurentPoly& a, const LaurentPoly& b);

    // Inverse of a unit.
    LaurentPoly unit_inverse() const;
    LaurentPoly lifted(int conductor) const;

    std::complex<double> eval(const std::vector<std::complex<double>>& gamma) const;
    Cyclo eval_exact(const std::vector<Cyclo>& gamma) const;

    // Divide by the gcd monomial and make the leading coefficient 1.
    LaurentPoly normalized() const;

    Exponent min_exponent() const;
    Exponent max_exponent() const;

    std::string to_string() const;

private:
    std::size_t nvars_;
    std::map<Exponent, Cyclo> terms_;
};

class LaurentMatrix {
public:
    LaurentMatrix() = default;
    LaurentMatrix(std::size_t rows, std::size_t cols, std::size_t nvars)
        : rows_(rows), cols_(cols), nvars_(nvars), e_(rows * cols, LaurentPoly(nvars)) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t nvars() const { return nvars_; }
    LaurentPoly& operator()(std::size_t i, std::size_t j) { return e_[i * cols_ + j]; }
    const LaurentPoly& operator()(std::size_t i, std::size_t j) const { return e_[i * cols_ + j]; }

    bool is_monomial() const;
    LaurentMatrix submatrix(const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) const;

private:
    std::size_t rows_ = 0, cols_ = 0, nvars_ = 0;
    std::vector<LaurentPoly> e_;
};

// Matrices above this size switch from cofactor expansion to exact
// evaluation and interpolation.
inline constexpr std::size_t kCofactorMaxSize = 10;

LaurentPoly laurent_det(const LaurentMatrix& m, std::size_t cofactor_max = kCofactorMaxSize);

// Nonzero normalized q x q minors, sorted and deduplicated.
std::vector<LaurentPoly> laurent_minors(const LaurentMatrix& m, std::size_t q, double budget = 1e5);

// Number of q x q minors as a double (may exceed 2^53 only approximately).
double minor_count(std::size_t rows, std::size_t cols, std::size_t q);

// Row and column operations with unit pivots. If k pivots were eliminated
// then I_j(m) = I_{j-k}(reduced) with I_{<=0} the unit ideal.
struct UnitPivotResult {
    std::size_t pivots = 0;
    LaurentMatrix reduced;
};
UnitPivotResult reduce_unit_pivots(const LaurentMatrix& m, std::size_t max_pivots);

// Exact linear algebra over Q(zeta_N).
using CycloMatrix = std::vector<std::vector<Cyclo>>;
std::size_t exact_rank(CycloMatrix a);
Cyclo exact_det(CycloMatrix a);

}  // namespace flatlab::exact
