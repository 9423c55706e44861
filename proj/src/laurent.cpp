#include "flatlab/laurent.hpp"

#include "flatlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

namespace flatlab::exact {
namespace {

std::complex<double> ipow(std::complex<double> z, long e) {
    if (e < 0) {
        if (z == std::complex<double>(0.0, 0.0))
            throw Error(ErrorKind::DivisionByZero, "negative power of a zero coordinate");
        return 1.0 / ipow(z, -e);
    }
    std::complex<double> out(1.0, 0.0);
    while (e) {
        if (e & 1) out *= z;
        e >>= 1;
        if (e) z *= z;
    }
    return out;
}

void check_arity(std::size_t want, std::size_t got) {
    if (want != got)
        throw Error(ErrorKind::DimensionMismatch,
                    "character has " + std::to_string(got) + " coordinates, expected " + std::to_string(want));
}

// Convert values at t = 1..K to power-basis coefficients (Newton form first).
std::vector<Cyclo> interpolate_1d(std::vector<Cyclo> v) {
    const std::size_t k = v.size();
    for (std::size_t level = 1; level < k; ++level)
        for (std::size_t i = k - 1; i >= level; --i)
            v[i] = (v[i] - v[i - 1]) / Cyclo(static_cast<long>(level));
    std::vector<Cyclo> c(k, Cyclo(0));
    for (std::size_t i = k; i-- > 0;) {
        // c <- c * (x - (i+1)) + v[i]
        std::vector<Cyclo> next(k, Cyclo(0));
        const Cyclo node(static_cast<long>(i + 1));
        for (std::size_t d = 0; d + 1 < k; ++d) {
            next[d + 1] += c[d];
            next[d] -= node * c[d];
        }
        next[0] += v[i];
        c = std::move(next);
    }
    return c;
}

LaurentPoly det_cofactor(const LaurentMatrix& m) {
    const std::size_t n = m.rows();
    std::vector<LaurentPoly> f(std::size_t{1} << n, LaurentPoly(m.nvars()));
    f[0] = LaurentPoly::constant(m.nvars(), Cyclo(1));
    for (std::size_t mask = 0; mask < f.size(); ++mask) {
        if (f[mask].is_zero()) continue;
        const std::size_t row = static_cast<std::size_t>(__builtin_popcountll(mask));
        if (row == n) continue;
        for (std::size_t c = 0; c < n; ++c) {
            if (mask >> c & 1) continue;
            const LaurentPoly& a = m(row, c);
            if (a.is_zero()) continue;
            const int above = __builtin_popcountll(mask >> (c + 1));
            LaurentPoly t = f[mask] * a;
            if (above & 1) f[mask | std::size_t{1} << c] -= t;
            else f[mask | std::size_t{1} << c] += t;
        }
    }
    return f.back();
}

LaurentPoly det_interpolate(const LaurentMatrix& m) {
    const std::size_t n = m.rows(), nv = m.nvars();
    Exponent shift(nv, 0), degree(nv, 0);
    std::vector<Exponent> row_lo(n);
    for (std::size_t i = 0; i < n; ++i) {
        Exponent lo, hi;
        for (std::size_t j = 0; j < n; ++j) {
            const LaurentPoly& a = m(i, j);
            if (a.is_zero()) continue;
            Exponent alo = a.min_exponent(), ahi = a.max_exponent();
            if (lo.empty()) {
                lo = alo;
                hi = ahi;
            } else {
                for (std::size_t v = 0; v < nv; ++v) {
                    lo[v] = std::min(lo[v], alo[v]);
                    hi[v] = std::max(hi[v], ahi[v]);
                }
            }
        }
        if (lo.empty()) return LaurentPoly(nv);
        row_lo[i] = lo;
        for (std::size_t v = 0; v < nv; ++v) {
            shift[v] += lo[v];
            degree[v] += hi[v] - lo[v];
        }
    }
    double points = 1.0;
    for (long d : degree) points *= static_cast<double>(d + 1);
    if (points > 2e5)
        throw Error(ErrorKind::BudgetExceeded, "interpolation grid of " + std::to_string(points) + " points");

    // Shifted polynomial entries evaluated on the integer grid 1..deg+1.
    std::vector<std::size_t> dims(nv), stride(nv);
    std::size_t total = 1;
    for (std::size_t v = nv; v-- > 0;) {
        dims[v] = static_cast<std::size_t>(degree[v] + 1);
        stride[v] = total;
        total *= dims[v];
    }
    std::vector<Cyclo> vals(total);
    std::vector<Cyclo> pt(nv);
    for (std::size_t idx = 0; idx < total; ++idx) {
        for (std::size_t v = 0; v < nv; ++v) pt[v] = Cyclo(static_cast<long>(idx / stride[v] % dims[v] + 1));
        CycloMatrix a(n, std::vector<Cyclo>(n));
        for (std::size_t i = 0; i < n; ++i) {
            Exponent neg(nv);
            for (std::size_t v = 0; v < nv; ++v) neg[v] = -row_lo[i][v];
            const LaurentPoly unit = LaurentPoly::monomial(neg, Cyclo(1));
            for (std::size_t j = 0; j < n; ++j)
                if (!m(i, j).is_zero()) a[i][j] = (unit * m(i, j)).eval_exact(pt);
        }
        vals[idx] = exact_det(std::move(a));
    }
    // Tensor-product interpolation, one axis at a time.
    for (std::size_t v = 0; v < nv; ++v) {
        for (std::size_t base = 0; base < total; ++base) {
            if (base / stride[v] % dims[v] != 0) continue;
            std::vector<Cyclo> line(dims[v]);
            for (std::size_t t = 0; t < dims[v]; ++t) line[t] = vals[base + t * stride[v]];
            line = interpolate_1d(std::move(line));
            for (std::size_t t = 0; t < dims[v]; ++t) vals[base + t * stride[v]] = line[t];
        }
    }
    LaurentPoly out(nv);
    for (std::size_t idx = 0; idx < total; ++idx) {
        if (vals[idx].is_zero()) continue;
        Exponent e(nv);
        for (std::size_t v = 0; v < nv; ++v) e[v] = static_cast<long>(idx / stride[v] % dims[v]) + shift[v];
        out.add_term(e, vals[idx]);
    }
    return out;
}

bool next_combination(std::vector<std::size_t>& c, std::size_t n) {
    const std::size_t k = c.size();
    for (std::size_t i = k; i-- > 0;) {
        if (c[i] < n - k + i) {
            ++c[i];
            for (std::size_t j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
            return true;
        }
    }
    return false;
}

}  // namespace

LaurentPoly LaurentPoly::constant(std::size_t nvars, const Cyclo& c) {
    LaurentPoly p(nvars);
    p.add_term(Exponent(nvars, 0), c);
    return p;
}

LaurentPoly LaurentPoly::monomial(const Exponent& e, const Cyclo& c) {
    LaurentPoly p(e.size());
    p.add_term(e, c);
    return p;
}

LaurentPoly LaurentPoly::variable_minus_one(std::size_t nvars, std::size_t i) {
    Exponent e(nvars, 0);
    e.at(i) = 1;
    LaurentPoly p = monomial(e, Cyclo(1));
    p.add_term(Exponent(nvars, 0), Cyclo(-1));
    return p;
}

int LaurentPoly::conductor() const {
    long n = 1;
    for (const auto& [e, c] : terms_) n = lcm_conductor(n, c.conductor());
    return static_cast<int>(n);
}

void LaurentPoly::add_term(const Exponent& e, const Cyclo& c) {
    if (e.size() != nvars_) throw Error(ErrorKind::DimensionMismatch, "exponent arity mismatch");
    if (c.is_zero()) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
        terms_.emplace(e, c);
        return;
    }
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
}

LaurentPoly LaurentPoly::operator-() const {
    LaurentPoly out(nvars_);
    for (const auto& [e, c] : terms_) out.terms_.emplace(e, -c);
    return out;
}

LaurentPoly& LaurentPoly::operator+=(const LaurentPoly& o) {
    if (o.nvars_ != nvars_) throw Error(ErrorKind::DimensionMismatch, "variable count mismatch");
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
}

LaurentPoly& LaurentPoly::operator-=(const LaurentPoly& o) { return *this += -o; }

LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
    if (a.nvars_ != b.nvars_) throw Error(ErrorKind::DimensionMismatch, "variable count mismatch");
    LaurentPoly out(a.nvars_);
    Exponent e(a.nvars_);
    for (const auto& [ea, ca] : a.terms_) {
        for (const auto& [eb, cb] : b.terms_) {
            for (std::size_t v = 0; v < e.size(); ++v) e[v] = ea[v] + eb[v];
            out.add_term(e, ca * cb);
        }
    }
    return out;
}

bool operator==(const LaurentPoly& a, const LaurentPoly& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
}

bool operator<(const LaurentPoly& a, const LaurentPoly& b) {
    if (a.nvars_ != b.nvars_) return a.nvars_ < b.nvars_;
    auto ia = a.terms_.rbegin(), ib = b.terms_.rbegin();
    for (; ia != a.terms_.rend() && ib != b.terms_.rend(); ++ia, ++ib) {
        if (ia->first != ib->first) return ia->first < ib->first;
        if (ia->second != ib->second) return ia->second < ib->second;
    }
    return a.terms_.size() < b.terms_.size();
}

LaurentPoly LaurentPoly::unit_inverse() const {
    if (!is_unit()) throw Error(ErrorKind::DivisionByZero, "inverse of a non-unit Laurent polynomial");
    const auto& [e, c] = *terms_.begin();
    Exponent neg(e.size());
    for (std::size_t v = 0; v < e.size(); ++v) neg[v] = -e[v];
    return monomial(neg, c.inverse());
}

LaurentPoly LaurentPoly::lifted(int conductor) const {
    LaurentPoly out(nvars_);
    for (const auto& [e, c] : terms_) out.terms_.emplace(e, c.lifted(conductor));
    return out;
}

std::complex<double> LaurentPoly::eval(const std::vector<std::complex<double>>& gamma) const {
    check_arity(nvars_, gamma.size());
    std::complex<double> s(0.0, 0.0);
    for (const auto& [e, c] : terms_) {
        std::complex<double> t = c.to_complex();
        for (std::size_t v = 0; v < nvars_; ++v)
            if (e[v]) t *= ipow(gamma[v], e[v]);
        s += t;
    }
    return s;
}

Cyclo LaurentPoly::eval_exact(const std::vector<Cyclo>& gamma) const {
    check_arity(nvars_, gamma.size());
    Cyclo s(0);
    for (const auto& [e, c] : terms_) {
        Cyclo t = c;
        for (std::size_t v = 0; v < nvars_; ++v) {
            if (!e[v]) continue;
            if (e[v] < 0 && gamma[v].is_zero())
                throw Error(ErrorKind::DivisionByZero, "negative power of a zero coordinate");
            t *= gamma[v].pow(e[v]);
        }
        s += t;
    }
    return s;
}

Exponent LaurentPoly::min_exponent() const {
    Exponent lo;
    for (const auto& [e, c] : terms_) {
        if (lo.empty()) lo = e;
        else
            for (std::size_t v = 0; v < nvars_; ++v) lo[v] = std::min(lo[v], e[v]);
    }
    if (lo.empty()) lo.assign(nvars_, 0);
    return lo;
}

Exponent LaurentPoly::max_exponent() const {
    Exponent hi;
    for (const auto& [e, c] : terms_) {
        if (hi.empty()) hi = e;
        else
            for (std::size_t v = 0; v < nvars_; ++v) hi[v] = std::max(hi[v], e[v]);
    }
    if (hi.empty()) hi.assign(nvars_, 0);
    return hi;
}

LaurentPoly LaurentPoly::normalized() const {
    if (is_zero()) return *this;
    const Exponent lo = min_exponent();
    const Cyclo inv = terms_.rbegin()->second.inverse();
    LaurentPoly out(nvars_);
    Exponent e(nvars_);
    for (const auto& [ex, c] : terms_) {
        for (std::size_t v = 0; v < nvars_; ++v) e[v] = ex[v] - lo[v];
        out.terms_.emplace(e, c * inv);
    }
    return out;
}

std::string LaurentPoly::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [e, c] = *it;
        std::string mono;
        for (std::size_t v = 0; v < nvars_; ++v) {
            if (!e[v]) continue;
            if (!mono.empty()) mono += "*";
            mono += "g" + std::to_string(v + 1);
            if (e[v] != 1) mono += "^" + std::to_string(e[v]);
        }
        std::string coef = c.to_string();
        bool negative = false;
        if (c.is_rational() && c.coeffs()[0] < 0) {
            negative = true;
            coef = Rational(-c.coeffs()[0]).get_str();
        }
        if (first) os << (negative ? "-" : "");
        else os << (negative ? " - " : " + ");
        first = false;
        if (mono.empty()) os << coef;
        else if (coef == "1") os << mono;
        else os << coef << "*" << mono;
    }
    return os.str();
}

bool LaurentMatrix::is_monomial() const {
    for (const auto& p : e_)
        if (p.size() > 1) return false;
    return true;
}

LaurentMatrix LaurentMatrix::submatrix(const std::vector<std::size_t>& rows,
                                       const std::vector<std::size_t>& cols) const {
    LaurentMatrix out(rows.size(), cols.size(), nvars_);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = (*this)(rows[i], cols[j]);
    return out;
}

LaurentPoly laurent_det(const LaurentMatrix& m, std::size_t cofactor_max) {
    if (m.rows() != m.cols()) throw Error(ErrorKind::DimensionMismatch, "determinant of a non-square matrix");
    if (m.rows() == 0) return LaurentPoly::constant(m.nvars(), Cyclo(1));
    if (m.rows() <= cofactor_max) return det_cofactor(m);
    return det_interpolate(m);
}

double minor_count(std::size_t rows, std::size_t cols, std::size_t q) {
    auto binom = [](std::size_t n, std::size_t k) {
        if (k > n) return 0.0;
        double r = 1.0;
        for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
        return std::round(r);
    };
    return binom(rows, q) * binom(cols, q);
}

std::vector<LaurentPoly> laurent_minors(const LaurentMatrix& m, std::size_t q, double budget) {
    if (q == 0) return {LaurentPoly::constant(m.nvars(), Cyclo(1))};
    if (q > std::min(m.rows(), m.cols())) return {};
    const double count = minor_count(m.rows(), m.cols(), q);
    if (count > budget) {
        std::ostringstream os;
        os << "need " << count << " minors of size " << q << ", budget " << budget;
        throw Error(ErrorKind::BudgetExceeded, os.str());
    }
    long conductor = 1;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) conductor = lcm_conductor(conductor, m(i, j).conductor());
    std::set<LaurentPoly> found;
    std::vector<std::size_t> rows(q), cols(q);
    for (std::size_t i = 0; i < q; ++i) rows[i] = i;
    do {
        for (std::size_t i = 0; i < q; ++i) cols[i] = i;
        do {
            LaurentPoly d = laurent_det(m.submatrix(rows, cols));
            if (!d.is_zero()) found.insert(d.normalized().lifted(static_cast<int>(conductor)));
        } while (next_combination(cols, m.cols()));
    } while (next_combination(rows, m.rows()));
    return {found.begin(), found.end()};
}

UnitPivotResult reduce_unit_pivots(const LaurentMatrix& m, std::size_t max_pivots) {
    std::vector<std::vector<LaurentPoly>> a(m.rows(), std::vector<LaurentPoly>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) a[i][j] = m(i, j);
    std::vector<std::size_t> live_rows(m.rows()), live_cols(m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) live_rows[i] = i;
    for (std::size_t j = 0; j < m.cols(); ++j) live_cols[j] = j;

    UnitPivotResult res;
    while (res.pivots < max_pivots) {
        std::vector<std::size_t> row_nnz(m.rows(), 0), col_nnz(m.cols(), 0);
        for (std::size_t i : live_rows)
            for (std::size_t j : live_cols)
                if (!a[i][j].is_zero()) {
                    ++row_nnz[i];
                    ++col_nnz[j];
                }
        std::size_t best_i = 0, best_j = 0, best_cost = SIZE_MAX;
        for (std::size_t i : live_rows)
            for (std::size_t j : live_cols) {
                if (!a[i][j].is_unit()) continue;
                const std::size_t cost = (row_nnz[i] - 1) * (col_nnz[j] - 1);
                if (cost < best_cost) {
                    best_cost = cost;
                    best_i = i;
                    best_j = j;
                }
            }
        if (best_cost == SIZE_MAX) break;
        const LaurentPoly inv = a[best_i][best_j].unit_inverse();
        for (std::size_t r : live_rows) {
            if (r == best_i || a[r][best_j].is_zero()) continue;
            const LaurentPoly f = a[r][best_j] * inv;
            for (std::size_t c : live_cols) {
                if (c == best_j || a[best_i][c].is_zero()) continue;
                a[r][c] -= f * a[best_i][c];
            }
            a[r][best_j] = LaurentPoly(m.nvars());
        }
        live_rows.erase(std::find(live_rows.begin(), live_rows.end(), best_i));
        live_cols.erase(std::find(live_cols.begin(), live_cols.end(), best_j));
        ++res.pivots;
    }
    res.reduced = LaurentMatrix(live_rows.size(), live_cols.size(), m.nvars());
    for (std::size_t i = 0; i < live_rows.size(); ++i)
        for (std::size_t j = 0; j < live_cols.size(); ++j) res.reduced(i, j) = a[live_rows[i]][live_cols[j]];
    return res;
}

std::size_t exact_rank(CycloMatrix a) {
    const std::size_t rows = a.size();
    if (rows == 0) return 0;
    const std::size_t cols = a[0].size();
    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols && rank < rows; ++c) {
        std::size_t p = rank;
        while (p < rows && a[p][c].is_zero()) ++p;
        if (p == rows) continue;
        std::swap(a[p], a[rank]);
        const Cyclo inv = a[rank][c].inverse();
        for (std::size_t r = rank + 1; r < rows; ++r) {
            if (a[r][c].is_zero()) continue;
            const Cyclo f = a[r][c] * inv;
            for (std::size_t k = c; k < cols; ++k)
                if (!a[rank][k].is_zero()) a[r][k] -= f * a[rank][k];
        }
        ++rank;
    }
    return rank;
}

Cyclo exact_det(CycloMatrix a) {
    const std::size_t n = a.size();
    Cyclo det(1);
    for (std::size_t c = 0; c < n; ++c) {
        if (a[c].size() != n) throw Error(ErrorKind::DimensionMismatch, "determinant of a non-square matrix");
        std::size_t p = c;
        while (p < n && a[p][c].is_zero()) ++p;
        if (p == n) return Cyclo(0);
        if (p != c) {
            std::swap(a[p], a[c]);
            det = -det;
        }
        det *= a[c][c];
        const Cyclo inv = a[c][c].inverse();
        for (std::size_t r = c + 1; r < n; ++r) {
            if (a[r][c].is_zero()) continue;
            const Cyclo f = a[r][c] * inv;
            for (std::size_t k = c; k < n; ++k)
                if (!a[c][k].is_zero()) a[r][k] -= f * a[c][k];
        }
    }
    return det;
}

}  // namespace flatlab::exact
