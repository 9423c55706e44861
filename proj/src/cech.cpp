#include "flatlab/cech.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

namespace flatlab::cech {

using exact::Cyclo;
using exact::Rational;
using nlohmann::json;

namespace {

std::string simplex_str(const Simplex& s) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
    os << ")";
    return os.str();
}

long mod(long a, long n) {
    long r = a % n;
    return r < 0 ? r + n : r;
}

bool exp_equal(const Datum& d, const ExpVec& a, const ExpVec& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (i < static_cast<std::size_t>(d.free_rank)) {
            if (a[i] != b[i]) return false;
        } else if (mod(a[i] - b[i], d.torsion_orders[i - d.free_rank]) != 0) {
            return false;
        }
    }
    return true;
}

std::complex<double> ipow(std::complex<double> z, long e) {
    if (e < 0) return 1.0 / ipow(z, -e);
    std::complex<double> out(1.0, 0.0);
    while (e) {
        if (e & 1) out *= z;
        e >>= 1;
        if (e) z *= z;
    }
    return out;
}

std::complex<double> root_of_unity(int order, long k) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(mod(k, order)) / order;
    return {std::cos(a), std::sin(a)};
}

// Simplex with vertex lambda removed.
Simplex face(const Simplex& s, std::size_t lambda) {
    Simplex f;
    f.reserve(s.size() - 1);
    for (std::size_t i = 0; i < s.size(); ++i)
        if (i != lambda) f.push_back(s[i]);
    return f;
}

const json& need(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw Error(ErrorKind::Schema, std::string("missing field '") + key + "'");
    return j.at(key);
}

long need_int(const json& j, const std::string& what) {
    if (!j.is_number_integer()) throw Error(ErrorKind::Schema, what + " must be an integer");
    return j.get<long>();
}

Cyclo exact_entry(const json& v) {
    if (v.is_number_integer()) return Cyclo(v.get<long>());
    if (v.is_string()) return Cyclo(exact::parse_rational(v.get<std::string>()));
    if (v.is_object() && v.contains("zeta")) {
        const json& z = v.at("zeta");
        if (!z.is_array() || z.size() != 2) throw Error(ErrorKind::Schema, "zeta entry must be [k, order]");
        const long order = need_int(z[1], "zeta order");
        if (order < 1) throw Error(ErrorKind::Schema, "zeta order must be positive");
        return Cyclo::root_of_unity(static_cast<int>(order), need_int(z[0], "zeta exponent"));
    }
    throw Error(ErrorKind::Schema, "character entry is not exact");
}

}  // namespace

std::size_t Datum::count(int dim) const {
    if (dim < 0 || dim >= static_cast<int>(simplices.size())) return 0;
    return simplices[dim].size();
}

ExpVec Datum::exponent(int j, int k) const {
    if (j == k) return ExpVec(exp_len(), 0);
    auto it = exponents.find({j, k});
    if (it != exponents.end()) return it->second;
    it = exponents.find({k, j});
    if (it == exponents.end())
        throw Error(ErrorKind::MissingExponent, "no exponent for edge (" + std::to_string(j) + "," + std::to_string(k) + ")");
    ExpVec out = it->second;
    for (auto& v : out) v = -v;
    return out;
}

long Datum::index_of(int dim, const Simplex& s) const {
    if (dim < 0 || dim >= static_cast<int>(simplices.size())) return -1;
    const auto& list = simplices[dim];
    auto it = std::lower_bound(list.begin(), list.end(), s);
    if (it == list.end() || *it != s) return -1;
    return it - list.begin();
}

std::vector<Violation> validate(const Datum& d) {
    std::vector<Violation> out;
    for (std::size_t dim = 0; dim < d.simplices.size(); ++dim) {
        for (const Simplex& s : d.simplices[dim]) {
            for (int v : s)
                if (v < 1 || v > d.cover_size)
                    out.push_back({ErrorKind::Schema, "label " + std::to_string(v) + " out of range in " + simplex_str(s)});
            if (dim == 0) continue;
            for (std::size_t l = 0; l < s.size(); ++l) {
                Simplex f = face(s, l);
                if (d.index_of(static_cast<int>(dim) - 1, f) < 0)
                    out.push_back({ErrorKind::MissingFace, "face " + simplex_str(f) + " of " + simplex_str(s)});
            }
        }
    }
    for (const auto& [key, v] : d.exponents) {
        if (v.size() != d.exp_len())
            out.push_back({ErrorKind::DimensionMismatch,
                           "exponent of (" + std::to_string(key.first) + "," + std::to_string(key.second) +
                               ") has length " + std::to_string(v.size())});
    }
    if (!out.empty()) return out;
    for (const auto& [key, v] : d.exponents) {
        const auto [j, k] = key;
        if (j >= k) continue;
        auto rev = d.exponents.find({k, j});
        if (rev == d.exponents.end()) continue;
        ExpVec neg = rev->second;
        for (auto& x : neg) x = -x;
        if (!exp_equal(d, v, neg))
            out.push_back({ErrorKind::AntisymmetryViolation,
                           "a(" + std::to_string(j) + "," + std::to_string(k) + ") != -a(" + std::to_string(k) + "," +
                               std::to_string(j) + ")"});
    }
    if (d.simplices.size() > 1) {
        for (const Simplex& e : d.simplices[1])
            if (!d.exponents.count({e[0], e[1]}) && !d.exponents.count({e[1], e[0]}))
                out.push_back({ErrorKind::MissingExponent, "edge " + simplex_str(e)});
    }
    if (!out.empty()) return out;
    if (d.simplices.size() > 2) {
        for (const Simplex& t : d.simplices[2]) {
            ExpVec ij = d.exponent(t[0], t[1]), jk = d.exponent(t[1], t[2]), ik = d.exponent(t[0], t[2]);
            for (std::size_t c = 0; c < ij.size(); ++c) ij[c] += jk[c];
            if (!exp_equal(d, ij, ik)) out.push_back({ErrorKind::CocycleViolation, "triangle " + simplex_str(t)});
        }
    }
    return out;
}

void require_valid(const Datum& d) {
    auto v = validate(d);
    if (!v.empty()) throw Error(v.front().kind, v.front().detail);
}

Datum datum_from_json(const json& j) {
    Datum d;
    d.cover_size = static_cast<int>(need_int(need(j, "cover_size"), "cover_size"));
    d.free_rank = static_cast<int>(need_int(need(j, "free_rank"), "free_rank"));
    if (d.cover_size < 1 || d.free_rank < 0) throw Error(ErrorKind::Schema, "cover_size and free_rank out of range");
    if (j.contains("torsion_orders")) {
        for (const json& t : j.at("torsion_orders")) {
            const long n = need_int(t, "torsion order");
            if (n < 1) throw Error(ErrorKind::Schema, "torsion orders must be positive");
            d.torsion_orders.push_back(static_cast<int>(n));
        }
    }
    const json& simp = need(j, "simplices");
    if (!simp.is_array()) throw Error(ErrorKind::Schema, "simplices must be an array");
    for (const json& s : simp) {
        if (!s.is_array() || s.empty()) throw Error(ErrorKind::Schema, "simplex must be a nonempty array");
        Simplex sx;
        for (const json& v : s) sx.push_back(static_cast<int>(need_int(v, "simplex label")));
        for (std::size_t i = 1; i < sx.size(); ++i)
            if (sx[i] <= sx[i - 1]) throw Error(ErrorKind::Schema, "simplex " + simplex_str(sx) + " is not increasing");
        const std::size_t dim = sx.size() - 1;
        if (d.simplices.size() <= dim) d.simplices.resize(dim + 1);
        d.simplices[dim].push_back(sx);
    }
    for (auto& list : d.simplices) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    const json& ex = need(j, "edge_exponents");
    if (!ex.is_object()) throw Error(ErrorKind::Schema, "edge_exponents must be an object");
    for (const auto& [key, val] : ex.items()) {
        int a = 0, b = 0;
        char comma = 0;
        std::istringstream is(key);
        if (!(is >> a >> comma >> b) || comma != ',' || !is.eof())
            throw Error(ErrorKind::Schema, "edge key '" + key + "' is not 'j,k'");
        if (!val.is_array()) throw Error(ErrorKind::Schema, "exponent of '" + key + "' must be an array");
        ExpVec v;
        for (const json& x : val) v.push_back(need_int(x, "exponent"));
        d.exponents[{a, b}] = v;
    }
    return d;
}

json datum_to_json(const Datum& d) {
    json j;
    j["schema_version"] = 1;
    j["cover_size"] = d.cover_size;
    j["free_rank"] = d.free_rank;
    j["torsion_orders"] = d.torsion_orders;
    json simp = json::array();
    for (const auto& list : d.simplices)
        for (const Simplex& s : list) simp.push_back(s);
    j["simplices"] = simp;
    json ex = json::object();
    for (const auto& [key, v] : d.exponents) ex[std::to_string(key.first) + "," + std::to_string(key.second)] = v;
    j["edge_exponents"] = ex;
    return j;
}

Datum product(const Datum& x, const Datum& y) {
    require_valid(x);
    require_valid(y);
    const int ny = y.cover_size;
    auto label = [ny](int a, int b) { return (a - 1) * ny + b; };
    std::set<Simplex> found;
    // every simplex of the product lies in sigma x tau for simplices sigma, tau
    for (const auto& lx : x.simplices)
        for (const Simplex& s : lx)
            for (const auto& ly : y.simplices)
                for (const Simplex& t : ly) {
                    std::vector<std::pair<int, int>> pts;
                    for (int a : s)
                        for (int b : t) pts.push_back({a, b});
                    if (pts.size() > 20) throw Error(ErrorKind::BudgetExceeded, "product cell too large");
                    for (std::uint32_t mask = 1; mask < (1u << pts.size()); ++mask) {
                        std::set<int> pa, pb;
                        Simplex sx;
                        for (std::size_t i = 0; i < pts.size(); ++i)
                            if (mask >> i & 1) {
                                pa.insert(pts[i].first);
                                pb.insert(pts[i].second);
                                sx.push_back(label(pts[i].first, pts[i].second));
                            }
                        // only keep sets whose projections are exactly sigma and tau
                        if (pa.size() != s.size() || pb.size() != t.size()) continue;
                        std::sort(sx.begin(), sx.end());
                        found.insert(sx);
                    }
                }
    Datum d;
    d.cover_size = x.cover_size * y.cover_size;
    d.free_rank = x.free_rank + y.free_rank;
    d.torsion_orders = x.torsion_orders;
    d.torsion_orders.insert(d.torsion_orders.end(), y.torsion_orders.begin(), y.torsion_orders.end());
    for (const Simplex& s : found) {
        const std::size_t dim = s.size() - 1;
        if (d.simplices.size() <= dim) d.simplices.resize(dim + 1);
        d.simplices[dim].push_back(s);
    }
    for (auto& list : d.simplices) std::sort(list.begin(), list.end());
    if (d.simplices.size() > 1) {
        for (const Simplex& e : d.simplices[1]) {
            const int a1 = (e[0] - 1) / ny + 1, b1 = (e[0] - 1) % ny + 1;
            const int a2 = (e[1] - 1) / ny + 1, b2 = (e[1] - 1) % ny + 1;
            const ExpVec ex = x.exponent(a1, a2), ey = y.exponent(b1, b2);
            ExpVec v(ex.begin(), ex.begin() + x.free_rank);
            v.insert(v.end(), ey.begin(), ey.begin() + y.free_rank);
            v.insert(v.end(), ex.begin() + x.free_rank, ex.end());
            v.insert(v.end(), ey.begin() + y.free_rank, ey.end());
            d.exponents[{e[0], e[1]}] = v;
        }
    }
    return d;
}

void validate_character(const Datum& d, const Character& g, double tol) {
    if (g.free.size() != static_cast<std::size_t>(d.free_rank) || g.torsion.size() != d.torsion_orders.size())
        throw Error(ErrorKind::DimensionMismatch, "character arity does not match the datum");
    for (std::size_t i = 0; i < g.free.size(); ++i) {
        const auto z = g.free[i];
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || z == std::complex<double>(0.0, 0.0))
            throw Error(ErrorKind::InvalidCharacter, "free coordinate " + std::to_string(i + 1) + " is zero or not finite");
    }
    for (std::size_t t = 0; t < g.torsion.size(); ++t)
        if (std::abs(ipow(g.torsion[t], d.torsion_orders[t]) - 1.0) > tol)
            throw Error(ErrorKind::InvalidCharacter, "torsion coordinate " + std::to_string(t + 1) + " is not a root of unity of order " +
                                                         std::to_string(d.torsion_orders[t]));
}

Character to_numeric(const Datum& d, const ExactCharacter& g) {
    Character out;
    for (const Cyclo& c : g.free) out.free.push_back(c.to_complex());
    for (std::size_t t = 0; t < g.torsion.size(); ++t) out.torsion.push_back(root_of_unity(d.torsion_orders.at(t), g.torsion[t]));
    return out;
}

std::complex<double> transition(const Datum& d, const Character& g, int j, int k) {
    const ExpVec a = d.exponent(j, k);
    std::complex<double> v(1.0, 0.0);
    for (int i = 0; i < d.free_rank; ++i)
        if (a[i]) v *= ipow(g.free[i], a[i]);
    for (std::size_t t = 0; t < d.torsion_orders.size(); ++t)
        if (a[d.free_rank + t]) v *= ipow(g.torsion[t], a[d.free_rank + t]);
    return v;
}

Cyclo transition_exact(const Datum& d, const ExactCharacter& g, int j, int k) {
    const ExpVec a = d.exponent(j, k);
    Cyclo v(1);
    for (int i = 0; i < d.free_rank; ++i)
        if (a[i]) v *= g.free[i].pow(a[i]);
    for (std::size_t t = 0; t < d.torsion_orders.size(); ++t) {
        const long e = a[d.free_rank + t] * g.torsion[t];
        if (mod(e, d.torsion_orders[t])) v *= Cyclo::root_of_unity(d.torsion_orders[t], e);
    }
    return v;
}

namespace {

// Calls emit(row, col, lambda, sigma) for every nonzero entry of delta_nu.
template <class F>
void for_each_entry(const Datum& d, int nu, F&& emit) {
    if (nu < 0 || nu + 1 >= static_cast<int>(d.simplices.size())) return;
    const auto& rows = d.simplices[nu + 1];
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const Simplex& s = rows[r];
        for (std::size_t l = 0; l < s.size(); ++l) {
            const long c = d.index_of(nu, face(s, l));
            if (c < 0) throw Error(ErrorKind::MissingFace, "face of " + simplex_str(s));
            emit(r, static_cast<std::size_t>(c), l, s);
        }
    }
}

}  // namespace

MatrixXcd coboundary(const Datum& d, const Character& g, int nu) {
    require_valid(d);
    validate_character(d, g);
    MatrixXcd m = MatrixXcd::Zero(static_cast<Eigen::Index>(d.count(nu + 1)), static_cast<Eigen::Index>(d.count(nu)));
    for_each_entry(d, nu, [&](std::size_t r, std::size_t c, std::size_t l, const Simplex& s) {
        if (l == 0) m(r, c) += transition(d, g, s[0], s[1]);
        else m(r, c) += (l % 2) ? -1.0 : 1.0;
    });
    return m;
}

exact::CycloMatrix coboundary_exact(const Datum& d, const ExactCharacter& g, int nu) {
    require_valid(d);
    if (g.free.size() != static_cast<std::size_t>(d.free_rank) || g.torsion.size() != d.torsion_orders.size())
        throw Error(ErrorKind::DimensionMismatch, "character arity does not match the datum");
    for (const Cyclo& c : g.free)
        if (c.is_zero()) throw Error(ErrorKind::InvalidCharacter, "free coordinate is zero");
    exact::CycloMatrix m(d.count(nu + 1), std::vector<Cyclo>(d.count(nu)));
    for_each_entry(d, nu, [&](std::size_t r, std::size_t c, std::size_t l, const Simplex& s) {
        if (l == 0) m[r][c] += transition_exact(d, g, s[0], s[1]);
        else m[r][c] += Cyclo((l % 2) ? -1L : 1L);
    });
    return m;
}

exact::LaurentMatrix coboundary_symbolic(const Datum& d, const std::vector<long>& torsion, int nu) {
    require_valid(d);
    if (torsion.size() != d.torsion_orders.size())
        throw Error(ErrorKind::DimensionMismatch, "torsion assignment arity does not match the datum");
    const std::size_t nv = static_cast<std::size_t>(d.free_rank);
    exact::LaurentMatrix m(d.count(nu + 1), d.count(nu), nv);
    for_each_entry(d, nu, [&](std::size_t r, std::size_t c, std::size_t l, const Simplex& s) {
        if (l == 0) {
            const ExpVec a = d.exponent(s[0], s[1]);
            Cyclo coef(1);
            for (std::size_t t = 0; t < torsion.size(); ++t) {
                const long e = a[nv + t] * torsion[t];
                if (mod(e, d.torsion_orders[t])) coef *= Cyclo::root_of_unity(d.torsion_orders[t], e);
            }
            m(r, c).add_term(exact::Exponent(a.begin(), a.begin() + nv), coef);
        } else {
            m(r, c).add_term(exact::Exponent(nv, 0), Cyclo((l % 2) ? -1L : 1L));
        }
    });
    return m;
}

std::size_t cohomology_dim(const Datum& d, const Character& g, int p, double rel_tol) {
    if (p < 0) throw Error(ErrorKind::BadIndex, "negative cohomological degree");
    const std::size_t ip = d.count(p);
    const std::size_t r1 = numeric_rank(coboundary(d, g, p), rel_tol);
    const std::size_t r0 = p > 0 ? numeric_rank(coboundary(d, g, p - 1), rel_tol) : 0;
    return ip - r1 - r0;
}

std::size_t cohomology_dim_exact(const Datum& d, const ExactCharacter& g, int p) {
    if (p < 0) throw Error(ErrorKind::BadIndex, "negative cohomological degree");
    const std::size_t ip = d.count(p);
    const std::size_t r1 = exact::exact_rank(coboundary_exact(d, g, p));
    const std::size_t r0 = p > 0 ? exact::exact_rank(coboundary_exact(d, g, p - 1)) : 0;
    return ip - r1 - r0;
}

long euler_characteristic(const Datum& d) {
    long chi = 0;
    for (std::size_t k = 0; k < d.simplices.size(); ++k)
        chi += (k % 2 ? -1 : 1) * static_cast<long>(d.simplices[k].size());
    return chi;
}

Character random_character(const Datum& d, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> mod_dist(0.5, 2.0), arg(0.0, 2.0 * std::numbers::pi);
    Character g;
    for (int i = 0; i < d.free_rank; ++i) g.free.push_back(std::polar(mod_dist(rng), arg(rng)));
    for (int n : d.torsion_orders) {
        std::uniform_int_distribution<long> k(0, n - 1);
        g.torsion.push_back(root_of_unity(n, k(rng)));
    }
    return g;
}

ExactCharacter random_exact_character(const Datum& d, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> order(1, 6), num(1, 9), coin(0, 1);
    const int k = order(rng);
    ExactCharacter g;
    for (int i = 0; i < d.free_rank; ++i) {
        if (k > 1 && coin(rng)) {
            std::uniform_int_distribution<long> e(0, k - 1);
            g.free.push_back(Cyclo::root_of_unity(k, e(rng)));
        } else {
            Rational q(num(rng) * (coin(rng) ? 1 : -1), num(rng));
            q.canonicalize();
            g.free.push_back(Cyclo(q));
        }
    }
    for (int n : d.torsion_orders) {
        std::uniform_int_distribution<long> e(0, n - 1);
        g.torsion.push_back(e(rng));
    }
    return g;
}

ExactCharacter trivial_character(const Datum& d) {
    ExactCharacter g;
    g.free.assign(d.free_rank, Cyclo(1));
    g.torsion.assign(d.torsion_orders.size(), 0);
    return g;
}

json character_to_json(const Character& g) {
    json j;
    json f = json::array();
    for (auto z : g.free) f.push_back({z.real(), z.imag()});
    j["free"] = f;
    json t = json::array();
    for (auto z : g.torsion) t.push_back({z.real(), z.imag()});
    j["torsion_values"] = t;
    return j;
}

Character character_from_json(const Datum& d, const json& j) {
    Character g;
    for (const json& v : need(j, "free")) {
        if (v.is_number()) g.free.push_back({v.get<double>(), 0.0});
        else if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
            g.free.push_back({v[0].get<double>(), v[1].get<double>()});
        else g.free.push_back(exact_entry(v).to_complex());
    }
    if (j.contains("torsion")) {
        const json& t = j.at("torsion");
        if (!t.is_array() || t.size() != d.torsion_orders.size())
            throw Error(ErrorKind::DimensionMismatch, "torsion exponent count does not match the datum");
        for (std::size_t i = 0; i < t.size(); ++i)
            g.torsion.push_back(root_of_unity(d.torsion_orders[i], need_int(t[i], "torsion exponent")));
    } else {
        g.torsion.assign(d.torsion_orders.size(), {1.0, 0.0});
    }
    validate_character(d, g);
    return g;
}

ExactCharacter exact_character_from_json(const Datum& d, const json& j) {
    ExactCharacter g;
    for (const json& v : need(j, "free")) g.free.push_back(exact_entry(v));
    if (g.free.size() != static_cast<std::size_t>(d.free_rank))
        throw Error(ErrorKind::DimensionMismatch, "character arity does not match the datum");
    for (const Cyclo& c : g.free)
        if (c.is_zero()) throw Error(ErrorKind::InvalidCharacter, "free coordinate is zero");
    if (j.contains("torsion")) {
        for (const json& t : j.at("torsion")) g.torsion.push_back(need_int(t, "torsion exponent"));
    } else {
        g.torsion.assign(d.torsion_orders.size(), 0);
    }
    if (g.torsion.size() != d.torsion_orders.size())
        throw Error(ErrorKind::DimensionMismatch, "torsion exponent count does not match the datum");
    return g;
}

json exact_character_to_json(const ExactCharacter& g) {
    json j;
    json f = json::array();
    for (const Cyclo& c : g.free) {
        if (c.is_rational()) f.push_back(c.coeffs()[0].get_str());
        else f.push_back(c.to_string());
    }
    j["free"] = f;
    j["torsion"] = g.torsion;
    return j;
}

}  // namespace flatlab::cech
