#include "flatlab/jump.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>

namespace flatlab::jump {

using cech::Character;
using cech::Datum;
using cech::ExactCharacter;
using exact::Cyclo;
using exact::LaurentPoly;
using nlohmann::json;

GenericRank generic_rank(const Datum& d, int nu, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    GenericRank out;
    for (int i = 0; i < 3; ++i) {
        const Character g = cech::random_character(d, rng);
        out.samples.push_back(numeric_rank(cech::coboundary(d, g, nu)));
    }
    out.rank = *std::max_element(out.samples.begin(), out.samples.end());
    out.disagreement = std::any_of(out.samples.begin(), out.samples.end(), [&](std::size_t r) { return r != out.rank; });
    return out;
}

JumpIdeal jump_ideal(const Datum& d, int p, const ExactCharacter& gamma0, double budget) {
    cech::require_valid(d);
    if (p < 0) throw Error(ErrorKind::BadIndex, "negative cohomological degree");
    JumpIdeal ideal;
    ideal.degree = p;
    ideal.base = gamma0;
    ideal.base_dim = cech::cohomology_dim_exact(d, gamma0, p);
    std::set<LaurentPoly> gens;
    const LaurentPoly one = LaurentPoly::constant(d.free_rank, Cyclo(1));
    for (int nu = p - 1; nu <= p; ++nu) {
        Presentation pres;
        pres.nu = nu;
        pres.kind = "none";
        const std::size_t rows = d.count(nu + 1), cols = d.count(nu);
        if (nu < 0 || rows == 0 || cols == 0) {
            ideal.presentations.push_back(pres);
            continue;
        }
        pres.rank_at_base = exact::exact_rank(cech::coboundary_exact(d, gamma0, nu));
        pres.minor_size = pres.rank_at_base + 1;
        if (pres.minor_size > std::min(rows, cols)) {
            ideal.presentations.push_back(pres);
            continue;
        }
        const exact::LaurentMatrix m = cech::coboundary_symbolic(d, gamma0.torsion, nu);
        std::vector<LaurentPoly> minors;
        if (exact::minor_count(rows, cols, pres.minor_size) <= budget) {
            pres.kind = "all-minors";
            minors = exact::laurent_minors(m, pres.minor_size, budget);
        } else {
            pres.kind = "unit-pivot-reduced";
            const auto red = exact::reduce_unit_pivots(m, pres.minor_size);
            pres.pivots = red.pivots;
            if (red.pivots >= pres.minor_size) minors = {one};
            else minors = exact::laurent_minors(red.reduced, pres.minor_size - red.pivots, budget);
        }
        for (auto& g : minors) gens.insert(g.normalized());
        ideal.presentations.push_back(pres);
    }
    if (gens.count(one)) gens = {one};
    ideal.generators.assign(gens.begin(), gens.end());
    return ideal;
}

bool on_component(const Datum& d, const JumpIdeal& ideal, const Character& g, double tol) {
    const Character base = cech::to_numeric(d, ideal.base);
    for (std::size_t t = 0; t < base.torsion.size(); ++t)
        if (std::abs(base.torsion[t] - g.torsion.at(t)) > tol) return false;
    return true;
}

bool in_zero_set(const Datum& d, const JumpIdeal& ideal, const Character& g, double tol) {
    if (!on_component(d, ideal, g, 1e-9)) return false;
    for (const LaurentPoly& p : ideal.generators) {
        double scale = 0.0;
        for (const auto& [e, c] : p.terms()) scale += std::abs(LaurentPoly::monomial(e, c).eval(g.free));
        if (std::abs(p.eval(g.free)) > tol * std::max(scale, 1.0)) return false;
    }
    return true;
}

bool definitional_member(const Datum& d, const JumpIdeal& ideal, const Character& g) {
    return cech::cohomology_dim(d, g, ideal.degree) >= ideal.base_dim;
}

int torsion_order(const Character& g, int max_order, double tol) {
    for (int n = 1; n <= max_order; ++n) {
        bool ok = true;
        for (const auto* part : {&g.free, &g.torsion})
            for (auto z : *part) {
                std::complex<double> w(1.0, 0.0);
                for (int i = 0; i < n; ++i) w *= z;
                if (std::abs(w - 1.0) > tol) ok = false;
            }
        if (ok) return n;
    }
    return 0;
}

namespace {

// Roots of unity of order <= 6, as (k, order) in lowest terms.
std::vector<std::pair<long, int>> small_roots() {
    std::vector<std::pair<long, int>> out;
    for (int n = 1; n <= 6; ++n)
        for (long k = 0; k < n; ++k)
            if (std::gcd(k, static_cast<long>(n)) == 1) out.push_back({k, n});
    return out;
}

}  // namespace

JumpReport jump_report(const Datum& d, int p, const ExactCharacter& gamma0, std::uint64_t seed,
                       std::size_t random_samples, double budget) {
    JumpReport rep;
    rep.seed = seed;
    for (int q = 0; q <= d.top_dim(); ++q) {
        const std::size_t r1 = generic_rank(d, q, seed + 2 * q).rank;
        const std::size_t r0 = q > 0 ? generic_rank(d, q - 1, seed + 2 * q - 1).rank : 0;
        rep.generic_dims.push_back(d.count(q) - r1 - r0);
    }
    rep.ideal = jump_ideal(d, p, gamma0, budget);
    const Character base = cech::to_numeric(d, gamma0);

    const auto roots = small_roots();
    const std::size_t m = static_cast<std::size_t>(d.free_rank);
    std::size_t total = 1;
    for (std::size_t i = 0; i < m; ++i) total *= roots.size();
    rep.candidates = total;
    for (std::size_t idx = 0; idx < total; ++idx) {
        TorsionPoint pt;
        pt.character.torsion = base.torsion;
        std::size_t rest = idx;
        long order = 1;
        for (std::size_t i = 0; i < m; ++i) {
            const auto [k, n] = roots[rest % roots.size()];
            rest /= roots.size();
            const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / n;
            pt.character.free.push_back({std::cos(a), std::sin(a)});
            pt.free_roots.push_back({k, n});
            order = std::lcm(order, static_cast<long>(n));
        }
        for (std::size_t t = 0; t < gamma0.torsion.size(); ++t) {
            const long n = d.torsion_orders[t];
            const long k = ((gamma0.torsion[t] % n) + n) % n;
            order = std::lcm(order, n / std::gcd(n, k));
        }
        pt.order = static_cast<int>(order);
        if (!in_zero_set(d, rep.ideal, pt.character)) continue;
        pt.dim = cech::cohomology_dim(d, pt.character, p);
        pt.definitional = pt.dim >= rep.ideal.base_dim;
        if (!pt.definitional) ++rep.membership_disagreements;
        rep.zero_set.push_back(pt);
    }
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    rep.random_samples = random_samples;
    for (std::size_t s = 0; s < random_samples; ++s) {
        Character g = cech::random_character(d, rng);
        g.torsion = base.torsion;
        const bool z = in_zero_set(d, rep.ideal, g);
        const bool def = definitional_member(d, rep.ideal, g);
        if (z) ++rep.random_members;
        // the zero set of the minors is contained in the jump locus
        if (z && !def) ++rep.membership_disagreements;
    }
    return rep;
}

json laurent_to_json(const LaurentPoly& p) {
    json terms = json::array();
    for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
        json c;
        c["conductor"] = it->second.conductor();
        json r = json::array();
        for (const auto& q : it->second.coeffs()) r.push_back(q.get_str());
        c["rationals"] = r;
        terms.push_back({{"exponents", it->first}, {"coeff", c}});
    }
    return terms;
}

LaurentPoly laurent_from_json(std::size_t nvars, const json& j) {
    if (!j.is_array()) throw Error(ErrorKind::Schema, "Laurent polynomial must be an array of terms");
    LaurentPoly p(nvars);
    for (const json& t : j) {
        if (!t.is_object() || !t.contains("exponents") || !t.contains("coeff"))
            throw Error(ErrorKind::Schema, "term needs exponents and coeff");
        exact::Exponent e;
        for (const json& x : t.at("exponents")) {
            if (!x.is_number_integer()) throw Error(ErrorKind::Schema, "exponent must be an integer");
            e.push_back(x.get<long>());
        }
        if (e.size() != nvars) throw Error(ErrorKind::DimensionMismatch, "exponent arity mismatch");
        const json& c = t.at("coeff");
        if (!c.contains("conductor") || !c.at("conductor").is_number_integer() || !c.contains("rationals"))
            throw Error(ErrorKind::Schema, "coeff needs conductor and rationals");
        const int n = c.at("conductor").get<int>();
        if (n < 1) throw Error(ErrorKind::Schema, "conductor must be positive");
        std::vector<exact::Rational> q;
        for (const json& s : c.at("rationals")) {
            if (s.is_number_integer()) q.emplace_back(s.get<long>());
            else if (s.is_string()) q.push_back(exact::parse_rational(s.get<std::string>()));
            else throw Error(ErrorKind::Schema, "rational must be a string 'p/q'");
        }
        if (q.size() != static_cast<std::size_t>(exact::euler_phi(n)))
            throw Error(ErrorKind::Schema, "rationals length must equal phi(conductor)");
        p.add_term(e, Cyclo(n, q));
    }
    return p;
}

json report_to_json(const JumpReport& r) {
    json j;
    j["generic_dims"] = r.generic_dims;
    j["degree"] = r.ideal.degree;
    j["base_character"] = cech::exact_character_to_json(r.ideal.base);
    j["base_dim"] = r.ideal.base_dim;
    json gens = json::array(), text = json::array();
    for (const auto& g : r.ideal.generators) {
        gens.push_back(laurent_to_json(g));
        text.push_back(g.to_string());
    }
    j["generators"] = gens;
    j["generators_text"] = text;
    json pres = json::array();
    for (const auto& p : r.ideal.presentations)
        pres.push_back({{"nu", p.nu},
                        {"rank_at_base", p.rank_at_base},
                        {"minor_size", p.minor_size},
                        {"kind", p.kind},
                        {"pivots", p.pivots}});
    j["presentations"] = pres;
    json zs = json::array(), tors = json::array();
    for (const auto& pt : r.zero_set) {
        json roots = json::array();
        for (const auto& [k, n] : pt.free_roots) roots.push_back({{"zeta", {k, n}}});
        zs.push_back({{"free", roots}, {"torsion", r.ideal.base.torsion}});
        tors.push_back({{"order", pt.order}, {"dim", pt.dim}, {"definitional_member", pt.definitional}});
    }
    j["sampled_zero_set"] = zs;
    j["torsion_reports"] = tors;
    j["candidates_scanned"] = r.candidates;
    j["random_samples"] = r.random_samples;
    j["random_members"] = r.random_members;
    j["membership_disagreements"] = r.membership_disagreements;
    j["seed"] = r.seed;
    return j;
}

}  // namespace flatlab::jump
