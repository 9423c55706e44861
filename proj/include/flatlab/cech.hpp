#pragma once

#include "flatlab/error.hpp"
#include "flatlab/laurent.hpp"
#include "flatlab/numeric_rank.hpp"

#include "json.hpp"

#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace flatlab::cech {

using Simplex = std::vector<int>;  // strictly increasing 1-based labels
using ExpVec = std::vector<long>;  // free components, then torsion components

struct Datum {
    int cover_size = 0;
    std::vector<std::vector<Simplex>> simplices;  // by dimension, lexicographic
    int free_rank = 0;
    std::vector<int> torsion_orders;
    // Ordered pairs exactly as supplied; (j,k) and (k,j) may both be present.
    std::map<std::pair<int, int>, ExpVec> exponents;

    std::size_t exp_len() const { return static_cast<std::size_t>(free_rank) + torsion_orders.size(); }
    std::size_t count(int dim) const;
    int top_dim() const { return static_cast<int>(simplices.size()) - 1; }
    // a_jk, derived from a_kj by antisymmetry if only that is stored.
    ExpVec exponent(int j, int k) const;
    long index_of(int dim, const Simplex& s) const;
};

struct Violation {
    ErrorKind kind;
    std::string detail;
};

std::vector<Violation> validate(const Datum& d);
void require_valid(const Datum& d);

Datum datum_from_json(const nlohmann::json& j);
nlohmann::json datum_to_json(const Datum& d);

// Product nerve: vertex (a,b) gets label (a-1)*|Y|+b; a simplex is a set of
// pairs whose two projections are simplices.
Datum product(const Datum& x, const Datum& y);

struct Character {
    std::vector<std::complex<double>> free;
    std::vector<std::complex<double>> torsion;
};

// Torsion coordinate t is zeta_{n_t}^{torsion[t]}.
struct ExactCharacter {
    std::vector<exact::Cyclo> free;
    std::vector<long> torsion;
};

void validate_character(const Datum& d, const Character& g, double tol = 1e-12);
Character to_numeric(const Datum& d, const ExactCharacter& g);

// gamma^{a_jk}
std::complex<double> transition(const Datum& d, const Character& g, int j, int k);
exact::Cyclo transition_exact(const Datum& d, const ExactCharacter& g, int j, int k);

// Matrix of delta: C^nu -> C^{nu+1}; rows J_{nu+1}, columns J_nu.
MatrixXcd coboundary(const Datum& d, const Character& g, int nu);
exact::CycloMatrix coboundary_exact(const Datum& d, const ExactCharacter& g, int nu);
// Entries are monomials in the free variables; the torsion part is fixed by
// the given exponents and enters as a root-of-unity coefficient.
exact::LaurentMatrix coboundary_symbolic(const Datum& d, const std::vector<long>& torsion, int nu);

std::size_t cohomology_dim(const Datum& d, const Character& g, int p, double rel_tol = kDefaultRankTol);
std::size_t cohomology_dim_exact(const Datum& d, const ExactCharacter& g, int p);
long euler_characteristic(const Datum& d);

Character random_character(const Datum& d, std::mt19937_64& rng);
// Free coordinates are nonzero rationals or roots of unity of one order k <= 6.
ExactCharacter random_exact_character(const Datum& d, std::mt19937_64& rng);
ExactCharacter trivial_character(const Datum& d);

// Free entries: number, [re, im], "p/q" or {"zeta": [k, order]}. Torsion
// entries are exponents k of zeta_{n_t}^k.
nlohmann::json character_to_json(const Character& g);
Character character_from_json(const Datum& d, const nlohmann::json& j);
ExactCharacter exact_character_from_json(const Datum& d, const nlohmann::json& j);
nlohmann::json exact_character_to_json(const ExactCharacter& g);

}  // namespace flatlab::cech
