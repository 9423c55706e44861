#pragma once

#include "flatlab/cech.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace flatlab::jump {

struct GenericRank {
    std::size_t rank = 0;
    std::vector<std::size_t> samples;
    bool disagreement = false;
};

// Max rank over three independent random characters.
GenericRank generic_rank(const cech::Datum& d, int nu, std::uint64_t seed);

struct Presentation {
    int nu = 0;
    std::size_t rank_at_base = 0;
    std::size_t minor_size = 0;
    std::string kind;  // "none", "all-minors" or "unit-pivot-reduced"
    std::size_t pivots = 0;
};

// Ideal cut out by the (q_nu + 1)-minors of delta_{p-1} and delta_p, where
// q_nu is the rank at the base character. It lives on the torsion component
// of the base character.
struct JumpIdeal {
    int degree = 0;
    cech::ExactCharacter base;
    std::size_t base_dim = 0;
    std::vector<Presentation> presentations;
    std::vector<exact::LaurentPoly> generators;
};

JumpIdeal jump_ideal(const cech::Datum& d, int p, const cech::ExactCharacter& gamma0, double budget = 1e5);

bool on_component(const cech::Datum& d, const JumpIdeal& ideal, const cech::Character& g, double tol = 1e-12);
// Every generator vanishes at g relative to the size of its terms.
bool in_zero_set(const cech::Datum& d, const JumpIdeal& ideal, const cech::Character& g, double tol = 1e-9);
// dim H^p(g) >= dim H^p(gamma0)
bool definitional_member(const cech::Datum& d, const JumpIdeal& ideal, const cech::Character& g);

// Smallest n <= max_order with g^n = 1 coordinatewise, else 0.
int torsion_order(const cech::Character& g, int max_order = 1000, double tol = 1e-9);

struct TorsionPoint {
    cech::Character character;
    std::vector<std::pair<long, int>> free_roots;  // (k, order) per free coordinate
    int order = 1;
    std::size_t dim = 0;
    bool definitional = false;
};

struct JumpReport {
    std::vector<std::size_t> generic_dims;
    JumpIdeal ideal;
    std::vector<TorsionPoint> zero_set;
    std::size_t candidates = 0;
    std::size_t random_samples = 0;
    std::size_t random_members = 0;
    std::size_t membership_disagreements = 0;
    std::uint64_t seed = 0;
};

// Scans torsion characters of order <= 6 on the base component and random
// characters; both are cross-checked against the definitional test.
JumpReport jump_report(const cech::Datum& d, int p, const cech::ExactCharacter& gamma0, std::uint64_t seed,
                       std::size_t random_samples = 100, double budget = 1e5);

nlohmann::json laurent_to_json(const exact::LaurentPoly& p);
exact::LaurentPoly laurent_from_json(std::size_t nvars, const nlohmann::json& j);
nlohmann::json report_to_json(const JumpReport& r);

}  // namespace flatlab::jump
