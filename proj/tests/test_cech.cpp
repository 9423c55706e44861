#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "flatlab/cech.hpp"

#include <fstream>
#include <numbers>

using namespace flatlab;
using namespace flatlab::cech;
using nlohmann::json;

namespace {

Datum load(const std::string& name) {
    std::ifstream in(std::string(FLATLAB_DATA_DIR) + "/" + name + ".json");
    REQUIRE(in.good());
    return datum_from_json(json::parse(in));
}

// Independent coboundary: straight from the alternating-sum definition with
// a linear face search and a dense LU rank.
std::size_t oracle_rank(const Datum& d, const Character& g, int nu) {
    if (nu < 0 || nu + 1 > d.top_dim()) return 0;
    const auto& rows = d.simplices[nu + 1];
    const auto& cols = d.simplices[nu];
    MatrixXcd m = MatrixXcd::Zero(rows.size(), cols.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t l = 0; l < rows[r].size(); ++l) {
            Simplex f = rows[r];
            f.erase(f.begin() + l);
            std::size_t c = 0;
            while (cols[c] != f) ++c;
            std::complex<double> v = (l % 2) ? -1.0 : 1.0;
            if (l == 0) {
                const ExpVec a = d.exponent(rows[r][0], rows[r][1]);
                v = 1.0;
                for (int i = 0; i < d.free_rank; ++i) v *= std::pow(g.free[i], static_cast<double>(a[i]));
                for (std::size_t t = 0; t < g.torsion.size(); ++t)
                    v *= std::pow(g.torsion[t], static_cast<double>(a[d.free_rank + t]));
            }
            m(r, c) += v;
        }
    }
    Eigen::FullPivLU<MatrixXcd> lu(m);
    lu.setThreshold(1e-9);
    return static_cast<std::size_t>(lu.rank());
}

std::size_t oracle_dim(const Datum& d, const Character& g, int p) {
    return d.count(p) - oracle_rank(d, g, p) - oracle_rank(d, g, p - 1);
}

Character numeric_trivial(const Datum& d) { return to_numeric(d, trivial_character(d)); }

const char* kAll[] = {"circle3", "torus9", "wedge2", "genus2", "rp2"};

}  // namespace

TEST_CASE("shipped data validate and have the expected face counts") {
    const std::map<std::string, std::vector<std::size_t>> counts{
        {"circle3", {3, 3}}, {"torus9", {9, 36, 36, 9}}, {"wedge2", {5, 6}}, {"genus2", {15, 51, 34}}, {"rp2", {6, 15, 10}}};
    for (const auto& [name, c] : counts) {
        const Datum d = load(name);
        CHECK_MESSAGE(validate(d).empty(), name);
        for (std::size_t k = 0; k < c.size(); ++k) CHECK(d.count(static_cast<int>(k)) == c[k]);
    }
}

TEST_CASE("validation reports each class of defect") {
    json j = datum_to_json(load("circle3"));
    SUBCASE("antisymmetry") {
        j["edge_exponents"]["3,1"] = {1};
        const auto v = validate(datum_from_json(j));
        REQUIRE(v.size() == 1);
        CHECK(v[0].kind == ErrorKind::AntisymmetryViolation);
    }
    SUBCASE("missing face") {
        j["simplices"].push_back({1, 2, 3});
        j["simplices"].erase(0);
        const auto v = validate(datum_from_json(j));
        REQUIRE_FALSE(v.empty());
        CHECK(v[0].kind == ErrorKind::MissingFace);
    }
    SUBCASE("missing exponent") {
        j["edge_exponents"].erase("1,2");
        const auto v = validate(datum_from_json(j));
        REQUIRE(v.size() == 1);
        CHECK(v[0].kind == ErrorKind::MissingExponent);
    }
    SUBCASE("malformed") {
        j.erase("cover_size");
        CHECK_THROWS_AS(datum_from_json(j), Error);
    }
}

TEST_CASE("cocycle violation on a tetrahedron boundary") {
    Datum d;
    d.cover_size = 4;
    d.free_rank = 1;
    d.simplices.resize(3);
    for (int i = 1; i <= 4; ++i) d.simplices[0].push_back({i});
    for (int i = 1; i <= 4; ++i)
        for (int k = i + 1; k <= 4; ++k) {
            d.simplices[1].push_back({i, k});
            d.exponents[{i, k}] = {0};
        }
    d.simplices[2] = {{1, 2, 3}, {1, 2, 4}, {1, 3, 4}, {2, 3, 4}};
    d.exponents[{1, 2}] = {1};
    d.exponents[{2, 3}] = {1};
    const auto v = validate(d);
    REQUIRE_FALSE(v.empty());
    CHECK(v[0].kind == ErrorKind::CocycleViolation);
    CHECK(v[0].detail.find("(1,2,3)") != std::string::npos);
}

TEST_CASE("circle3 coboundary is the expected monomial matrix") {
    const Datum d = load("circle3");
    const exact::LaurentMatrix m = coboundary_symbolic(d, {}, 0);
    using exact::Cyclo;
    using exact::LaurentPoly;
    auto c = [](long v, long e) { return LaurentPoly::monomial({e}, Cyclo(v)); };
    CHECK(m(0, 0) == c(-1, 0));
    CHECK(m(0, 1) == c(1, 0));
    CHECK(m(0, 2).is_zero());
    CHECK(m(1, 0) == c(-1, 0));
    CHECK(m(1, 2) == c(1, 1));
    CHECK(m(2, 1) == c(-1, 0));
    CHECK(m(2, 2) == c(1, 0));
    CHECK(m.is_monomial());
    CHECK(exact::laurent_det(m) == c(1, 0) - c(1, 1));
}

TEST_CASE("coboundary squares to zero") {
    std::mt19937_64 rng(3);
    for (const char* name : kAll) {
        const Datum d = load(name);
        const Character g = random_character(d, rng);
        for (int nu = 0; nu + 2 <= d.top_dim(); ++nu) {
            const MatrixXcd prod = coboundary(d, g, nu + 1) * coboundary(d, g, nu);
            CHECK_MESSAGE(prod.cwiseAbs().maxCoeff() < 1e-12, name);
        }
    }
}

TEST_CASE("known cohomology") {
    const Datum c3 = load("circle3");
    CHECK(cohomology_dim(c3, numeric_trivial(c3), 0) == 1);
    CHECK(cohomology_dim(c3, numeric_trivial(c3), 1) == 1);
    Character g{{2.0}, {}};
    CHECK(cohomology_dim(c3, g, 0) == 0);
    CHECK(cohomology_dim(c3, g, 1) == 0);

    const Datum w = load("wedge2");
    CHECK(cohomology_dim(w, numeric_trivial(w), 1) == 2);
    Character gw{{std::polar(1.3, 0.4), std::polar(0.7, 2.0)}, {}};
    CHECK(cohomology_dim(w, gw, 1) == 1);

    const Datum t9 = load("torus9");
    CHECK(cohomology_dim_exact(t9, trivial_character(t9), 1) == 2);
    CHECK(cohomology_dim_exact(t9, trivial_character(t9), 0) == 1);
    CHECK(cohomology_dim_exact(t9, trivial_character(t9), 2) == 1);

    const Datum g2 = load("genus2");
    Character gg{{std::polar(1.2, 0.3), std::polar(0.8, 1.1), std::polar(1.1, 2.5), std::polar(0.9, 4.0)}, {}};
    CHECK(cohomology_dim(g2, gg, 1) == 2);
    CHECK(cohomology_dim_exact(g2, trivial_character(g2), 1) == 4);

    const Datum rp = load("rp2");
    CHECK(cohomology_dim_exact(rp, trivial_character(rp), 0) == 1);
    CHECK(cohomology_dim_exact(rp, trivial_character(rp), 1) == 0);
    CHECK(cohomology_dim_exact(rp, trivial_character(rp), 2) == 0);
    ExactCharacter sign = trivial_character(rp);
    sign.torsion = {1};
    CHECK(cohomology_dim_exact(rp, sign, 0) == 0);
    CHECK(cohomology_dim_exact(rp, sign, 1) == 0);
    CHECK(cohomology_dim_exact(rp, sign, 2) == 1);
}

TEST_CASE("cohomology agrees with the definitional oracle") {
    std::mt19937_64 rng(19);
    for (const char* name : kAll) {
        const Datum d = load(name);
        for (int s = 0; s < 5; ++s) {
            const Character g = s == 0 ? numeric_trivial(d) : random_character(d, rng);
            for (int p = 0; p <= d.top_dim(); ++p) CHECK_MESSAGE(cohomology_dim(d, g, p) == oracle_dim(d, g, p), name);
        }
    }
}

TEST_CASE("exact and numeric paths agree on torsion characters") {
    std::mt19937_64 rng(23);
    for (const char* name : kAll) {
        const Datum d = load(name);
        for (int s = 0; s < 8; ++s) {
            ExactCharacter e = random_exact_character(d, rng);
            const Character g = to_numeric(d, e);
            long chi = 0;
            for (int p = 0; p <= d.top_dim(); ++p) {
                const std::size_t de = cohomology_dim_exact(d, e, p);
                CHECK_MESSAGE(de == cohomology_dim(d, g, p), name);
                chi += (p % 2 ? -1 : 1) * static_cast<long>(de);
            }
            CHECK(chi == euler_characteristic(d));
        }
    }
}

TEST_CASE("character validation") {
    const Datum c3 = load("circle3");
    CHECK_THROWS_AS(coboundary(c3, Character{{0.0}, {}}, 0), Error);
    CHECK_THROWS_AS(coboundary(c3, Character{{1.0, 2.0}, {}}, 0), Error);
    const Datum rp = load("rp2");
    CHECK_THROWS_AS(coboundary(rp, Character{{}, {std::polar(1.0, 1.0)}}, 0), Error);
    const Character neg = character_from_json(rp, json::parse(R"({"free": [], "torsion": [1]})"));
    CHECK(std::abs(neg.torsion[0] + 1.0) < 1e-15);
}

TEST_CASE("product of two circles is the shipped torus") {
    const Datum c3 = load("circle3");
    const Datum t = product(c3, c3);
    const Datum shipped = load("torus9");
    CHECK(t.simplices == shipped.simplices);
    for (const auto& e : t.simplices[1]) CHECK(t.exponent(e[0], e[1]) == shipped.exponent(e[0], e[1]));
    CHECK(euler_characteristic(t) == 0);
}
