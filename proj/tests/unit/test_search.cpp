#include <doctest.h>

#include <algorithm>

#include "rigidity/search.hpp"
#include "../support/oracles.hpp"

using namespace rigidity;

namespace {

std::vector<long> gens_of(const AlphaFamily& fam, const std::vector<long>& idx) {
    std::vector<long> out;
    for (long i : idx) out.push_back(static_cast<long>(fam.generator_value(i).get_si()));
    return out;
}

}  // namespace

TEST_CASE("simultaneous hits match the exhaustive oracle") {
    AlphaFamily fam(FamilyKind::SqrtSquarefree);

    HitList h1 = simultaneous_hits(fam, {1}, mpq_class(1, 10), {1, 50});
    auto ref1 = oracles::reference_hits({2}, mpq_class(1, 10), 1, 50);
    CHECK(h1.hits == ref1);
    CHECK(std::count(h1.hits.begin(), h1.hits.end(), 12) == 1);
    CHECK(std::count(h1.hits.begin(), h1.hits.end(), 29) == 1);

    HitList h2 = simultaneous_hits(fam, {1, 2}, mpq_class(1, 10), {1, 100});
    auto ref2 = oracles::reference_hits({2, 3}, mpq_class(1, 10), 1, 100);
    CHECK(h2.hits == ref2);
    CHECK(std::count(h2.hits.begin(), h2.hits.end(), 41) == 1);

    HitList h3 = simultaneous_hits(fam, {1}, mpq_class(1, 2), {1, 3});
    CHECK(h3.hits == std::vector<long long>{1, 2, 3});
}

TEST_CASE("oracle equivalence over a window matrix") {
    AlphaFamily fam(FamilyKind::SqrtSquarefree);
    for (const mpq_class& eps : {mpq_class(1, 7), mpq_class(1, 13)}) {
        HitList h = simultaneous_hits(fam, {1, 2}, eps, {1, 10000}, 2);
        CHECK(h.hits == oracles::reference_hits({2, 3}, eps, 1, 10000));
    }
}

TEST_CASE("hits are ascending, inside the window, and individually certified") {
    AlphaFamily fam(FamilyKind::SqrtSquarefree);
    HitList h = simultaneous_hits(fam, {1, 2}, mpq_class(1, 12), {1, 2000});
    CHECK(std::is_sorted(h.hits.begin(), h.hits.end()));
    for (long long m : h.hits) {
        CHECK(m >= 1);
        CHECK(m <= 2000);
        for (long d : gens_of(fam, {1, 2}))
            CHECK(oracles::dist_less(d, mpz_class(static_cast<long>(m)),
                                     mpq_class(1, 12)));
    }
}

TEST_CASE("monotonicity in eps and window") {
    AlphaFamily fam(FamilyKind::SqrtSquarefree);
    HitList wide = simultaneous_hits(fam, {1}, mpq_class(1, 8), {1, 400});
    HitList narrow = simultaneous_hits(fam, {1}, mpq_class(1, 16), {1, 400});
    for (long long m : narrow.hits)
        CHECK(std::count(wide.hits.begin(), wide.hits.end(), m) == 1);

    HitList small = simultaneous_hits(fam, {1}, mpq_class(1, 8), {1, 200});
    for (long long m : small.hits)
        CHECK(std::count(wide.hits.begin(), wide.hits.end(), m) == 1);
}

TEST_CASE("chunked parallel scan is schedule independent") {
    AlphaFamily fam(FamilyKind::SqrtSquarefree);
    HitList t1 = simultaneous_hits(fam, {1, 2}, mpq_class(1, 15), {1, 30000}, 1);
    HitList t4 = simultaneous_hits(fam, {1, 2}, mpq_class(1, 15), {1, 30000}, 4);
    CHECK(t1.hits == t4.hits);
}

TEST_CASE("nondivisible hits") {
    AlphaFamily fam(FamilyKind::SqrtSquarefree);
    auto a = nondivisible_hit(fam, {1}, mpq_class(1, 10), 2, {1, 50});
    REQUIRE(a.has_value());
    CHECK(*a == 5);  // 5 is the first odd hit of dist(m sqrt2) < 1/10

    auto b = nondivisible_hit(fam, {1}, mpq_class(1, 10), 29, {1, 40});
    REQUIRE(b.has_value());
    CHECK(*b == 5);

    auto c = nondivisible_hit(fam, {}, mpq_class(1, 2), 2, {2, 2});
    CHECK(!c.has_value());

    // every returned value is a certified hit the divisor does not divide
    auto d = nondivisible_hit(fam, {1, 2}, mpq_class(1, 10), 41, {1, 100});
    REQUIRE(d.has_value());
    CHECK(*d % 41 != 0);
    CHECK(oracles::dist_less(2, mpz_class(static_cast<long>(*d)), mpq_class(1, 10)));
    CHECK(oracles::dist_less(3, mpz_class(static_cast<long>(*d)), mpq_class(1, 10)));
}

TEST_CASE("interval avoidance") {
    AlphaFamily fam(FamilyKind::SqrtSquarefree);
    Refinable theta = refinable_alpha(fam, 1);

    mpz_class p9;
    mpz_ui_pow_ui(p9.get_mpz_t(), 10, 9);
    CircleInterval sliver{mpq_class(0), mpq_class(mpz_class(1), p9)};
    CertifiedBool clear = avoids_interval(theta, {1, 10}, mpq_class(1, 2),
                                          sliver, {}, fam);
    CHECK(clear.is_true());

    CircleInterval high{mpq_class(9, 10), mpq_class(1)};
    std::optional<long long> witness;
    CertifiedBool hit = avoids_interval(theta, {12, 12}, mpq_class(1, 10), high,
                                        {1}, fam, &witness);
    CHECK(hit.is_false());
    REQUIRE(witness.has_value());
    CHECK(*witness == 12);

    // vacuous when no m passes the approximation certificates
    CertifiedBool vac = avoids_interval(theta, {2, 3}, mpq_class(1, 1000),
                                        high, {1}, fam);
    CHECK(vac.is_true());
}

TEST_CASE("box infimum") {
    AlphaFamily fam(FamilyKind::SqrtSquarefree);
    BoxInfimum one = box_infimum(fam, {1}, 3);
    // min over k in 1..3 of dist(k sqrt2): attained at k = 2
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, 40);
    mpq_class best = 1;
    for (long k = 1; k <= 3; ++k) {
        mpq_class v = mpq_class(oracles::dist_units(2, k, 40)) / mpq_class(scale);
        if (v < best) best = v;
    }
    CHECK(one.value.lower() <= best);
    CHECK(one.value.upper() + mpq_class(4, scale) >= best);
    CHECK(one.value.upper() - one.value.lower() < mpq_class(1, 1000000));
    CHECK(std::abs(one.attained[0]) == 2);

    BoxInfimum two = box_infimum(fam, {1, 2}, 1);
    mpq_class best2 = 1;
    for (long k1 = -1; k1 <= 1; ++k1) {
        for (long k2 = -1; k2 <= 1; ++k2) {
            if (k1 == 0 && k2 == 0) continue;
            mpz_class val = k1 * oracles::sqrt_scaled(2, 40) +
                            k2 * oracles::sqrt_scaled(3, 40);
            mpz_class rem;
            mpz_fdiv_r(rem.get_mpz_t(), val.get_mpz_t(), scale.get_mpz_t());
            mpz_class d = std::min(rem, mpz_class(scale - rem));
            mpq_class v = mpq_class(d + 2) / mpq_class(scale);
            if (v < best2) best2 = v;
        }
    }
    CHECK(two.value.lower() <= best2);
    CHECK(two.value.upper() + mpq_class(4, scale) >= best2);

    // random tuples never beat the certified minimum
    for (long k1 = -1; k1 <= 1; ++k1)
        for (long k2 = -1; k2 <= 1; ++k2) {
            if (k1 == 0 && k2 == 0) continue;
            PrecReal s = fam.alpha(1, 40).scaled(k1) + fam.alpha(2, 40).scaled(k2);
            CHECK(two.value.lower() <= dist_to_int(s).upper());
        }

    CHECK_THROWS_AS(box_infimum(fam, {1, 2, 3, 4}, 250), Error);
}
