#include <doctest.h>

#include "rigidity/measure.hpp"
#include "rigidity/pipeline.hpp"
#include "../support/oracles.hpp"

using namespace rigidity;

namespace {

// small measure-profile sequence shared by the tower tests
struct TowerFixture {
    AlphaFamily fam{FamilyKind::SqrtSquarefree};
    SequenceArtifacts art;
    MeasureTower tower;

    TowerFixture() {
        SequenceProfile profile;
        profile.stages = 4;
        profile.excluded = {3, 4};
        profile.length = 40;
        profile.initial_window = 16;
        art = build_sequence_artifacts(fam, profile, 2);
        TowerBuildOptions opts;
        opts.p_max = 3;
        tower = build_tower(art.seq, fam, opts);
    }
};

TowerFixture& fixture() {
    static TowerFixture fx;
    return fx;
}

}  // namespace

TEST_CASE("mu_eval on the unit-multiplier base cases") {
    auto& fx = fixture();
    const AtomicMeasure& mu0 = fx.tower.levels[0];
    REQUIRE(mu0.atoms.size() == 1);
    CHECK(mu0.atoms[0].index == 1);
    CHECK(mu0.atoms[0].multiplier == 1);
    CHECK(mu0.total_weight() == 1);

    // single unit atom: the integral is dist(m_n alpha_1) itself
    PrecReal v0 = mu_eval(mu0, 3, fx.art.seq, fx.fam);
    PrecReal d = certified_dist(fx.fam, 1,
                                mpz_class(static_cast<long>(fx.art.seq.terms[2])),
                                mpq_class(1, 1000000000));
    CHECK(v0.lower() <= d.upper());
    CHECK(v0.upper() >= d.lower());

    const AtomicMeasure& mu1 = fx.tower.levels[1];
    REQUIRE(mu1.atoms.size() == 2);
    CHECK(mu1.atoms[1].index == 2);
    CHECK(mu1.atoms[1].multiplier == 1);
    CHECK(mu1.atoms[0].weight == mpq_class(1, 2));
    PrecReal v1 = mu_eval(mu1, 3, fx.art.seq, fx.fam);
    PrecReal d2 = certified_dist(fx.fam, 2,
                                 mpz_class(static_cast<long>(fx.art.seq.terms[2])),
                                 mpq_class(1, 1000000000));
    mpq_class avg = (d.midpoint() + d2.midpoint()) / 2;
    CHECK(v1.lower() <= avg);
    CHECK(v1.upper() >= avg);

    for (long n : {1L, 5L, 9L}) {
        PrecReal v = mu_eval(fx.tower.levels[2], n, fx.art.seq, fx.fam);
        CHECK(v.lower() >= 0);
        CHECK(v.upper() <= mpq_class(1, 2) + mpq_class(1, 1000000));
    }
}

TEST_CASE("separation radius") {
    auto& fx = fixture();
    PrecReal eta1 = separation_radius(fx.tower.levels[1], 1, fx.fam);
    // quarter of dist(sqrt2 - sqrt3 fracs) = 0.0794593...
    CHECK(eta1.midpoint() > mpq_class(794, 10000));
    CHECK(eta1.midpoint() < mpq_class(795, 10000));
    CHECK(eta1.upper() <= mpq_class(1, 8));
    CHECK_THROWS_AS(separation_radius(fx.tower.levels[0], 0, fx.fam), Error);
    CHECK_THROWS_AS(separation_radius(fx.tower.levels[1], 5, fx.fam), Error);
}

TEST_CASE("choose_partner returns the smallest certified multiplier") {
    AlphaFamily fam(FamilyKind::SqrtSquarefree);
    Atom anchor{1, mpz_class(1), mpq_class(1)};

    // oracle: smallest k with dist(k sqrt3 - sqrt2) < 1/100
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, 40);
    mpz_class s2 = oracles::sqrt_scaled(2, 40), s3 = oracles::sqrt_scaled(3, 40);
    long expected = 0;
    for (long k = 1; k < 100000 && expected == 0; ++k) {
        mpz_class val = k * s3 - s2;
        mpz_class rem;
        mpz_fdiv_r(rem.get_mpz_t(), val.get_mpz_t(), scale.get_mpz_t());
        mpz_class d = std::min(rem, mpz_class(scale - rem));
        if (mpq_class(d + k + 1) / mpq_class(scale) < mpq_class(1, 100))
            expected = k;
    }
    REQUIRE(expected > 0);
    mpz_class got = choose_partner(fam, 2, anchor, mpq_class(1, 100));
    CHECK(got == expected);

    // weak target: k = 1 qualifies since dist(a2 - a1) = 0.317 < 0.5
    CHECK(choose_partner(fam, 2, anchor, mpq_class(1, 2)) == 1);

    // certified replay at higher precision
    PrecReal gap = fam.alpha(2, 80).scaled(got) - fam.alpha(1, 80);
    CHECK(dist_to_int(gap).upper() < mpq_class(1, 100));
}

TEST_CASE("convergent descent handles targets beyond the scan budget") {
    AlphaFamily fam(FamilyKind::SqrtSquarefree);
    Atom anchor{1, mpz_class(1), mpq_class(1)};
    mpz_class p10;
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, 10);
    mpq_class delta(mpz_class(1), p10);
    mpz_class k = choose_partner(fam, 2, anchor, delta, 1000);
    CHECK(k >= 1000);  // far beyond the scan range
    PrecReal gap = fam.alpha(2, 80).scaled(k) - fam.alpha(1, 80);
    CHECK(dist_to_int(gap).upper() < delta);
}

TEST_CASE("tower structure and schedule") {
    auto& fx = fixture();
    REQUIRE(fx.tower.levels.size() == 4);  // p = 0..3
    const auto& thr = fx.tower.schedule.thresholds;
    REQUIRE(thr.size() == 4);
    CHECK(thr[0] == 0);
    CHECK(thr[1] == 1);

    // weights: 2^{p+1} atoms of weight 2^{-(p+1)} after each extension
    for (size_t p = 0; p < fx.tower.levels.size(); ++p) {
        const AtomicMeasure& mu = fx.tower.levels[p];
        CHECK(mu.atoms.size() == (1u << p));
        for (const auto& a : mu.atoms)
            CHECK(a.weight == mpq_class(1, 1L << p));
        CHECK(mu.total_weight() == 1);
    }

    // thresholds strictly interleave
    for (const auto& rec : fx.tower.schedule.records) {
        long prev = thr[static_cast<size_t>(rec.from_generation)];
        for (const auto& st : rec.steps) {
            CHECK(st.settle_threshold > prev);
            prev = st.settle_threshold;
            CHECK(st.achieved.upper() < st.target_delta);
        }
        CHECK(rec.next_threshold > prev);
    }
}

TEST_CASE("perturbation identity at every inner step") {
    auto& fx = fixture();
    for (const auto& rec : fx.tower.schedule.records) {
        const AtomicMeasure& mu_p =
            fx.tower.levels[static_cast<size_t>(rec.from_generation)];
        long p = rec.from_generation;
        mpq_class w(1, 1L << (p + 1));
        for (const auto& st : rec.steps) {
            AtomicMeasure nu_prev = inner_measure(mu_p, rec.steps, st.s - 1);
            AtomicMeasure nu_cur = inner_measure(mu_p, rec.steps, st.s);
            for (long n : {2L, 7L, 13L}) {
                PrecReal lhs = mu_eval(nu_cur, n, fx.art.seq, fx.fam) -
                               mu_eval(nu_prev, n, fx.art.seq, fx.fam);
                long long m = fx.art.seq.terms[static_cast<size_t>(n - 1)];
                PrecReal dn = certified_dist(fx.fam, st.index,
                                             st.partner_k * static_cast<long>(m),
                                             mpq_class(1, 1000000000));
                PrecReal ds = certified_dist(
                    fx.fam, mu_p.atoms[static_cast<size_t>(st.s - 1)].index,
                    mu_p.atoms[static_cast<size_t>(st.s - 1)].multiplier *
                        static_cast<long>(m),
                    mpq_class(1, 1000000000));
                PrecReal rhs = (dn - ds) * PrecReal::from_mpq(w, 200);
                CHECK(lhs.lower() <= rhs.upper());
                CHECK(lhs.upper() >= rhs.lower());
            }
        }
    }
}

TEST_CASE("interval masses") {
    auto& fx = fixture();
    const AtomicMeasure& top = fx.tower.levels.back();  // p = 3, 8 atoms
    for (long p0 = 1; p0 <= 3; ++p0) {
        auto masses = interval_masses(top, p0, fx.fam);
        CHECK(masses.size() == static_cast<size_t>(1L << p0));
        for (const auto& im : masses) {
            CHECK(im.mass == mpq_class(1, 1L << p0));
            CHECK(im.atom_count == (1L << (3 - p0)));
        }
    }
    // base case p0 = p: one atom per interval
    auto fine = interval_masses(top, 3, fx.fam);
    for (const auto& im : fine) CHECK(im.atom_count == 1);
}

TEST_CASE("replayed conditions pass at doubled precision") {
    auto& fx = fixture();
    auto records = replay_conditions(fx.tower, fx.art.seq, fx.fam, 2);
    CHECK(!records.empty());
    for (const auto& rec : records) {
        INFO(rec.name << " p=" << rec.p << " detail=" << rec.detail);
        CHECK(rec.pass);
    }
}
