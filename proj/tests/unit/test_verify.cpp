#include <doctest.h>

#include "rigidity/pipeline.hpp"
#include "rigidity/verify.hpp"

using namespace rigidity;

namespace {

struct VerifyFixture {
    AlphaFamily fam{FamilyKind::SqrtSquarefree};
    SequenceArtifacts art;

    VerifyFixture() {
        SequenceProfile profile;
        profile.stages = 3;
        profile.excluded = {1, 2, 3};
        profile.length = 30;
        art = build_sequence_artifacts(fam, profile, 2);
    }
};

VerifyFixture& fixture() {
    static VerifyFixture fx;
    return fx;
}

}  // namespace

TEST_CASE("coverage marks buckets and stays monotone") {
    auto& fx = fixture();
    CoverageRecord empty =
        coverage(refinable_pi(), "pi", fx.art.seq, 5, 0, 300);
    CHECK(empty.undecided == 0);
    CHECK(!empty.full());
    CHECK(empty.first_full == 0);

    CoverageRecord some =
        coverage(refinable_pi(), "pi", fx.art.seq, 5, 12, 300);
    CoverageRecord more =
        coverage(refinable_pi(), "pi", fx.art.seq, 5, 30, 300);
    for (size_t b = 0; b < some.mask.size(); ++b)
        if (some.mask[b]) CHECK(more.mask[b]);  // bits only turn on

    // a rational orbit confined to one cell never covers
    CoverageRecord confined = coverage(refinable_rational(mpq_class(0)), "0",
                                       fx.art.seq, 2, 30, 300);
    CHECK(confined.mask[0]);
    CHECK(!confined.mask[1]);
    CHECK(confined.first_full == 0);
}

TEST_CASE("confinement of approximated directions") {
    auto& fx = fixture();
    const BaseSequence& base = fx.art.bases[0];  // excludes alpha_1

    // delta = 1/2 confines from the start
    ConfinementResult half =
        confinement_index(base, base.original_index(1), mpq_class(1, 2), fx.fam);
    CHECK(half.confined);
    CHECK(half.position == 0);

    // at twice the final stage tolerance, the tail is confined
    mpq_class delta = 2 * stage_eps(3);
    ConfinementResult conf =
        confinement_index(base, base.original_index(1), delta, fx.fam);
    CHECK(conf.confined);
    CHECK(conf.position <= base.first_position_of_stage(3));

    // probing the excluded direction fails with a witness
    const BaseSequence& base2 = fx.art.bases[1];  // excludes alpha_2
    ConfinementResult bad =
        confinement_index(base2, 2, mpq_class(1, 50), fx.fam);
    CHECK(!bad.confined);
    CHECK(bad.witness.has_value());
}

TEST_CASE("norm-sum settling") {
    auto& fx = fixture();
    NormSumResult easy =
        norm_sum_settle_index(fx.art.seq, fx.fam, 1, mpq_class(1, 2));
    CHECK(easy.settled);
    CHECK(easy.index0 == 0);  // a single norm is below 1 from the start

    NormSumResult a = norm_sum_settle_index(fx.art.seq, fx.fam, 2,
                                            mpq_class(1, 10));
    NormSumResult b = norm_sum_settle_index(fx.art.seq, fx.fam, 2,
                                            mpq_class(3, 10));
    if (a.settled && b.settled) CHECK(b.index0 <= a.index0);
}

TEST_CASE("divisibility profile") {
    auto& fx = fixture();
    DivisibilityProfile prof = divisibility_profile(fx.art.seq, 6);
    CHECK(prof.k_max == 6);
    CHECK(prof.super_stages >= 1);
    for (long k = 2; k <= 6; ++k) {
        const auto& idx = prof.indices[static_cast<size_t>(k - 2)];
        for (long n : idx)
            CHECK(fx.art.seq.terms[static_cast<size_t>(n - 1)] % k != 0);
    }
    CHECK_THROWS_AS(divisibility_profile(fx.art.seq, 1), Error);

    // counts are monotone under prefix extension
    RigiditySequence shorter = fx.art.seq;
    shorter.terms.resize(20);
    shorter.prov.resize(20);
    DivisibilityProfile small = divisibility_profile(shorter, 6);
    for (long k = 2; k <= 6; ++k)
        CHECK(small.indices[static_cast<size_t>(k - 2)].size() <=
              prof.indices[static_cast<size_t>(k - 2)].size());
}
