#include "rigidity/verify.hpp"

#include <algorithm>

#include "rigidity/errors.hpp"

namespace rigidity {

bool CoverageRecord::full() const {
    return std::all_of(mask.begin(), mask.end(), [](bool b) { return b; });
}

namespace {

// bucket of frac(x) among l equal cells, or -1 when the enclosure straddles
// an edge
long bucket_of(const PrecReal& x, long l) {
    mpq_class lo = x.lower(), hi = x.upper();
    mpq_class flo = frac_exact(lo);
    mpq_class width = hi - lo;
    if (width >= mpq_class(1, 2 * l)) return -1;
    // cell index of the lower end, then check the upper end lands inside
    mpq_class scaled = flo * l;
    mpz_class cell;
    mpz_fdiv_q(cell.get_mpz_t(), scaled.get_num().get_mpz_t(),
               scaled.get_den().get_mpz_t());
    long b = static_cast<long>(cell.get_si());
    mpq_class cell_hi = mpq_class(b + 1, l);
    if (flo + width < cell_hi) return b;
    return -1;
}

}  // namespace

CoverageRecord coverage(const Refinable& theta, const std::string& theta_name,
                        const RigiditySequence& seq, long l, long prefix_n,
                        long digit_cap, bool refine_edges) {
    if (l < 2) throw Error(ErrorCode::ConfigError, "coverage needs l >= 2");
    CoverageRecord rec;
    rec.theta = theta_name;
    rec.l = l;
    rec.mask.assign(static_cast<size_t>(l), false);
    long n_max = std::min<long>(prefix_n, static_cast<long>(seq.terms.size()));
    long marked = 0;
    for (long n = 1; n <= n_max; ++n) {
        long long m = seq.terms[static_cast<size_t>(n - 1)];
        long digits = 24;
        long b = -1;
        for (;;) {
            PrecReal x = theta(digits).scaled(mpz_class(static_cast<long>(m)));
            b = bucket_of(x, l);
            if (b >= 0 || !refine_edges) break;
            digits *= 2;
            if (digits > digit_cap)
                throw Error(ErrorCode::PrecisionExhausted,
                            "bucket assignment stuck at the digit cap");
        }
        if (b < 0) {
            ++rec.undecided;
            continue;
        }
        if (!rec.mask[static_cast<size_t>(b)]) {
            rec.mask[static_cast<size_t>(b)] = true;
            ++marked;
            if (marked == l && rec.first_full == 0) rec.first_full = n;
        }
    }
    return rec;
}

ConfinementResult confinement_index(const BaseSequence& base, long alpha_index,
                                    const mpq_class& delta,
                                    const AlphaFamily& family) {
    long index = alpha_index;
    ConfinementResult res;
    long last_bad = 0;
    for (size_t p = 0; p < base.terms.size(); ++p) {
        bool close = decide_dist_less(
            family, index, mpz_class(static_cast<long>(base.terms[p])), delta);
        if (!close) {
            last_bad = static_cast<long>(p) + 1;
            res.witness = base.terms[p];
        }
    }
    res.confined = last_bad < static_cast<long>(base.terms.size());
    res.position = last_bad;
    if (res.confined) res.witness.reset();
    return res;
}

NormSumResult norm_sum_settle_index(const RigiditySequence& seq,
                                    const AlphaFamily& family, long i,
                                    const mpq_class& eps) {
    if (i < 1) throw Error(ErrorCode::ConfigError, "need i >= 1");
    NormSumResult res;
    mpq_class bound = mpq_class(1, 2) + eps;
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, 12);
    mpq_class rad_goal = mpq_class(mpz_class(1), den) / i;
    long last_bad = 0;
    std::vector<mpq_class> uppers;
    for (size_t n = 0; n < seq.terms.size(); ++n) {
        PrecReal sum;
        for (long s = 1; s <= i; ++s) {
            sum = sum + certified_dist(family, s,
                                       mpz_class(static_cast<long>(seq.terms[n])),
                                       rad_goal);
            sum = sum.rounded(256);
        }
        mpq_class u = sum.upper();
        uppers.push_back(u);
        if (!(u < bound)) last_bad = static_cast<long>(n) + 1;
    }
    res.settled = last_bad < static_cast<long>(seq.terms.size());
    res.index0 = last_bad;
    mpq_class worst = 0;
    for (size_t n = static_cast<size_t>(last_bad); n < uppers.size(); ++n)
        worst = std::max(worst, uppers[n]);
    res.worst_tail_sum = worst.get_d();
    return res;
}

DivisibilityProfile divisibility_profile(const RigiditySequence& seq,
                                         long k_max) {
    if (k_max < 2) throw Error(ErrorCode::ConfigError, "k_max must be >= 2");
    DivisibilityProfile prof;
    prof.k_max = k_max;
    std::vector<long> ids = seq.super_stage_ids();
    prof.super_stages = *std::max_element(ids.begin(), ids.end());
    prof.indices.resize(static_cast<size_t>(k_max - 1));
    prof.per_super_stage.assign(
        static_cast<size_t>(k_max - 1),
        std::vector<long>(static_cast<size_t>(prof.super_stages), 0));
    for (long k = 2; k <= k_max; ++k) {
        auto& idx = prof.indices[static_cast<size_t>(k - 2)];
        auto& per = prof.per_super_stage[static_cast<size_t>(k - 2)];
        for (size_t n = 0; n < seq.terms.size(); ++n) {
            if (seq.terms[n] % k == 0) continue;
            idx.push_back(static_cast<long>(n) + 1);
            long id = ids[n];
            if (id > 0) ++per[static_cast<size_t>(id - 1)];
        }
    }
    return prof;
}

}  // namespace rigidity
