#include "rigidity/sequence.hpp"

#include <algorithm>
#include <set>

#include "rigidity/errors.hpp"

namespace rigidity {

mpq_class stage_eps(long j) {
    if (j < 1) throw Error(ErrorCode::ConfigError, "stage index must be >= 1");
    return mpq_class(1, 2 * (j + 1) * (j + 1));
}

long KPolicy::bound(long j) const {
    if (kind == Kind::Constant) {
        if (constant < 1)
            throw Error(ErrorCode::ConfigError, "constant K policy needs K >= 1");
        return constant;
    }
    mpq_class inv_eps = 1 / stage_eps(j);
    mpz_class c;
    mpz_cdiv_q(c.get_mpz_t(), inv_eps.get_num().get_mpz_t(),
               inv_eps.get_den().get_mpz_t());
    return (j + 1) * static_cast<long>(c.get_si());
}

StageConstants stage_constants(const AlphaFamily& family,
                               const std::vector<long>& leading_indices,
                               long j, const KPolicy& policy,
                               long long box_budget) {
    if (static_cast<long>(leading_indices.size()) != j + 1)
        throw Error(ErrorCode::ConfigError,
                    "stage constants need the first j+1 family indices");
    StageConstants out;
    out.stage = j;
    out.eps = stage_eps(j);
    out.K = policy.bound(j);
    long K_next = policy.bound(j + 1);
    BoxInfimum box = box_infimum(family, leading_indices, K_next, box_budget);
    mpq_class scale(1, j);
    out.v = box.value * PrecReal::from_mpq(scale, 256);
    out.v_attained = box.attained;
    return out;
}

long BaseSequence::first_position_of_stage(long j) const {
    for (const auto& s : stages)
        if (s.stage == j) return s.first_position;
    throw Error(ErrorCode::ConfigError,
                "stage " + std::to_string(j) + " was not built");
}

BaseSequence build_base_sequence(const AlphaFamily& family, long excluded,
                                 const BaseBuildOptions& opts) {
    if (opts.num_stages < 0)
        throw Error(ErrorCode::ConfigError, "negative stage count");
    BaseSequence base;
    base.excluded = excluded;
    if (opts.num_stages == 0) return base;  // degenerate: empty, not an error
    long long next_lo = 1;
    for (long j = 1; j <= opts.num_stages; ++j) {
        mpq_class eps = stage_eps(j);
        std::vector<long> indices;
        for (long t = 1; t <= j; ++t) indices.push_back(base.original_index(t));
        long r_max = std::max(j, opts.witness_rmax);
        bool last_stage = (j == opts.num_stages);

        std::vector<long long> stage_hits;
        long long lo = next_lo;
        long long hi = std::max<long long>(2 * next_lo, opts.initial_hi);
        long long scanned_to = lo - 1;
        for (;;) {
            if (hi > opts.window_budget)
                throw Error(ErrorCode::BudgetExceeded,
                            "stage " + std::to_string(j) + " window passed " +
                                std::to_string(opts.window_budget));
            HitList part = simultaneous_hits(
                family, indices, eps, {scanned_to + 1, hi}, opts.threads);
            stage_hits.insert(stage_hits.end(), part.hits.begin(),
                              part.hits.end());
            scanned_to = hi;
            bool ok = !stage_hits.empty();
            for (long r = 2; ok && r <= r_max; ++r) {
                bool found = false;
                for (long long m : stage_hits)
                    if (m % r != 0) { found = true; break; }
                ok = found;
            }
            if (ok && last_stage &&
                static_cast<long>(base.terms.size() + stage_hits.size()) <
                    opts.min_total_terms)
                ok = false;
            if (ok) break;
            hi *= 2;
        }

        StageRecord rec;
        rec.stage = j;
        rec.eps = eps;
        rec.window = {lo, scanned_to};
        rec.first_position = static_cast<long>(base.terms.size()) + 1;
        rec.term_count = static_cast<long>(stage_hits.size());
        for (long r = 2; r <= r_max; ++r) {
            for (long long m : stage_hits) {
                if (m % r != 0) {
                    rec.divisor_witnesses.emplace_back(r, m);
                    break;
                }
            }
        }
        base.stages.push_back(rec);
        for (long long m : stage_hits) {
            base.terms.push_back(m);
            base.term_stage.push_back(j);
        }
        next_lo = scanned_to + 1;
    }
    return base;
}

std::vector<long> interleave_demand(long num_bases, long total) {
    std::vector<long> need(static_cast<size_t>(num_bases), 0);
    long emitted = 0;
    for (long d = 1; emitted < total; ++d) {
        for (long src = 1; src <= std::min<long>(d, num_bases) && emitted < total;
             ++src) {
            long position = d + 1 - src;
            need[static_cast<size_t>(src - 1)] =
                std::max(need[static_cast<size_t>(src - 1)], position);
            ++emitted;
        }
    }
    return need;
}

RigiditySequence interleave(const std::vector<BaseSequence>& bases,
                            long total) {
    if (bases.empty()) throw Error(ErrorCode::ConfigError, "no base sequences");
    long B = static_cast<long>(bases.size());
    RigiditySequence seq;
    seq.shifts.reserve(bases.size());
    for (long b = 1; b <= B; ++b) {
        const BaseSequence& base = bases[static_cast<size_t>(b - 1)];
        long stage = std::min<long>(b, base.stages.back().stage);
        seq.shifts.push_back(base.first_position_of_stage(stage) - 1);
    }
    for (long d = 1; static_cast<long>(seq.terms.size()) < total; ++d) {
        for (long src = 1;
             src <= std::min<long>(d, B) &&
             static_cast<long>(seq.terms.size()) < total;
             ++src) {
            long position = d + 1 - src;
            const BaseSequence& base = bases[static_cast<size_t>(src - 1)];
            long idx = seq.shifts[static_cast<size_t>(src - 1)] + position;
            if (idx > static_cast<long>(base.terms.size()))
                throw Error(ErrorCode::BudgetExceeded,
                            "base " + std::to_string(src) +
                                " ran out of shifted terms at position " +
                                std::to_string(position));
            seq.terms.push_back(base.terms[static_cast<size_t>(idx - 1)]);
            seq.prov.push_back(
                {src, position, base.term_stage[static_cast<size_t>(idx - 1)]});
        }
    }
    return seq;
}

std::vector<long long> RigiditySequence::sorted_unique() const {
    std::vector<long long> out = terms;
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<long> RigiditySequence::super_stage_ids() const {
    std::vector<long> ids(terms.size(), 0);
    long B = bases();
    // enumeration index of (d, src): diagonals of size min(d, B)
    size_t n = 0;
    for (long d = 1; n < terms.size(); ++d) {
        long width = std::min<long>(d, B);
        bool complete =
            d >= B && n + static_cast<size_t>(width) <= terms.size();
        for (long s = 0; s < width && n < terms.size(); ++s, ++n)
            ids[n] = complete ? d - B + 1 : 0;
    }
    return ids;
}

StabilizationResult stabilization_index(const RigiditySequence& seq,
                                        const std::vector<BaseSequence>& bases,
                                        const AlphaFamily& family,
                                        const mpq_class& eps, long k) {
    if (k < 1) throw Error(ErrorCode::ConfigError, "k must be >= 1");
    StabilizationResult res;
    res.bad_counts.reserve(seq.terms.size());
    long last_bad = 0;
    for (size_t n = 0; n < seq.terms.size(); ++n) {
        int bad = 0;
        for (long i = 1; i <= k; ++i) {
            if (!decide_dist_less(family, i, mpz_class(static_cast<long>(seq.terms[n])),
                                  eps))
                ++bad;
        }
        res.bad_counts.push_back(bad);
        if (bad >= 2) last_bad = static_cast<long>(n) + 1;
    }
    res.stabilized = last_bad < static_cast<long>(seq.terms.size());
    res.index0 = last_bad;

    // squared max stage-r value boundary, the construction-side candidate
    long r = 1;
    while (stage_eps(r) >= eps) ++r;
    long long max_boundary = -1;
    bool have_all = true;
    for (const auto& base : bases) {
        bool found = false;
        for (const auto& s : base.stages) {
            if (s.stage == r) {
                max_boundary = std::max(max_boundary, s.window.lo);
                found = true;
                break;
            }
        }
        have_all = have_all && found;
    }
    if (have_all && max_boundary > 0 &&
        max_boundary < (1LL << 31))
        res.analytic_candidate = max_boundary * max_boundary;
    return res;
}

}  // namespace rigidity
