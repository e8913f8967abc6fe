#ifndef RIGIDITY_SEQUENCE_HPP
#define RIGIDITY_SEQUENCE_HPP

#include <optional>
#include <vector>

#include "rigidity/alpha_family.hpp"
#include "rigidity/search.hpp"

namespace rigidity {

// Stage tolerance eps_j = 1 / (2 (j+1)^2), exact.
mpq_class stage_eps(long j);

// Bound for the multiplier box entering the stage constants.
struct KPolicy {
    enum class Kind { Formula, Constant };
    Kind kind = Kind::Formula;
    long constant = 0;

    // Formula: K_j = (j+1) * ceil(1/eps_j) = 2 (j+1)^3.
    long bound(long j) const;
};

struct StageConstants {
    long stage = 0;
    mpq_class eps;
    long K = 0;                  // policy bound at this stage
    PrecReal v;                  // (1/j) * box infimum over the K_{j+1} box
    std::vector<long> v_attained;
};

// eps_j, K_j and v_j for the given (re-indexed) leading family indices.
// Throws BudgetExceeded when the (2K+1)^(j+1) box exceeds the tuple budget;
// sequence construction itself never needs v_j, so callers may treat that
// as a recordable skip.
StageConstants stage_constants(const AlphaFamily& family,
                               const std::vector<long>& leading_indices,
                               long j, const KPolicy& policy,
                               long long box_budget = (1LL << 25));

// One completed approximation stage of a base sequence.
struct StageRecord {
    long stage = 0;
    mpq_class eps;
    SearchWindow window;               // value range scanned, [N_j, N_{j+1}]
    long first_position = 0;           // 1-based position of the stage's first term
    long term_count = 0;
    // hit chosen as the r-avoidance witness, indexed by divisor r (2..r_max)
    std::vector<std::pair<long, long long>> divisor_witnesses;
};

// The index-i-excluded staged sequence: stage j collects every integer in
// its window that simultaneously approximates the first j re-indexed family
// members within eps_j, and the window is grown until it also contains, for
// each divisor r, a hit r does not divide.
struct BaseSequence {
    long excluded = 0;                 // original index left out (re-indexing skips it)
    std::vector<long long> terms;      // ascending across stages
    std::vector<long> term_stage;
    std::vector<StageRecord> stages;

    // original family index of the re-indexed position t (1-based)
    long original_index(long t) const {
        return (excluded >= 1 && t >= excluded) ? t + 1 : t;
    }
    long first_position_of_stage(long j) const;
};

struct BaseBuildOptions {
    long num_stages = 4;
    long witness_rmax = 6;       // require divisor witnesses for r up to
                                 // max(stage, witness_rmax)
    long long window_budget = 1LL << 34;
    long long initial_hi = 64;   // first window is [1, initial_hi]
    long min_total_terms = 0;    // grow the last stage until reached
    int threads = 1;
};

BaseSequence build_base_sequence(const AlphaFamily& family, long excluded,
                                 const BaseBuildOptions& opts);

struct Provenance {
    long source = 0;    // 1-based base index
    long position = 0;  // 1-based position within the shifted base
    long stage = 0;     // stage tag of the underlying term
};

// Interleaved master sequence with provenance. Enumeration runs along
// anti-diagonals of (source, position): (1,1); (1,2),(2,1); (1,3),(2,2),(3,1); ...
// Base b is shifted past its first stage-b term before interleaving.
struct RigiditySequence {
    std::vector<long long> terms;
    std::vector<Provenance> prov;
    std::vector<long> shifts;  // per base: positions dropped by the shift

    long bases() const { return static_cast<long>(shifts.size()); }
    std::vector<long long> sorted_unique() const;

    // Super-stage id per enumeration index: the t-th completed anti-diagonal
    // in which every base contributes maps to id t (1-based); indices on
    // partial diagonals get 0.
    std::vector<long> super_stage_ids() const;
};

RigiditySequence interleave(const std::vector<BaseSequence>& bases, long total);

// Positions each base must provide (before shifting) so that `total`
// interleaved terms exist; index b-1 belongs to base b.
std::vector<long> interleave_demand(long num_bases, long total);

// Smallest enumeration index after which every term fails the eps-closeness
// test for at most one family index among {1..k}. index0 = 0 means the
// property holds from the start; `stabilized` false means the tail of the
// prefix still violates it.
struct StabilizationResult {
    bool stabilized = false;
    long index0 = 0;
    std::vector<int> bad_counts;     // per enumeration index (1-based -> [i-1])
    long long analytic_candidate = -1;  // squared max stage boundary, when available
};

StabilizationResult stabilization_index(const RigiditySequence& seq,
                                        const std::vector<BaseSequence>& bases,
                                        const AlphaFamily& family,
                                        const mpq_class& eps, long k);

}  // namespace rigidity

#endif
