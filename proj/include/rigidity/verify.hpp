#ifndef RIGIDITY_VERIFY_HPP
#define RIGIDITY_VERIFY_HPP

#include <optional>
#include <string>
#include <vector>

#include "rigidity/measure.hpp"
#include "rigidity/search.hpp"
#include "rigidity/sequence.hpp"

namespace rigidity {

// Occupancy of the l equal circle buckets by frac(m_n * theta), n <= prefix.
// Bits only ever turn on as the prefix grows. Assignments whose enclosure
// straddles a bucket edge are counted as undecided and mark nothing (they
// can optionally be refined away).
struct CoverageRecord {
    std::string theta;
    long l = 0;
    std::vector<bool> mask;
    long undecided = 0;
    long first_full = 0;  // first prefix length with every bucket hit; 0 = not yet
    bool full() const;
};

CoverageRecord coverage(const Refinable& theta, const std::string& theta_name,
                        const RigiditySequence& seq, long l, long prefix_n,
                        long digit_cap, bool refine_edges = false);

// First position after which every base term certifies
// dist(s * alpha_index) < delta, for an original family index. Indices the
// base actually approximates confine once the stage tolerances pass delta;
// probing the excluded index reports the trailing violation instead.
struct ConfinementResult {
    bool confined = false;
    long position = 0;
    std::optional<long long> witness;  // a violating term when not confined
};

ConfinementResult confinement_index(const BaseSequence& base, long alpha_index,
                                    const mpq_class& delta,
                                    const AlphaFamily& family);

// Smallest prefix index from which sum_{s=1..i} dist(m_n alpha_s) stays
// certified below 1/2 + eps.
struct NormSumResult {
    bool settled = false;
    long index0 = 0;
    double worst_tail_sum = 0.0;
};

NormSumResult norm_sum_settle_index(const RigiditySequence& seq,
                                    const AlphaFamily& family, long i,
                                    const mpq_class& eps);

// For each k in [2, k_max]: prefix indices with k not dividing m_n, plus the
// count of such indices inside every complete super-stage.
struct DivisibilityProfile {
    long k_max = 0;
    std::vector<std::vector<long>> indices;        // [k-2] -> 1-based indices
    std::vector<std::vector<long>> per_super_stage;  // [k-2][stage-1] -> count
    long super_stages = 0;
};

DivisibilityProfile divisibility_profile(const RigiditySequence& seq,
                                         long k_max);

}  // namespace rigidity

#endif
