#ifndef RIGIDITY_MEASURE_HPP
#define RIGIDITY_MEASURE_HPP

#include <optional>
#include <string>
#include <vector>

#include "rigidity/alpha_family.hpp"
#include "rigidity/sequence.hpp"

namespace rigidity {

// One Dirac atom: weight * delta at frac(multiplier * alpha_index).
struct Atom {
    long index = 0;       // family index i
    mpz_class multiplier; // k_i
    mpq_class weight;     // exact dyadic
};

// Equal-weight atomic measure at generation p: 2^p atoms of weight 2^-p at
// k_i alpha_i. Weights always sum to exactly 1.
struct AtomicMeasure {
    long generation = 0;
    std::vector<Atom> atoms;

    mpq_class total_weight() const;
};

// Enclosure of the atom position frac(k * alpha_i), radius <= 10^-digits.
PrecReal atom_position(const AlphaFamily& family, const Atom& atom,
                       long digits);

// integral of dist_to_int(m_n * theta) d(measure) over the atoms, certified.
// n is a 1-based index into the sequence prefix.
PrecReal mu_eval(const AtomicMeasure& measure, long n,
                 const RigiditySequence& seq, const AlphaFamily& family);

// Quarter of the certified minimum pairwise circle distance among the first
// 2^p0 atoms. Strictly positive for distinct atoms; p0 = 0 has no pairs and
// is rejected.
PrecReal separation_radius(const AtomicMeasure& measure, long p0,
                           const AlphaFamily& family);

// Smallest multiplier k (exact up to scan_budget, deterministic convergent
// descent past it) with certified
//   dist_to_int(k * alpha_new - anchor_multiplier * alpha_anchor) < delta.
mpz_class choose_partner(const AlphaFamily& family, long new_index,
                         const Atom& anchor, const mpq_class& delta,
                         long long scan_budget = 2'000'000);

// Per-inner-step record of one generation extension.
struct InnerStep {
    long s = 0;               // 1..2^p
    long index = 0;           // 2^p + s
    mpz_class partner_k;
    mpq_class target_delta;
    PrecReal achieved;        // certified distance to the anchor atom
    long settle_threshold = 0;  // first index from which the inner tail bound holds
    double settle_margin = 0.0;
};

struct GenerationRecord {
    long from_generation = 0;  // p (extension built mu_{p+1})
    std::vector<InnerStep> steps;
    long next_threshold = 0;   // N_{p+1}
    double next_margin = 0.0;  // slack of the generation tail bound at N_{p+1}
};

// Threshold ladder: thresholds[p] is N_p (an enumeration index; N_0 = 0,
// N_1 = 1), strictly interleaved with the inner settle thresholds.
struct MeasureSchedule {
    std::vector<long> thresholds;
    std::vector<GenerationRecord> records;
};

struct MeasureTower {
    std::vector<AtomicMeasure> levels;  // mu_0 .. mu_pmax
    MeasureSchedule schedule;
};

struct TowerBuildOptions {
    long p_max = 5;
    long long partner_scan_budget = 2'000'000;
    int threads = 1;
};

// The full inductive construction: starting from the one- and two-atom
// measures with unit multipliers, repeatedly split every atom's weight with
// a freshly chosen partner atom, keeping every certified bound of the
// ladder intact on the sequence prefix. Throws BudgetExceeded when the
// prefix is too short to place the next threshold.
MeasureTower build_tower(const RigiditySequence& seq,
                         const AlphaFamily& family,
                         const TowerBuildOptions& opts);

// One re-checked inequality of the tower, recomputed from scratch.
struct ConditionRecord {
    std::string name;     // block_decay / generation_tail / inner_block /
                          // carry_tail / inner_settle / cluster_radius / separation
    long p = 0;
    long detail = 0;      // j, s or p0 depending on the condition
    long from = 0, to = 0;  // enumeration index range checked (0 = n/a)
    mpq_class bound;      // strict upper bound demanded
    double worst = 0.0;   // largest certified upper value seen
    bool pass = false;
};

// Replay every condition of the built tower on the prefix with fresh
// enclosures. digit_boost multiplies the working precision (2 = the
// doubled-precision replay used for acceptance).
std::vector<ConditionRecord> replay_conditions(const MeasureTower& tower,
                                               const RigiditySequence& seq,
                                               const AlphaFamily& family,
                                               long digit_boost = 1);

// Certified disjoint intervals of radius separation_radius(p0) around the
// first 2^p0 atoms, each carrying measure mass exactly 2^-p0.
struct IntervalMass {
    long r = 0;               // 1..2^p0
    PrecReal center;
    mpq_class mass;
    long atom_count = 0;
};

std::vector<IntervalMass> interval_masses(const AtomicMeasure& measure,
                                          long p0, const AlphaFamily& family);

// nu_{p,s} as an explicit measure (for the perturbation-identity check).
AtomicMeasure inner_measure(const AtomicMeasure& mu_p,
                            const std::vector<InnerStep>& steps, long s);

}  // namespace rigidity

#endif
