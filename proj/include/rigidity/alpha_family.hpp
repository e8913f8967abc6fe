#ifndef RIGIDITY_ALPHA_FAMILY_HPP
#define RIGIDITY_ALPHA_FAMILY_HPP

#include <gmpxx.h>

#include <map>
#include <shared_mutex>
#include <string>
#include <vector>

#include "rigidity/prec_real.hpp"

namespace rigidity {

// Built-in generators for a countable rationally independent family in [0,1).
//   SqrtSquarefree: alpha_i = frac(sqrt(d_i)), d_i the i-th squarefree
//                   non-square (2, 3, 5, 6, 7, 10, ...).
//   LogPrime:       alpha_i = frac(log p_i), p_i the i-th prime.
// Square roots of distinct squarefree integers, and logarithms of distinct
// primes, are rationally independent; that is a property of the generator
// choice and is not re-verified here.
enum class FamilyKind { SqrtSquarefree, LogPrime };

const char* family_kind_name(FamilyKind kind);
FamilyKind family_kind_from_name(const std::string& name);

// Thread-safe refining cache over one of the generators. Returned balls are
// immutable; refinement only ever shrinks the cached interval (each finer
// ball is intersected with its predecessor), so concurrent readers observe
// either the old or the new enclosure.
class AlphaFamily {
public:
    explicit AlphaFamily(FamilyKind kind, long digit_cap = 300);

    FamilyKind kind() const { return kind_; }
    long digit_cap() const { return digit_cap_; }

    // alpha_i with radius <= 10^-digits (1-based index). Deterministic:
    // equal kind and digits give bit-identical balls.
    PrecReal alpha(long i, long digits) const;

    // Best enclosure currently cached (at least `kMinDigits`).
    PrecReal cached(long i) const;
    long cached_digits(long i) const;

    // Ensure m * radius(alpha_i) < slack for all m <= m_max and all listed
    // indices. Throws BudgetExceeded past the digit cap.
    void refine_for(const std::vector<long>& indices, const mpz_class& m_max,
                    const mpq_class& slack) const;

    // The integer fed to the generator (d_i or p_i).
    mpz_class generator_value(long i) const;

    static constexpr long kMinDigits = 12;

private:
    PrecReal compute(long i, long digits) const;

    FamilyKind kind_;
    long digit_cap_;
    mutable std::shared_mutex mu_;
    mutable std::map<long, std::pair<long, PrecReal>> cache_;
};

// Certified distance-to-integers of m * alpha_i, refined until the radius is
// below `rad_goal` (absolute).
PrecReal certified_dist(const AlphaFamily& family, long i, const mpz_class& m,
                        const mpq_class& rad_goal);

// Decide dist_to_int(m * alpha_i) < eps, refining on UNDECIDED up to the
// family digit cap. Never returns UNDECIDED: the compared value is
// irrational, the threshold rational, so enough digits always decide.
bool decide_dist_less(const AlphaFamily& family, long i, const mpz_class& m,
                      const mpq_class& eps);

}  // namespace rigidity

#endif
