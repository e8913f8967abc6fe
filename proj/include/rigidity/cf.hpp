#ifndef RIGIDITY_CF_HPP
#define RIGIDITY_CF_HPP

#include <gmpxx.h>

#include <vector>

#include "rigidity/prec_real.hpp"

namespace rigidity {

// Continued-fraction data of a real certified by a ball. Digits are emitted
// only while both interval endpoints agree on them, so every convergent
// listed is a true convergent of the enclosed value.
struct ContinuedFraction {
    std::vector<mpz_class> a;  // partial quotients a_0, a_1, ...
    std::vector<mpz_class> p;  // convergent numerators
    std::vector<mpz_class> q;  // convergent denominators

    size_t levels() const { return a.size(); }
};

// Expand x into at most max_terms certified partial quotients. Stops early
// when the enclosure is too wide to decide the next digit.
ContinuedFraction cf_expand(const PrecReal& x, long max_terms);

}  // namespace rigidity

#endif
