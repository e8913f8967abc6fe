#ifndef RIGIDITY_SEARCH_HPP
#define RIGIDITY_SEARCH_HPP

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "rigidity/alpha_family.hpp"
#include "rigidity/prec_real.hpp"

namespace rigidity {

// Inclusive integer window [lo, hi], lo >= 1.
struct SearchWindow {
    long long lo = 1;
    long long hi = 1;

    long long width() const { return hi - lo + 1; }
};

// All integers m in `window` with certified dist_to_int(m * alpha_i) < eps
// for every listed family index. `hits` is strictly ascending.
struct HitList {
    SearchWindow window;
    mpq_class eps;
    std::vector<long> indices;
    std::vector<long long> hits;
};

// Exhaustive simultaneous-approximation scan. A 64-bit fixed-point prefilter
// with a rigorous guard band rejects most of the window; every survivor is
// re-decided with certified ball arithmetic, so the result is exhaustively
// correct (no false negatives, no uncertified members). The window is
// processed in fixed-size chunks merged in order: output does not depend on
// the thread count.
HitList simultaneous_hits(const AlphaFamily& family,
                          const std::vector<long>& indices,
                          const mpq_class& eps, SearchWindow window,
                          int threads = 1);

// Smallest certified hit in the window that `divisor` does not divide, or
// nullopt when the window has none (a caller typically doubles the window).
std::optional<long long> nondivisible_hit(const AlphaFamily& family,
                                          const std::vector<long>& indices,
                                          const mpq_class& eps,
                                          long long divisor,
                                          SearchWindow window);

// A real number that can be re-enclosed on demand with radius <= 10^-digits.
using Refinable = std::function<PrecReal(long digits)>;

Refinable refinable_alpha(const AlphaFamily& family, long i);
Refinable refinable_pi();
Refinable refinable_rational(const mpq_class& q);

// Half-open interval [a, b) on the circle, 0 <= a < b <= 1.
struct CircleInterval {
    mpq_class a;
    mpq_class b;
};

// Does every m in the window whose approximation certificates pass send
// frac(m * theta) outside I? FALSE comes with the violating m in `witness`.
// Canonical argument order: window, eps, interval, indices.
CertifiedBool avoids_interval(const Refinable& theta, SearchWindow window,
                              const mpq_class& eps, const CircleInterval& I,
                              const std::vector<long>& indices,
                              const AlphaFamily& family,
                              std::optional<long long>* witness = nullptr);

// Certified minimum of dist_to_int(sum k_i alpha_i) over integer tuples with
// 0 <= |k_i| <= K, not all zero. Only tuples whose first nonzero entry is
// positive are enumerated (the mirror tuple has the same distance).
struct BoxInfimum {
    PrecReal value;
    std::vector<long> attained;  // a minimizing tuple
};

BoxInfimum box_infimum(const AlphaFamily& family,
                       const std::vector<long>& indices, long K,
                       long long tuple_budget = (1LL << 25));

}  // namespace rigidity

#endif
