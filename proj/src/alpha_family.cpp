#include "rigidity/alpha_family.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <mutex>

#include "rigidity/errors.hpp"

namespace rigidity {

namespace {

bool is_squarefree(unsigned long n) {
    for (unsigned long p = 2; p * p <= n; ++p) {
        if (n % (p * p) == 0) return false;
    }
    return true;
}

bool is_square(unsigned long n) {
    unsigned long r = static_cast<unsigned long>(std::sqrt(double(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r * r == n;
}

unsigned long nth_squarefree_nonsquare(long i) {
    unsigned long n = 1;
    for (long seen = 0; seen < i;) {
        ++n;
        if (!is_square(n) && is_squarefree(n)) ++seen;
    }
    return n;
}

unsigned long nth_prime(long i) {
    mpz_class p = 1;
    for (long seen = 0; seen < i; ++seen)
        mpz_nextprime(p.get_mpz_t(), p.get_mpz_t());
    return p.get_ui();
}

long digits_to_bits(long digits) {
    // 10^digits < 2^(digits * 3.33); round up and add guard bits.
    return (digits * 10 + 2) / 3 + 8;
}

// Tightest common enclosure of two balls around the same value.
PrecReal intersect(const PrecReal& a, const PrecReal& b) {
    mpq_class lo = std::max(a.lower(), b.lower());
    mpq_class hi = std::min(a.upper(), b.upper());
    if (lo > hi)
        throw Error(ErrorCode::ConditionViolated,
                    "refinement produced disjoint enclosures");
    // both bounds are dyadic by construction
    mpq_class mid2 = lo + hi;  // 2 * midpoint
    mpq_class wid2 = hi - lo;  // 2 * radius
    long tz_m = static_cast<long>(
        mpz_scan1(mid2.get_den().get_mpz_t(), 0));
    long tz_w = wid2 == 0 ? 0 : static_cast<long>(
        mpz_scan1(wid2.get_den().get_mpz_t(), 0));
    long e = -std::max(tz_m, tz_w) - 1;
    mpz_class u;
    mpz_ui_pow_ui(u.get_mpz_t(), 2, static_cast<unsigned long>(-e));
    mpq_class man_q = (mid2 / 2) * mpq_class(u);
    mpq_class rad_q = (wid2 / 2) * mpq_class(u);
    if (man_q.get_den() != 1 || rad_q.get_den() != 1)
        throw Error(ErrorCode::ConditionViolated,
                    "non-dyadic intersection endpoints");
    return PrecReal::ball(man_q.get_num(), rad_q.get_num(), e);
}

}  // namespace

const char* family_kind_name(FamilyKind kind) {
    return kind == FamilyKind::SqrtSquarefree ? "sqrt_squarefree" : "log_prime";
}

FamilyKind family_kind_from_name(const std::string& name) {
    if (name == "sqrt_squarefree") return FamilyKind::SqrtSquarefree;
    if (name == "log_prime") return FamilyKind::LogPrime;
    throw Error(ErrorCode::ConfigError, "unknown family kind: " + name);
}

AlphaFamily::AlphaFamily(FamilyKind kind, long digit_cap)
    : kind_(kind), digit_cap_(digit_cap) {}

mpz_class AlphaFamily::generator_value(long i) const {
    if (i < 1) throw Error(ErrorCode::ConfigError, "family index must be >= 1");
    if (kind_ == FamilyKind::SqrtSquarefree)
        return mpz_class(nth_squarefree_nonsquare(i));
    return mpz_class(nth_prime(i));
}

PrecReal AlphaFamily::compute(long i, long digits) const {
    long bits = digits_to_bits(digits);
    mpz_class g = generator_value(i);
    if (kind_ == FamilyKind::SqrtSquarefree) {
        // floor(sqrt(d * 4^bits)) = s  =>  sqrt(d) in [s, s+1] * 2^-bits.
        mpz_class shifted;
        mpz_mul_2exp(shifted.get_mpz_t(), g.get_mpz_t(),
                     static_cast<unsigned long>(2 * bits));
        mpz_class s;
        mpz_sqrt(s.get_mpz_t(), shifted.get_mpz_t());
        PrecReal root = PrecReal::ball(2 * s + 1, 1, -bits - 1);
        return frac(root);
    }
    mpfr_t x;
    mpfr_init2(x, static_cast<mpfr_prec_t>(bits + 16));
    mpfr_set_ui(x, g.get_ui(), MPFR_RNDN);
    mpfr_log(x, x, MPFR_RNDN);
    mpz_class man;
    mpfr_exp_t e = mpfr_get_z_2exp(man.get_mpz_t(), x);
    mpfr_clear(x);
    PrecReal val = PrecReal::ball(man, 1, static_cast<long>(e));
    return frac(val);
}

PrecReal AlphaFamily::alpha(long i, long digits) const {
    if (i < 1) throw Error(ErrorCode::ConfigError, "family index must be >= 1");
    digits = std::max(digits, kMinDigits);
    if (digits > digit_cap_)
        throw Error(ErrorCode::BudgetExceeded,
                    "alpha_" + std::to_string(i) + " needs " +
                        std::to_string(digits) + " digits, cap is " +
                        std::to_string(digit_cap_));
    {
        std::shared_lock lock(mu_);
        auto it = cache_.find(i);
        if (it != cache_.end() && it->second.first >= digits)
            return it->second.second;
    }
    std::unique_lock lock(mu_);
    auto it = cache_.find(i);
    if (it != cache_.end() && it->second.first >= digits)
        return it->second.second;
    PrecReal fine = compute(i, digits);
    if (it != cache_.end()) fine = intersect(it->second.second, fine);
    cache_[i] = {digits, fine};
    return fine;
}

PrecReal AlphaFamily::cached(long i) const {
    {
        std::shared_lock lock(mu_);
        auto it = cache_.find(i);
        if (it != cache_.end()) return it->second.second;
    }
    return alpha(i, kMinDigits);
}

long AlphaFamily::cached_digits(long i) const {
    std::shared_lock lock(mu_);
    auto it = cache_.find(i);
    return it == cache_.end() ? 0 : it->second.first;
}

void AlphaFamily::refine_for(const std::vector<long>& indices,
                             const mpz_class& m_max,
                             const mpq_class& slack) const {
    if (m_max < 1 || slack <= 0)
        throw Error(ErrorCode::ConfigError, "refine_for: bad arguments");
    // need radius < slack / m_max, i.e. 10^digits > m_max / slack
    mpq_class ratio = mpq_class(m_max) / slack;
    mpz_class ceiling;
    mpz_cdiv_q(ceiling.get_mpz_t(), ratio.get_num().get_mpz_t(),
               ratio.get_den().get_mpz_t());
    long digits =
        static_cast<long>(mpz_sizeinbase(ceiling.get_mpz_t(), 10)) + 1;
    for (long i : indices) alpha(i, digits);
}

PrecReal certified_dist(const AlphaFamily& family, long i, const mpz_class& m,
                        const mpq_class& rad_goal) {
    mpq_class slack = rad_goal;
    for (;;) {
        family.refine_for({i}, abs(m) + 1, slack);
        PrecReal prod = family.cached(i).scaled(m);
        PrecReal d = dist_to_int(prod);
        if (d.radius() < rad_goal) return d;
        slack /= 4;
    }
}

bool decide_dist_less(const AlphaFamily& family, long i, const mpz_class& m,
                      const mpq_class& eps) {
    mpq_class goal = eps / 4;
    for (;;) {
        PrecReal d = certified_dist(family, i, m, goal);
        CertifiedBool c = cert_less(d, eps);
        if (!c.undecided()) return c.is_true();
        goal /= 16;  // throws BudgetExceeded via refine_for past the cap
    }
}

}  // namespace rigidity
