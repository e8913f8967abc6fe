#include "rigidity/search.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>

#include "rigidity/errors.hpp"
#include "rigidity/parallel.hpp"

namespace rigidity {

namespace {

constexpr long long kChunk = 1 << 20;

// 64-bit fixed-point view of alpha_i for the scan prefilter.
struct FilterTerm {
    uint64_t step;  // floor(midpoint(alpha_i) * 2^64)
    long index;
};

uint64_t low64(mpz_class v) {
    uint64_t out = 0;
    for (int shift = 0; shift < 64; shift += 32) {
        mpz_class low32;
        mpz_fdiv_r_2exp(low32.get_mpz_t(), v.get_mpz_t(), 32);
        out |= static_cast<uint64_t>(mpz_get_ui(low32.get_mpz_t())) << shift;
        mpz_fdiv_q_2exp(v.get_mpz_t(), v.get_mpz_t(), 32);
    }
    return out;
}

uint64_t fixed64_of(const PrecReal& x) {
    mpq_class mid = x.midpoint();
    mpz_class scaled;
    mpz_mul_2exp(scaled.get_mpz_t(), mid.get_num().get_mpz_t(), 64);
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), scaled.get_mpz_t(), mid.get_den().get_mpz_t());
    return low64(q);  // alpha in [0,1) so q fits in 64 bits
}

uint64_t dist_units(uint64_t f) { return std::min(f, ~f + 1); }

// Threshold in 2^-64 units covering eps plus every prefilter error source:
// mantissa truncation and ball radius, both amplified by m <= hi.
uint64_t filter_threshold(const mpq_class& eps, const mpq_class& max_radius,
                          long long hi) {
    mpq_class units = eps;
    mpz_class num;
    mpz_mul_2exp(num.get_mpz_t(), units.get_num().get_mpz_t(), 64);
    mpz_class base;
    mpz_fdiv_q(base.get_mpz_t(), num.get_mpz_t(), units.get_den().get_mpz_t());
    mpq_class guard_q = max_radius * static_cast<long>(hi);
    mpz_class gnum;
    mpz_mul_2exp(gnum.get_mpz_t(), guard_q.get_num().get_mpz_t(), 64);
    mpz_class guard;
    mpz_cdiv_q(guard.get_mpz_t(), gnum.get_mpz_t(),
               guard_q.get_den().get_mpz_t());
    mpz_class total = base + guard + static_cast<long>(hi) + 2;
    mpz_class cap = mpz_class(1) << 63;
    if (total >= cap) total = cap;
    return low64(total);
}

struct ScanSetup {
    std::vector<FilterTerm> terms;
    uint64_t thr;
};

ScanSetup prepare_scan(const AlphaFamily& family,
                       const std::vector<long>& indices, const mpq_class& eps,
                       const SearchWindow& window) {
    if (eps <= 0) throw Error(ErrorCode::ConfigError, "eps must be positive");
    if (window.lo < 1 || window.hi < window.lo)
        throw Error(ErrorCode::ConfigError, "bad search window");
    mpq_class slack = eps / 16;
    family.refine_for(indices, mpz_class(static_cast<long>(window.hi)), slack);
    ScanSetup s;
    mpq_class max_rad = 0;
    for (long i : indices) {
        PrecReal a = family.cached(i);
        max_rad = std::max(max_rad, a.radius());
        s.terms.push_back({fixed64_of(a), i});
    }
    s.thr = filter_threshold(eps, max_rad, window.hi);
    return s;
}

bool certified_all(const AlphaFamily& family, const std::vector<long>& indices,
                   long long m, const mpq_class& eps) {
    for (long i : indices) {
        if (!decide_dist_less(family, i, mpz_class(static_cast<long>(m)), eps))
            return false;
    }
    return true;
}

}  // namespace

HitList simultaneous_hits(const AlphaFamily& family,
                          const std::vector<long>& indices,
                          const mpq_class& eps, SearchWindow window,
                          int threads) {
    ScanSetup setup = prepare_scan(family, indices, eps, window);
    long long chunks = (window.width() + kChunk - 1) / kChunk;
    std::vector<std::vector<long long>> found(
        static_cast<size_t>(chunks));
    parallel_chunks(chunks, threads, [&](long long c) {
        long long from = window.lo + c * kChunk;
        long long to = std::min(window.hi, from + kChunk - 1);
        auto& out = found[static_cast<size_t>(c)];
        if (setup.terms.empty()) {
            for (long long m = from; m <= to; ++m) out.push_back(m);
            return;
        }
        const uint64_t step0 = setup.terms[0].step;
        const uint64_t thr = setup.thr;
        uint64_t acc = step0 * static_cast<uint64_t>(from);
        for (long long m = from; m <= to; ++m, acc += step0) {
            if (dist_units(acc) > thr) continue;
            bool pass = true;
            for (size_t t = 1; t < setup.terms.size(); ++t) {
                uint64_t f = setup.terms[t].step * static_cast<uint64_t>(m);
                if (dist_units(f) > thr) { pass = false; break; }
            }
            if (pass && certified_all(family, indices, m, eps))
                out.push_back(m);
        }
    });
    HitList hits;
    hits.window = window;
    hits.eps = eps;
    hits.indices = indices;
    for (auto& part : found)
        hits.hits.insert(hits.hits.end(), part.begin(), part.end());
    return hits;
}

std::optional<long long> nondivisible_hit(const AlphaFamily& family,
                                          const std::vector<long>& indices,
                                          const mpq_class& eps,
                                          long long divisor,
                                          SearchWindow window) {
    if (divisor < 2)
        throw Error(ErrorCode::ConfigError, "divisor must be >= 2");
    ScanSetup setup = prepare_scan(family, indices, eps, window);
    for (long long m = window.lo; m <= window.hi; ++m) {
        if (m % divisor == 0) continue;
        bool pass = true;
        for (const auto& t : setup.terms) {
            uint64_t f = t.step * static_cast<uint64_t>(m);
            if (dist_units(f) > setup.thr) { pass = false; break; }
        }
        if (pass && certified_all(family, indices, m, eps)) return m;
    }
    return std::nullopt;
}

Refinable refinable_alpha(const AlphaFamily& family, long i) {
    return [&family, i](long digits) { return family.alpha(i, digits); };
}

Refinable refinable_pi() {
    return [](long digits) {
        long bits = (digits * 10 + 2) / 3 + 16;
        mpfr_t x;
        mpfr_init2(x, static_cast<mpfr_prec_t>(bits));
        mpfr_const_pi(x, MPFR_RNDN);
        mpz_class man;
        mpfr_exp_t e = mpfr_get_z_2exp(man.get_mpz_t(), x);
        mpfr_clear(x);
        return PrecReal::ball(man, 1, static_cast<long>(e));
    };
}

Refinable refinable_rational(const mpq_class& q) {
    return [q](long digits) { return PrecReal::from_mpq(q, digits * 4 + 16); };
}

namespace {

enum class Membership { Inside, Outside, Undecided };

Membership classify(const PrecReal& x, const CircleInterval& I) {
    mpq_class lo = x.lower(), hi = x.upper();
    if (x.is_exact()) {
        mpq_class f = frac_exact(lo);
        return (f >= I.a && f < I.b) ? Membership::Inside
                                     : Membership::Outside;
    }
    mpz_class k;
    mpz_fdiv_q(k.get_mpz_t(), lo.get_num().get_mpz_t(),
               lo.get_den().get_mpz_t());
    bool any_overlap = false;
    for (int dn = 0; dn <= 1; ++dn) {
        mpq_class a = I.a + k + dn, b = I.b + k + dn;
        if (lo >= a && hi < b) return Membership::Inside;
        if (!(hi < a || lo >= b)) any_overlap = true;
    }
    return any_overlap ? Membership::Undecided : Membership::Outside;
}

}  // namespace

CertifiedBool avoids_interval(const Refinable& theta, SearchWindow window,
                              const mpq_class& eps, const CircleInterval& I,
                              const std::vector<long>& indices,
                              const AlphaFamily& family,
                              std::optional<long long>* witness) {
    if (!(I.a >= 0 && I.a < I.b && I.b <= 1))
        throw Error(ErrorCode::ConfigError, "interval must satisfy 0 <= a < b <= 1");
    if (witness) witness->reset();
    mpq_class min_margin = -1;
    for (long long m = window.lo; m <= window.hi; ++m) {
        if (!indices.empty() &&
            !certified_all(family, indices, m, eps))
            continue;
        long digits = 24;
        for (;;) {
            PrecReal x = theta(digits).scaled(mpz_class(static_cast<long>(m)));
            Membership where = classify(x, I);
            if (where == Membership::Inside) {
                if (witness) *witness = m;
                return {CertifiedBool::Outcome::False,
                        PrecReal::exact_int(0)};
            }
            if (where == Membership::Outside) {
                mpq_class f = frac_exact(x.midpoint());
                mpq_class gap = f < I.a ? I.a - f : f - I.b;
                if (min_margin < 0 || gap < min_margin) min_margin = gap;
                break;
            }
            digits *= 2;
            if (digits > family.digit_cap())
                throw Error(ErrorCode::PrecisionExhausted,
                            "interval membership undecided for m=" +
                                std::to_string(m));
        }
    }
    return {CertifiedBool::Outcome::True,
            min_margin < 0 ? PrecReal::exact_int(0)
                           : PrecReal::from_mpq(min_margin, 128)};
}

BoxInfimum box_infimum(const AlphaFamily& family,
                       const std::vector<long>& indices, long K,
                       long long tuple_budget) {
    size_t n = indices.size();
    if (n == 0 || K < 1)
        throw Error(ErrorCode::ConfigError, "box_infimum needs indices and K >= 1");
    double size_est = n * std::log(2.0 * K + 1.0);
    if (size_est > std::log(double(tuple_budget)))
        throw Error(ErrorCode::BudgetExceeded,
                    "(2K+1)^n exceeds the tuple budget: K=" +
                        std::to_string(K) + " n=" + std::to_string(n));
    for (long i : indices) family.alpha(i, 40);

    // k * alpha_i for k in [-K, K], shared across the enumeration
    std::vector<std::vector<PrecReal>> table(n);
    for (size_t j = 0; j < n; ++j) {
        PrecReal a = family.cached(indices[j]);
        table[j].reserve(2 * K + 1);
        for (long k = -K; k <= K; ++k)
            table[j].push_back(a.scaled(k));
    }

    std::optional<mpq_class> best_hi, best_lo;
    std::vector<long> best_tuple(n, 0), tuple(n, 0);
    std::vector<PrecReal> partial(n + 1);
    partial[0] = PrecReal::exact_int(0);

    // enumerate tuples whose first nonzero entry is positive
    auto descend = [&](auto&& self, size_t j, bool all_zero) -> void {
        if (j == n) {
            if (all_zero) return;
            PrecReal d = dist_to_int(partial[n]);
            mpq_class hi = d.upper(), lo = d.lower();
            if (!best_hi || hi < *best_hi) {
                best_hi = hi;
                best_tuple = tuple;
            }
            if (!best_lo || lo < *best_lo) best_lo = lo;
            return;
        }
        long from = all_zero ? 0 : -K;
        for (long k = from; k <= K; ++k) {
            tuple[j] = k;
            partial[j + 1] = partial[j] + table[j][static_cast<size_t>(k + K)];
            self(self, j + 1, all_zero && k == 0);
        }
        tuple[j] = 0;
    };
    descend(descend, 0, true);

    mpq_class mid2 = *best_lo + *best_hi;
    mpq_class wid2 = *best_hi - *best_lo;
    PrecReal value = PrecReal::from_mpq(mid2 / 2, 256).widened(wid2 / 2);
    BoxInfimum out;
    out.value = value;
    out.attained = best_tuple;
    return out;
}

}  // namespace rigidity
