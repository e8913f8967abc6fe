#include "rigidity/cf.hpp"

namespace rigidity {

ContinuedFraction cf_expand(const PrecReal& x, long max_terms) {
    ContinuedFraction cf;
    mpq_class lo = x.lower();
    mpq_class hi = x.upper();
    mpz_class p2 = 0, p1 = 1;  // p_{-2}, p_{-1}
    mpz_class q2 = 1, q1 = 0;
    for (long n = 0; n < max_terms; ++n) {
        mpz_class a_lo, a_hi;
        mpz_fdiv_q(a_lo.get_mpz_t(), lo.get_num().get_mpz_t(),
                   lo.get_den().get_mpz_t());
        mpz_fdiv_q(a_hi.get_mpz_t(), hi.get_num().get_mpz_t(),
                   hi.get_den().get_mpz_t());
        if (a_lo != a_hi) break;  // enclosure no longer decides this digit
        mpz_class a = a_lo;
        mpz_class p = a * p1 + p2;
        mpz_class q = a * q1 + q2;
        cf.a.push_back(a);
        cf.p.push_back(p);
        cf.q.push_back(q);
        p2 = p1; p1 = p;
        q2 = q1; q1 = q;
        mpq_class fl(a);
        mpq_class rem_lo = lo - fl;
        mpq_class rem_hi = hi - fl;
        if (rem_lo <= 0) break;  // next digit unbounded or undecidable
        // reciprocal swaps the endpoints
        mpq_class nlo = 1 / rem_hi;
        mpq_class nhi = 1 / rem_lo;
        lo = nlo;
        hi = nhi;
    }
    return cf;
}

}  // namespace rigidity
