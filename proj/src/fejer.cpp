#include "rigidity/fejer.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rigidity/errors.hpp"
#include "rigidity/parallel.hpp"

namespace rigidity {

namespace {

constexpr double kEps = 0x1p-53;      // double rounding unit
constexpr double kTableErr = 0x1p-52; // table entry error bound
constexpr double kTwoPiUpper = 6.283185307179587;  // > 2*pi

// per-thread mpfr workspace; the destructor also drops mpfr's own caches
struct SinCosWork {
    mpfr_t angle, two_pi, sn, cs;
    SinCosWork() {
        mpfr_init2(angle, 96);
        mpfr_init2(two_pi, 96);
        mpfr_init2(sn, 80);
        mpfr_init2(cs, 80);
    }
    ~SinCosWork() {
        mpfr_clears(angle, two_pi, sn, cs, nullptr);
        mpfr_free_cache();
    }
};

// sin and cos of 2*pi*q (q rational), correctly rounded to double within
// one ulp plus the 80-bit working error.
void sincos_2pi(const mpq_class& q, double* s, double* c) {
    static thread_local SinCosWork w;
    mpfr_const_pi(w.two_pi, MPFR_RNDN);
    mpfr_mul_ui(w.two_pi, w.two_pi, 2, MPFR_RNDN);
    mpfr_set_q(w.angle, q.get_mpq_t(), MPFR_RNDN);
    mpfr_mul(w.angle, w.angle, w.two_pi, MPFR_RNDN);
    mpfr_sin_cos(w.sn, w.cs, w.angle, MPFR_RNDN);
    *s = mpfr_get_d(w.sn, MPFR_RNDN);
    *c = mpfr_get_d(w.cs, MPFR_RNDN);
}

struct StepProfile {
    mpq_class lo, hi;   // dip support [lo, hi], strictly inside [0, 1/l]
    mpq_class height;   // 1 + rho outside the dip
    mpq_class depth;    // (1 + rho) / |J|, subtracted on the dip
};

StepProfile step_profile(long l, const mpq_class& rho, const mpq_class& shrink) {
    StepProfile p;
    p.lo = shrink;
    p.hi = mpq_class(1, l) - shrink;
    mpq_class width = p.hi - p.lo;
    p.height = 1 + rho;
    p.depth = p.height / width;
    return p;
}

TrigPoly fejer_smoothed(long l, long L, const mpq_class& rho,
                        const mpq_class& shrink) {
    StepProfile prof = step_profile(l, rho, shrink);
    TrigPoly poly;
    poly.degree = L;
    poly.cos_coef.resize(static_cast<size_t>(L - 1));
    poly.sin_coef.resize(static_cast<size_t>(L - 1));
    mpfr_t pi_k, acc;
    mpfr_init2(pi_k, 96);
    mpfr_init2(acc, 96);
    for (long k = 1; k < L; ++k) {
        double cu, su, cv, sv;
        sincos_2pi(frac_exact(prof.lo * k), &su, &cu);
        sincos_2pi(frac_exact(prof.hi * k), &sv, &cv);
        // hat(step)_k = -depth * (e(-k lo) - e(-k hi)) / (2 pi i k); the
        // Fejer factor (1 - k/L) damps it. Real cos/sin form:
        //   A_k = (1 - k/L) * depth * (su - sv) / (pi k)
        //   B_k = -(1 - k/L) * depth * (cu - cv) / (pi k)
        mpq_class damp = (mpq_class(L - k, L)) * prof.depth;
        mpfr_const_pi(pi_k, MPFR_RNDN);
        mpfr_mul_ui(pi_k, pi_k, static_cast<unsigned long>(k), MPFR_RNDN);
        mpfr_set_d(acc, su - sv, MPFR_RNDN);
        mpfr_div(acc, acc, pi_k, MPFR_RNDN);
        mpfr_mul_q(acc, acc, damp.get_mpq_t(), MPFR_RNDN);
        poly.cos_coef[static_cast<size_t>(k - 1)] = mpfr_get_d(acc, MPFR_RNDN);
        mpfr_set_d(acc, cv - cu, MPFR_RNDN);
        mpfr_div(acc, acc, pi_k, MPFR_RNDN);
        mpfr_mul_q(acc, acc, damp.get_mpq_t(), MPFR_RNDN);
        poly.sin_coef[static_cast<size_t>(k - 1)] = mpfr_get_d(acc, MPFR_RNDN);
    }
    mpfr_clear(pi_k);
    mpfr_clear(acc);
    return poly;
}

double lipschitz_bound(const TrigPoly& poly) {
    double s = 0.0;
    for (long k = 1; k < poly.degree; ++k) {
        size_t i = static_cast<size_t>(k - 1);
        s += double(k) * std::hypot(poly.cos_coef[i], poly.sin_coef[i]);
    }
    return kTwoPiUpper * s * (1.0 + 1e-9) + 1e-12;
}

}  // namespace

double TrigPoly::abs_coef_sum() const {
    double s = 0.0;
    for (size_t i = 0; i + 1 < static_cast<size_t>(degree); ++i)
        s += std::fabs(cos_coef[i]) + std::fabs(sin_coef[i]);
    return s;
}

WitnessCertificate verify_witness(const TrigPoly& poly, long l,
                                  long grid_density) {
    if (l < 2) throw Error(ErrorCode::ConfigError, "witness needs l >= 2");
    const long L = poly.degree;
    if (grid_density < 4 * L * l)
        throw Error(ErrorCode::ConfigError,
                    "grid density below 4*L*l is not rigorous");
    const long G = grid_density;
    const double slope = lipschitz_bound(poly);
    const double step = 1.0 / double(G);
    const double sum_abs = poly.abs_coef_sum() * (1.0 + 1e-12);
    // rigorous bound on |grid sum - phi(j/G)|: table error, per-term rounding,
    // sequential summation rounding
    const double eval_err =
        (sum_abs * (kTableErr + 4.0 * kEps) +
         kEps * 2.0 * double(L) * sum_abs) * 1.1 + 1e-300;
    const double correction = eval_err + slope * step;
    const double sup_bound = double(l) * double(l);

    // certified cos/sin table on the grid
    std::vector<double> ct(static_cast<size_t>(G)), st(static_cast<size_t>(G));
    {
        const long long chunk = 4096;
        long long chunks = (G + chunk - 1) / chunk;
        parallel_chunks(chunks, 0, [&](long long c) {
            for (long long m = c * chunk;
                 m < std::min<long long>(G, (c + 1) * chunk); ++m) {
                sincos_2pi(mpq_class(static_cast<long>(m), G),
                           &st[static_cast<size_t>(m)],
                           &ct[static_cast<size_t>(m)]);
            }
        });
    }

    struct NodeMin {
        double exterior = 1e300;
        long exterior_at = -1;
        double sup = 1e300;
        long sup_at = -1;
    };
    const long long chunk_nodes = 2048;
    long long chunks = (G + chunk_nodes - 1) / chunk_nodes;
    std::vector<NodeMin> mins(static_cast<size_t>(chunks));
    parallel_chunks(chunks, 0, [&](long long c) {
        NodeMin local;
        for (long j = static_cast<long>(c * chunk_nodes);
             j < std::min<long long>(G, (c + 1) * chunk_nodes); ++j) {
            double acc = 0.0;
            long pos = 0;  // (k*j) mod G, advanced incrementally
            for (long k = 1; k < L; ++k) {
                pos += j;
                if (pos >= G) pos -= G;
                acc += poly.cos_coef[static_cast<size_t>(k - 1)] *
                           ct[static_cast<size_t>(pos)] +
                       poly.sin_coef[static_cast<size_t>(k - 1)] *
                           st[static_cast<size_t>(pos)];
            }
            double sup_room = sup_bound - std::fabs(acc);
            if (sup_room < local.sup) { local.sup = sup_room; local.sup_at = j; }
            bool exterior = (static_cast<long long>(j) * l > G) && (j < G);
            if (exterior && acc < local.exterior) {
                local.exterior = acc;
                local.exterior_at = j;
            }
        }
        mins[static_cast<size_t>(c)] = local;
    });
    NodeMin total;
    for (const auto& m : mins) {
        if (m.exterior < total.exterior) {
            total.exterior = m.exterior;
            total.exterior_at = m.exterior_at;
        }
        if (m.sup < total.sup) { total.sup = m.sup; total.sup_at = m.sup_at; }
    }

    WitnessCertificate cert;
    cert.slope = slope;
    cert.grid = G;
    cert.exterior_margin = total.exterior - 1.0 - correction;
    cert.sup_margin = total.sup - correction;
    if (cert.sup_margin <= 0.0) {
        cert.violated_bound = 2;
        cert.witness_point = double(total.sup_at) / double(G);
        cert.verdict = {CertifiedBool::Outcome::False,
                        PrecReal::exact_double(cert.sup_margin)};
        return cert;
    }
    if (cert.exterior_margin <= 0.0) {
        cert.violated_bound = 1;
        cert.witness_point = double(total.exterior_at) / double(G);
        cert.verdict = {CertifiedBool::Outcome::False,
                        PrecReal::exact_double(cert.exterior_margin)};
        return cert;
    }
    double margin = std::min(cert.exterior_margin, cert.sup_margin);
    cert.verdict = {CertifiedBool::Outcome::True,
                    PrecReal::exact_double(margin)};
    return cert;
}

TrigPoly build_witness(long l, long grid_density,
                       WitnessCertificate* certificate, long degree_cap) {
    if (l < 2) throw Error(ErrorCode::ConfigError, "witness needs l >= 2");
    const mpq_class rho = 1;          // exterior level 1 + rho = 2
    const mpq_class shrink(1, 8 * l); // dip kept away from the jump points
    for (long L = 16; L <= degree_cap; L *= 2) {
        TrigPoly poly = fejer_smoothed(l, L, rho, shrink);
        double slope = lipschitz_bound(poly);
        long G = std::max<long>(
            {grid_density, 8 * L * l,
             static_cast<long>(std::ceil(8.0 * slope))});
        WitnessCertificate cert = verify_witness(poly, l, G);
        if (cert.verdict.is_true()) {
            if (certificate) *certificate = cert;
            return poly;
        }
    }
    throw Error(ErrorCode::BudgetExceeded,
                "no Fejer order below " + std::to_string(degree_cap) +
                    " certifies l=" + std::to_string(l));
}

PrecReal eval(const TrigPoly& poly, const PrecReal& y) {
    PrecReal acc;
    mpfr_t angle, two_pi, sn, cs;
    mpfr_init2(angle, 160);
    mpfr_init2(two_pi, 160);
    mpfr_init2(sn, 128);
    mpfr_init2(cs, 128);
    mpfr_const_pi(two_pi, MPFR_RNDN);
    mpfr_mul_ui(two_pi, two_pi, 2, MPFR_RNDN);
    mpq_class y_rad = y.radius();
    mpq_class y_mid = y.midpoint();
    for (long k = 1; k < poly.degree; ++k) {
        size_t i = static_cast<size_t>(k - 1);
        double a = poly.cos_coef[i], b = poly.sin_coef[i];
        if (a == 0.0 && b == 0.0) continue;
        mpq_class arg = frac_exact(y_mid * k);
        mpfr_set_q(angle, arg.get_mpq_t(), MPFR_RNDN);
        mpfr_mul(angle, angle, two_pi, MPFR_RNDN);
        mpfr_sin_cos(sn, cs, angle, MPFR_RNDN);
        auto to_ball = [](mpfr_srcptr v) {
            // an exact mpfr zero reports a meaningless exponent
            if (mpfr_zero_p(v)) return PrecReal::ball(0, 1, -120);
            mpz_class man;
            mpfr_exp_t e = mpfr_get_z_2exp(man.get_mpz_t(), v);
            return PrecReal::ball(man, 2, static_cast<long>(e));
        };
        // |d/dy cos(2 pi k y)| <= 2 pi k < 6.3 k: widen by the angle radius
        mpq_class swing = mpq_class(63, 10) * k * y_rad;
        PrecReal cos_ball = to_ball(cs).widened(swing);
        PrecReal sin_ball = to_ball(sn).widened(swing);
        acc = acc + cos_ball * PrecReal::exact_double(a) +
              sin_ball * PrecReal::exact_double(b);
        acc = acc.rounded(192);
    }
    mpfr_clear(angle);
    mpfr_clear(two_pi);
    mpfr_clear(sn);
    mpfr_clear(cs);
    return acc;
}

std::string witness_csv(const TrigPoly& poly) {
    std::ostringstream os;
    os << "k,cos_coef,sin_coef\n";
    char buf[80];
    for (long k = 1; k < poly.degree; ++k) {
        size_t i = static_cast<size_t>(k - 1);
        std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g\n", k,
                      poly.cos_coef[i], poly.sin_coef[i]);
        os << buf;
    }
    return os.str();
}

}  // namespace rigidity
