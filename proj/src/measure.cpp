#include "rigidity/measure.hpp"

#include <algorithm>
#include <map>

#include "rigidity/cf.hpp"
#include "rigidity/errors.hpp"

namespace rigidity {

namespace {

mpq_class pow2q(long e) {
    mpq_class q;
    if (e >= 0)
        q = mpq_class(mpz_class(1) << e);
    else
        q = mpq_class(1, mpz_class(1) << (-e));
    return q;
}

mpq_class upper_q(const PrecReal& x) { return x.upper(); }

void shrink_to(mpq_class& target, const mpq_class& candidate) {
    if (candidate < target) target = candidate;
}

// dist_to_int(m * k * alpha_i) with absolute radius below rad_goal
PrecReal scaled_dist(const AlphaFamily& family, long index,
                     const mpz_class& multiplier, long long m,
                     const mpq_class& rad_goal) {
    return certified_dist(family, index, multiplier * static_cast<long>(m),
                          rad_goal);
}

}  // namespace

mpq_class AtomicMeasure::total_weight() const {
    mpq_class s = 0;
    for (const auto& a : atoms) s += a.weight;
    return s;
}

PrecReal atom_position(const AlphaFamily& family, const Atom& atom,
                       long digits) {
    long k_digits =
        static_cast<long>(mpz_sizeinbase(atom.multiplier.get_mpz_t(), 10));
    PrecReal a = family.alpha(atom.index, digits + k_digits + 2);
    return frac(a.scaled(atom.multiplier));
}

PrecReal mu_eval(const AtomicMeasure& measure, long n,
                 const RigiditySequence& seq, const AlphaFamily& family) {
    if (n < 1 || n > static_cast<long>(seq.terms.size()))
        throw Error(ErrorCode::ConfigError, "mu_eval: index outside the prefix");
    long long m = seq.terms[static_cast<size_t>(n - 1)];
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, 14);
    mpq_class rad_goal =
        mpq_class(mpz_class(1), den) / static_cast<long>(measure.atoms.size());
    PrecReal acc;
    for (const auto& atom : measure.atoms) {
        PrecReal d = scaled_dist(family, atom.index, atom.multiplier, m,
                                 rad_goal);
        acc = acc + d * PrecReal::from_mpq(atom.weight, 220);
        acc = acc.rounded(256);
    }
    return acc;
}

PrecReal separation_radius(const AtomicMeasure& measure, long p0,
                           const AlphaFamily& family) {
    if (p0 < 1)
        throw Error(ErrorCode::ConfigError,
                    "separation radius needs at least two atoms (p0 >= 1)");
    long count = 1L << p0;
    if (count > static_cast<long>(measure.atoms.size()))
        throw Error(ErrorCode::ConfigError,
                    "measure has fewer than 2^p0 atoms");
    long digits = 24;
    for (;;) {
        std::optional<mpq_class> min_lo, min_hi;
        for (long i = 0; i < count; ++i) {
            for (long j = i + 1; j < count; ++j) {
                const Atom& ai = measure.atoms[static_cast<size_t>(i)];
                const Atom& aj = measure.atoms[static_cast<size_t>(j)];
                PrecReal diff =
                    family.alpha(ai.index, digits).scaled(ai.multiplier) -
                    family.alpha(aj.index, digits).scaled(aj.multiplier);
                PrecReal d = dist_to_int(diff);
                mpq_class lo = d.lower(), hi = d.upper();
                if (!min_lo || lo < *min_lo) min_lo = lo;
                if (!min_hi || hi < *min_hi) min_hi = hi;
            }
        }
        if (*min_lo > 0 && (*min_hi - *min_lo) * 8 < *min_lo) {
            mpq_class mid2 = (*min_lo + *min_hi) / 4;  // quarter of the min
            mpq_class wid2 = (*min_hi - *min_lo) / 4;
            return PrecReal::from_mpq(mid2 / 2, 256).widened(wid2 / 2);
        }
        digits *= 2;
        if (digits > family.digit_cap())
            throw Error(ErrorCode::PrecisionExhausted,
                        "atom separation unresolved at the digit cap");
    }
}

namespace {

// 64-bit prefilter scan for the smallest k <= budget with
// dist(k * beta - target) < delta; returns 0 when the scan range has none.
long long partner_scan(const AlphaFamily& family, long new_index,
                       const Atom& anchor, const mpq_class& delta,
                       long long budget) {
    mpq_class slack = delta / 16;
    family.refine_for({new_index}, mpz_class(static_cast<long>(budget)), slack);
    long anchor_digits =
        static_cast<long>(mpz_sizeinbase(anchor.multiplier.get_mpz_t(), 10)) +
        20;
    PrecReal beta = family.cached(new_index);
    PrecReal target =
        family.alpha(anchor.index, anchor_digits).scaled(anchor.multiplier);
    // fixed-point steps
    auto fix64 = [](const mpq_class& v) {
        mpz_class num;
        mpz_mul_2exp(num.get_mpz_t(), v.get_num().get_mpz_t(), 64);
        mpz_class q;
        mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), v.get_den().get_mpz_t());
        mpz_class low;
        mpz_fdiv_r_2exp(low.get_mpz_t(), q.get_mpz_t(), 64);
        uint64_t out = 0;
        for (int shift = 0; shift < 64; shift += 32) {
            mpz_class piece;
            mpz_fdiv_r_2exp(piece.get_mpz_t(), low.get_mpz_t(), 32);
            out |= static_cast<uint64_t>(mpz_get_ui(piece.get_mpz_t()))
                   << shift;
            mpz_fdiv_q_2exp(low.get_mpz_t(), low.get_mpz_t(), 32);
        }
        return out;
    };
    uint64_t B = fix64(frac_exact(beta.midpoint()));
    uint64_t T = fix64(frac_exact(target.midpoint()));
    // guard: k * (radius(beta) + 2^-64) + radius(target) + 2^-64
    mpq_class guard_q = (beta.radius() + pow2q(-64)) * static_cast<long>(budget) +
                        target.radius() + pow2q(-64);
    mpq_class thr_q = delta + guard_q;
    mpz_class thr_num;
    mpz_mul_2exp(thr_num.get_mpz_t(), thr_q.get_num().get_mpz_t(), 64);
    mpz_class thr_z;
    mpz_cdiv_q(thr_z.get_mpz_t(), thr_num.get_mpz_t(),
               thr_q.get_den().get_mpz_t());
    if (thr_z >= (mpz_class(1) << 63)) thr_z = mpz_class(1) << 63;
    uint64_t thr = 0;
    for (int shift = 0; shift < 64; shift += 32) {
        mpz_class piece;
        mpz_fdiv_r_2exp(piece.get_mpz_t(), thr_z.get_mpz_t(), 32);
        thr |= static_cast<uint64_t>(mpz_get_ui(piece.get_mpz_t())) << shift;
        mpz_fdiv_q_2exp(thr_z.get_mpz_t(), thr_z.get_mpz_t(), 32);
    }
    uint64_t acc = 0;
    for (long long k = 1; k <= budget; ++k) {
        acc += B;
        uint64_t diff = acc - T;
        uint64_t d = std::min(diff, ~diff + 1);
        if (d > thr) continue;
        // certified recheck
        long digits = 32;
        for (;;) {
            PrecReal v = family.alpha(new_index, digits).scaled(
                             mpz_class(static_cast<long>(k))) -
                         family.alpha(anchor.index, digits + anchor_digits)
                             .scaled(anchor.multiplier);
            CertifiedBool c = cert_less(dist_to_int(v), delta);
            if (c.is_true()) return k;
            if (c.is_false()) break;
            digits *= 2;
            if (digits > family.digit_cap())
                throw Error(ErrorCode::PrecisionExhausted,
                            "partner scan certification stalled");
        }
    }
    return 0;
}

// Greedy descent through the convergent ladder of beta: repeatedly add the
// largest convergent step of opposing sign that does not overshoot, until
// the signed error enters (-delta, delta). Deterministic; the result is
// certified independently by the caller.
mpz_class partner_descent(const AlphaFamily& family, long new_index,
                          const Atom& anchor, const mpq_class& delta) {
    long digits = 48;
    for (;; digits *= 2) {
        if (digits > family.digit_cap())
            throw Error(ErrorCode::PrecisionExhausted,
                        "convergent descent needs precision past the cap");
        PrecReal beta = family.alpha(new_index, digits);
        long anchor_digits =
            static_cast<long>(
                mpz_sizeinbase(anchor.multiplier.get_mpz_t(), 10)) +
            digits;
        PrecReal target =
            family.alpha(anchor.index, anchor_digits).scaled(anchor.multiplier);
        ContinuedFraction cf = cf_expand(beta, 200);
        // signed convergent residues theta_j = q_j beta - p_j
        std::vector<PrecReal> theta;
        bool deep_plus = false, deep_minus = false;
        for (size_t j = 0; j < cf.levels(); ++j) {
            PrecReal t = beta.scaled(cf.q[j]) - PrecReal::exact_int(cf.p[j]);
            mpq_class lo = t.lower(), hi = t.upper();
            if (lo <= 0 && hi >= 0) break;  // sign no longer certified
            theta.push_back(t);
            mpq_class mag = lo > 0 ? lo : -hi;
            if (mag < delta / 8) (lo > 0 ? deep_plus : deep_minus) = true;
            if (deep_plus && deep_minus) break;
        }
        if (!(deep_plus && deep_minus)) continue;  // refine and retry

        // e = -target reduced to the symmetric representative
        PrecReal e = -target;
        {
            mpq_class mid = e.midpoint();
            mpq_class shifted = mid + mpq_class(1, 2);
            mpz_class n0;
            mpz_fdiv_q(n0.get_mpz_t(), shifted.get_num().get_mpz_t(),
                       shifted.get_den().get_mpz_t());
            e = e - PrecReal::exact_int(n0);
        }
        mpz_class k = 0;
        bool ok = true;
        for (int iter = 0; iter < 1000; ++iter) {
            mpq_class e_lo = e.lower(), e_hi = e.upper();
            mpq_class abs_hi = std::max(mpq_class(-e_lo), e_hi);
            if (abs_hi < delta * mpq_class(7, 8)) break;
            int e_sign = e_lo > 0 ? 1 : (e_hi < 0 ? -1 : 0);
            if (e_sign == 0) { ok = false; break; }  // wide ball; refine
            mpq_class abs_lo = e_sign > 0 ? e_lo : -e_hi;
            // largest opposing-sign residue with |theta| <= |e|
            long best = -1;
            mpq_class best_mag;
            for (size_t t = 0; t < theta.size(); ++t) {
                mpq_class lo = theta[t].lower(), hi = theta[t].upper();
                int s = lo > 0 ? 1 : -1;
                if (s == e_sign) continue;
                mpq_class mag_hi = s > 0 ? hi : -lo;
                if (mag_hi > abs_lo) continue;
                if (best < 0 || mag_hi > best_mag) {
                    best = static_cast<long>(t);
                    best_mag = mag_hi;
                }
            }
            if (best < 0) { ok = false; break; }
            mpq_class ratio = abs_lo / best_mag;
            mpz_class c;
            mpz_fdiv_q(c.get_mpz_t(), ratio.get_num().get_mpz_t(),
                       ratio.get_den().get_mpz_t());
            if (c < 1) c = 1;
            k += c * cf.q[static_cast<size_t>(best)];
            e = e + theta[static_cast<size_t>(best)].scaled(c);
            e = e.rounded(512);
        }
        if (!ok || k < 1) continue;
        return k;
    }
}

}  // namespace

mpz_class choose_partner(const AlphaFamily& family, long new_index,
                         const Atom& anchor, const mpq_class& delta,
                         long long scan_budget) {
    if (delta <= 0)
        throw Error(ErrorCode::ConfigError, "partner target must be positive");
    if (long long k = partner_scan(family, new_index, anchor, delta,
                                   scan_budget))
        return mpz_class(static_cast<long>(k));
    mpz_class k = partner_descent(family, new_index, anchor, delta);
    // independent certification of the descent result
    long digits = 64;
    for (;;) {
        long anchor_digits =
            static_cast<long>(
                mpz_sizeinbase(anchor.multiplier.get_mpz_t(), 10)) +
            digits;
        long k_digits = static_cast<long>(mpz_sizeinbase(k.get_mpz_t(), 10));
        PrecReal v =
            family.alpha(new_index, digits + k_digits).scaled(k) -
            family.alpha(anchor.index, anchor_digits).scaled(anchor.multiplier);
        CertifiedBool c = cert_less(dist_to_int(v), delta);
        if (c.is_true()) return k;
        if (c.is_false())
            throw Error(ErrorCode::ConditionViolated,
                        "convergent descent returned an uncertified partner");
        digits *= 2;
        if (digits > family.digit_cap())
            throw Error(ErrorCode::PrecisionExhausted,
                        "partner certification stalled at the digit cap");
    }
}

namespace {

struct TowerCtx {
    const RigiditySequence* seq = nullptr;
    const AlphaFamily* family = nullptr;
    long prefix = 0;
    long long m_max = 0;
    mpq_class dist_goal;               // absolute radius goal for distances
    std::vector<Atom> atoms;           // k_1, k_2, ... (global list)
    std::vector<std::vector<PrecReal>> dist;  // dist[i][n-1]
    std::vector<long> thresholds;      // N_0, N_1, ...

    long long m(long n) const {
        return seq->terms[static_cast<size_t>(n - 1)];
    }

    void push_atom(Atom atom) {
        std::vector<PrecReal> row;
        row.reserve(static_cast<size_t>(prefix));
        for (long n = 1; n <= prefix; ++n)
            row.push_back(scaled_dist(*family, atom.index, atom.multiplier,
                                      m(n), dist_goal));
        atoms.push_back(std::move(atom));
        dist.push_back(std::move(row));
    }
};

// weighted value vector of a measure given by (atom id, weight) pairs
std::vector<PrecReal> value_vector(
    const TowerCtx& ctx, const std::vector<std::pair<size_t, mpq_class>>& mix) {
    std::vector<PrecReal> vals(static_cast<size_t>(ctx.prefix));
    for (long n = 1; n <= ctx.prefix; ++n) {
        PrecReal acc;
        for (const auto& [id, w] : mix) {
            acc = acc + ctx.dist[id][static_cast<size_t>(n - 1)] *
                            PrecReal::from_mpq(w, 200);
            acc = acc.rounded(256);
        }
        vals[static_cast<size_t>(n - 1)] = acc;
    }
    return vals;
}

// bound applying to inner measures during the extension from generation p:
// per-block bounds below N_p, the carried bound 2^{1-p} beyond.
mpq_class extension_bound(const std::vector<long>& thresholds, long p, long n) {
    long j = 0;
    for (long t = 1; t <= p; ++t)
        if (n >= thresholds[static_cast<size_t>(t)]) j = t;
    if (j == 0) return mpq_class(1);          // ahead of N_1
    if (j >= p) return pow2q(1 - p);          // n >= N_p
    return pow2q(1 - j);                      // inside [N_j, N_{j+1})
}

long first_settled_index(const std::vector<PrecReal>& vals,
                         const mpq_class& bound, long prefix) {
    long last_bad = 0;
    for (long n = 1; n <= prefix; ++n)
        if (!(upper_q(vals[static_cast<size_t>(n - 1)]) < bound)) last_bad = n;
    return last_bad + 1;
}

double settled_margin(const std::vector<PrecReal>& vals, const mpq_class& bound,
                      long from, long prefix) {
    mpq_class worst = bound;
    for (long n = from; n <= prefix; ++n) {
        mpq_class slack = bound - upper_q(vals[static_cast<size_t>(n - 1)]);
        if (slack < worst) worst = slack;
    }
    return worst.get_d();
}

}  // namespace

AtomicMeasure inner_measure(const AtomicMeasure& mu_p,
                            const std::vector<InnerStep>& steps, long s) {
    long p = mu_p.generation;
    AtomicMeasure nu;
    nu.generation = p;  // support 2^p + s, weights mixed
    mpq_class half = pow2q(-(p + 1));
    for (long i = 0; i < static_cast<long>(mu_p.atoms.size()); ++i) {
        Atom a = mu_p.atoms[static_cast<size_t>(i)];
        a.weight = (i < s) ? half : pow2q(-p);
        nu.atoms.push_back(a);
    }
    for (long i = 0; i < s; ++i) {
        const InnerStep& st = steps[static_cast<size_t>(i)];
        Atom a;
        a.index = st.index;
        a.multiplier = st.partner_k;
        a.weight = half;
        nu.atoms.push_back(a);
    }
    return nu;
}

MeasureTower build_tower(const RigiditySequence& seq,
                         const AlphaFamily& family,
                         const TowerBuildOptions& opts) {
    if (opts.p_max < 1)
        throw Error(ErrorCode::ConfigError, "tower needs p_max >= 1");
    TowerCtx ctx;
    ctx.seq = &seq;
    ctx.family = &family;
    ctx.prefix = static_cast<long>(seq.terms.size());
    if (ctx.prefix < 4)
        throw Error(ErrorCode::BudgetExceeded, "prefix too short for the tower");
    ctx.m_max = *std::max_element(seq.terms.begin(), seq.terms.end());
    {
        mpz_class den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, 12);
        den *= (1L << opts.p_max);
        ctx.dist_goal = mpq_class(mpz_class(1), den);
    }
    ctx.thresholds = {0, 1};  // N_0 = 0, N_1 = 1

    MeasureTower tower;
    Atom first{1, mpz_class(1), mpq_class(1)};
    ctx.push_atom(first);
    Atom second{2, mpz_class(1), mpq_class(1)};
    ctx.push_atom(second);

    auto level_of = [&](long p) {
        AtomicMeasure mu;
        mu.generation = p;
        mpq_class w = pow2q(-p);
        for (long i = 0; i < (1L << p); ++i) {
            Atom a = ctx.atoms[static_cast<size_t>(i)];
            a.weight = w;
            mu.atoms.push_back(a);
        }
        return mu;
    };
    tower.levels.push_back(level_of(0));
    tower.levels.push_back(level_of(1));

    // running values of the current inner measure (starts at mu_1)
    std::vector<std::pair<size_t, mpq_class>> mix = {{0, pow2q(-1)},
                                                     {1, pow2q(-1)}};
    std::vector<PrecReal> vals = value_vector(ctx, mix);

    for (long p = 1; p < opts.p_max; ++p) {
        GenerationRecord rec;
        rec.from_generation = p;
        long last_threshold = ctx.thresholds.back();
        long inner_prev = last_threshold;

        // separation radii eta_{p0} for p0 <= p (certified balls)
        std::vector<PrecReal> eta(static_cast<size_t>(p) + 1);
        for (long p0 = 1; p0 <= p; ++p0)
            eta[static_cast<size_t>(p0)] =
                separation_radius(level_of(p), p0, family);

        for (long s = 1; s <= (1L << p); ++s) {
            long new_index = (1L << p) + s;
            const Atom anchor = ctx.atoms[static_cast<size_t>(s - 1)];

            // half the minimum certified slack: transferred block bounds,
            // the reserved tail allowance, and every cluster radius the new
            // atom must respect
            mpq_class delta = pow2q(-(p + 12)) / static_cast<long>(ctx.m_max);
            for (long n = 1; n <= ctx.prefix; ++n) {
                mpq_class slack =
                    extension_bound(ctx.thresholds, p, n) -
                    upper_q(vals[static_cast<size_t>(n - 1)]);
                if (slack <= 0)
                    throw Error(ErrorCode::ConditionViolated,
                                "inner bound already violated at n=" +
                                    std::to_string(n));
                mpq_class allowed = slack * pow2q(p + 1) /
                                    static_cast<long>(ctx.m(n));
                shrink_to(delta, allowed);
            }
            for (long p0 = 1; p0 <= p; ++p0) {
                long root = ((new_index - 1) % (1L << p0));  // 0-based
                if (root == s - 1) {
                    // anchor is the cluster root: full radius available
                    mpq_class slack = eta[static_cast<size_t>(p0)].lower();
                    if (slack <= 0)
                        throw Error(ErrorCode::ConditionViolated,
                                    "separation radius not positive");
                    shrink_to(delta, slack / 2);
                } else {
                    const Atom& root_atom = ctx.atoms[static_cast<size_t>(root)];
                    long digits =
                        48 +
                        static_cast<long>(mpz_sizeinbase(
                            anchor.multiplier.get_mpz_t(), 10)) +
                        static_cast<long>(mpz_sizeinbase(
                            root_atom.multiplier.get_mpz_t(), 10));
                    PrecReal gap =
                        family.alpha(anchor.index, digits)
                            .scaled(anchor.multiplier) -
                        family.alpha(root_atom.index, digits)
                            .scaled(root_atom.multiplier);
                    mpq_class slack = eta[static_cast<size_t>(p0)].lower() -
                                      dist_to_int(gap).upper();
                    if (slack <= 0)
                        throw Error(ErrorCode::ConditionViolated,
                                    "cluster radius exhausted");
                    shrink_to(delta, slack / 2);
                }
            }
            delta /= 2;

            mpz_class partner = choose_partner(family, new_index, anchor,
                                               delta, opts.partner_scan_budget);
            Atom fresh;
            fresh.index = new_index;
            fresh.multiplier = partner;
            fresh.weight = pow2q(-(p + 1));
            ctx.push_atom(fresh);
            size_t fresh_id = ctx.atoms.size() - 1;

            // nu_{p,s} = nu_{p,s-1} + 2^{-(p+1)} (d_new - d_s)
            mpq_class w = pow2q(-(p + 1));
            for (long n = 1; n <= ctx.prefix; ++n) {
                size_t ni = static_cast<size_t>(n - 1);
                PrecReal shift =
                    (ctx.dist[fresh_id][ni] -
                     ctx.dist[static_cast<size_t>(s - 1)][ni]) *
                    PrecReal::from_mpq(w, 200);
                vals[ni] = (vals[ni] + shift).rounded(256);
            }
            for (long n = 1; n <= ctx.prefix; ++n) {
                mpq_class bound = extension_bound(ctx.thresholds, p, n);
                if (!(upper_q(vals[static_cast<size_t>(n - 1)]) < bound))
                    throw Error(ErrorCode::ConditionViolated,
                                "transferred bound failed at n=" +
                                    std::to_string(n));
            }

            mpq_class settle_bound = pow2q(-p);
            long settle = first_settled_index(vals, settle_bound, ctx.prefix);
            settle = std::max(settle, inner_prev + 1);
            if (settle > ctx.prefix)
                throw Error(ErrorCode::BudgetExceeded,
                            "prefix too short: inner settle threshold for s=" +
                                std::to_string(s) + " of generation " +
                                std::to_string(p) +
                                " needs more terms than " +
                                std::to_string(ctx.prefix));
            inner_prev = settle;

            InnerStep step;
            step.s = s;
            step.index = new_index;
            step.partner_k = partner;
            step.target_delta = delta;
            {
                long digits = 64;
                long kd = static_cast<long>(
                    mpz_sizeinbase(partner.get_mpz_t(), 10));
                PrecReal v =
                    family.alpha(new_index, digits + kd).scaled(partner) -
                    family.alpha(anchor.index, digits + kd)
                        .scaled(anchor.multiplier);
                step.achieved = dist_to_int(v);
            }
            step.settle_threshold = settle;
            step.settle_margin =
                settled_margin(vals, settle_bound, settle, ctx.prefix);
            rec.steps.push_back(step);
        }

        // mu_{p+1} = nu_{p,2^p}
        mix.clear();
        mpq_class w_next = pow2q(-(p + 1));
        for (size_t i = 0; i < static_cast<size_t>(1L << (p + 1)); ++i)
            mix.emplace_back(i, w_next);
        vals = value_vector(ctx, mix);

        mpq_class add_bound = pow2q(-(p + 2)) + pow2q(-(p + 4));
        long next = first_settled_index(vals, add_bound, ctx.prefix);
        next = std::max(next, inner_prev + 1);
        if (next > ctx.prefix)
            throw Error(ErrorCode::BudgetExceeded,
                        "prefix too short: generation tail threshold for p=" +
                            std::to_string(p + 1) + " needs more terms than " +
                            std::to_string(ctx.prefix));
        rec.next_threshold = next;
        rec.next_margin = settled_margin(vals, add_bound, next, ctx.prefix);
        ctx.thresholds.push_back(next);
        tower.schedule.records.push_back(rec);
        tower.levels.push_back(level_of(p + 1));
    }
    tower.schedule.thresholds = ctx.thresholds;
    return tower;
}

std::vector<ConditionRecord> replay_conditions(const MeasureTower& tower,
                                               const RigiditySequence& seq,
                                               const AlphaFamily& family,
                                               long digit_boost) {
    std::vector<ConditionRecord> out;
    long prefix = static_cast<long>(seq.terms.size());
    const auto& thr = tower.schedule.thresholds;
    long p_max = static_cast<long>(tower.levels.size()) - 1;

    // fresh distance cache at boosted precision, keyed by (index, k, n)
    mpq_class rad_goal;
    {
        mpz_class den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10,
                      static_cast<unsigned long>(12 * digit_boost + 2));
        rad_goal = mpq_class(mpz_class(1), den);
    }
    std::map<std::pair<std::pair<long, std::string>, long>, PrecReal> cache;
    auto dist_of = [&](const Atom& atom, long n) {
        auto key = std::make_pair(
            std::make_pair(atom.index, atom.multiplier.get_str()), n);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        PrecReal d = scaled_dist(family, atom.index, atom.multiplier,
                                 seq.terms[static_cast<size_t>(n - 1)],
                                 rad_goal);
        cache.emplace(key, d);
        return d;
    };
    auto measure_upper = [&](const AtomicMeasure& mu, long n) {
        PrecReal acc;
        for (const auto& atom : mu.atoms) {
            acc = acc + dist_of(atom, n) * PrecReal::from_mpq(atom.weight, 220);
            acc = acc.rounded(300);
        }
        return acc.upper();
    };
    auto check_range = [&](const AtomicMeasure& mu, long from, long to,
                           const mpq_class& bound, const std::string& name,
                           long p, long detail) {
        ConditionRecord rec;
        rec.name = name;
        rec.p = p;
        rec.detail = detail;
        rec.from = from;
        rec.to = to;
        rec.bound = bound;
        mpq_class worst = 0;
        bool pass = true;
        for (long n = std::max(1L, from); n <= std::min(to, prefix); ++n) {
            mpq_class u = measure_upper(mu, n);
            worst = std::max(worst, u);
            pass = pass && (u < bound);
        }
        rec.worst = worst.get_d();
        rec.pass = pass;
        out.push_back(rec);
    };

    for (long p = 0; p <= p_max; ++p) {
        const AtomicMeasure& mu = tower.levels[static_cast<size_t>(p)];
        for (long j = 1; j <= p - 1; ++j)
            check_range(mu, thr[static_cast<size_t>(j)],
                        thr[static_cast<size_t>(j + 1)], pow2q(1 - j),
                        "block_decay", p, j);
        if (p <= static_cast<long>(thr.size()) - 1)
            check_range(mu, thr[static_cast<size_t>(p)], prefix,
                        pow2q(-(p + 1)) + pow2q(-(p + 3)), "generation_tail",
                        p, 0);
    }

    for (const auto& rec : tower.schedule.records) {
        long p = rec.from_generation;
        const AtomicMeasure& mu_p = tower.levels[static_cast<size_t>(p)];
        for (const auto& step : rec.steps) {
            AtomicMeasure nu = inner_measure(mu_p, rec.steps, step.s);
            for (long j = 1; j <= p - 1; ++j)
                check_range(nu, thr[static_cast<size_t>(j)],
                            thr[static_cast<size_t>(j + 1)], pow2q(1 - j),
                            "inner_block", p, step.s * 100 + j);
            check_range(nu, thr[static_cast<size_t>(p)], prefix, pow2q(1 - p),
                        "carry_tail", p, step.s);
            check_range(nu, step.settle_threshold, prefix, pow2q(-p),
                        "inner_settle", p, step.s);
        }
    }

    // cluster radii: every atom within eta_{p0} of its cluster root
    const AtomicMeasure& top = tower.levels.back();
    for (long p0 = 1; p0 < p_max; ++p0) {
        PrecReal eta = separation_radius(top, p0, family);
        mpq_class eta_lo = eta.lower();
        ConditionRecord rec;
        rec.name = "cluster_radius";
        rec.p = p_max;
        rec.detail = p0;
        rec.bound = eta_lo;
        rec.pass = true;
        mpq_class worst = 0;
        long block = 1L << p0;
        for (long i = 0; i < static_cast<long>(top.atoms.size()); ++i) {
            long r = i % block;
            if (i == r) continue;
            const Atom& a = top.atoms[static_cast<size_t>(i)];
            const Atom& root = top.atoms[static_cast<size_t>(r)];
            long digits =
                48 * digit_boost +
                static_cast<long>(
                    mpz_sizeinbase(a.multiplier.get_mpz_t(), 10)) +
                static_cast<long>(
                    mpz_sizeinbase(root.multiplier.get_mpz_t(), 10));
            PrecReal gap = family.alpha(a.index, digits).scaled(a.multiplier) -
                           family.alpha(root.index, digits)
                               .scaled(root.multiplier);
            mpq_class u = dist_to_int(gap).upper();
            worst = std::max(worst, u);
            rec.pass = rec.pass && (u < eta_lo);
        }
        rec.worst = worst.get_d();
        out.push_back(rec);
    }
    return out;
}

std::vector<IntervalMass> interval_masses(const AtomicMeasure& measure,
                                          long p0, const AlphaFamily& family) {
    if (p0 < 1 || (1L << p0) > static_cast<long>(measure.atoms.size()))
        throw Error(ErrorCode::ConfigError, "interval_masses: bad p0");
    long block = 1L << p0;
    PrecReal eta = separation_radius(measure, p0, family);
    mpq_class eta_lo = eta.lower(), eta_hi = eta.upper();

    // disjointness: pairwise center distance must exceed 2 * eta
    auto paired_digits = [](const Atom& x, const Atom& y) {
        return 64 +
               static_cast<long>(
                   mpz_sizeinbase(x.multiplier.get_mpz_t(), 10)) +
               static_cast<long>(
                   mpz_sizeinbase(y.multiplier.get_mpz_t(), 10));
    };
    for (long i = 0; i < block; ++i) {
        for (long j = i + 1; j < block; ++j) {
            const Atom& ai = measure.atoms[static_cast<size_t>(i)];
            const Atom& aj = measure.atoms[static_cast<size_t>(j)];
            long digits = paired_digits(ai, aj);
            PrecReal gap = family.alpha(ai.index, digits).scaled(ai.multiplier) -
                           family.alpha(aj.index, digits).scaled(aj.multiplier);
            if (!(dist_to_int(gap).lower() > 2 * eta_hi))
                throw Error(ErrorCode::ConditionViolated,
                            "intervals " + std::to_string(i + 1) + "," +
                                std::to_string(j + 1) + " not certified disjoint");
        }
    }

    std::vector<IntervalMass> out(static_cast<size_t>(block));
    for (long r = 0; r < block; ++r) {
        out[static_cast<size_t>(r)].r = r + 1;
        out[static_cast<size_t>(r)].center = atom_position(
            family, measure.atoms[static_cast<size_t>(r)], 40);
        out[static_cast<size_t>(r)].mass = 0;
    }
    for (long i = 0; i < static_cast<long>(measure.atoms.size()); ++i) {
        long r = i % block;
        const Atom& a = measure.atoms[static_cast<size_t>(i)];
        if (i != r) {
            const Atom& root = measure.atoms[static_cast<size_t>(r)];
            long digits = paired_digits(a, root);
            PrecReal gap = family.alpha(a.index, digits).scaled(a.multiplier) -
                           family.alpha(root.index, digits)
                               .scaled(root.multiplier);
            if (!(dist_to_int(gap).upper() < eta_lo))
                throw Error(ErrorCode::ConditionViolated,
                            "atom " + std::to_string(i + 1) +
                                " not certified inside its interval");
        }
        out[static_cast<size_t>(r)].mass += a.weight;
        out[static_cast<size_t>(r)].atom_count += 1;
    }
    for (auto& im : out) {
        if (im.mass != pow2q(-p0))
            throw Error(ErrorCode::ConditionViolated,
                        "interval mass is not exactly 2^-p0");
    }
    return out;
}

}  // namespace rigidity
