// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "rigidity/fejer.hpp"
#include "rigidity/pipeline.hpp"
#include "rigidity/report.hpp"
#include "rigidity/verify.hpp"
#include "../support/oracles.hpp"
#include "pinned.hpp"

using namespace rigidity;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report_line(int criterion, bool pass, double seconds,
                 const std::string& detail) {
    std::printf("criterion %d: %s (%.1fs) %s\n", criterion,
                pass ? "PASS" : "FAIL", seconds, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

void run(int criterion, const std::function<bool(std::string&)>& body) {
    std::string detail;
    auto t0 = Clock::now();
    bool pass = false;
    try {
        pass = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    double dt = std::chrono::duration<double>(Clock::now() - t0).count();
    report_line(criterion, pass, dt, detail);
}

// shared artifacts across criteria
RunConfig default_config() {
    RunConfig cfg;
    cfg.threads = 0;
    return cfg;
}

}  // namespace

// 1. exact norm algebra on 10^4 rationals
static bool norm_algebra(std::string& detail) {
    std::mt19937_64 rng(1234);
    std::uniform_int_distribution<long> num(-2000000000L, 2000000000L);
    std::uniform_int_distribution<long> den(1, 2000000000L);
    for (int i = 0; i < 10000; ++i) {
        mpq_class x(num(rng), den(rng));
        x.canonicalize();
        mpq_class d = dist_to_int_exact(x);
        if (!(d >= 0 && d <= mpq_class(1, 2))) return false;
        if (dist_to_int_exact(-x) != d) return false;
        if (dist_to_int_exact(x + 123) != d) return false;
        if (dist_to_int_exact(x - 7) != d) return false;
    }
    std::mt19937_64 rng2(77);
    std::uniform_int_distribution<long> man(-4000000, 4000000);
    for (int i = 0; i < 2000; ++i) {
        PrecReal x = PrecReal::ball(man(rng2), 5, -21);
        PrecReal y = PrecReal::ball(man(rng2), 7, -23);
        PrecReal both = dist_to_int(x + y);
        if (!(both.lower() <=
              dist_to_int(x).upper() + dist_to_int(y).upper()))
            return false;
    }
    detail = "10000 rationals, exact; triangle inequality within radii";
    return true;
}

// 2. chunked parallel scan equals the doubled-precision reference loop
static bool oracle_equivalence(std::string& detail) {
    AlphaFamily fam(FamilyKind::SqrtSquarefree);
    HitList fast =
        simultaneous_hits(fam, {1, 2}, mpq_class(1, 20), {1, 100000}, 0);
    auto ref = oracles::reference_hits({2, 3}, mpq_class(1, 20), 1, 100000, 48);
    if (fast.hits != ref) {
        detail = "hit sets differ";
        return false;
    }
    HitList small = simultaneous_hits(fam, {1, 2}, mpq_class(1, 10), {1, 100});
    bool has41 = std::count(small.hits.begin(), small.hits.end(), 41) == 1;
    std::ostringstream os;
    os << fast.hits.size() << " joint hits in [1,1e5] at eps=1/20; includes 41";
    detail = os.str();
    return has41;
}

// 3. Fejer witnesses for l = 2..8 with pinned orders
static bool witness_bounds(std::string& detail) {
    std::ostringstream os;
    bool ok = true;
    for (long l = 2; l <= 8; ++l) {
        WitnessCertificate cert;
        TrigPoly poly = build_witness(l, 0, &cert);
        ok = ok && cert.verdict.is_true() && cert.exterior_margin > 0 &&
             cert.sup_margin > 0;
        auto it = pinned::witness_order.find(l);
        if (it == pinned::witness_order.end() || it->second != poly.degree) {
            os << " L(" << l << ")=" << poly.degree << "!=pinned";
            ok = false;
        } else {
            os << " L(" << l << ")=" << poly.degree;
        }
    }
    detail = os.str();
    return ok;
}

// 4. default sequence build: certificates, stabilization, divisor witnesses,
//    enumeration order
static bool sequence_build(std::string& detail) {
    RunConfig cfg = default_config();
    AlphaFamily fam(cfg.family, cfg.digit_cap);
    SequenceArtifacts art =
        build_sequence_artifacts(fam, cfg.sequence, cfg.threads);
    if (static_cast<long>(art.seq.terms.size()) < 64) {
        detail = "fewer than 64 interleaved terms";
        return false;
    }

    // (a) every stage certificate replays at doubled precision
    AlphaFamily replay(cfg.family, cfg.digit_cap);
    for (const auto& base : art.bases) {
        for (size_t i = 0; i < base.terms.size(); ++i) {
            long stage = base.term_stage[i];
            mpq_class eps = stage_eps(stage);
            for (long t = 1; t <= stage; ++t) {
                PrecReal d = certified_dist(
                    replay, base.original_index(t),
                    mpz_class(static_cast<long>(base.terms[i])),
                    eps / (1 << 20));
                if (!cert_less(d, eps).is_true()) {
                    detail = "stage certificate failed on replay";
                    return false;
                }
            }
        }
    }

    // (b) stabilization at k = 3, eps = 1/8
    StabilizationResult st =
        stabilization_index(art.seq, art.bases, fam, mpq_class(1, 8), 3);
    if (!st.stabilized) {
        detail = "prefix did not stabilize";
        return false;
    }
    for (size_t n = static_cast<size_t>(st.index0); n < art.seq.terms.size();
         ++n) {
        if (st.bad_counts[n] > 1) {
            detail = "more than one bad index beyond the reported bound";
            return false;
        }
    }

    // (c) a divisor-avoidance witness inside every complete super-stage
    DivisibilityProfile prof = divisibility_profile(art.seq, 6);
    for (long k = 2; k <= 6; ++k) {
        const auto& per = prof.per_super_stage[static_cast<size_t>(k - 2)];
        for (size_t stage = 0; stage < per.size(); ++stage) {
            if (per[stage] < 1) {
                detail = "super-stage " + std::to_string(stage + 1) +
                         " lacks a k=" + std::to_string(k) + " witness";
                return false;
            }
        }
    }

    // (d) the first ten provenance pairs follow the anti-diagonal order
    std::vector<std::pair<long, long>> expect = {
        {1, 1}, {1, 2}, {2, 1}, {1, 3}, {2, 2},
        {3, 1}, {1, 4}, {2, 3}, {3, 2}, {4, 1}};
    for (size_t i = 0; i < expect.size(); ++i) {
        if (art.seq.prov[i].source != expect[i].first ||
            art.seq.prov[i].position != expect[i].second) {
            detail = "provenance order differs at position " + std::to_string(i);
            return false;
        }
    }
    std::ostringstream os;
    os << art.seq.terms.size() << " terms, N0=" << st.index0
       << ", super-stages=" << prof.super_stages;
    detail = os.str();
    return true;
}

// 5. partial norm sums settle below 1/2 + 1/10
static bool norm_sum(std::string& detail) {
    RunConfig cfg = default_config();
    AlphaFamily fam(cfg.family, cfg.digit_cap);
    SequenceArtifacts art =
        build_sequence_artifacts(fam, cfg.sequence, cfg.threads);
    NormSumResult ns = norm_sum_settle_index(art.seq, fam, 3, mpq_class(1, 10));
    std::ostringstream os;
    os << "n0=" << ns.index0 << ", worst tail sum=" << ns.worst_tail_sum;
    detail = os.str();
    return ns.settled && ns.worst_tail_sum < 0.6;
}

// 6. the measure tower to p = 5 with every condition replayed
static bool measure_tower(std::string& detail) {
    RunConfig cfg = default_config();
    AlphaFamily fam(cfg.family, cfg.digit_cap);
    SequenceArtifacts art =
        build_sequence_artifacts(fam, cfg.measure_sequence, cfg.threads);
    TowerBuildOptions topt;
    topt.p_max = cfg.p_max;
    topt.threads = cfg.threads;
    MeasureTower tower = build_tower(art.seq, fam, topt);
    if (tower.levels.back().atoms.size() != 32) {
        detail = "expected 32 atoms at p=5";
        return false;
    }

    auto conditions = replay_conditions(tower, art.seq, fam, 2);
    for (const auto& c : conditions) {
        if (!c.pass) {
            detail = "condition " + c.name + " (p=" + std::to_string(c.p) +
                     ", detail=" + std::to_string(c.detail) + ") failed";
            return false;
        }
    }

    for (long p0 = 1; p0 <= cfg.p_max; ++p0) {
        auto masses = interval_masses(tower.levels.back(), p0, fam);
        for (const auto& im : masses) {
            if (im.mass != mpq_class(1, 1L << p0)) {
                detail = "interval mass mismatch at p0=" + std::to_string(p0);
                return false;
            }
        }
    }

    // perturbation identity at every inner step on sampled prefix indices
    for (const auto& rec : tower.schedule.records) {
        const AtomicMeasure& mu_p =
            tower.levels[static_cast<size_t>(rec.from_generation)];
        mpq_class w(1, 1L << (rec.from_generation + 1));
        for (const auto& stp : rec.steps) {
            AtomicMeasure prev = inner_measure(mu_p, rec.steps, stp.s - 1);
            AtomicMeasure cur = inner_measure(mu_p, rec.steps, stp.s);
            for (long n : {1L, stp.settle_threshold,
                           static_cast<long>(art.seq.terms.size())}) {
                PrecReal lhs = mu_eval(cur, n, art.seq, fam) -
                               mu_eval(prev, n, art.seq, fam);
                long long m = art.seq.terms[static_cast<size_t>(n - 1)];
                const Atom& anchor = mu_p.atoms[static_cast<size_t>(stp.s - 1)];
                PrecReal rhs =
                    (certified_dist(fam, stp.index,
                                    stp.partner_k * static_cast<long>(m),
                                    mpq_class(1, 1000000000)) -
                     certified_dist(fam, anchor.index,
                                    anchor.multiplier * static_cast<long>(m),
                                    mpq_class(1, 1000000000))) *
                    PrecReal::from_mpq(w, 200);
                if (lhs.upper() < rhs.lower() || lhs.lower() > rhs.upper()) {
                    detail = "perturbation identity failed at s=" +
                             std::to_string(stp.s);
                    return false;
                }
            }
        }
    }

    // certified tail maxima decrease strictly from p = 1 on; the one-atom
    // start measures only the first direction and is reported, not compared
    long prefix = static_cast<long>(art.seq.terms.size());
    std::vector<double> tail_max;
    for (long p = 1; p <= cfg.p_max; ++p) {
        long from = tower.schedule.thresholds[static_cast<size_t>(p)];
        mpq_class worst = 0;
        for (long n = std::max(1L, from); n <= prefix; ++n) {
            mpq_class u =
                mu_eval(tower.levels[static_cast<size_t>(p)], n, art.seq, fam)
                    .upper();
            worst = std::max(worst, u);
        }
        tail_max.push_back(worst.get_d());
    }
    for (size_t i = 1; i < tail_max.size(); ++i) {
        if (!(tail_max[i] < tail_max[i - 1])) {
            detail = "tail maxima do not decrease strictly";
            return false;
        }
    }
    std::ostringstream os;
    os << "N=(";
    for (long t : tower.schedule.thresholds) os << t << " ";
    os << "), tail max:";
    for (double v : tail_max) {
        char buf[32];
        std::snprintf(buf, sizeof buf, " %.4f", v);
        os << buf;
    }
    detail = os.str();
    return true;
}

// 7. density evidence and confinement: the two halves of the dichotomy
static bool density_dichotomy(std::string& detail) {
    RunConfig cfg = default_config();
    AlphaFamily fam(cfg.family, cfg.digit_cap);
    SequenceArtifacts ext = build_sequence_artifacts(
        fam, cfg.sequence, cfg.threads, cfg.coverage_length);
    CoverageRecord cov = coverage(refinable_pi(), "frac(pi)", ext.seq, 20,
                                  cfg.coverage_length, cfg.digit_cap);
    std::ostringstream os;
    os << "coverage full at " << cov.first_full << " (pinned "
       << pinned::coverage_full_at << "), undecided=" << cov.undecided;
    if (!cov.full() || cov.first_full != pinned::coverage_full_at) {
        detail = os.str();
        return false;
    }

    SequenceArtifacts art =
        build_sequence_artifacts(fam, cfg.sequence, cfg.threads);
    const BaseSequence& base1 = art.bases[0];  // excludes alpha_1
    mpq_class delta = 2 * stage_eps(cfg.sequence.stages);
    ConfinementResult conf =
        confinement_index(base1, base1.original_index(1), delta, fam);
    os << "; confinement at " << conf.position;
    detail = os.str();
    return conf.confined &&
           conf.position <= base1.first_position_of_stage(cfg.sequence.stages);
}

// 8. two end-to-end runs produce byte-identical trees
static bool reproducibility(std::string& detail) {
    RunConfig cfg = default_config();
    cfg.sequence.length = 40;
    cfg.sequence.stages = 3;
    cfg.measure_sequence.length = 40;
    cfg.measure_sequence.stages = 4;
    cfg.p_max = 3;
    cfg.witness_l = {2, 3};
    cfg.coverage_length = 60;
    cfg.coverage_l = {5};

    fs::path root = fs::temp_directory_path() / "rigidity_acceptance";
    fs::remove_all(root);
    std::vector<std::string> dirs = {(root / "run1").string(),
                                     (root / "run2").string()};
    for (const auto& dir : dirs) {
        RunConfig run = cfg;
        run.out_dir = dir;
        cmd_report(run);
    }
    std::vector<fs::path> rel;
    for (auto& entry : fs::recursive_directory_iterator(dirs[0]))
        if (entry.is_regular_file())
            rel.push_back(fs::relative(entry.path(), dirs[0]));
    std::sort(rel.begin(), rel.end());
    long files = 0;
    for (const auto& r : rel) {
        std::ifstream a(fs::path(dirs[0]) / r, std::ios::binary);
        std::ifstream b(fs::path(dirs[1]) / r, std::ios::binary);
        if (!a || !b) {
            detail = "missing file " + r.string();
            return false;
        }
        std::string sa((std::istreambuf_iterator<char>(a)),
                       std::istreambuf_iterator<char>());
        std::string sb((std::istreambuf_iterator<char>(b)),
                       std::istreambuf_iterator<char>());
        if (sa != sb) {
            detail = "differs: " + r.string();
            return false;
        }
        ++files;
    }
    fs::remove_all(root);
    detail = std::to_string(files) + " files byte-identical";
    return files > 0;
}

int main() {
    run(1, norm_algebra);
    run(2, oracle_equivalence);
    run(3, witness_bounds);
    run(4, sequence_build);
    run(5, norm_sum);
    run(6, measure_tower);
    run(7, density_dichotomy);
    run(8, reproducibility);
    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all acceptance criteria passed\n");
    return 0;
}
