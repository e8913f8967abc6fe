#include "rigidity/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rigidity/errors.hpp"
#include "rigidity/fejer.hpp"
#include "rigidity/report.hpp"
#include "rigidity/verify.hpp"

namespace rigidity {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

bool exists(const std::string& path) { return fs::exists(path); }

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot read " + path);
    json j;
    in >> j;
    return j;
}

}  // namespace

SequenceArtifacts build_sequence_artifacts(const AlphaFamily& family,
                                           const SequenceProfile& profile,
                                           int threads, long length_override) {
    long length = length_override > 0 ? length_override : profile.length;
    auto demand = interleave_demand(profile.bases(), length);
    SequenceArtifacts art;
    for (size_t b = 0; b < profile.excluded.size(); ++b) {
        BaseBuildOptions opts;
        opts.num_stages = profile.stages;
        opts.witness_rmax = profile.witness_rmax;
        opts.window_budget = profile.window_budget;
        opts.initial_hi = profile.initial_window;
        opts.threads = threads;
        BaseSequence base = build_base_sequence(family, profile.excluded[b], opts);
        long stage = std::min<long>(static_cast<long>(b) + 1, profile.stages);
        long shift = base.first_position_of_stage(stage) - 1;
        long need = shift + demand[b];
        if (static_cast<long>(base.terms.size()) < need) {
            opts.min_total_terms = need;
            base = build_base_sequence(family, profile.excluded[b], opts);
        }
        art.bases.push_back(std::move(base));
    }
    art.seq = interleave(art.bases, length);
    return art;
}

namespace {

SequenceArtifacts load_or_build_sequence(const RunConfig& cfg,
                                         const AlphaFamily& family,
                                         const SequenceProfile& profile,
                                         const std::string& bases_file,
                                         const std::string& csv_file) {
    std::string bpath = join(cfg.out_dir, bases_file);
    if (exists(bpath)) {
        SequenceArtifacts art;
        art.bases = bases_from_json(read_json(bpath), cfg.family);
        art.seq = interleave(art.bases, profile.length);
        return art;
    }
    SequenceArtifacts art =
        build_sequence_artifacts(family, profile, cfg.threads);
    write_json(bpath, bases_json(art.bases, cfg.family));
    atomic_write(join(cfg.out_dir, csv_file),
                 sequence_csv(art.seq, family, cfg.k_max));
    return art;
}

struct MeasureArtifacts {
    SequenceArtifacts seq;
    MeasureTower tower;
};

MeasureArtifacts load_or_build_measure(const RunConfig& cfg,
                                       const AlphaFamily& family) {
    MeasureArtifacts art;
    art.seq = load_or_build_sequence(cfg, family, cfg.measure_sequence,
                                     "measure_bases.json",
                                     "measure_sequence.csv");
    std::string spath = join(cfg.out_dir, "measure_schedule.json");
    if (exists(spath)) {
        std::vector<json> levels;
        for (long p = 0;; ++p) {
            std::string lp =
                join(cfg.out_dir, "measure_p" + std::to_string(p) + ".json");
            if (!exists(lp)) break;
            levels.push_back(read_json(lp));
        }
        art.tower = tower_from_artifacts(read_json(spath), levels);
        return art;
    }
    TowerBuildOptions topt;
    topt.p_max = cfg.p_max;
    topt.threads = cfg.threads;
    art.tower = build_tower(art.seq.seq, family, topt);
    for (const auto& mu : art.tower.levels) {
        write_json(join(cfg.out_dir,
                        "measure_p" + std::to_string(mu.generation) + ".json"),
                   measure_level_json(mu, art.tower.schedule, family));
    }
    write_json(spath, schedule_json(art.tower.schedule));
    return art;
}

TrigPoly witness_from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot read " + path);
    std::string line;
    std::getline(in, line);  // header
    TrigPoly poly;
    std::vector<double> a, b;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        long k;
        double ak, bk;
        if (std::sscanf(line.c_str(), "%ld,%lg,%lg", &k, &ak, &bk) != 3)
            throw Error(ErrorCode::ConfigError, "bad witness row: " + line);
        a.push_back(ak);
        b.push_back(bk);
    }
    poly.degree = static_cast<long>(a.size()) + 1;
    poly.cos_coef = std::move(a);
    poly.sin_coef = std::move(b);
    return poly;
}

void echo_config(const RunConfig& cfg) {
    json j = config_to_json(cfg);
    // execution details that cannot affect any artifact byte
    j.erase("out");
    j.erase("threads");
    write_json(join(cfg.out_dir, "config.json"), j);
}

}  // namespace

void cmd_build_seq(const RunConfig& cfg) {
    echo_config(cfg);
    AlphaFamily family(cfg.family, cfg.digit_cap);
    SequenceArtifacts art =
        build_sequence_artifacts(family, cfg.sequence, cfg.threads);
    write_json(join(cfg.out_dir, "bases.json"),
               bases_json(art.bases, cfg.family));
    atomic_write(join(cfg.out_dir, "sequence.csv"),
                 sequence_csv(art.seq, family, cfg.k_max));
}

void cmd_build_measure(const RunConfig& cfg) {
    echo_config(cfg);
    AlphaFamily family(cfg.family, cfg.digit_cap);
    load_or_build_measure(cfg, family);
}

void cmd_witness(const RunConfig& cfg) {
    echo_config(cfg);
    for (long l : cfg.witness_l) {
        WitnessCertificate cert;
        TrigPoly poly = build_witness(l, 0, &cert);
        atomic_write(join(cfg.out_dir, "witness_l" + std::to_string(l) + ".csv"),
                     witness_csv(poly));
        write_json(
            join(cfg.out_dir, "witness_l" + std::to_string(l) + "_cert.json"),
            witness_cert_json(l, poly, cert));
    }
}

void cmd_verify(const RunConfig& cfg) {
    echo_config(cfg);
    AlphaFamily family(cfg.family, cfg.digit_cap);
    json records = json::array();

    // main sequence checks, re-read from the serialized artifacts
    SequenceArtifacts main_art = load_or_build_sequence(
        cfg, family, cfg.sequence, "bases.json", "sequence.csv");
    {
        StabilizationResult st =
            stabilization_index(main_art.seq, main_art.bases, family,
                                cfg.stabilization_eps, cfg.stabilization_k);
        records.push_back(
            {{"check", "stabilization"},
             {"parameters",
              {{"k", cfg.stabilization_k},
               {"eps", rational_to_string(cfg.stabilization_eps)}}},
             {"outcome", st.stabilized ? "PASS" : "NOT_YET"},
             {"witness", st.index0},
             {"margin",
              {{"analytic_candidate", st.analytic_candidate}}}});

        NormSumResult ns = norm_sum_settle_index(main_art.seq, family,
                                                 cfg.sum_index, cfg.sum_eps);
        records.push_back(
            {{"check", "norm_sum_settle"},
             {"parameters",
              {{"i", cfg.sum_index}, {"eps", rational_to_string(cfg.sum_eps)}}},
             {"outcome", ns.settled ? "PASS" : "NOT_YET"},
             {"witness", ns.index0},
             {"margin", ns.worst_tail_sum}});

        DivisibilityProfile prof =
            divisibility_profile(main_art.seq, cfg.k_max);
        for (long k = 2; k <= cfg.k_max; ++k) {
            const auto& per = prof.per_super_stage[static_cast<size_t>(k - 2)];
            long min_count = per.empty() ? 0 : *std::min_element(per.begin(),
                                                                 per.end());
            records.push_back(
                {{"check", "divisibility"},
                 {"parameters", {{"k", k}}},
                 {"outcome", min_count >= 1 ? "PASS" : "FAIL"},
                 {"witness", per},
                 {"margin", min_count}});
        }

        mpq_class delta = 2 * stage_eps(cfg.sequence.stages);
        for (const auto& base : main_art.bases) {
            for (long t = 1; t <= cfg.sequence.stages; ++t) {
                long probe = base.original_index(t);
                ConfinementResult conf =
                    confinement_index(base, probe, delta, family);
                records.push_back(
                    {{"check", "confinement"},
                     {"parameters",
                      {{"excluded", base.excluded},
                       {"alpha_index", probe},
                       {"delta", rational_to_string(delta)}}},
                     {"outcome", conf.confined ? "PASS" : "FAIL"},
                     {"witness", conf.position},
                     {"margin",
                      conf.witness ? json(*conf.witness) : json(nullptr)}});
            }
        }
    }

    // density evidence on the extended build
    {
        SequenceArtifacts ext = build_sequence_artifacts(
            family, cfg.sequence, cfg.threads, cfg.coverage_length);
        for (long l : cfg.coverage_l) {
            CoverageRecord cov =
                coverage(refinable_pi(), "frac(pi)", ext.seq, l,
                         cfg.coverage_length, cfg.digit_cap);
            records.push_back({{"check", "coverage"},
                               {"parameters", {{"theta", "frac(pi)"}, {"l", l}}},
                               {"outcome", cov.full() ? "FULL" : "NOT_YET"},
                               {"witness", cov.first_full},
                               {"margin", cov.undecided}});
        }
    }

    // measure tower conditions, re-read from the serialized artifacts
    {
        MeasureArtifacts mart = load_or_build_measure(cfg, family);
        auto conds = replay_conditions(mart.tower, mart.seq.seq, family, 2);
        for (const auto& c : conds) {
            records.push_back(
                {{"check", "measure_condition"},
                 {"parameters",
                  {{"name", c.name},
                   {"p", c.p},
                   {"detail", c.detail},
                   {"from", c.from},
                   {"to", c.to},
                   {"bound", rational_to_string(c.bound)}}},
                 {"outcome", c.pass ? "PASS" : "FAIL"},
                 {"witness", nullptr},
                 {"margin", c.bound.get_d() - c.worst}});
        }
        for (long p0 = 1; p0 <= cfg.p_max; ++p0) {
            auto masses = interval_masses(mart.tower.levels.back(), p0, family);
            bool ok = true;
            for (const auto& im : masses) ok = ok && im.mass == mpq_class(1, 1L << p0);
            records.push_back({{"check", "interval_masses"},
                               {"parameters", {{"p0", p0}}},
                               {"outcome", ok ? "PASS" : "FAIL"},
                               {"witness", static_cast<long>(masses.size())},
                               {"margin", nullptr}});
        }
    }

    // witness certificates, re-read from the serialized coefficients
    for (long l : cfg.witness_l) {
        std::string csv = join(cfg.out_dir, "witness_l" + std::to_string(l) + ".csv");
        TrigPoly poly;
        if (exists(csv)) {
            poly = witness_from_csv(csv);
        } else {
            WitnessCertificate built;
            poly = build_witness(l, 0, &built);
            atomic_write(csv, witness_csv(poly));
            write_json(join(cfg.out_dir,
                            "witness_l" + std::to_string(l) + "_cert.json"),
                       witness_cert_json(l, poly, built));
        }
        double slope = 0;  // recertify at the builder's grid choice
        for (long k = 1; k < poly.degree; ++k) {
            size_t i = static_cast<size_t>(k - 1);
            slope += double(k) * std::hypot(poly.cos_coef[i], poly.sin_coef[i]);
        }
        long grid = std::max<long>(
            {cfg.grid_factor * poly.degree * l, 8 * poly.degree * l,
             static_cast<long>(std::ceil(8.0 * 6.2832 * slope))});
        WitnessCertificate cert = verify_witness(poly, l, grid);
        records.push_back({{"check", "witness"},
                           {"parameters", {{"l", l}, {"L", poly.degree}}},
                           {"outcome", cert.verdict.name()},
                           {"witness", cert.violated_bound},
                           {"margin",
                            std::min(cert.exterior_margin, cert.sup_margin)}});
    }

    write_json(join(cfg.out_dir, "verification_report.json"),
               json{{"records", records}});
}

void cmd_report(const RunConfig& cfg) {
    echo_config(cfg);
    AlphaFamily family(cfg.family, cfg.digit_cap);

    if (!exists(join(cfg.out_dir, "bases.json"))) cmd_build_seq(cfg);
    if (!exists(join(cfg.out_dir, "measure_schedule.json")))
        cmd_build_measure(cfg);
    if (!exists(join(cfg.out_dir, "witness_l" +
                                      std::to_string(cfg.witness_l.front()) +
                                      ".csv")))
        cmd_witness(cfg);
    if (!exists(join(cfg.out_dir, "verification_report.json"))) cmd_verify(cfg);

    MeasureArtifacts mart = load_or_build_measure(cfg, family);
    long prefix = static_cast<long>(mart.seq.seq.terms.size());

    std::vector<std::vector<double>> series;
    std::vector<std::string> labels;
    for (const auto& mu : mart.tower.levels) {
        std::vector<double> vals;
        for (long n = 1; n <= prefix; ++n)
            vals.push_back(
                mu_eval(mu, n, mart.seq.seq, family).midpoint().get_d());
        series.push_back(std::move(vals));
        labels.push_back("p=" + std::to_string(mu.generation));
    }
    atomic_write(join(cfg.out_dir, "plots/mu_decay.svg"),
                 svg_decay_plot(series, labels,
                                "integral of dist(m_n theta) per generation"));

    SequenceArtifacts ext = build_sequence_artifacts(
        family, cfg.sequence, cfg.threads, cfg.coverage_length);
    {
        const long bins = 40;
        std::vector<long> counts(bins, 0);
        Refinable pi = refinable_pi();
        for (long n = 1; n <= cfg.coverage_length; ++n) {
            PrecReal x = pi(24).scaled(mpz_class(
                static_cast<long>(ext.seq.terms[static_cast<size_t>(n - 1)])));
            mpq_class f = frac_exact(x.midpoint());
            long b = static_cast<long>(mpz_class(f.get_num() * bins /
                                                 f.get_den())
                                           .get_si());
            if (b >= 0 && b < bins) ++counts[static_cast<size_t>(b)];
        }
        atomic_write(join(cfg.out_dir, "plots/orbit_hist.svg"),
                     svg_histogram(counts, "frac(m_n pi) histogram"));
    }
    {
        DivisibilityProfile prof = divisibility_profile(mart.seq.seq, cfg.k_max);
        std::vector<std::pair<std::string, long>> bars;
        for (long k = 2; k <= cfg.k_max; ++k)
            bars.emplace_back(
                "k=" + std::to_string(k),
                static_cast<long>(
                    prof.indices[static_cast<size_t>(k - 2)].size()));
        atomic_write(join(cfg.out_dir, "plots/divisibility.svg"),
                     svg_bars(bars, "terms not divisible by k"));
    }

    json summary;
    summary["config"] = config_to_json(cfg);
    summary["config"].erase("out");
    summary["config"].erase("threads");
    summary["files"] = json::array();
    for (const auto& entry : fs::directory_iterator(cfg.out_dir)) {
        if (entry.is_regular_file())
            summary["files"].push_back(entry.path().filename().string());
    }
    std::sort(summary["files"].begin(), summary["files"].end());
    summary["measure_thresholds"] = mart.tower.schedule.thresholds;
    write_json(join(cfg.out_dir, "report.json"), summary);
}

}  // namespace rigidity
