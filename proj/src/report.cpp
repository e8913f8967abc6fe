#include "rigidity/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rigidity/errors.hpp"

namespace rigidity {

using nlohmann::json;

void atomic_write(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    fs::path tmp = p;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error(ErrorCode::ConfigError, "cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, p);
}

void write_json(const std::string& path, const json& j) {
    atomic_write(path, j.dump(2) + "\n");
}

std::string sequence_csv(const RigiditySequence& seq, const AlphaFamily& family,
                         long k_max) {
    std::ostringstream os;
    os << "n,m,source,position,stage";
    for (long i = 1; i <= k_max; ++i) os << ",dist" << i;
    os << "\n";
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, 12);
    mpq_class rad_goal(mpz_class(1), den);
    for (size_t n = 0; n < seq.terms.size(); ++n) {
        const Provenance& pv = seq.prov[n];
        os << (n + 1) << "," << seq.terms[n] << "," << pv.source << ","
           << pv.position << "," << pv.stage;
        for (long i = 1; i <= k_max; ++i) {
            PrecReal d = certified_dist(
                family, i, mpz_class(static_cast<long>(seq.terms[n])), rad_goal);
            os << "," << d.rounded(64).to_string();
        }
        os << "\n";
    }
    return os.str();
}

json bases_json(const std::vector<BaseSequence>& bases, FamilyKind kind) {
    json out;
    out["family"] = family_kind_name(kind);
    json arr = json::array();
    for (const auto& base : bases) {
        json stages = json::array();
        for (const auto& s : base.stages) {
            json w = json::array();
            for (const auto& [r, m] : s.divisor_witnesses)
                w.push_back(json::array({r, m}));
            stages.push_back({{"stage", s.stage},
                              {"eps", rational_to_string(s.eps)},
                              {"window", json::array({s.window.lo, s.window.hi})},
                              {"first_position", s.first_position},
                              {"term_count", s.term_count},
                              {"divisor_witnesses", w}});
        }
        arr.push_back({{"excluded", base.excluded},
                       {"terms", base.terms},
                       {"term_stage", base.term_stage},
                       {"stages", stages}});
    }
    out["bases"] = arr;
    return out;
}

std::vector<BaseSequence> bases_from_json(const json& j,
                                          FamilyKind expected_kind) {
    if (family_kind_from_name(j.at("family").get<std::string>()) !=
        expected_kind)
        throw Error(ErrorCode::ConfigError,
                    "sequence artifacts were built with a different family");
    std::vector<BaseSequence> out;
    for (const auto& bj : j.at("bases")) {
        BaseSequence base;
        base.excluded = bj.at("excluded").get<long>();
        base.terms = bj.at("terms").get<std::vector<long long>>();
        base.term_stage = bj.at("term_stage").get<std::vector<long>>();
        for (const auto& sj : bj.at("stages")) {
            StageRecord rec;
            rec.stage = sj.at("stage").get<long>();
            rec.eps = rational_from_string(sj.at("eps").get<std::string>());
            rec.window = {sj.at("window")[0].get<long long>(),
                          sj.at("window")[1].get<long long>()};
            rec.first_position = sj.at("first_position").get<long>();
            rec.term_count = sj.at("term_count").get<long>();
            for (const auto& w : sj.at("divisor_witnesses"))
                rec.divisor_witnesses.emplace_back(w[0].get<long>(),
                                                   w[1].get<long long>());
            base.stages.push_back(rec);
        }
        out.push_back(std::move(base));
    }
    return out;
}

json measure_level_json(const AtomicMeasure& mu, const MeasureSchedule& schedule,
                        const AlphaFamily& family) {
    json atoms = json::array();
    for (const auto& a : mu.atoms) {
        atoms.push_back({{"i", a.index},
                         {"k", a.multiplier.get_str()},
                         {"position", atom_position(family, a, 30).rounded(110).to_string()},
                         {"weight", rational_to_string(a.weight)}});
    }
    json inner;
    for (const auto& rec : schedule.records) {
        json steps;
        for (const auto& st : rec.steps)
            steps[std::to_string(st.s)] = st.settle_threshold;
        inner[std::to_string(rec.from_generation)] = steps;
    }
    return json{{"p", mu.generation},
                {"atoms", atoms},
                {"schedule", {{"N", schedule.thresholds}, {"inner_N", inner}}}};
}

json schedule_json(const MeasureSchedule& schedule) {
    json recs = json::array();
    for (const auto& rec : schedule.records) {
        json steps = json::array();
        for (const auto& st : rec.steps) {
            steps.push_back({{"s", st.s},
                             {"index", st.index},
                             {"partner_k", st.partner_k.get_str()},
                             {"target_delta", rational_to_string(st.target_delta)},
                             {"achieved", st.achieved.rounded(96).to_string()},
                             {"settle_threshold", st.settle_threshold},
                             {"settle_margin", st.settle_margin}});
        }
        recs.push_back({{"from_generation", rec.from_generation},
                        {"steps", steps},
                        {"next_threshold", rec.next_threshold},
                        {"next_margin", rec.next_margin}});
    }
    return json{{"N", schedule.thresholds}, {"records", recs}};
}

MeasureTower tower_from_artifacts(const json& schedule,
                                  const std::vector<json>& levels) {
    MeasureTower tower;
    tower.schedule.thresholds = schedule.at("N").get<std::vector<long>>();
    for (const auto& rj : schedule.at("records")) {
        GenerationRecord rec;
        rec.from_generation = rj.at("from_generation").get<long>();
        rec.next_threshold = rj.at("next_threshold").get<long>();
        rec.next_margin = rj.at("next_margin").get<double>();
        for (const auto& sj : rj.at("steps")) {
            InnerStep st;
            st.s = sj.at("s").get<long>();
            st.index = sj.at("index").get<long>();
            st.partner_k = mpz_class(sj.at("partner_k").get<std::string>());
            st.target_delta =
                rational_from_string(sj.at("target_delta").get<std::string>());
            st.achieved = PrecReal::parse(sj.at("achieved").get<std::string>());
            st.settle_threshold = sj.at("settle_threshold").get<long>();
            st.settle_margin = sj.at("settle_margin").get<double>();
            rec.steps.push_back(st);
        }
        tower.schedule.records.push_back(rec);
    }
    for (const auto& lj : levels) {
        AtomicMeasure mu;
        mu.generation = lj.at("p").get<long>();
        for (const auto& aj : lj.at("atoms")) {
            Atom a;
            a.index = aj.at("i").get<long>();
            a.multiplier = mpz_class(aj.at("k").get<std::string>());
            a.weight = rational_from_string(aj.at("weight").get<std::string>());
            mu.atoms.push_back(a);
        }
        tower.levels.push_back(std::move(mu));
    }
    return tower;
}

json witness_cert_json(long l, const TrigPoly& poly,
                       const WitnessCertificate& cert) {
    return json{{"l", l},
                {"degree", poly.degree},
                {"grid", cert.grid},
                {"slope", cert.slope},
                {"exterior_margin", cert.exterior_margin},
                {"sup_margin", cert.sup_margin},
                {"verdict", cert.verdict.name()},
                {"violated_bound", cert.violated_bound},
                {"witness_point", cert.witness_point}};
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

}  // namespace

std::string svg_decay_plot(const std::vector<std::vector<double>>& series,
                           const std::vector<std::string>& labels,
                           const std::string& title) {
    const double W = 720, H = 420, ML = 60, MB = 40, MT = 36, MR = 16;
    size_t len = 0;
    double vmax = 0;
    for (const auto& s : series) {
        len = std::max(len, s.size());
        for (double v : s) vmax = std::max(vmax, v);
    }
    if (vmax <= 0) vmax = 1;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
       << "\" height=\"" << H << "\">\n";
    os << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\">" << title
       << "</text>\n";
    os << "<line x1=\"" << ML << "\" y1=\"" << H - MB << "\" x2=\"" << W - MR
       << "\" y2=\"" << H - MB << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << ML << "\" y1=\"" << MT << "\" x2=\"" << ML
       << "\" y2=\"" << H - MB << "\" stroke=\"black\"/>\n";
    const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c",
                            "#d62728", "#9467bd", "#8c564b"};
    for (size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        if (s.empty()) continue;
        os << "<polyline fill=\"none\" stroke=\"" << colors[si % 6]
           << "\" points=\"";
        for (size_t i = 0; i < s.size(); ++i) {
            double x = ML + (W - ML - MR) * (len > 1 ? double(i) / double(len - 1) : 0);
            double y = (H - MB) - (H - MB - MT) * (s[i] / vmax);
            os << fmt(x) << "," << fmt(y) << " ";
        }
        os << "\"/>\n";
        if (si < labels.size())
            os << "<text x=\"" << W - 150 << "\" y=\"" << MT + 16 * (si + 1)
               << "\" fill=\"" << colors[si % 6] << "\">" << labels[si]
               << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string svg_histogram(const std::vector<long>& counts,
                          const std::string& title) {
    const double W = 720, H = 360, ML = 50, MB = 30, MT = 36, MR = 16;
    long vmax = 1;
    for (long c : counts) vmax = std::max(vmax, c);
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
       << "\" height=\"" << H << "\">\n";
    os << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\">" << title
       << "</text>\n";
    double bw = (W - ML - MR) / std::max<size_t>(counts.size(), 1);
    for (size_t i = 0; i < counts.size(); ++i) {
        double h = (H - MB - MT) * double(counts[i]) / double(vmax);
        os << "<rect x=\"" << fmt(ML + bw * i) << "\" y=\""
           << fmt(H - MB - h) << "\" width=\"" << fmt(bw * 0.9)
           << "\" height=\"" << fmt(h) << "\" fill=\"#1f77b4\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string svg_bars(const std::vector<std::pair<std::string, long>>& bars,
                     const std::string& title) {
    const double W = 720, H = 360, ML = 50, MB = 50, MT = 36, MR = 16;
    long vmax = 1;
    for (const auto& [_, c] : bars) vmax = std::max(vmax, c);
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
       << "\" height=\"" << H << "\">\n";
    os << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\">" << title
       << "</text>\n";
    double bw = (W - ML - MR) / std::max<size_t>(bars.size(), 1);
    for (size_t i = 0; i < bars.size(); ++i) {
        double h = (H - MB - MT) * double(bars[i].second) / double(vmax);
        os << "<rect x=\"" << fmt(ML + bw * i) << "\" y=\""
           << fmt(H - MB - h) << "\" width=\"" << fmt(bw * 0.8)
           << "\" height=\"" << fmt(h) << "\" fill=\"#2ca02c\"/>\n";
        os << "<text x=\"" << fmt(ML + bw * i + bw * 0.4) << "\" y=\""
           << fmt(H - MB + 16) << "\" text-anchor=\"middle\">" << bars[i].first
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace rigidity
