#include "rigidity/config.hpp"

#include <fstream>

#include "rigidity/errors.hpp"

namespace rigidity {

using nlohmann::json;

mpq_class rational_from_string(const std::string& s) {
    mpq_class q;
    if (q.set_str(s, 10) != 0)
        throw Error(ErrorCode::ConfigError, "bad rational: " + s);
    q.canonicalize();
    return q;
}

std::string rational_to_string(const mpq_class& q) { return q.get_str(); }

namespace {

json profile_to_json(const SequenceProfile& p) {
    return json{{"stages", p.stages},
                {"excluded", p.excluded},
                {"length", p.length},
                {"initial_window", p.initial_window},
                {"witness_rmax", p.witness_rmax},
                {"window_budget", p.window_budget}};
}

SequenceProfile profile_from_json(const json& j, SequenceProfile defaults) {
    SequenceProfile p = defaults;
    if (j.contains("stages")) p.stages = j.at("stages").get<long>();
    if (j.contains("excluded"))
        p.excluded = j.at("excluded").get<std::vector<long>>();
    if (j.contains("length")) p.length = j.at("length").get<long>();
    if (j.contains("initial_window"))
        p.initial_window = j.at("initial_window").get<long long>();
    if (j.contains("witness_rmax"))
        p.witness_rmax = j.at("witness_rmax").get<long>();
    if (j.contains("window_budget"))
        p.window_budget = j.at("window_budget").get<long long>();
    return p;
}

}  // namespace

json config_to_json(const RunConfig& cfg) {
    return json{
        {"family", {{"kind", family_kind_name(cfg.family)}}},
        {"sequence", profile_to_json(cfg.sequence)},
        {"measure",
         {{"p_max", cfg.p_max},
          {"sequence", profile_to_json(cfg.measure_sequence)}}},
        {"witness", {{"l_values", cfg.witness_l}, {"grid_factor", cfg.grid_factor}}},
        {"verify",
         {{"coverage_l", cfg.coverage_l},
          {"coverage_length", cfg.coverage_length},
          {"k_max", cfg.k_max},
          {"sum_index", cfg.sum_index},
          {"sum_eps", rational_to_string(cfg.sum_eps)},
          {"stabilization_k", cfg.stabilization_k},
          {"stabilization_eps", rational_to_string(cfg.stabilization_eps)}}},
        {"digit_cap", cfg.digit_cap},
        {"threads", cfg.threads},
        {"out", cfg.out_dir}};
}

RunConfig config_from_json(const json& j) {
    RunConfig cfg;
    try {
        if (j.contains("family"))
            cfg.family =
                family_kind_from_name(j.at("family").at("kind").get<std::string>());
        if (j.contains("sequence"))
            cfg.sequence = profile_from_json(j.at("sequence"), cfg.sequence);
        if (j.contains("measure")) {
            const json& m = j.at("measure");
            if (m.contains("p_max")) cfg.p_max = m.at("p_max").get<long>();
            if (m.contains("sequence"))
                cfg.measure_sequence =
                    profile_from_json(m.at("sequence"), cfg.measure_sequence);
        }
        if (j.contains("witness")) {
            const json& w = j.at("witness");
            if (w.contains("l_values"))
                cfg.witness_l = w.at("l_values").get<std::vector<long>>();
            if (w.contains("grid_factor"))
                cfg.grid_factor = w.at("grid_factor").get<long>();
        }
        if (j.contains("verify")) {
            const json& v = j.at("verify");
            if (v.contains("coverage_l"))
                cfg.coverage_l = v.at("coverage_l").get<std::vector<long>>();
            if (v.contains("coverage_length"))
                cfg.coverage_length = v.at("coverage_length").get<long>();
            if (v.contains("k_max")) cfg.k_max = v.at("k_max").get<long>();
            if (v.contains("sum_index"))
                cfg.sum_index = v.at("sum_index").get<long>();
            if (v.contains("sum_eps"))
                cfg.sum_eps =
                    rational_from_string(v.at("sum_eps").get<std::string>());
            if (v.contains("stabilization_k"))
                cfg.stabilization_k = v.at("stabilization_k").get<long>();
            if (v.contains("stabilization_eps"))
                cfg.stabilization_eps = rational_from_string(
                    v.at("stabilization_eps").get<std::string>());
        }
        if (j.contains("digit_cap")) cfg.digit_cap = j.at("digit_cap").get<long>();
        if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
        if (j.contains("out")) cfg.out_dir = j.at("out").get<std::string>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigError,
                    std::string("malformed configuration: ") + e.what());
    }
    validate(cfg);
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::ConfigError, "cannot read config: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigError,
                    std::string("config is not valid JSON: ") + e.what());
    }
    return config_from_json(j);
}

void validate(const RunConfig& cfg) {
    auto check_profile = [](const SequenceProfile& p, const char* name) {
        if (p.excluded.empty())
            throw Error(ErrorCode::ConfigError,
                        std::string(name) + ": need at least one base");
        for (long e : p.excluded)
            if (e < 1)
                throw Error(ErrorCode::ConfigError,
                            std::string(name) + ": excluded indices are >= 1");
        if (p.stages < 1 || p.length < 1 || p.initial_window < 1 ||
            p.window_budget < p.initial_window)
            throw Error(ErrorCode::ConfigError,
                        std::string(name) + ": bad budgets");
    };
    check_profile(cfg.sequence, "sequence");
    check_profile(cfg.measure_sequence, "measure.sequence");
    if (cfg.p_max < 1)
        throw Error(ErrorCode::ConfigError, "p_max must be >= 1");
    for (long l : cfg.witness_l)
        if (l < 2) throw Error(ErrorCode::ConfigError, "witness l must be >= 2");
    for (long l : cfg.coverage_l)
        if (l < 2) throw Error(ErrorCode::ConfigError, "coverage l must be >= 2");
    if (cfg.k_max < 2)
        throw Error(ErrorCode::ConfigError, "k_max must be >= 2");
    if (cfg.sum_index < 1 || cfg.stabilization_k < 1)
        throw Error(ErrorCode::ConfigError, "check indices must be >= 1");
    if (cfg.sum_eps <= 0 || cfg.stabilization_eps <= 0)
        throw Error(ErrorCode::ConfigError, "check tolerances must be positive");
    if (cfg.digit_cap < 32)
        throw Error(ErrorCode::ConfigError, "digit cap below 32 is unusable");
    if (cfg.threads < 0)
        throw Error(ErrorCode::ConfigError, "threads must be >= 0");
    if (cfg.out_dir.empty())
        throw Error(ErrorCode::ConfigError, "output directory is empty");
}

}  // namespace rigidity
