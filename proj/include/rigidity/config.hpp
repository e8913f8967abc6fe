#ifndef RIGIDITY_CONFIG_HPP
#define RIGIDITY_CONFIG_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "rigidity/alpha_family.hpp"

namespace rigidity {

// Build parameters for one interleaved sequence.
struct SequenceProfile {
    long stages = 4;
    std::vector<long> excluded = {1, 2, 3, 4};  // one base per entry
    long length = 66;
    long long initial_window = 64;
    long witness_rmax = 6;
    long long window_budget = 1LL << 34;

    long bases() const { return static_cast<long>(excluded.size()); }
};

struct RunConfig {
    FamilyKind family = FamilyKind::SqrtSquarefree;
    SequenceProfile sequence;
    // The measure run drives every atom toward the first two family members,
    // so its sequence keeps indices 1 and 2 approximated by every term.
    SequenceProfile measure_sequence{5, {3, 4}, 56, 16, 6, 1LL << 34};
    long p_max = 5;

    std::vector<long> witness_l = {2, 3, 4, 5, 6, 7, 8};
    long grid_factor = 8;  // grid hint = factor * L * l

    std::vector<long> coverage_l = {5, 10, 20};
    long coverage_length = 200;  // extended build driving the coverage check
    long k_max = 6;
    long sum_index = 3;          // i of the partial norm-sum check
    mpq_class sum_eps = mpq_class(1, 10);
    long stabilization_k = 3;
    mpq_class stabilization_eps = mpq_class(1, 8);

    long digit_cap = 300;
    int threads = 0;  // 0 = hardware
    std::string out_dir = "out";
};

nlohmann::json config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config_file(const std::string& path);
void validate(const RunConfig& cfg);

mpq_class rational_from_string(const std::string& s);
std::string rational_to_string(const mpq_class& q);

}  // namespace rigidity

#endif
