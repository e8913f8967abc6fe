#ifndef RIGIDITY_REPORT_HPP
#define RIGIDITY_REPORT_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "rigidity/config.hpp"
#include "rigidity/fejer.hpp"
#include "rigidity/measure.hpp"
#include "rigidity/sequence.hpp"

namespace rigidity {

// All writes are atomic (temp file + rename) and byte-deterministic for
// identical inputs.
void atomic_write(const std::string& path, const std::string& content);
void write_json(const std::string& path, const nlohmann::json& j);

std::string sequence_csv(const RigiditySequence& seq, const AlphaFamily& family,
                         long k_max);

nlohmann::json bases_json(const std::vector<BaseSequence>& bases,
                          FamilyKind kind);
std::vector<BaseSequence> bases_from_json(const nlohmann::json& j,
                                          FamilyKind expected_kind);

nlohmann::json measure_level_json(const AtomicMeasure& mu,
                                  const MeasureSchedule& schedule,
                                  const AlphaFamily& family);
nlohmann::json schedule_json(const MeasureSchedule& schedule);
MeasureTower tower_from_artifacts(const nlohmann::json& schedule,
                                  const std::vector<nlohmann::json>& levels);

nlohmann::json witness_cert_json(long l, const TrigPoly& poly,
                                 const WitnessCertificate& cert);

// Minimal deterministic SVG plots.
std::string svg_decay_plot(const std::vector<std::vector<double>>& series,
                           const std::vector<std::string>& labels,
                           const std::string& title);
std::string svg_histogram(const std::vector<long>& counts,
                          const std::string& title);
std::string svg_bars(const std::vector<std::pair<std::string, long>>& bars,
                     const std::string& title);

}  // namespace rigidity

#endif
