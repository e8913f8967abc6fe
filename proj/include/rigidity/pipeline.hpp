#ifndef RIGIDITY_PIPELINE_HPP
#define RIGIDITY_PIPELINE_HPP

#include "rigidity/config.hpp"
#include "rigidity/measure.hpp"
#include "rigidity/sequence.hpp"

namespace rigidity {

struct SequenceArtifacts {
    std::vector<BaseSequence> bases;
    RigiditySequence seq;
};

// Build every base of the profile (re-building with a larger final stage
// when the interleave demands more positions) and interleave them.
SequenceArtifacts build_sequence_artifacts(const AlphaFamily& family,
                                           const SequenceProfile& profile,
                                           int threads,
                                           long length_override = 0);

// CLI entry points. Each writes its artifacts under cfg.out_dir and reuses
// artifacts already on disk where meaningful (verify re-reads the serialized
// sequence and measure files rather than trusting in-process state).
void cmd_build_seq(const RunConfig& cfg);
void cmd_build_measure(const RunConfig& cfg);
void cmd_witness(const RunConfig& cfg);
void cmd_verify(const RunConfig& cfg);
void cmd_report(const RunConfig& cfg);

}  // namespace rigidity

#endif
