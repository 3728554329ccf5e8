#pragma once

#include "grabucb/harness.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace grabucb::bench {

/// Doubles are printed with max_digits10 so identical runs write identical
/// bytes and values round-trip exactly.
std::string csv_double(double v);

/// Regret summary across seeds: t, mean_regret, stderr_regret, then one
/// regret_seed_<seed> column per seed.
void write_regret_csv(std::ostream& os, const std::vector<RunRecord>& records);

/// Per-round trace of one run: t, support (semicolon-joined), mean_reward,
/// realized_reward, radius, inst_regret.
void write_trace_csv(std::ostream& os, const RunRecord& record);

/// Error-study sweep: parameter, mean_error, stderr_error.
void write_study_csv(std::ostream& os, const std::vector<StudyPoint>& points);

/// Solver benchmark: n, method, time_ms, reward, status.
void write_solver_csv(std::ostream& os, const std::vector<SolverBenchRow>& rows);

/// Learner checkpoints of one run: t, alpha_hat_*, c_exact_logdet,
/// c_lemma_bound, logdet_v, regret_bound.
struct BoundsRow {
    int t = 0;
    Vector alpha_hat;
    double radius_exact = 0.0;
    double radius_lemma = 0.0;
    double gram_logdet = 0.0;
    double regret_bound_at_t = 0.0;
};
std::vector<BoundsRow> bounds_trajectory(const ExperimentConfig& cfg, std::uint64_t seed);
void write_bounds_csv(std::ostream& os, const std::vector<BoundsRow>& rows);

/// Per-node view of an arm on its environment: node, action, mask,
/// resultant (the noiseless signal the arm produces).
void write_node_values_csv(std::ostream& os, const Environment& env, const ActionSignal& arm);

using PhaseTimings = std::vector<std::pair<std::string, double>>;

/// JSON sidecar with the full config echo, seed list, library version,
/// host info, per-phase timings and the files the command wrote.
void write_metadata_json(std::ostream& os, const ExperimentConfig& cfg,
                         const std::string& command, const PhaseTimings& timings_ms,
                         const std::vector<std::string>& outputs);

} // namespace grabucb::bench
