#pragma once

#include "grabucb/armsel.hpp"
#include "grabucb/config.hpp"

#include <functional>
#include <string>
#include <vector>

namespace grabucb::bench {

/// Environment plus the hyperparameters resolved against it (auto R/S,
/// measured Q and d). One per (config, seed).
struct Instance {
    Environment env;
    HyperParams hyper;
};

/// Builds the seed's environment with purpose-split streams: the graph,
/// mask and noise each consume their own stream derived from the run seed
/// (the noise stream honors an explicit noise.seed override).
Instance build_instance(const ExperimentConfig& cfg, std::uint64_t seed);

enum class OracleMethod { Enumerate, Walk };

struct OracleArm {
    ActionSignal arm;
    double reward = 0.0;
    bool exact = false; ///< true when found by exhaustive enumeration
};

/// Best fixed arm under the true kernel: maximizes the mean reward over
/// binary signals with exactly T0 ones. The scalar mean reward is linear
/// in h, so both methods score nodes by the kernel applied to the mask
/// indicator; Enumerate proves the optimum exhaustively (throws
/// EnumerationBudgetError over budget), Walk runs the vertex walk with
/// c = 0 on that objective.
OracleArm oracle_best_arm(const Environment& env, int action_budget, OracleMethod method,
                          std::uint64_t enumeration_budget = kDefaultEnumerationBudget);

/// Enumerate when affordable, otherwise walk (flagged non-exact).
OracleArm oracle_best_arm_auto(const Environment& env, int action_budget,
                               std::uint64_t enumeration_budget);

struct RoundRow {
    int t = 0;
    std::vector<int> support;
    double mean_reward = 0.0;
    double realized_reward = 0.0; ///< 1^T w
    double radius = 0.0;          ///< c_t used at selection (0 during AAL exploration)
    double inst_regret = 0.0;     ///< oracle reward minus mean reward
    int iterations = 0;
};

struct RunRecord {
    std::uint64_t seed = 0;
    std::vector<RoundRow> rounds;
    OracleArm oracle;
    HyperParams hyper;
    double final_radius_exact = 0.0; ///< exact-logdet c_T after the last ingest
    double final_radius_lemma = 0.0;
    double wall_ms = 0.0;
};

/// The full optimistic loop: select with the current (alpha_hat, c_t, V_t),
/// observe, ingest, repeat for cfg.horizon rounds.
RunRecord run_grab_ucb(const ExperimentConfig& cfg, std::uint64_t seed);

/// Act-after-learning baseline: explore_rounds uniformly random size-T0
/// arms, one ridge fit, then the fixed greedy arm for the remaining rounds.
RunRecord run_aal(const ExperimentConfig& cfg, std::uint64_t seed, int explore_rounds);

/// Prefix sums of (oracle reward - mean reward).
std::vector<double> cumulative_regret(const RunRecord& record);

/// Normalized test error of a ridge fit from random actions:
/// mean over the test set of ||y_i - Dhat h_i||^2 / ||y_i||^2, with y_i the
/// noiseless resultant signal and Dhat the fitted polynomial kernel.
/// Training observations are masked and noisy; the error is evaluated on
/// the full signal.
double error_study(const ExperimentConfig& cfg, std::uint64_t seed, int train_count,
                   int test_count);

/// One parameter setting of a study sweep, aggregated over cfg.seeds.
struct StudyPoint {
    double parameter = 0.0;
    double mean_error = 0.0;
    double stderr_error = 0.0;
};

/// Sweeps cfg.study_sweep over cfg.study_values (ba_m, rbf_threshold,
/// sparsity as T0/N, noise as sigma_e^2, or tau), running error_study per
/// seed at each value.
std::vector<StudyPoint> run_error_study(const ExperimentConfig& cfg);

struct SolverBenchRow {
    int nodes = 0;
    std::string method;
    double time_ms = 0.0;
    double reward = 0.0;
    bool skipped = false; ///< enumeration over budget
};

/// Times the vertex walk against exhaustive enumeration on identical
/// frozen objectives (median of 3 timed repetitions, warm-up discarded);
/// rewards are evaluated under the true kernel.
std::vector<SolverBenchRow> solver_bench(const ExperimentConfig& cfg);

/// Runs fn(seed) for every seed on a pool of cfg.threads workers; results
/// come back in seed order regardless of scheduling.
std::vector<RunRecord> run_seeds(const ExperimentConfig& cfg,
                                 const std::function<RunRecord(std::uint64_t)>& fn);

} // namespace grabucb::bench
