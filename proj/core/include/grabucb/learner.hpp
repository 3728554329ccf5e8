#pragma once

#include "grabucb/process.hpp"

namespace grabucb {

/// Inputs of the confidence and regret bounds.
///   mu     ridge regularizer, > 0
///   delta  confidence level, in (0, 1)
///   noise_scale        R, sub-Gaussian scale of the reward noise
///   coeff_norm_bound   S, bound on ||alpha_*||_2
///   coeff_count        K
///   action_budget      T0, sparsity budget of actions
///   mask_size          Q, number of reward nodes
///   power_sum_d        d, spectral power sum of the graph
struct HyperParams {
    double mu = 0.01;
    double delta = 0.01;
    double noise_scale = 1.0;
    double coeff_norm_bound = 1.0;
    int coeff_count = 1;
    int action_budget = 1;
    int mask_size = 1;
    double power_sum_d = 1.0;

    void validate() const;
};

/// Online ridge-regression state: the Gram accumulator V_t = mu I + sum
/// Z^T Z, the response accumulator sum Z^T w, the round counter and the
/// current estimate solving V alpha = response.
struct LearnerState {
    Matrix gram;
    Vector response;
    int rounds = 0;
    KernelCoefficients estimate;
};

enum class RadiusMode {
    ExactLogDet, ///< radius from log det(V_t) itself
    LemmaBound,  ///< radius from the closed-form determinant bound
};

LearnerState init_learner(const HyperParams& hyper);

/// Folds one observation (features Z, masked signal w) into the state and
/// re-solves for the estimate. The solve goes through a factorization of
/// V, never an explicit inverse.
void ingest(LearnerState& state, const Matrix& z, const Vector& w, const HyperParams& hyper);

/// Confidence-ellipsoid radius c_t.
///
/// ExactLogDet:  R sqrt(log det V_t - K log mu + 2 log(1/delta)) + sqrt(mu) S
/// LemmaBound:   R sqrt(K log((mu + t d Q T0)/mu) + 2 log(1/delta)) + sqrt(mu) S
///
/// The lemma form dominates the exact form whenever the determinant bound
/// holds. Throws if a square-root argument comes out negative (corrupted
/// state).
double confidence_radius(const LearnerState& state, const HyperParams& hyper, RadiusMode mode);

/// Closed-form determinant bound (mu + t d Q T0)^K after t rounds ...
double lemma1_bound(const HyperParams& hyper, int rounds);
/// ... and its logarithm, safe from overflow.
double lemma1_log_bound(const HyperParams& hyper, int rounds);

/// Cumulative pseudo-regret bound at the given horizon:
/// 2 (c_T + 1) sqrt(2 K T log(1 + Q T0 d / mu)).
double regret_bound(const HyperParams& hyper, int horizon, double radius_at_horizon);

/// log det of the Gram matrix (equilibrated factorization under the hood).
double gram_log_det(const LearnerState& state, const HyperParams& hyper);

/// ||v||_V = sqrt(v^T V v); the ellipsoid norm used in coverage checks.
double gram_norm(const LearnerState& state, const Vector& v);

} // namespace grabucb
