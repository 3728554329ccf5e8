#include "grabucb/learner.hpp"

#include "grabucb/spd_solver.hpp"

#include <cmath>

namespace grabucb {

void HyperParams::validate() const {
    if (!(mu > 0.0)) throw std::invalid_argument("hyperparams: mu must be > 0");
    if (!(delta > 0.0) || !(delta < 1.0)) {
        throw std::invalid_argument("hyperparams: delta must be in (0, 1)");
    }
    if (noise_scale < 0.0) throw std::invalid_argument("hyperparams: R must be >= 0");
    if (!(coeff_norm_bound > 0.0)) throw std::invalid_argument("hyperparams: S must be > 0");
    if (coeff_count < 1) throw std::invalid_argument("hyperparams: K must be >= 1");
    if (action_budget < 1) throw std::invalid_argument("hyperparams: T0 must be >= 1");
    if (mask_size < 1) throw std::invalid_argument("hyperparams: Q must be >= 1");
    if (!(power_sum_d > 0.0)) throw std::invalid_argument("hyperparams: d must be > 0");
}

LearnerState init_learner(const HyperParams& hyper) {
    hyper.validate();
    const int k = hyper.coeff_count;
    return LearnerState{hyper.mu * Matrix::Identity(k, k), Vector::Zero(k), 0,
                        KernelCoefficients{Vector::Zero(k)}};
}

void ingest(LearnerState& state, const Matrix& z, const Vector& w, const HyperParams& hyper) {
    if (z.cols() != state.gram.rows()) {
        throw std::invalid_argument("ingest: feature column count differs from K");
    }
    if (z.rows() != w.size()) {
        throw std::invalid_argument("ingest: feature row count differs from signal length");
    }
    state.gram.noalias() += z.transpose() * z;
    state.gram = 0.5 * (state.gram + state.gram.transpose()).eval(); // keep exactly symmetric
    state.response.noalias() += z.transpose() * w;
    state.rounds += 1;
    SpdSolver solver(state.gram, hyper.mu);
    state.estimate.alpha = solver.solve(state.response);
}

double confidence_radius(const LearnerState& state, const HyperParams& hyper, RadiusMode mode) {
    hyper.validate();
    const double k = static_cast<double>(hyper.coeff_count);
    const double tail = 2.0 * std::log(1.0 / hyper.delta);
    double arg = 0.0;
    switch (mode) {
    case RadiusMode::ExactLogDet:
        arg = gram_log_det(state, hyper) - k * std::log(hyper.mu) + tail;
        break;
    case RadiusMode::LemmaBound:
        arg = lemma1_log_bound(hyper, state.rounds) - k * std::log(hyper.mu) + tail;
        break;
    }
    if (arg < 0.0) {
        if (arg < -1e-9) {
            throw std::runtime_error("confidence_radius: negative square-root argument");
        }
        arg = 0.0; // roundoff at t = 0
    }
    return hyper.noise_scale * std::sqrt(arg) + std::sqrt(hyper.mu) * hyper.coeff_norm_bound;
}

double lemma1_log_bound(const HyperParams& hyper, int rounds) {
    const double base = hyper.mu + static_cast<double>(rounds) * hyper.power_sum_d *
                                       static_cast<double>(hyper.mask_size) *
                                       static_cast<double>(hyper.action_budget);
    return static_cast<double>(hyper.coeff_count) * std::log(base);
}

double lemma1_bound(const HyperParams& hyper, int rounds) {
    return std::exp(lemma1_log_bound(hyper, rounds));
}

double regret_bound(const HyperParams& hyper, int horizon, double radius_at_horizon) {
    if (horizon < 1) throw std::invalid_argument("regret_bound: horizon must be >= 1");
    const double inflow = static_cast<double>(hyper.mask_size) *
                          static_cast<double>(hyper.action_budget) * hyper.power_sum_d /
                          hyper.mu;
    return 2.0 * (radius_at_horizon + 1.0) *
           std::sqrt(2.0 * static_cast<double>(hyper.coeff_count) *
                     static_cast<double>(horizon) * std::log1p(inflow));
}

double gram_log_det(const LearnerState& state, const HyperParams& hyper) {
    return SpdSolver(state.gram, hyper.mu).log_det();
}

double gram_norm(const LearnerState& state, const Vector& v) {
    const double q = v.dot(state.gram * v);
    return q > 0.0 ? std::sqrt(q) : 0.0;
}

} // namespace grabucb
