#pragma once

#include "grabucb/learner.hpp"
#include "grabucb/spd_solver.hpp"

#include <cstdint>
#include <optional>

namespace grabucb {

/// Thrown when an exhaustive enumeration would visit more supports than the
/// configured budget. Callers fall back to the vertex walk.
struct EnumerationBudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultEnumerationBudget = 2'000'000;

/// Number of size-k subsets of n elements, saturating at 2^63.
std::uint64_t combination_count(int n, int k);

/// Frozen arm-selection objective
///
///   J(h) = xbar(h) . alpha_hat + c sqrt(xbar(h)^T V^{-1} xbar(h)),
///
/// where xbar(h) = sum_n h_n abar_n and abar_n is the aggregated feature of
/// the unit signal at node n. J is convex in h, so maximizers over the
/// sparse box are vertices; the per-node features and the factorization of
/// V are cached at construction.
class UcbObjective {
public:
    /// eigenvalue_floor is a valid lower bound on V's spectrum (the ridge
    /// mu when V comes from a learner).
    static UcbObjective build(KernelCoefficients estimate, double bonus_scale, Matrix gram,
                              const DictionaryBasis& basis, const Mask& mask,
                              double eigenvalue_floor);

    int nodes() const { return static_cast<int>(unit_features_.cols()); }
    int coeff_count() const { return static_cast<int>(unit_features_.rows()); }
    double bonus_scale() const { return bonus_scale_; }
    const KernelCoefficients& estimate() const { return estimate_; }
    /// K-by-N matrix whose column n is abar_n.
    const Matrix& unit_features() const { return unit_features_; }
    /// V^{-1} applied to every unit feature column.
    const Matrix& solved_unit_features() const { return solved_features_; }
    const SpdSolver& gram_solver() const { return solver_; }

    Vector aggregate(const Vector& h) const { return unit_features_ * h; }

    double value(const Vector& h) const { return value_of_aggregate(aggregate(h)); }
    double value_of_aggregate(const Vector& xbar) const;

    struct Terms {
        double linear = 0.0;
        double bonus = 0.0;
    };
    Terms terms(const Vector& h) const;

    /// dJ/dh_n; at xbar = 0 the bonus contribution is the one-sided
    /// directional derivative c sqrt(abar_n^T V^{-1} abar_n).
    double partial_derivative(const Vector& h, int node) const;

    /// All N partial derivatives at once.
    Vector gradient(const Vector& h) const;
    Vector gradient_of_aggregate(const Vector& xbar) const;

    /// Per-node derivative at the unit signal u_n (the walk's seeding
    /// scores): abar_n . alpha_hat + c ||abar_n||_{V^-1}.
    const Vector& unit_scores() const { return unit_scores_; }

private:
    KernelCoefficients estimate_;
    double bonus_scale_ = 0.0;
    Matrix gram_;
    Matrix unit_features_;  // K x N
    Matrix solved_features_; // V^{-1} * unit_features
    Vector linear_scores_;   // unit_features^T alpha_hat
    Vector node_bonus_;      // c ||abar_n||_{V^-1}
    Vector unit_scores_;
    SpdSolver solver_;
};

struct ArmSelectConfig {
    int action_budget = 1; ///< T0, exact support size of returned arms
    int max_iter = 100;
};

/// Per-selection diagnostics for trace CSVs.
struct SelectionTrace {
    int iterations = 0;
    double objective = 0.0;
    double linear_term = 0.0;
    double bonus_term = 0.0;
    bool exact = false;
    /// Objective values along the walk's accepted path, seed point first.
    std::vector<double> path_values;
};

/// Vertex walk over the size-T0 supports: seed at the T0 best unit scores,
/// then repeatedly swap the worst basic node against the best non-basic one
/// (by current gradient) while the objective strictly increases. Ties break
/// toward the lowest node index. Always returns a binary arm with exactly
/// T0 ones.
ActionSignal grab_arm_light(const UcbObjective& obj, const ArmSelectConfig& cfg,
                            SelectionTrace* trace = nullptr);

/// Exhaustive maximizer of J over binary arms with exactly T0 ones
/// (lexicographically smallest support on ties). With exact_size = false,
/// supports of any size up to T0 are scanned instead. Throws
/// EnumerationBudgetError when the support count exceeds the budget.
ActionSignal exact_select(const UcbObjective& obj, int action_budget,
                          std::uint64_t enumeration_budget = kDefaultEnumerationBudget,
                          SelectionTrace* trace = nullptr, bool exact_size = true);

struct UcbSelectOptions {
    ArmSelectConfig walk;
    RadiusMode radius_mode = RadiusMode::LemmaBound;
    bool use_confidence = true; ///< false reproduces the c_t = 0 ablation
    bool prefer_exact = false;  ///< enumerate instead of walking when affordable
    std::uint64_t enumeration_budget = kDefaultEnumerationBudget;
};

/// One optimistic selection step: builds the objective from the learner's
/// (alpha_hat, c_t, V_t) and maximizes it.
ActionSignal ucb_select(const LearnerState& state, const HyperParams& hyper,
                        const DictionaryBasis& basis, const Mask& mask,
                        const UcbSelectOptions& options, SelectionTrace* trace = nullptr);

} // namespace grabucb
