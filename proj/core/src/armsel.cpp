#include "grabucb/armsel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace grabucb {

std::uint64_t combination_count(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    constexpr std::uint64_t cap = std::uint64_t{1} << 63;
    unsigned __int128 result = 1;
    for (int i = 1; i <= k; ++i) {
        result = result * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
        if (result >= cap) return cap;
    }
    return static_cast<std::uint64_t>(result);
}

UcbObjective UcbObjective::build(KernelCoefficients estimate, double bonus_scale, Matrix gram,
                                 const DictionaryBasis& basis, const Mask& mask,
                                 double eigenvalue_floor) {
    const int n = basis.nodes();
    const int k = basis.degree_count();
    if (mask.size() != n) {
        throw std::invalid_argument("UcbObjective: mask size differs from node count");
    }
    if (estimate.size() != k || gram.rows() != k || gram.cols() != k) {
        throw std::invalid_argument("UcbObjective: estimate/gram dimensions differ from K");
    }
    if (bonus_scale < 0.0) {
        throw std::invalid_argument("UcbObjective: bonus scale must be nonnegative");
    }
    UcbObjective obj;
    obj.estimate_ = std::move(estimate);
    obj.bonus_scale_ = bonus_scale;
    obj.gram_ = std::move(gram);
    // abar_n stacks 1^T M L^k e_n over k, i.e. row k of the feature cache
    // is L^k applied to the mask indicator.
    obj.unit_features_.resize(k, n);
    const Vector mask_vec = mask.indicator();
    for (int kk = 0; kk < k; ++kk) {
        obj.unit_features_.row(kk) =
            (basis.powers[static_cast<std::size_t>(kk)] * mask_vec).transpose();
    }
    obj.solver_.factor(obj.gram_, eigenvalue_floor);
    obj.solved_features_ = obj.solver_.solve(obj.unit_features_);
    obj.linear_scores_ = obj.unit_features_.transpose() * obj.estimate_.alpha;
    obj.node_bonus_.resize(n);
    for (int i = 0; i < n; ++i) {
        const double q = obj.unit_features_.col(i).dot(obj.solved_features_.col(i));
        obj.node_bonus_(i) = bonus_scale * std::sqrt(q > 0.0 ? q : 0.0);
    }
    obj.unit_scores_ = obj.linear_scores_ + obj.node_bonus_;
    return obj;
}

double UcbObjective::value_of_aggregate(const Vector& xbar) const {
    double value = xbar.dot(estimate_.alpha);
    if (bonus_scale_ > 0.0) {
        value += bonus_scale_ * std::sqrt(solver_.quad_form(xbar));
    }
    return value;
}

UcbObjective::Terms UcbObjective::terms(const Vector& h) const {
    const Vector xbar = aggregate(h);
    Terms t;
    t.linear = xbar.dot(estimate_.alpha);
    t.bonus = bonus_scale_ > 0.0 ? bonus_scale_ * std::sqrt(solver_.quad_form(xbar)) : 0.0;
    return t;
}

double UcbObjective::partial_derivative(const Vector& h, int node) const {
    if (node < 0 || node >= nodes()) {
        throw std::out_of_range("partial_derivative: node index out of range");
    }
    return gradient(h)(node);
}

Vector UcbObjective::gradient(const Vector& h) const {
    return gradient_of_aggregate(aggregate(h));
}

Vector UcbObjective::gradient_of_aggregate(const Vector& xbar) const {
    if (bonus_scale_ == 0.0) return linear_scores_;
    const double q = solver_.quad_form(xbar);
    if (q <= 0.0) {
        // directional derivative away from xbar = 0
        return linear_scores_ + node_bonus_;
    }
    const Vector solved = solver_.solve(xbar);
    return linear_scores_ +
           (bonus_scale_ / std::sqrt(q)) * (unit_features_.transpose() * solved);
}

namespace {

// indices of the k largest scores, ties toward the lower index
std::vector<int> top_k_indices(const Vector& scores, int k) {
    std::vector<int> order(static_cast<std::size_t>(scores.size()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return scores(a) > scores(b); });
    order.resize(static_cast<std::size_t>(k));
    std::sort(order.begin(), order.end());
    return order;
}

Vector aggregate_of_support(const UcbObjective& obj, const std::vector<int>& support) {
    Vector xbar = Vector::Zero(obj.coeff_count());
    for (int n : support) xbar += obj.unit_features().col(n);
    return xbar;
}

} // namespace

ActionSignal grab_arm_light(const UcbObjective& obj, const ArmSelectConfig& cfg,
                            SelectionTrace* trace) {
    const int n = obj.nodes();
    if (cfg.action_budget < 1 || cfg.action_budget > n) {
        throw std::invalid_argument("grab_arm_light: need 1 <= T0 <= N");
    }
    if (cfg.max_iter < 1) {
        throw std::invalid_argument("grab_arm_light: max_iter must be >= 1");
    }
    const int t0 = cfg.action_budget;

    std::vector<int> support = top_k_indices(obj.unit_scores(), t0);
    Vector xbar = aggregate_of_support(obj, support);
    double current = obj.value_of_aggregate(xbar);
    int iterations = 0;
    if (trace) {
        trace->path_values.clear();
        trace->path_values.push_back(current);
    }

    if (t0 < n) {
        std::vector<std::uint8_t> basic(static_cast<std::size_t>(n), 0);
        for (int s : support) basic[static_cast<std::size_t>(s)] = 1;
        std::set<std::vector<int>> visited;
        visited.insert(support);
        std::vector<int> best_support = support;
        double best_value = current;

        while (iterations < cfg.max_iter) {
            ++iterations;
            const Vector grad = obj.gradient_of_aggregate(xbar);
            int in = -1, out = -1;
            double in_score = -std::numeric_limits<double>::infinity();
            double out_score = std::numeric_limits<double>::infinity();
            for (int i = 0; i < n; ++i) {
                if (basic[static_cast<std::size_t>(i)]) {
                    if (grad(i) < out_score) {
                        out_score = grad(i);
                        out = i;
                    }
                } else if (grad(i) > in_score) {
                    in_score = grad(i);
                    in = i;
                }
            }
            std::vector<int> candidate = support;
            candidate.erase(std::find(candidate.begin(), candidate.end(), out));
            candidate.insert(std::upper_bound(candidate.begin(), candidate.end(), in), in);
            const Vector candidate_xbar = aggregate_of_support(obj, candidate);
            const double candidate_value = obj.value_of_aggregate(candidate_xbar);
            if (candidate_value <= current) break; // pre-swap point is the answer
            support = std::move(candidate);
            xbar = candidate_xbar;
            current = candidate_value;
            if (trace) trace->path_values.push_back(current);
            basic[static_cast<std::size_t>(out)] = 0;
            basic[static_cast<std::size_t>(in)] = 1;
            if (current > best_value) {
                best_value = current;
                best_support = support;
            }
            if (!visited.insert(support).second) {
                // cycling on an exactly tied objective; keep the best seen
                support = best_support;
                xbar = aggregate_of_support(obj, support);
                current = best_value;
                break;
            }
        }
    }

    ActionSignal arm = ActionSignal::from_support(n, support);
    if (trace) {
        const UcbObjective::Terms terms = obj.terms(arm.values);
        trace->iterations = iterations;
        trace->objective = current;
        trace->linear_term = terms.linear;
        trace->bonus_term = terms.bonus;
        trace->exact = false;
    }
    return arm;
}

ActionSignal exact_select(const UcbObjective& obj, int action_budget,
                          std::uint64_t enumeration_budget, SelectionTrace* trace,
                          bool exact_size) {
    const int n = obj.nodes();
    if (action_budget < 1 || action_budget > n) {
        throw std::invalid_argument("exact_select: need 1 <= T0 <= N");
    }
    std::uint64_t total = exact_size ? combination_count(n, action_budget) : 0;
    if (!exact_size) {
        for (int k = 0; k <= action_budget; ++k) {
            total += combination_count(n, k);
            if (total > enumeration_budget) break;
        }
    }
    if (total > enumeration_budget) {
        throw EnumerationBudgetError("exact_select: " + std::to_string(total) +
                                     " supports exceed the enumeration budget of " +
                                     std::to_string(enumeration_budget));
    }

    const int k_dim = obj.coeff_count();
    const Matrix& features = obj.unit_features();
    const Matrix& solved = obj.solved_unit_features();
    const double c = obj.bonus_scale();
    const Vector& alpha = obj.estimate().alpha;

    std::vector<int> best_support;
    double best_value = -std::numeric_limits<double>::infinity();
    std::vector<int> current;
    current.reserve(static_cast<std::size_t>(action_budget));
    Vector xbar = Vector::Zero(k_dim);
    Vector vsolved = Vector::Zero(k_dim); // V^{-1} xbar, kept incrementally

    auto evaluate = [&]() {
        double value = xbar.dot(alpha);
        if (c > 0.0) {
            const double q = xbar.dot(vsolved);
            value += c * std::sqrt(q > 0.0 ? q : 0.0);
        }
        if (value > best_value) {
            best_value = value;
            best_support = current;
        }
    };

    auto recurse = [&](auto&& self, int next) -> void {
        if (static_cast<int>(current.size()) == action_budget) {
            evaluate();
            return;
        }
        if (!exact_size) evaluate();
        const int remaining = action_budget - static_cast<int>(current.size());
        for (int i = next; i <= n - (exact_size ? remaining : 1); ++i) {
            current.push_back(i);
            xbar += features.col(i);
            vsolved += solved.col(i);
            self(self, i + 1);
            current.pop_back();
            xbar -= features.col(i);
            vsolved -= solved.col(i);
        }
    };
    recurse(recurse, 0);

    ActionSignal arm = ActionSignal::from_support(n, best_support);
    if (trace) {
        const UcbObjective::Terms terms = obj.terms(arm.values);
        trace->iterations = static_cast<int>(std::min<std::uint64_t>(
            total, static_cast<std::uint64_t>(std::numeric_limits<int>::max())));
        trace->objective = best_value;
        trace->linear_term = terms.linear;
        trace->bonus_term = terms.bonus;
        trace->exact = true;
    }
    return arm;
}

ActionSignal ucb_select(const LearnerState& state, const HyperParams& hyper,
                        const DictionaryBasis& basis, const Mask& mask,
                        const UcbSelectOptions& options, SelectionTrace* trace) {
    const double radius = options.use_confidence
                              ? confidence_radius(state, hyper, options.radius_mode)
                              : 0.0;
    const UcbObjective obj = UcbObjective::build(state.estimate, radius, state.gram, basis,
                                                 mask, hyper.mu);
    if (options.prefer_exact &&
        combination_count(obj.nodes(), options.walk.action_budget) <=
            options.enumeration_budget) {
        return exact_select(obj, options.walk.action_budget, options.enumeration_budget,
                            trace);
    }
    return grab_arm_light(obj, options.walk, trace);
}

} // namespace grabucb
