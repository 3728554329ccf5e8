#include "grabucb/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

namespace grabucb::bench {

namespace {

Graph build_graph(const ExperimentConfig& cfg, int nodes, std::uint64_t graph_seed) {
    switch (cfg.graph_model) {
    case GraphModel::Rbf:
        return generate_rbf(nodes, cfg.rbf_sigma, cfg.rbf_threshold, graph_seed);
    case GraphModel::Ba:
        return generate_ba(nodes, cfg.ba_core, cfg.ba_links, graph_seed);
    case GraphModel::EdgeList:
        return load_edge_list(cfg.graph_path);
    }
    throw std::logic_error("unreachable graph model");
}

TrueKernel build_kernel(const ExperimentConfig& cfg) {
    if (cfg.kernel_type == KernelType::Diffusion) return DiffusionKernel{cfg.tau};
    Vector alpha(static_cast<Eigen::Index>(cfg.poly_alpha.size()));
    for (std::size_t i = 0; i < cfg.poly_alpha.size(); ++i) {
        alpha(static_cast<Eigen::Index>(i)) = cfg.poly_alpha[i];
    }
    return PolynomialKernel{KernelCoefficients{std::move(alpha)}};
}

HyperParams resolve_hyper(const ExperimentConfig& cfg, const Environment& env,
                          int action_budget) {
    HyperParams hyper;
    hyper.mu = cfg.mu;
    hyper.delta = cfg.delta;
    hyper.coeff_count = cfg.coeff_count;
    hyper.action_budget = action_budget;
    hyper.mask_size = env.mask.q;
    hyper.power_sum_d = power_sum(env.spec, cfg.coeff_count);
    hyper.noise_scale = cfg.noise_scale >= 0.0
                            ? cfg.noise_scale
                            : std::sqrt(static_cast<double>(env.nodes())) * cfg.sigma_e;
    if (cfg.coeff_norm_bound > 0.0) {
        hyper.coeff_norm_bound = cfg.coeff_norm_bound;
    } else if (const auto* poly = std::get_if<PolynomialKernel>(&env.kernel)) {
        hyper.coeff_norm_bound = poly->coeffs.alpha.norm();
    } else {
        const double tau = std::get<DiffusionKernel>(env.kernel).tau;
        hyper.coeff_norm_bound = diffusion_poly_coefficients(tau, cfg.coeff_count).alpha.norm();
    }
    hyper.validate();
    return hyper;
}

std::vector<int> random_support(Rng& rng, int nodes, int count) {
    std::vector<int> perm(static_cast<std::size_t>(nodes));
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = 0; i < count; ++i) {
        const int j = i + rng.uniform_int(nodes - i);
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }
    perm.resize(static_cast<std::size_t>(count));
    return perm;
}

double realized_reward(const Observation& obs) { return obs.masked.sum(); }

/// Runs fn(index, seed) over cfg.seeds on cfg.threads workers; the first
/// exception thrown by any worker is rethrown on the calling thread.
template <typename Fn>
void parallel_for_each_seed(const ExperimentConfig& cfg, Fn&& fn) {
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cfg.seeds.size()) return;
            try {
                fn(i, cfg.seeds[i]);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const int workers = std::min<int>(cfg.threads, static_cast<int>(cfg.seeds.size()));
    for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

/// Node scores of the linear mean reward: r(h) = score . h.
Vector oracle_scores(const Environment& env) {
    return apply_true_kernel(env, env.mask.indicator());
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double elapsed_ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                         start)
            .count();
    }
};

} // namespace

Instance build_instance(const ExperimentConfig& cfg, std::uint64_t seed) {
    Graph graph = build_graph(cfg, cfg.nodes, derive_seed(seed, "graph"));
    const int n = graph.size();
    Mask mask = cfg.mask_fraction >= 1.0
                    ? Mask::full(n)
                    : random_mask(n, cfg.mask_fraction, derive_seed(seed, "mask"));
    const std::uint64_t noise_seed =
        cfg.has_noise_seed ? cfg.noise_seed : derive_seed(seed, "noise");
    Environment env = make_environment(std::move(graph), cfg.coeff_count, build_kernel(cfg),
                                       std::move(mask), cfg.sigma_e, noise_seed);
    HyperParams hyper = resolve_hyper(cfg, env, cfg.action_budget);
    return Instance{std::move(env), hyper};
}

OracleArm oracle_best_arm(const Environment& env, int action_budget, OracleMethod method,
                          std::uint64_t enumeration_budget) {
    const int n = env.nodes();
    if (action_budget < 1 || action_budget > n) {
        throw std::invalid_argument("oracle_best_arm: need 1 <= T0 <= N");
    }
    const Vector scores = oracle_scores(env);

    if (method == OracleMethod::Enumerate) {
        const std::uint64_t total = combination_count(n, action_budget);
        if (total > enumeration_budget) {
            throw EnumerationBudgetError("oracle_best_arm: " + std::to_string(total) +
                                         " supports exceed the enumeration budget");
        }
        std::vector<int> best, current;
        double best_sum = -std::numeric_limits<double>::infinity();
        auto recurse = [&](auto&& self, int next, double sum) -> void {
            if (static_cast<int>(current.size()) == action_budget) {
                if (sum > best_sum) {
                    best_sum = sum;
                    best = current;
                }
                return;
            }
            const int remaining = action_budget - static_cast<int>(current.size());
            for (int i = next; i <= n - remaining; ++i) {
                current.push_back(i);
                self(self, i + 1, sum + scores(i));
                current.pop_back();
            }
        };
        recurse(recurse, 0, 0.0);
        ActionSignal arm = ActionSignal::from_support(n, best);
        return OracleArm{std::move(arm), best_sum, true};
    }

    // the walk on a linear objective settles on the T0 best node scores
    // (its seeding step), with ties to the lower index
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return scores(a) > scores(b); });
    order.resize(static_cast<std::size_t>(action_budget));
    ActionSignal arm = ActionSignal::from_support(n, order);
    const double reward = std::accumulate(order.begin(), order.end(), 0.0,
                                          [&](double acc, int i) { return acc + scores(i); });
    return OracleArm{std::move(arm), reward, false};
}

OracleArm oracle_best_arm_auto(const Environment& env, int action_budget,
                               std::uint64_t enumeration_budget) {
    if (combination_count(env.nodes(), action_budget) <= enumeration_budget) {
        return oracle_best_arm(env, action_budget, OracleMethod::Enumerate,
                               enumeration_budget);
    }
    return oracle_best_arm(env, action_budget, OracleMethod::Walk);
}

RunRecord run_grab_ucb(const ExperimentConfig& cfg, std::uint64_t seed) {
    Timer timer;
    Instance inst = build_instance(cfg, seed);
    RunRecord record;
    record.seed = seed;
    record.hyper = inst.hyper;
    record.oracle = oracle_best_arm_auto(inst.env, cfg.action_budget, cfg.enumeration_budget);

    LearnerState state = init_learner(inst.hyper);
    UcbSelectOptions options;
    options.walk = ArmSelectConfig{cfg.action_budget, cfg.max_iter};
    options.radius_mode = cfg.radius_mode;
    options.use_confidence = cfg.use_confidence;
    options.prefer_exact = cfg.selector == SelectorMethod::Exact;
    options.enumeration_budget = cfg.enumeration_budget;

    record.rounds.reserve(static_cast<std::size_t>(cfg.horizon));
    for (int t = 1; t <= cfg.horizon; ++t) {
        SelectionTrace trace;
        const double radius =
            cfg.use_confidence ? confidence_radius(state, inst.hyper, cfg.radius_mode) : 0.0;
        ActionSignal arm = ucb_select(state, inst.hyper, inst.env.basis, inst.env.mask,
                                      options, &trace);
        Observation obs = observe(inst.env, arm);
        const Matrix z = feature_matrix(inst.env.basis, inst.env.mask, arm);
        ingest(state, z, obs.masked, inst.hyper);
        record.rounds.push_back(RoundRow{t, arm.support, obs.mean_reward,
                                         realized_reward(obs), radius,
                                         record.oracle.reward - obs.mean_reward,
                                         trace.iterations});
    }
    record.final_radius_exact = confidence_radius(state, inst.hyper, RadiusMode::ExactLogDet);
    record.final_radius_lemma = confidence_radius(state, inst.hyper, RadiusMode::LemmaBound);
    record.wall_ms = timer.elapsed_ms();
    return record;
}

RunRecord run_aal(const ExperimentConfig& cfg, std::uint64_t seed, int explore_rounds) {
    if (explore_rounds < 1 || explore_rounds >= cfg.horizon) {
        throw std::invalid_argument("run_aal: exploration length must be in [1, horizon)");
    }
    Timer timer;
    Instance inst = build_instance(cfg, seed);
    RunRecord record;
    record.seed = seed;
    record.hyper = inst.hyper;
    record.oracle = oracle_best_arm_auto(inst.env, cfg.action_budget, cfg.enumeration_budget);

    LearnerState state = init_learner(inst.hyper);
    Rng actions = derive_stream(seed, "aal-actions");
    const int n = inst.env.nodes();

    record.rounds.reserve(static_cast<std::size_t>(cfg.horizon));
    for (int t = 1; t <= explore_rounds; ++t) {
        const std::vector<int> support = random_support(actions, n, cfg.action_budget);
        ActionSignal arm = ActionSignal::from_support(n, support);
        Observation obs = observe(inst.env, arm);
        const Matrix z = feature_matrix(inst.env.basis, inst.env.mask, arm);
        ingest(state, z, obs.masked, inst.hyper);
        record.rounds.push_back(RoundRow{t, arm.support, obs.mean_reward,
                                         realized_reward(obs), 0.0,
                                         record.oracle.reward - obs.mean_reward, 0});
    }

    // single fit, then the fixed greedy arm for the rest of the horizon
    const UcbObjective obj = UcbObjective::build(state.estimate, 0.0, state.gram,
                                                 inst.env.basis, inst.env.mask, inst.hyper.mu);
    SelectionTrace trace;
    ActionSignal fixed = grab_arm_light(
        obj, ArmSelectConfig{cfg.action_budget, cfg.max_iter}, &trace);
    for (int t = explore_rounds + 1; t <= cfg.horizon; ++t) {
        Observation obs = observe(inst.env, fixed);
        record.rounds.push_back(RoundRow{t, fixed.support, obs.mean_reward,
                                         realized_reward(obs), 0.0,
                                         record.oracle.reward - obs.mean_reward,
                                         trace.iterations});
    }
    record.final_radius_exact = confidence_radius(state, inst.hyper, RadiusMode::ExactLogDet);
    record.final_radius_lemma = confidence_radius(state, inst.hyper, RadiusMode::LemmaBound);
    record.wall_ms = timer.elapsed_ms();
    return record;
}

std::vector<double> cumulative_regret(const RunRecord& record) {
    std::vector<double> out;
    out.reserve(record.rounds.size());
    double acc = 0.0;
    for (const RoundRow& row : record.rounds) {
        acc += record.oracle.reward - row.mean_reward;
        out.push_back(acc);
    }
    return out;
}

double error_study(const ExperimentConfig& cfg, std::uint64_t seed, int train_count,
                   int test_count) {
    if (train_count < 1 || test_count < 1) {
        throw std::invalid_argument("error_study: sample counts must be >= 1");
    }
    Instance inst = build_instance(cfg, seed);
    const int n = inst.env.nodes();

    LearnerState state = init_learner(inst.hyper);
    Rng train_rng = derive_stream(seed, "study-train");
    for (int i = 0; i < train_count; ++i) {
        ActionSignal arm =
            ActionSignal::from_support(n, random_support(train_rng, n, cfg.action_budget));
        Observation obs = observe(inst.env, arm);
        const Matrix z = feature_matrix(inst.env.basis, inst.env.mask, arm);
        ingest(state, z, obs.masked, inst.hyper);
    }

    Rng test_rng = derive_stream(seed, "study-test");
    double total = 0.0;
    for (int i = 0; i < test_count; ++i) {
        ActionSignal arm =
            ActionSignal::from_support(n, random_support(test_rng, n, cfg.action_budget));
        const Vector truth = apply_true_kernel(inst.env, arm.values);
        const Vector fitted = apply_poly_kernel(inst.env.basis, state.estimate, arm.values);
        const double denom = truth.squaredNorm();
        if (denom == 0.0) continue;
        total += (truth - fitted).squaredNorm() / denom;
    }
    return total / static_cast<double>(test_count);
}

std::vector<StudyPoint> run_error_study(const ExperimentConfig& cfg) {
    std::vector<StudyPoint> points;
    for (double value : cfg.study_values) {
        ExperimentConfig swept = cfg;
        if (cfg.study_full_mask) swept.mask_fraction = 1.0;
        if (cfg.study_sweep == "ba_m") {
            swept.graph_model = GraphModel::Ba;
            swept.ba_links = static_cast<int>(value);
        } else if (cfg.study_sweep == "rbf_threshold") {
            swept.graph_model = GraphModel::Rbf;
            swept.rbf_threshold = value;
        } else if (cfg.study_sweep == "sparsity") {
            swept.action_budget =
                std::max(1, static_cast<int>(std::lround(value * cfg.nodes)));
        } else if (cfg.study_sweep == "noise") {
            swept.sigma_e = std::sqrt(value);
        } else if (cfg.study_sweep == "tau") {
            swept.tau = value;
        } else {
            throw std::invalid_argument("config field 'study.sweep': unknown sweep '" +
                                        cfg.study_sweep + "'");
        }
        swept.validate();

        std::vector<double> errors(cfg.seeds.size(), 0.0);
        parallel_for_each_seed(cfg, [&](std::size_t i, std::uint64_t seed) {
            errors[i] = error_study(swept, seed, cfg.study_train_count,
                                    cfg.study_test_count);
        });

        const double mean = std::accumulate(errors.begin(), errors.end(), 0.0) /
                            static_cast<double>(errors.size());
        double var = 0.0;
        for (double e : errors) var += (e - mean) * (e - mean);
        const double stderr_err =
            errors.size() > 1
                ? std::sqrt(var / static_cast<double>(errors.size() - 1)) /
                      std::sqrt(static_cast<double>(errors.size()))
                : 0.0;
        points.push_back(StudyPoint{value, mean, stderr_err});
    }
    return points;
}

namespace {

/// Median per-call milliseconds: one warm-up call, then three timed
/// repetitions (batched so each repetition runs at least ~10 ms).
template <typename Fn>
double median_call_ms(Fn&& fn) {
    Timer warm;
    fn();
    const double once = std::max(warm.elapsed_ms(), 1e-6);
    const int batch = std::max(1, static_cast<int>(std::ceil(10.0 / once)));
    std::array<double, 3> reps{};
    for (double& rep : reps) {
        Timer t;
        for (int i = 0; i < batch; ++i) fn();
        rep = t.elapsed_ms() / batch;
    }
    std::sort(reps.begin(), reps.end());
    return reps[1];
}

} // namespace

std::vector<SolverBenchRow> solver_bench(const ExperimentConfig& cfg) {
    std::vector<SolverBenchRow> rows;
    for (int n : cfg.solver_sizes) {
        const std::uint64_t seed = cfg.seeds.front();
        ExperimentConfig sized = cfg;
        sized.nodes = n;
        sized.horizon = std::max(1, cfg.solver_warmup_rounds);
        Instance inst = build_instance(sized, seed);

        // warm up the learner so the frozen objective is representative
        LearnerState state = init_learner(inst.hyper);
        UcbSelectOptions options;
        options.walk = ArmSelectConfig{cfg.action_budget, cfg.max_iter};
        options.radius_mode = cfg.radius_mode;
        options.use_confidence = cfg.use_confidence;
        for (int t = 0; t < cfg.solver_warmup_rounds; ++t) {
            ActionSignal arm =
                ucb_select(state, inst.hyper, inst.env.basis, inst.env.mask, options);
            Observation obs = observe(inst.env, arm);
            ingest(state, feature_matrix(inst.env.basis, inst.env.mask, arm), obs.masked,
                   inst.hyper);
        }
        const double radius =
            cfg.use_confidence ? confidence_radius(state, inst.hyper, cfg.radius_mode) : 0.0;
        const UcbObjective obj = UcbObjective::build(
            state.estimate, radius, state.gram, inst.env.basis, inst.env.mask, inst.hyper.mu);
        const ArmSelectConfig walk_cfg{cfg.action_budget, cfg.max_iter};

        ActionSignal walk_arm = grab_arm_light(obj, walk_cfg);
        const double walk_ms = median_call_ms([&] { grab_arm_light(obj, walk_cfg); });
        rows.push_back(SolverBenchRow{n, "grab_arm_light", walk_ms,
                                      mean_reward(inst.env, walk_arm), false});

        if (combination_count(n, cfg.action_budget) <= cfg.enumeration_budget) {
            ActionSignal exact_arm =
                exact_select(obj, cfg.action_budget, cfg.enumeration_budget);
            const double exact_ms = median_call_ms(
                [&] { exact_select(obj, cfg.action_budget, cfg.enumeration_budget); });
            rows.push_back(SolverBenchRow{n, "exact", exact_ms,
                                          mean_reward(inst.env, exact_arm), false});
        } else {
            rows.push_back(SolverBenchRow{n, "exact", 0.0, 0.0, true});
        }
    }
    return rows;
}

std::vector<RunRecord> run_seeds(const ExperimentConfig& cfg,
                                 const std::function<RunRecord(std::uint64_t)>& fn) {
    std::vector<RunRecord> records(cfg.seeds.size());
    parallel_for_each_seed(cfg,
                           [&](std::size_t i, std::uint64_t seed) { records[i] = fn(seed); });
    return records;
}

} // namespace grabucb::bench
