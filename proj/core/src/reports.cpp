#include "grabucb/reports.hpp"

#include "grabucb/version.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include <sys/utsname.h>
#include <unistd.h>

namespace grabucb::bench {

std::string csv_double(double v) {
    std::ostringstream os;
    os.precision(std::numeric_limits<double>::max_digits10);
    os << v;
    return os.str();
}

namespace {

std::string join_support(const std::vector<int>& support) {
    std::string out;
    for (std::size_t i = 0; i < support.size(); ++i) {
        if (i) out += ";";
        out += std::to_string(support[i]);
    }
    return out;
}

} // namespace

void write_regret_csv(std::ostream& os, const std::vector<RunRecord>& records) {
    if (records.empty()) throw std::invalid_argument("write_regret_csv: no records");
    const std::size_t horizon = records.front().rounds.size();
    for (const RunRecord& r : records) {
        if (r.rounds.size() != horizon) {
            throw std::invalid_argument("write_regret_csv: records of unequal horizon");
        }
    }
    os << "t,mean_regret,stderr_regret";
    for (const RunRecord& r : records) os << ",regret_seed_" << r.seed;
    os << "\n";

    std::vector<std::vector<double>> curves;
    curves.reserve(records.size());
    for (const RunRecord& r : records) curves.push_back(cumulative_regret(r));

    for (std::size_t t = 0; t < horizon; ++t) {
        double mean = 0.0;
        for (const auto& curve : curves) mean += curve[t];
        mean /= static_cast<double>(curves.size());
        double var = 0.0;
        for (const auto& curve : curves) var += (curve[t] - mean) * (curve[t] - mean);
        const double stderr_regret =
            curves.size() > 1 ? std::sqrt(var / static_cast<double>(curves.size() - 1)) /
                                    std::sqrt(static_cast<double>(curves.size()))
                              : 0.0;
        os << (t + 1) << "," << csv_double(mean) << "," << csv_double(stderr_regret);
        for (const auto& curve : curves) os << "," << csv_double(curve[t]);
        os << "\n";
    }
}

void write_trace_csv(std::ostream& os, const RunRecord& record) {
    os << "t,support,mean_reward,realized_reward,radius,inst_regret\n";
    for (const RoundRow& row : record.rounds) {
        os << row.t << "," << join_support(row.support) << ","
           << csv_double(row.mean_reward) << "," << csv_double(row.realized_reward) << ","
           << csv_double(row.radius) << "," << csv_double(row.inst_regret) << "\n";
    }
}

void write_study_csv(std::ostream& os, const std::vector<StudyPoint>& points) {
    os << "parameter,mean_error,stderr_error\n";
    for (const StudyPoint& p : points) {
        os << csv_double(p.parameter) << "," << csv_double(p.mean_error) << ","
           << csv_double(p.stderr_error) << "\n";
    }
}

void write_solver_csv(std::ostream& os, const std::vector<SolverBenchRow>& rows) {
    os << "n,method,time_ms,reward,status\n";
    for (const SolverBenchRow& row : rows) {
        os << row.nodes << "," << row.method << ",";
        if (row.skipped) {
            os << ",,skipped\n";
        } else {
            os << csv_double(row.time_ms) << "," << csv_double(row.reward) << ",ok\n";
        }
    }
}

std::vector<BoundsRow> bounds_trajectory(const ExperimentConfig& cfg, std::uint64_t seed) {
    Instance inst = build_instance(cfg, seed);
    LearnerState state = init_learner(inst.hyper);
    UcbSelectOptions options;
    options.walk = ArmSelectConfig{cfg.action_budget, cfg.max_iter};
    options.radius_mode = cfg.radius_mode;
    options.use_confidence = cfg.use_confidence;
    options.prefer_exact = cfg.selector == SelectorMethod::Exact;
    options.enumeration_budget = cfg.enumeration_budget;

    std::vector<BoundsRow> rows;
    rows.reserve(static_cast<std::size_t>(cfg.horizon));
    for (int t = 1; t <= cfg.horizon; ++t) {
        ActionSignal arm =
            ucb_select(state, inst.hyper, inst.env.basis, inst.env.mask, options);
        Observation obs = observe(inst.env, arm);
        ingest(state, feature_matrix(inst.env.basis, inst.env.mask, arm), obs.masked,
               inst.hyper);
        BoundsRow row;
        row.t = t;
        row.alpha_hat = state.estimate.alpha;
        row.radius_exact = confidence_radius(state, inst.hyper, RadiusMode::ExactLogDet);
        row.radius_lemma = confidence_radius(state, inst.hyper, RadiusMode::LemmaBound);
        row.gram_logdet = gram_log_det(state, inst.hyper);
        row.regret_bound_at_t = regret_bound(inst.hyper, t, row.radius_lemma);
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_bounds_csv(std::ostream& os, const std::vector<BoundsRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("write_bounds_csv: no rows");
    os << "t";
    for (int k = 0; k < rows.front().alpha_hat.size(); ++k) os << ",alpha_hat_" << k;
    os << ",c_exact_logdet,c_lemma_bound,logdet_v,regret_bound\n";
    for (const BoundsRow& row : rows) {
        os << row.t;
        for (int k = 0; k < row.alpha_hat.size(); ++k) {
            os << "," << csv_double(row.alpha_hat(k));
        }
        os << "," << csv_double(row.radius_exact) << "," << csv_double(row.radius_lemma)
           << "," << csv_double(row.gram_logdet) << ","
           << csv_double(row.regret_bound_at_t) << "\n";
    }
}

void write_node_values_csv(std::ostream& os, const Environment& env,
                           const ActionSignal& arm) {
    const Vector resultant = apply_true_kernel(env, arm.values);
    os << "node,action,mask,resultant\n";
    for (int i = 0; i < env.nodes(); ++i) {
        os << i << "," << csv_double(arm.values(i)) << "," << (env.mask.selected(i) ? 1 : 0)
           << "," << csv_double(resultant(i)) << "\n";
    }
}

void write_metadata_json(std::ostream& os, const ExperimentConfig& cfg,
                         const std::string& command, const PhaseTimings& timings_ms,
                         const std::vector<std::string>& outputs) {
    nlohmann::json meta;
    meta["command"] = command;
    meta["version"] = kVersion;

    nlohmann::json config = nlohmann::json::object();
    const KeyValueConfig kv = cfg.to_key_values();
    for (const auto& [key, value] : kv.entries()) config[key] = value;
    meta["config"] = config;

    meta["seeds"] = cfg.seeds;

    utsname uts{};
    if (uname(&uts) == 0) {
        meta["host"] = {{"sysname", uts.sysname},
                        {"release", uts.release},
                        {"machine", uts.machine},
                        {"nodename", uts.nodename}};
    }

    nlohmann::json timings = nlohmann::json::object();
    for (const auto& [phase, ms] : timings_ms) timings[phase] = ms;
    meta["timings_ms"] = timings;
    meta["outputs"] = outputs;

    os << meta.dump(2) << "\n";
}

} // namespace grabucb::bench
