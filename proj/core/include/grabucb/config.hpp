#pragma once

#include "grabucb/armsel.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace grabucb::bench {

/// Flat "section.key -> value" view of a config file. Sections are
/// introduced by [name] lines, entries are "key = value", and '#' starts a
/// comment. Insertion order is preserved for faithful echoing.
class KeyValueConfig {
public:
    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;

    const std::string& get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;

    double get_double(const std::string& key) const;
    int get_int(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key) const;
    std::vector<double> get_double_list(const std::string& key) const;
    std::vector<std::uint64_t> get_u64_list(const std::string& key) const;
    std::vector<int> get_int_list(const std::string& key) const;
    std::vector<std::string> get_string_list(const std::string& key) const;

    const std::vector<std::pair<std::string, std::string>>& entries() const {
        return entries_;
    }

    static KeyValueConfig parse(std::istream& is);
    static KeyValueConfig parse_file(const std::string& path);
    void write(std::ostream& os) const;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
    std::map<std::string, std::size_t> index_;
};

enum class GraphModel { Rbf, Ba, EdgeList };
enum class KernelType { Diffusion, Polynomial };
enum class SelectorMethod { Light, Exact };

/// Fully-resolved experiment settings. Every field has a canonical config
/// key; from_key_values and to_key_values round-trip, which is what lets a
/// run's JSON metadata reproduce its CSV rows.
struct ExperimentConfig {
    // graph
    GraphModel graph_model = GraphModel::Rbf;
    int nodes = 100;
    double rbf_sigma = 0.5;
    double rbf_threshold = 0.2;
    int ba_core = 10;
    int ba_links = 5;
    std::string graph_path; // EdgeList model

    // kernel
    KernelType kernel_type = KernelType::Diffusion;
    double tau = 5.0;
    std::vector<double> poly_alpha;

    // mask / noise
    double mask_fraction = 0.2;
    double sigma_e = 0.1;
    bool has_noise_seed = false;
    std::uint64_t noise_seed = 0; // optional override; default derives from the run seed

    // learner
    int coeff_count = 10;
    double mu = 0.01;
    double delta = 0.01;
    double noise_scale = -1.0;     // <0: auto (sqrt(N) sigma_e)
    double coeff_norm_bound = -1.0; // <0: auto (||alpha_*|| or Taylor norm)
    RadiusMode radius_mode = RadiusMode::LemmaBound;

    // selection
    int action_budget = 5;
    SelectorMethod selector = SelectorMethod::Light;
    int max_iter = 100;
    std::uint64_t enumeration_budget = kDefaultEnumerationBudget;
    bool use_confidence = true;

    // run
    int horizon = 100;
    std::vector<std::uint64_t> seeds = {1};
    int threads = 1;
    std::string out_dir = "out";
    bool dump_traces = false;
    std::vector<std::string> algorithms = {"grab", "aal_short", "aal_long"};

    // aal
    int aal_explore_short = 10;
    int aal_explore_long = 20;

    // study
    std::string study_sweep = "ba_m";
    std::vector<double> study_values = {1, 3, 5};
    int study_train_count = 300;
    int study_test_count = 100;
    bool study_full_mask = true;

    // solver bench
    std::vector<int> solver_sizes = {50, 100, 200, 400};
    int solver_warmup_rounds = 20;

    void validate() const;

    static ExperimentConfig from_key_values(const KeyValueConfig& kv);
    KeyValueConfig to_key_values() const;
};

} // namespace grabucb::bench
