#include "grabucb/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace grabucb::bench {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::string item;
    std::istringstream is(value);
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

[[noreturn]] void bad_field(const std::string& key, const std::string& what) {
    throw std::invalid_argument("config field '" + key + "': " + what);
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(std::numeric_limits<double>::max_digits10);
    os << v;
    return os.str();
}

} // namespace

void KeyValueConfig::set(const std::string& key, const std::string& value) {
    auto it = index_.find(key);
    if (it != index_.end()) {
        entries_[it->second].second = value;
    } else {
        index_.emplace(key, entries_.size());
        entries_.emplace_back(key, value);
    }
}

bool KeyValueConfig::has(const std::string& key) const { return index_.count(key) != 0; }

const std::string& KeyValueConfig::get(const std::string& key) const {
    auto it = index_.find(key);
    if (it == index_.end()) {
        throw std::invalid_argument("config field '" + key + "' is missing");
    }
    return entries_[it->second].second;
}

std::string KeyValueConfig::get_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? get(key) : fallback;
}

namespace {

template <typename T, typename Parse>
T parse_or_fail(const std::string& key, const std::string& text, const char* kind,
                Parse parse) {
    std::optional<T> parsed;
    try {
        std::size_t pos = 0;
        T v = parse(text, &pos);
        if (pos == text.size()) parsed = v;
    } catch (const std::exception&) {
    }
    if (!parsed) bad_field(key, std::string("expected ") + kind + ", got '" + text + "'");
    return *parsed;
}

} // namespace

double KeyValueConfig::get_double(const std::string& key) const {
    return parse_or_fail<double>(key, get(key), "a decimal number",
                                 [](const std::string& s, std::size_t* pos) {
                                     return std::stod(s, pos);
                                 });
}

int KeyValueConfig::get_int(const std::string& key) const {
    const long v = parse_or_fail<long>(key, get(key), "an integer",
                                       [](const std::string& s, std::size_t* pos) {
                                           return std::stol(s, pos);
                                       });
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
        bad_field(key, "integer out of range");
    }
    return static_cast<int>(v);
}

bool KeyValueConfig::get_bool(const std::string& key) const {
    const std::string& v = get(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    bad_field(key, "expected true/false, got '" + v + "'");
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key) const {
    return parse_or_fail<std::uint64_t>(key, get(key), "an unsigned integer",
                                        [](const std::string& s, std::size_t* pos) {
                                            return std::stoull(s, pos);
                                        });
}

std::vector<double> KeyValueConfig::get_double_list(const std::string& key) const {
    std::vector<double> out;
    for (const auto& item : split_list(get(key))) {
        out.push_back(parse_or_fail<double>(key, item, "a comma-separated list of numbers",
                                            [](const std::string& s, std::size_t* pos) {
                                                return std::stod(s, pos);
                                            }));
    }
    if (out.empty()) bad_field(key, "list must not be empty");
    return out;
}

std::vector<std::uint64_t> KeyValueConfig::get_u64_list(const std::string& key) const {
    std::vector<std::uint64_t> out;
    for (const auto& item : split_list(get(key))) {
        out.push_back(parse_or_fail<std::uint64_t>(
            key, item, "a comma-separated list of unsigned integers",
            [](const std::string& s, std::size_t* pos) { return std::stoull(s, pos); }));
    }
    if (out.empty()) bad_field(key, "list must not be empty");
    return out;
}

std::vector<int> KeyValueConfig::get_int_list(const std::string& key) const {
    std::vector<int> out;
    for (double v : get_double_list(key)) out.push_back(static_cast<int>(v));
    return out;
}

std::vector<std::string> KeyValueConfig::get_string_list(const std::string& key) const {
    auto items = split_list(get(key));
    if (items.empty()) bad_field(key, "list must not be empty");
    return items;
}

KeyValueConfig KeyValueConfig::parse(std::istream& is) {
    KeyValueConfig kv;
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw std::invalid_argument("config line " + std::to_string(line_no) +
                                            ": unterminated section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": empty key");
        }
        kv.set(section.empty() ? key : section + "." + key, value);
    }
    return kv;
}

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config file: " + path);
    return parse(is);
}

void KeyValueConfig::write(std::ostream& os) const {
    std::string section;
    for (const auto& [key, value] : entries_) {
        const std::size_t dot = key.find('.');
        const std::string sec = dot == std::string::npos ? "" : key.substr(0, dot);
        const std::string name = dot == std::string::npos ? key : key.substr(dot + 1);
        if (sec != section) {
            os << "[" << sec << "]\n";
            section = sec;
        }
        os << name << " = " << value << "\n";
    }
}

void ExperimentConfig::validate() const {
    if (nodes < 1) throw std::invalid_argument("config field 'graph.n': must be >= 1");
    if (graph_model == GraphModel::Rbf) {
        if (!(rbf_sigma > 0.0)) throw std::invalid_argument("config field 'graph.sigma': must be > 0");
        if (!(rbf_threshold > 0.0)) {
            throw std::invalid_argument("config field 'graph.threshold': must be > 0");
        }
    }
    if (graph_model == GraphModel::Ba) {
        if (ba_links < 1 || ba_links > ba_core || ba_core > nodes) {
            throw std::invalid_argument("config fields 'graph.m'/'graph.m0': need 1 <= m <= m0 <= n");
        }
    }
    if (kernel_type == KernelType::Diffusion && !(tau > 0.0)) {
        throw std::invalid_argument("config field 'kernel.tau': must be > 0");
    }
    if (kernel_type == KernelType::Polynomial &&
        static_cast<int>(poly_alpha.size()) != coeff_count) {
        throw std::invalid_argument("config field 'kernel.alpha': length must equal learner.k");
    }
    if (!(mask_fraction > 0.0) || mask_fraction > 1.0) {
        throw std::invalid_argument("config field 'mask.fraction': must be in (0, 1]");
    }
    if (sigma_e < 0.0) throw std::invalid_argument("config field 'noise.sigma_e': must be >= 0");
    if (coeff_count < 1) throw std::invalid_argument("config field 'learner.k': must be >= 1");
    if (!(mu > 0.0)) throw std::invalid_argument("config field 'learner.mu': must be > 0");
    if (!(delta > 0.0) || !(delta < 1.0)) {
        throw std::invalid_argument("config field 'learner.delta': must be in (0, 1)");
    }
    if (action_budget < 1 || action_budget > nodes) {
        throw std::invalid_argument("config field 'select.t0': need 1 <= t0 <= n");
    }
    if (max_iter < 1) throw std::invalid_argument("config field 'select.max_iter': must be >= 1");
    if (horizon < 1) throw std::invalid_argument("config field 'run.horizon': must be >= 1");
    if (seeds.empty()) throw std::invalid_argument("config field 'run.seeds': must not be empty");
    if (threads < 1) throw std::invalid_argument("config field 'run.threads': must be >= 1");
    if (aal_explore_short < 1 || aal_explore_long < 1) {
        throw std::invalid_argument("config fields 'aal.*': exploration must be >= 1");
    }
    if (study_train_count < 1 || study_test_count < 1) {
        throw std::invalid_argument("config fields 'study.n_train'/'study.n_test': must be >= 1");
    }
}

ExperimentConfig ExperimentConfig::from_key_values(const KeyValueConfig& kv) {
    ExperimentConfig cfg;

    const std::string model = kv.get_or("graph.model", "rbf");
    if (model == "rbf") cfg.graph_model = GraphModel::Rbf;
    else if (model == "ba") cfg.graph_model = GraphModel::Ba;
    else if (model == "edgelist") cfg.graph_model = GraphModel::EdgeList;
    else bad_field("graph.model", "expected rbf|ba|edgelist, got '" + model + "'");
    if (kv.has("graph.n")) cfg.nodes = kv.get_int("graph.n");
    if (kv.has("graph.sigma")) cfg.rbf_sigma = kv.get_double("graph.sigma");
    if (kv.has("graph.threshold")) cfg.rbf_threshold = kv.get_double("graph.threshold");
    if (kv.has("graph.m0")) cfg.ba_core = kv.get_int("graph.m0");
    if (kv.has("graph.m")) cfg.ba_links = kv.get_int("graph.m");
    if (kv.has("graph.path")) cfg.graph_path = kv.get("graph.path");

    const std::string kernel = kv.get_or("kernel.type", "diffusion");
    if (kernel == "diffusion") cfg.kernel_type = KernelType::Diffusion;
    else if (kernel == "polynomial") cfg.kernel_type = KernelType::Polynomial;
    else bad_field("kernel.type", "expected diffusion|polynomial, got '" + kernel + "'");
    if (kv.has("kernel.tau")) cfg.tau = kv.get_double("kernel.tau");
    if (kv.has("kernel.alpha")) cfg.poly_alpha = kv.get_double_list("kernel.alpha");

    if (kv.has("mask.fraction")) cfg.mask_fraction = kv.get_double("mask.fraction");
    if (kv.has("noise.sigma_e")) cfg.sigma_e = kv.get_double("noise.sigma_e");
    if (kv.has("noise.seed")) {
        cfg.has_noise_seed = true;
        cfg.noise_seed = kv.get_u64("noise.seed");
    }

    if (kv.has("learner.k")) cfg.coeff_count = kv.get_int("learner.k");
    if (kv.has("learner.mu")) cfg.mu = kv.get_double("learner.mu");
    if (kv.has("learner.delta")) cfg.delta = kv.get_double("learner.delta");
    if (kv.has("learner.r") && kv.get("learner.r") != "auto") {
        cfg.noise_scale = kv.get_double("learner.r");
    }
    if (kv.has("learner.s") && kv.get("learner.s") != "auto") {
        cfg.coeff_norm_bound = kv.get_double("learner.s");
    }
    const std::string radius = kv.get_or("learner.radius", "lemma");
    if (radius == "lemma") cfg.radius_mode = RadiusMode::LemmaBound;
    else if (radius == "logdet") cfg.radius_mode = RadiusMode::ExactLogDet;
    else bad_field("learner.radius", "expected lemma|logdet, got '" + radius + "'");

    if (kv.has("select.t0")) cfg.action_budget = kv.get_int("select.t0");
    const std::string method = kv.get_or("select.method", "light");
    if (method == "light") cfg.selector = SelectorMethod::Light;
    else if (method == "exact") cfg.selector = SelectorMethod::Exact;
    else bad_field("select.method", "expected light|exact, got '" + method + "'");
    if (kv.has("select.max_iter")) cfg.max_iter = kv.get_int("select.max_iter");
    if (kv.has("select.enumeration_budget")) {
        cfg.enumeration_budget = kv.get_u64("select.enumeration_budget");
    }
    if (kv.has("select.use_confidence")) cfg.use_confidence = kv.get_bool("select.use_confidence");

    if (kv.has("run.horizon")) cfg.horizon = kv.get_int("run.horizon");
    if (kv.has("run.seeds")) cfg.seeds = kv.get_u64_list("run.seeds");
    if (kv.has("run.threads")) cfg.threads = kv.get_int("run.threads");
    if (kv.has("run.out_dir")) cfg.out_dir = kv.get("run.out_dir");
    if (kv.has("run.dump_traces")) cfg.dump_traces = kv.get_bool("run.dump_traces");
    if (kv.has("run.algorithms")) cfg.algorithms = kv.get_string_list("run.algorithms");

    if (kv.has("aal.explore_short")) cfg.aal_explore_short = kv.get_int("aal.explore_short");
    if (kv.has("aal.explore_long")) cfg.aal_explore_long = kv.get_int("aal.explore_long");

    if (kv.has("study.sweep")) cfg.study_sweep = kv.get("study.sweep");
    if (kv.has("study.values")) cfg.study_values = kv.get_double_list("study.values");
    if (kv.has("study.n_train")) cfg.study_train_count = kv.get_int("study.n_train");
    if (kv.has("study.n_test")) cfg.study_test_count = kv.get_int("study.n_test");
    if (kv.has("study.mask")) {
        const std::string mask = kv.get("study.mask");
        if (mask == "full") cfg.study_full_mask = true;
        else if (mask == "fraction") cfg.study_full_mask = false;
        else bad_field("study.mask", "expected full|fraction, got '" + mask + "'");
    }

    if (kv.has("solver.sizes")) cfg.solver_sizes = kv.get_int_list("solver.sizes");
    if (kv.has("solver.warmup_rounds")) cfg.solver_warmup_rounds = kv.get_int("solver.warmup_rounds");

    cfg.validate();
    return cfg;
}

KeyValueConfig ExperimentConfig::to_key_values() const {
    KeyValueConfig kv;
    switch (graph_model) {
    case GraphModel::Rbf: kv.set("graph.model", "rbf"); break;
    case GraphModel::Ba: kv.set("graph.model", "ba"); break;
    case GraphModel::EdgeList: kv.set("graph.model", "edgelist"); break;
    }
    kv.set("graph.n", std::to_string(nodes));
    kv.set("graph.sigma", format_double(rbf_sigma));
    kv.set("graph.threshold", format_double(rbf_threshold));
    kv.set("graph.m0", std::to_string(ba_core));
    kv.set("graph.m", std::to_string(ba_links));
    if (!graph_path.empty()) kv.set("graph.path", graph_path);

    kv.set("kernel.type", kernel_type == KernelType::Diffusion ? "diffusion" : "polynomial");
    kv.set("kernel.tau", format_double(tau));
    if (!poly_alpha.empty()) {
        std::string joined;
        for (std::size_t i = 0; i < poly_alpha.size(); ++i) {
            if (i) joined += ",";
            joined += format_double(poly_alpha[i]);
        }
        kv.set("kernel.alpha", joined);
    }

    kv.set("mask.fraction", format_double(mask_fraction));
    kv.set("noise.sigma_e", format_double(sigma_e));
    if (has_noise_seed) kv.set("noise.seed", std::to_string(noise_seed));

    kv.set("learner.k", std::to_string(coeff_count));
    kv.set("learner.mu", format_double(mu));
    kv.set("learner.delta", format_double(delta));
    kv.set("learner.r", noise_scale < 0.0 ? "auto" : format_double(noise_scale));
    kv.set("learner.s", coeff_norm_bound < 0.0 ? "auto" : format_double(coeff_norm_bound));
    kv.set("learner.radius", radius_mode == RadiusMode::LemmaBound ? "lemma" : "logdet");

    kv.set("select.t0", std::to_string(action_budget));
    kv.set("select.method", selector == SelectorMethod::Light ? "light" : "exact");
    kv.set("select.max_iter", std::to_string(max_iter));
    kv.set("select.enumeration_budget", std::to_string(enumeration_budget));
    kv.set("select.use_confidence", use_confidence ? "true" : "false");

    kv.set("run.horizon", std::to_string(horizon));
    {
        std::string joined;
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            if (i) joined += ",";
            joined += std::to_string(seeds[i]);
        }
        kv.set("run.seeds", joined);
    }
    kv.set("run.threads", std::to_string(threads));
    kv.set("run.out_dir", out_dir);
    kv.set("run.dump_traces", dump_traces ? "true" : "false");
    {
        std::string joined;
        for (std::size_t i = 0; i < algorithms.size(); ++i) {
            if (i) joined += ",";
            joined += algorithms[i];
        }
        kv.set("run.algorithms", joined);
    }

    kv.set("aal.explore_short", std::to_string(aal_explore_short));
    kv.set("aal.explore_long", std::to_string(aal_explore_long));

    kv.set("study.sweep", study_sweep);
    {
        std::string joined;
        for (std::size_t i = 0; i < study_values.size(); ++i) {
            if (i) joined += ",";
            joined += format_double(study_values[i]);
        }
        kv.set("study.values", joined);
    }
    kv.set("study.n_train", std::to_string(study_train_count));
    kv.set("study.n_test", std::to_string(study_test_count));
    kv.set("study.mask", study_full_mask ? "full" : "fraction");

    {
        std::string joined;
        for (std::size_t i = 0; i < solver_sizes.size(); ++i) {
            if (i) joined += ",";
            joined += std::to_string(solver_sizes[i]);
        }
        kv.set("solver.sizes", joined);
    }
    kv.set("solver.warmup_rounds", std::to_string(solver_warmup_rounds));
    return kv;
}

} // namespace grabucb::bench
