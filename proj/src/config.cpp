#include "mlsn/config.hpp"

#include <cstdlib>

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mlsn {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

std::vector<std::size_t> parse_widths(const std::string& v) {
    std::vector<std::size_t> out;
    if (trim(v).empty()) return out;
    std::stringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoul(trim(tok)));
    return out;
}

std::string widths_to_string(const std::vector<std::size_t>& w) {
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) out += (i ? "," : "") + std::to_string(w[i]);
    return out;
}

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("not a boolean: " + v);
}

}  // namespace

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string t = trim(line);
        if (t.empty()) continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
        kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    return kv;
}

RunSettings resolve_settings(const std::map<std::string, std::string>& kv) {
    RunSettings s;
    std::vector<std::string> errors;
    bool ramp_set = false;

    auto set_field = [&](const std::string& key, const std::string& value) {
        try {
            TrainConfig& t = s.train;
            if (key == "dataset") s.dataset_path = value;
            else if (key == "weak_pairs") s.weak_pairs_path = value;
            else if (key == "epochs") t.epochs = std::stoi(value);
            else if (key == "batch_size") t.batch_size = std::stoul(value);
            else if (key == "labeled_batch_size") t.labeled_batch_size = std::stoul(value);
            else if (key == "learning_rate") t.learning_rate = std::stod(value);
            else if (key == "momentum") t.momentum = std::stod(value);
            else if (key == "optimizer") {
                if (value == "sgd-momentum") t.optimizer = Optimizer::SgdMomentum;
                else if (value == "sgd") t.optimizer = Optimizer::PlainSgd;
                else throw std::invalid_argument("must be sgd-momentum or sgd");
            } else if (key == "pairs_per_batch") t.pairs_per_batch = std::stoul(value);
            else if (key == "gamma") t.gamma = std::stod(value);
            else if (key == "alpha_pos") t.alpha_pos = std::stod(value);
            else if (key == "tau") t.tau = std::stod(value);
            else if (key == "lambda1_max") t.lambda1.w_max = std::stod(value);
            else if (key == "lambda2_max") t.lambda2.w_max = std::stod(value);
            else if (key == "lambda3_max") t.lambda3.w_max = std::stod(value);
            else if (key == "ramp_epochs") {
                int r = std::stoi(value);
                t.lambda1.ramp_epochs = t.lambda2.ramp_epochs = t.lambda3.ramp_epochs = r;
                ramp_set = true;
            } else if (key == "noise_sigma") t.noise_sigma = std::stod(value);
            else if (key == "alpha_max") t.alpha_max = std::stod(value);
            else if (key == "seed") t.seed = std::stoull(value);
            else if (key == "eval_with") {
                if (value == "teacher") t.eval_with = EvalWith::Teacher;
                else if (value == "student") t.eval_with = EvalWith::Student;
                else throw std::invalid_argument("must be teacher or student");
            } else if (key == "consistency_scope") {
                if (value == "both") t.consistency_scope = ConsistencyScope::Both;
                else if (value == "labeled") t.consistency_scope = ConsistencyScope::Labeled;
                else if (value == "unlabeled") t.consistency_scope = ConsistencyScope::Unlabeled;
                else throw std::invalid_argument("must be both, labeled or unlabeled");
            } else if (key == "enable_consistency") t.enable_consistency = parse_bool(value);
            else if (key == "enable_similarity") t.enable_similarity = parse_bool(value);
            else if (key == "enable_cotraining") t.enable_cotraining = parse_bool(value);
            else if (key == "weak_mix_pseudo") t.weak_mix_pseudo = parse_bool(value);
            else if (key == "hidden_widths") t.h_spec.hidden_widths = parse_widths(value);
            else if (key == "feature_dim") t.h_spec.feature_dim = std::stoul(value);
            else if (key == "classifier_hidden") t.c_spec.hidden_widths = parse_widths(value);
            else if (key == "simnet_hidden") t.s_spec.hidden_widths = parse_widths(value);
            else if (key == "n_labeled") s.n_labeled = std::stoul(value);
            else if (key == "test_fraction") s.test_fraction = std::stod(value);
            else if (key == "stratified") s.stratified = parse_bool(value);
            else if (key == "standardize") s.standardize = parse_bool(value);
            else if (key == "fresh_split_per_seed") s.fresh_split_per_seed = parse_bool(value);
            else errors.push_back(key + ": unknown key");
        } catch (const std::exception& e) {
            errors.push_back(key + ": invalid value '" + value + "'");
        }
    };

    for (const auto& [k, v] : kv) set_field(k, v);

    if (!ramp_set) {
        int r = std::max(1, s.train.epochs * 2 / 5);  // 40% of the run
        s.train.lambda1.ramp_epochs = r;
        s.train.lambda2.ramp_epochs = r;
        s.train.lambda3.ramp_epochs = r;
    }
    s.train.c_spec.feature_dim = s.train.h_spec.feature_dim;
    s.train.s_spec.feature_dim = s.train.h_spec.feature_dim;

    for (const auto& v : s.train.validate()) errors.push_back(v);

    if (!errors.empty()) {
        std::string msg = "config validation failed:";
        for (const auto& e : errors) msg += "\n  " + e;
        throw ConfigError(msg);
    }
    return s;
}

std::map<std::string, std::string> settings_to_map(const RunSettings& s) {
    const TrainConfig& t = s.train;
    std::map<std::string, std::string> m;
    char buf[40];
    auto fmt = [&](double v) {
        // shortest representation that round-trips exactly
        for (int prec = 1; prec <= 17; ++prec) {
            std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
            if (std::strtod(buf, nullptr) == v) break;
        }
        return std::string(buf);
    };
    m["dataset"] = s.dataset_path;
    m["weak_pairs"] = s.weak_pairs_path;
    m["epochs"] = std::to_string(t.epochs);
    m["batch_size"] = std::to_string(t.batch_size);
    m["labeled_batch_size"] = std::to_string(t.labeled_batch_size);
    m["learning_rate"] = fmt(t.learning_rate);
    m["momentum"] = fmt(t.momentum);
    m["optimizer"] = t.optimizer == Optimizer::SgdMomentum ? "sgd-momentum" : "sgd";
    m["pairs_per_batch"] = std::to_string(t.pairs_per_batch);
    m["gamma"] = fmt(t.gamma);
    m["alpha_pos"] = fmt(t.alpha_pos);
    m["tau"] = fmt(t.tau);
    m["lambda1_max"] = fmt(t.lambda1.w_max);
    m["lambda2_max"] = fmt(t.lambda2.w_max);
    m["lambda3_max"] = fmt(t.lambda3.w_max);
    m["ramp_epochs"] = std::to_string(t.lambda1.ramp_epochs);
    m["noise_sigma"] = fmt(t.noise_sigma);
    m["alpha_max"] = fmt(t.alpha_max);
    m["seed"] = std::to_string(t.seed);
    m["eval_with"] = t.eval_with == EvalWith::Teacher ? "teacher" : "student";
    m["consistency_scope"] = t.consistency_scope == ConsistencyScope::Both ? "both"
                             : t.consistency_scope == ConsistencyScope::Labeled ? "labeled"
                                                                                : "unlabeled";
    m["enable_consistency"] = t.enable_consistency ? "true" : "false";
    m["enable_similarity"] = t.enable_similarity ? "true" : "false";
    m["enable_cotraining"] = t.enable_cotraining ? "true" : "false";
    m["weak_mix_pseudo"] = t.weak_mix_pseudo ? "true" : "false";
    m["hidden_widths"] = widths_to_string(t.h_spec.hidden_widths);
    m["feature_dim"] = std::to_string(t.h_spec.feature_dim);
    m["classifier_hidden"] = widths_to_string(t.c_spec.hidden_widths);
    m["simnet_hidden"] = widths_to_string(t.s_spec.hidden_widths);
    m["n_labeled"] = std::to_string(s.n_labeled);
    m["test_fraction"] = fmt(s.test_fraction);
    m["stratified"] = s.stratified ? "true" : "false";
    m["standardize"] = s.standardize ? "true" : "false";
    m["fresh_split_per_seed"] = s.fresh_split_per_seed ? "true" : "false";
    return m;
}

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file for digest: " + path);
    std::uint64_t h = 1469598103934665603ull;
    char c;
    while (in.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_manifest(const std::string& path, const RunSettings& settings,
                    const std::vector<std::string>& input_files,
                    const std::vector<std::string>& artifact_paths) {
    nlohmann::json j;
    j["tool_version"] = kToolVersion;
    j["seed"] = settings.train.seed;
    j["config"] = settings_to_map(settings);
    nlohmann::json inputs = nlohmann::json::object();
    for (const auto& f : input_files) inputs[f] = file_digest(f);
    j["input_digests"] = inputs;
    j["artifacts"] = artifact_paths;
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write manifest: " + path);
    out << j.dump(2) << "\n";
}

}  // namespace mlsn
