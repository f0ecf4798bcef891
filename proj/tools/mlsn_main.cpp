// mlsn: semi-supervised training with a co-trained pairwise similarity
// branch on top of Mean-Teacher consistency. Subcommands cover data
// generation, training, evaluation, multi-seed experiments, gradient
// checking and feature export.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "mlsn/checkpoint.hpp"
#include "mlsn/config.hpp"
#include "mlsn/data.hpp"
#include "mlsn/gradcheck_suite.hpp"
#include "mlsn/trainer.hpp"

namespace fs = std::filesystem;
using namespace mlsn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CommonTrainArgs {
    std::string config_path;
    std::string dataset_override;
    std::string weak_pairs_override;
    std::string out_dir = "run";
    std::int64_t seed_override = -1;
};

RunSettings load_settings(const CommonTrainArgs& args) {
    auto kv = read_config_file(args.config_path);
    if (!args.dataset_override.empty()) kv["dataset"] = args.dataset_override;
    if (!args.weak_pairs_override.empty()) kv["weak_pairs"] = args.weak_pairs_override;
    if (args.seed_override >= 0) kv["seed"] = std::to_string(args.seed_override);
    RunSettings s = resolve_settings(kv);
    if (s.dataset_path.empty()) throw ConfigError("config validation failed:\n  dataset: missing");
    return s;
}

// Loads the dataset, adapts the network specs to it and builds the SSL split.
SSLSplit prepare_split(RunSettings& s, Dataset* out_dataset = nullptr) {
    Dataset ds = load_csv_dataset(s.dataset_path);
    s.train.h_spec.input_dim = ds.dim();
    s.train.c_spec.num_classes = static_cast<std::size_t>(ds.num_classes);
    if (s.n_labeled == 0) {
        std::size_t n_test = static_cast<std::size_t>(std::lround(s.test_fraction * ds.n()));
        s.n_labeled = ds.n() - n_test;
        s.stratified = false;
    }
    SplitSpec spec{&ds, s.n_labeled, s.test_fraction, s.stratified, s.fresh_split_per_seed,
                   s.standardize};
    if (out_dataset) *out_dataset = ds;
    return make_split(spec, s.train.seed);
}

int cmd_train(const CommonTrainArgs& args) {
    RunSettings s = load_settings(args);
    SSLSplit split = prepare_split(s);

    fs::create_directories(args.out_dir);
    std::string metrics_path = args.out_dir + "/metrics.csv";
    std::string ckpt_path = args.out_dir + "/checkpoint.txt";
    std::vector<std::string> inputs = {args.config_path, s.dataset_path};
    if (!s.weak_pairs_path.empty()) inputs.push_back(s.weak_pairs_path);
    write_manifest(args.out_dir + "/manifest.json", s, inputs, {metrics_path, ckpt_path});

    TrainResult result;
    if (!s.weak_pairs_path.empty()) {
        WeakPairSet wp = load_weak_pairs(s.weak_pairs_path);
        result = train_weak_label_mode(s.train, split, wp);
    } else {
        result = train(s.train, split);
    }

    write_metrics_csv(metrics_path, result.metrics);
    save_checkpoint(ckpt_path, result.student, &result.teacher);
    std::printf("final_test_error=%.6f\n", result.final_test_error);
    return kExitOk;
}

int cmd_eval(const std::string& ckpt_path, const std::string& data_path, bool use_teacher) {
    LoadedCheckpoint cp = load_checkpoint(ckpt_path);
    Dataset ds = load_csv_dataset(data_path);
    const ModelState& m =
        use_teacher && cp.teacher ? cp.teacher->params : cp.student;
    if (ds.dim() != m.h_spec.input_dim)
        throw ConfigError("eval: dataset dimension does not match the checkpoint");
    double err = evaluate(m, ds);
    std::printf("error_rate=%.6f\n", err);
    return kExitOk;
}

int cmd_experiment(const CommonTrainArgs& args, const std::string& methods_csv, int n_seeds,
                   const std::string& out_path) {
    RunSettings s = load_settings(args);
    Dataset ds = load_csv_dataset(s.dataset_path);
    s.train.h_spec.input_dim = ds.dim();
    s.train.c_spec.num_classes = static_cast<std::size_t>(ds.num_classes);
    SplitSpec spec{&ds, s.n_labeled, s.test_fraction, s.stratified, s.fresh_split_per_seed,
                   s.standardize};

    std::vector<std::string> methods;
    {
        std::stringstream ss(methods_csv);
        std::string tok;
        while (std::getline(ss, tok, ',')) methods.push_back(tok);
    }

    std::ostringstream report;
    for (const auto& method : methods) {
        TrainConfig cfg = s.train;
        if (method == "supervised") {
            cfg.enable_consistency = cfg.enable_similarity = cfg.enable_cotraining = false;
            cfg.noise_sigma = 0.0;
            cfg.eval_with = EvalWith::Student;
        } else if (method == "mt") {
            cfg.enable_similarity = cfg.enable_cotraining = false;
        } else if (method == "mlsn") {
            // full configuration as given
        } else {
            throw ConfigError("unknown method: " + method +
                              " (expected supervised, mt or mlsn)");
        }
        ExperimentSummary summary = run_experiment(cfg, spec, n_seeds);
        report << summary_to_text(method, summary) << "\n";
    }
    std::cout << report.str();
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw ConfigError("cannot write summary: " + out_path);
        out << report.str();
    }
    return kExitOk;
}

int cmd_gradcheck() {
    auto results = run_gradcheck_suite();
    bool all_ok = true;
    for (const auto& r : results) {
        std::printf("%-28s max_rel_error=%.3e  %s\n", r.name.c_str(), r.max_rel_error,
                    r.passed ? "PASS" : "FAIL");
        all_ok = all_ok && r.passed;
    }
    return all_ok ? kExitOk : kExitRuntime;
}

int cmd_export_features(const std::string& ckpt_path, const std::string& data_path,
                        const std::string& out_prefix, bool use_teacher) {
    LoadedCheckpoint cp = load_checkpoint(ckpt_path);
    Dataset ds = load_csv_dataset(data_path);
    const ModelState& m = use_teacher && cp.teacher ? cp.teacher->params : cp.student;
    if (ds.dim() != m.h_spec.input_dim)
        throw ConfigError("export-features: dataset dimension does not match the checkpoint");
    FeatureExport fe = export_features(m, ds);

    char buf[40];
    {
        std::ofstream out(out_prefix + "_pca.csv");
        if (!out) throw ConfigError("cannot write projection CSV");
        out << "id,pc1,pc2,label\n";
        for (std::size_t i = 0; i < ds.n(); ++i) {
            out << i << ",";
            std::snprintf(buf, sizeof(buf), "%.12g", fe.projection.at(i, 0));
            out << buf << ",";
            std::snprintf(buf, sizeof(buf), "%.12g", fe.projection.at(i, 1));
            out << buf << "," << ds.labels[i] << "\n";
        }
    }
    {
        std::ofstream out(out_prefix + "_features.csv");
        if (!out) throw ConfigError("cannot write feature CSV");
        out << "id";
        for (std::size_t k = 1; k <= fe.raw.cols(); ++k) out << ",f" << k;
        out << "\n";
        for (std::size_t i = 0; i < ds.n(); ++i) {
            out << i;
            for (std::size_t k = 0; k < fe.raw.cols(); ++k) {
                std::snprintf(buf, sizeof(buf), "%.12g", fe.raw.at(i, k));
                out << "," << buf;
            }
            out << "\n";
        }
    }
    std::printf("wrote %s_pca.csv and %s_features.csv\n", out_prefix.c_str(),
                out_prefix.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MLSN semi-supervised learning engine"};
    app.require_subcommand(1);

    // gen-data ---------------------------------------------------------------
    auto* gen = app.add_subcommand("gen-data", "generate datasets and weak-pair files");
    bool gen_moons = false, gen_digits_flag = false, gen_weak = false;
    std::size_t gen_n = 1000, n_pairs = 5000;
    double gen_noise = 0.15;
    std::uint64_t gen_seed = 7;
    std::string gen_out = "dataset.csv", gen_dataset;
    gen->add_flag("--two-moons", gen_moons, "two interleaving noisy semicircles");
    gen->add_flag("--digits", gen_digits_flag, "synthetic 8x8 digit vectors (d=64, K=10)");
    gen->add_flag("--weak-pairs", gen_weak, "same-class pair file from a labeled CSV");
    gen->add_option("--n", gen_n, "number of samples");
    gen->add_option("--n-pairs", n_pairs, "number of weak pairs");
    gen->add_option("--noise", gen_noise, "noise sigma");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--out", gen_out, "output path");
    gen->add_option("--dataset", gen_dataset, "labeled dataset CSV (for --weak-pairs)");

    // train ------------------------------------------------------------------
    CommonTrainArgs targs;
    auto* tr = app.add_subcommand("train", "run Algorithm-1 training");
    tr->add_option("--config", targs.config_path, "key=value config file")->required();
    tr->add_option("--data", targs.dataset_override, "override dataset path");
    tr->add_option("--weak-pairs", targs.weak_pairs_override, "weak-pair CSV for L_S");
    tr->add_option("--seed", targs.seed_override, "override seed");
    tr->add_option("--out-dir", targs.out_dir, "artifact directory");

    // eval -------------------------------------------------------------------
    auto* ev = app.add_subcommand("eval", "error rate of a checkpoint on a labeled CSV");
    std::string ev_ckpt, ev_data;
    bool ev_teacher = false;
    ev->add_option("--checkpoint", ev_ckpt)->required();
    ev->add_option("--data", ev_data)->required();
    ev->add_flag("--use-teacher", ev_teacher, "evaluate the teacher weights");

    // experiment ---------------------------------------------------------------
    CommonTrainArgs xargs;
    auto* ex = app.add_subcommand("experiment", "multi-seed method comparison");
    std::string methods = "supervised,mt,mlsn", ex_out;
    int n_seeds = 5;
    ex->add_option("--config", xargs.config_path)->required();
    ex->add_option("--data", xargs.dataset_override, "override dataset path");
    ex->add_option("--methods", methods, "comma list: supervised,mt,mlsn");
    ex->add_option("--seeds", n_seeds, "number of seeds");
    ex->add_option("--seed", xargs.seed_override, "base seed override");
    ex->add_option("--out", ex_out, "summary output file");

    // gradcheck ----------------------------------------------------------------
    app.add_subcommand("gradcheck", "finite-difference check of every primitive and loss");

    // export-features ------------------------------------------------------------
    auto* xf = app.add_subcommand("export-features", "feature matrix + 2-D PCA projection");
    std::string xf_ckpt, xf_data, xf_prefix = "features";
    bool xf_teacher = false;
    xf->add_option("--checkpoint", xf_ckpt)->required();
    xf->add_option("--data", xf_data)->required();
    xf->add_option("--out-prefix", xf_prefix);
    xf->add_flag("--use-teacher", xf_teacher);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (gen->parsed()) {
            int modes = int(gen_moons) + int(gen_digits_flag) + int(gen_weak);
            if (modes != 1)
                throw ConfigError("gen-data: pick exactly one of --two-moons, --digits, "
                                  "--weak-pairs");
            RngStream rng(gen_seed, "gen-data");
            if (gen_moons) {
                save_csv_dataset(gen_out, gen_two_moons(gen_n, gen_noise, rng));
            } else if (gen_digits_flag) {
                save_csv_dataset(gen_out, gen_digits(gen_n, gen_noise, rng));
            } else {
                if (gen_dataset.empty())
                    throw ConfigError("gen-data --weak-pairs requires --dataset");
                Dataset ds = load_csv_dataset(gen_dataset);
                save_weak_pairs(gen_out, gen_weak_pairs(ds, n_pairs, rng));
            }
            std::printf("wrote %s\n", gen_out.c_str());
            return kExitOk;
        }
        if (tr->parsed()) return cmd_train(targs);
        if (ev->parsed()) return cmd_eval(ev_ckpt, ev_data, ev_teacher);
        if (ex->parsed()) return cmd_experiment(xargs, methods, n_seeds, ex_out);
        if (app.get_subcommand("gradcheck")->parsed()) return cmd_gradcheck();
        if (xf->parsed()) return cmd_export_features(xf_ckpt, xf_data, xf_prefix, xf_teacher);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
