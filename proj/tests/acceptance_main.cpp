// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Training-based checks are fully seeded, so their outcomes are
// reproducible run to run.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mlsn/checkpoint.hpp"
#include "mlsn/config.hpp"
#include "mlsn/gradcheck_suite.hpp"
#include "mlsn/trainer.hpp"

using namespace mlsn;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("criterion %d: %s  (%s)\n", criterion, pass ? "PASS" : "FAIL",
                detail.c_str());
    if (!pass) ++g_failures;
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), f, a, b, c);
    return buf;
}

bool params_bitwise_equal(const ParamSet& a, const ParamSet& b) {
    for (const auto& [name, t] : a.entries) {
        const Tensor& u = b.at(name);
        if (t.size() != u.size() ||
            std::memcmp(t.values.data(), u.values.data(), t.size() * sizeof(double)) != 0)
            return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// 1. gradient checks over every primitive and composed loss

void criterion_1() {
    auto t0 = std::chrono::steady_clock::now();
    auto results = run_gradcheck_suite();
    double worst = 0.0;
    bool all = true;
    for (const auto& r : results) {
        worst = std::max(worst, r.max_rel_error);
        all = all && r.passed;
    }
    double secs = elapsed_s(t0);
    report(1, all && secs < 30.0,
           fmt("gradcheck: %.0f checks, worst rel error %.3g, %.1f s",
               static_cast<double>(results.size()), worst, secs));
}

// ---------------------------------------------------------------------------
// 2. zero auxiliary weights reduce the full loop to plain supervised SGD

TrainConfig reduction_config() {
    TrainConfig cfg;
    cfg.h_spec = {2, {16}, 8};
    cfg.c_spec = {8, 2, {}};
    cfg.s_spec = {8, {8}};
    cfg.epochs = 8;
    cfg.batch_size = 32;
    cfg.labeled_batch_size = 8;
    cfg.lambda1 = {0.0, 4};
    cfg.lambda2 = {0.0, 4};
    cfg.lambda3 = {0.0, 4};
    cfg.noise_sigma = 0.0;
    cfg.seed = 11;
    return cfg;
}

void criterion_2() {
    TrainConfig cfg = reduction_config();
    RngStream gen(3, "gen-data");
    Dataset ds = gen_two_moons(300, 0.15, gen);
    SplitSpec spec{&ds, 10, 0.25, true, true, true};
    SSLSplit split = make_split(spec, cfg.seed);

    TrainResult full = train(cfg, split);

    // plain supervised loop: same init, same labeled batch stream, CE only
    RngStream init_rng(cfg.seed, "init");
    RngStream bl_rng(cfg.seed, "bl_shuffle");
    RngStream bu_rng(cfg.seed, "bu_shuffle");
    ModelState ref = init_model(cfg.h_spec, cfg.c_spec, cfg.s_spec, init_rng);
    BatchCycler cycler(split.labeled.n(), &bl_rng);
    std::map<std::string, std::vector<double>> vel;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        EpochPlan plan =
            make_epoch_plan(split.labeled.n(), split.unlabeled.n(), cfg, cycler, bu_rng);
        for (const auto& bl : plan.bl_batches) {
            Tensor x = Tensor::zeros({bl.size(), split.labeled.dim()});
            std::vector<int> y(bl.size());
            for (std::size_t i = 0; i < bl.size(); ++i) {
                std::copy_n(split.labeled.features.values.data() + bl[i] * split.labeled.dim(),
                            split.labeled.dim(), x.values.data() + i * split.labeled.dim());
                y[i] = split.labeled.labels[bl[i]];
            }
            Graph g;
            Graph::NodeId probs =
                build_classifier(g, ref, build_feature_extractor(g, ref, g.constant(x)));
            cross_entropy_node(g, probs, y, cfg.c_spec.num_classes);
            g.forward();
            ref.h_params.zero_grads();
            ref.c_params.zero_grads();
            g.backward();
            for (auto* ps : {&ref.h_params, &ref.c_params}) {
                for (auto& [name, t] : ps->entries) {
                    auto& v = vel[(ps == &ref.h_params ? "h." : "c.") + name];
                    if (v.size() != t.size()) v.assign(t.size(), 0.0);
                    for (std::size_t i = 0; i < t.size(); ++i) {
                        v[i] = cfg.momentum * v[i] + t.grad[i];
                        t.values[i] -= cfg.learning_rate * v[i];
                    }
                }
            }
        }
    }

    bool same = params_bitwise_equal(full.student.h_params, ref.h_params) &&
                params_bitwise_equal(full.student.c_params, ref.c_params) &&
                params_bitwise_equal(full.student.s_params, ref.s_params);
    report(2, same, same ? "final student parameters bit-identical to plain supervised loop"
                         : "parameter mismatch against plain supervised loop");
}

// ---------------------------------------------------------------------------
// 3. closed-form loss values

void criterion_3() {
    bool ok = true;
    std::string why;

    Tensor uniform = Tensor::zeros({3, 10});
    for (double& v : uniform.values) v = 0.1;
    if (std::abs(cross_entropy(uniform, {0, 4, 9}) - std::log(10.0)) > 1e-12) {
        ok = false;
        why += "uniform CE != ln K; ";
    }

    // closed form 0.5 * (1-0.9)^2 * (-ln 0.9) = 5.2681e-4 at quoted precision
    double focal = focal_loss(0.9, 1, 2.0, 0.5);
    double exact = 0.5 * 0.01 * -std::log(0.9);
    if (std::abs(focal - exact) > 1e-9 || std::abs(focal - 5.2681e-4) > 1e-8) {
        ok = false;
        why += "focal(0.9,1,2,0.5) off; ";
    }

    ScheduleSpec ramp{2.5, 40};
    if (std::abs(ramp_weight(ramp, 0) - 2.5 * std::exp(-5.0)) > 1e-12) {
        ok = false;
        why += "ramp(0) != w_max*e^-5; ";
    }

    // EMA scalar: 0.99*1 + 0.01*0 must be exact
    FeatureExtractorSpec h{2, {2}, 2};
    ClassifierSpec c{2, 2, {}};
    SimilarityNetSpec s{2, {2}};
    RngStream rng(1, "init");
    ModelState student = init_model(h, c, s, rng);
    TeacherState teacher = make_teacher(student, 0.99, 0.0);
    for (auto& [name, t] : teacher.params.h_params.entries)
        std::fill(t.values.begin(), t.values.end(), 1.0);
    for (auto& [name, t] : student.h_params.entries)
        std::fill(t.values.begin(), t.values.end(), 0.0);
    teacher.step = 1 << 20;
    ema_update(teacher, student);
    for (const auto& [name, t] : teacher.params.h_params.entries)
        for (double v : t.values)
            if (v != 0.99 * 1.0 + 0.01 * 0.0) {
                ok = false;
                why += "EMA scalar not exact; ";
            }

    report(3, ok, ok ? fmt("ln K, focal %.6g, ramp, EMA all match closed forms", focal) : why);
}

// ---------------------------------------------------------------------------
// 4/5: paired-seed method comparisons

struct MethodErrors {
    std::vector<double> sup, mt, mlsn;
};

TrainConfig as_supervised(TrainConfig cfg) {
    cfg.enable_consistency = cfg.enable_similarity = cfg.enable_cotraining = false;
    cfg.noise_sigma = 0.0;
    cfg.eval_with = EvalWith::Student;
    return cfg;
}

TrainConfig as_mt(TrainConfig cfg) {
    cfg.enable_similarity = cfg.enable_cotraining = false;
    return cfg;
}

MethodErrors compare_methods(const TrainConfig& mlsn_cfg, const SplitSpec& spec, int n_seeds) {
    MethodErrors e;
    e.sup = run_experiment(as_supervised(mlsn_cfg), spec, n_seeds).errors;
    e.mt = run_experiment(as_mt(mlsn_cfg), spec, n_seeds).errors;
    e.mlsn = run_experiment(mlsn_cfg, spec, n_seeds).errors;
    return e;
}

double mean(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    return m / static_cast<double>(v.size());
}

void criterion_4() {
    auto t0 = std::chrono::steady_clock::now();
    RngStream gen(7, "gen-data");
    Dataset ds = gen_two_moons(1000, 0.15, gen);

    TrainConfig cfg;
    cfg.h_spec = {2, {64, 64}, 32};
    cfg.c_spec = {32, 2, {}};
    cfg.s_spec = {32, {32}};
    cfg.epochs = 100;
    cfg.learning_rate = 0.1;
    cfg.noise_sigma = 0.3;
    cfg.lambda1 = {1.0, 40};
    cfg.lambda2 = {1.0, 40};
    cfg.lambda3 = {0.3, 40};
    cfg.seed = 1;

    SplitSpec spec{&ds, 6, 0.25, true, true, true};
    MethodErrors e = compare_methods(cfg, spec, 10);
    double ms = mean(e.sup), mm = mean(e.mt), ml = mean(e.mlsn);
    double secs = elapsed_s(t0);
    bool pass = ml <= ms - 0.05 && ml <= mm && secs < 300.0;
    report(4, pass,
           fmt("two-moons mean error: supervised %.4f, mt %.4f, mlsn %.4f", ms, mm, ml) +
               fmt("; %.0f s", secs));
}

void criterion_5() {
    auto t0 = std::chrono::steady_clock::now();
    RngStream gen(7, "gen-data");
    Dataset ds = gen_digits(1500, 1.0, gen);

    TrainConfig cfg;
    cfg.h_spec = {64, {64, 64}, 32};
    cfg.c_spec = {32, 10, {}};
    cfg.s_spec = {32, {32}};
    cfg.epochs = 100;
    cfg.learning_rate = 0.05;
    cfg.noise_sigma = 0.5;
    cfg.lambda1 = {3.0, 30};
    cfg.lambda2 = {0.5, 30};
    cfg.lambda3 = {0.02, 30};
    cfg.tau = 0.98;
    cfg.seed = 1;

    SplitSpec spec{&ds, 100, 0.25, true, true, true};
    MethodErrors e = compare_methods(cfg, spec, 5);
    double ms = mean(e.sup), mm = mean(e.mt), ml = mean(e.mlsn);
    int best = 0;
    for (int i = 0; i < 5; ++i)
        if (e.mlsn[i] < e.mt[i] && e.mlsn[i] < e.sup[i]) ++best;
    double secs = elapsed_s(t0);
    bool pass = ms > mm && mm >= ml && best >= 3 && secs < 900.0;
    report(5, pass,
           fmt("digits mean error: supervised %.4f, mt %.4f, mlsn %.4f", ms, mm, ml) +
               fmt("; mlsn strictly best on %.0f/5 seeds, %.0f s", best, secs));
}

// ---------------------------------------------------------------------------
// 6. weak labels beat the labels-only baseline on >= 4/5 paired seeds

void criterion_6() {
    auto t0 = std::chrono::steady_clock::now();
    RngStream gen(7, "gen-data");
    Dataset ds = gen_digits(1500, 1.0, gen);

    TrainConfig weak_cfg;
    weak_cfg.h_spec = {64, {64, 64}, 32};
    weak_cfg.c_spec = {32, 10, {}};
    weak_cfg.s_spec = {32, {32}};
    weak_cfg.epochs = 100;
    weak_cfg.learning_rate = 0.05;
    weak_cfg.noise_sigma = 0.5;
    weak_cfg.lambda1 = {3.0, 30};
    weak_cfg.lambda2 = {0.5, 30};
    weak_cfg.enable_cotraining = false;

    int wins = 0;
    std::string per_seed;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        TrainConfig cfg = weak_cfg;
        cfg.seed = seed;
        SplitSpec spec{&ds, 100, 0.25, true, true, true};
        SSLSplit split = make_split(spec, seed);

        // recover the true labels of the split's training rows so the weak
        // pairs carry honest same-class flags; the standardized rows no
        // longer match the source bytes, so rebuild the split unstandardized
        // and look rows up by their exact raw bytes
        SplitSpec raw_spec = spec;
        raw_spec.standardize = false;
        SSLSplit raw = make_split(raw_spec, seed);
        Dataset merged;
        merged.num_classes = ds.num_classes;
        std::size_t n_train = raw.labeled.n() + raw.unlabeled.n();
        merged.features = Tensor::zeros({n_train, ds.dim()});
        merged.labels.resize(n_train);
        auto find_label = [&](const double* row) {
            for (std::size_t r = 0; r < ds.n(); ++r)
                if (std::memcmp(ds.features.values.data() + r * ds.dim(), row,
                                ds.dim() * sizeof(double)) == 0)
                    return ds.labels[r];
            return -1;
        };
        for (std::size_t r = 0; r < raw.labeled.n(); ++r) merged.labels[r] = raw.labeled.labels[r];
        for (std::size_t r = 0; r < raw.unlabeled.n(); ++r)
            merged.labels[raw.labeled.n() + r] =
                find_label(raw.unlabeled.features.values.data() + r * ds.dim());
        RngStream pair_rng(seed, "weak-pairs");
        Dataset label_source = merged;
        label_source.features = Tensor::zeros({n_train, 1});  // labels drive pair targets
        WeakPairSet wp = gen_weak_pairs(label_source, 5000, pair_rng);

        TrainResult with_pairs = train_weak_label_mode(cfg, split, wp);
        TrainResult baseline = train(as_supervised(cfg), split);
        double acc_weak = 1.0 - with_pairs.final_test_error;
        double acc_base = 1.0 - baseline.final_test_error;
        if (acc_weak > acc_base) ++wins;
        per_seed += fmt(" %.3f>%.3f", acc_weak, acc_base);
    }
    double secs = elapsed_s(t0);
    report(6, wins >= 4,
           fmt("weak-label wins on %.0f/5 seeds;", wins) + per_seed + fmt(", %.0f s", secs));
}

// ---------------------------------------------------------------------------
// 7. property suites

void criterion_7() {
    bool ok = true;
    std::string why;

    // similarity symmetry over 100 random pairs, bit-identical
    FeatureExtractorSpec h{4, {8}, 6};
    ClassifierSpec c{6, 3, {}};
    SimilarityNetSpec s{6, {8}};
    RngStream init_rng(19, "init");
    ModelState m = init_model(h, c, s, init_rng);
    RngStream rng(23, "prop");
    for (int k = 0; k < 100 && ok; ++k) {
        Tensor fi = Tensor::zeros({1, 6});
        Tensor fj = Tensor::zeros({1, 6});
        for (double& v : fi.values) v = rng.normal(0.0, 1.0);
        for (double& v : fj.values) v = rng.normal(0.0, 1.0);
        double a = similarity(m, fi, fj);
        double b = similarity(m, fj, fi);
        if (std::memcmp(&a, &b, sizeof(double)) != 0) {
            ok = false;
            why += "similarity asymmetry; ";
        }
    }

    // softmax normalization on random batches
    for (int k = 0; k < 20 && ok; ++k) {
        Tensor x = Tensor::zeros({5, 4});
        for (double& v : x.values) v = rng.normal(0.0, 2.0);
        Tensor p = classify(m, extract_features(m, x));
        for (std::size_t r = 0; r < 5; ++r) {
            double sum = 0.0;
            for (std::size_t j = 0; j < 3; ++j) sum += p.at(r, j);
            if (std::abs(sum - 1.0) > 1e-9) {
                ok = false;
                why += "softmax rows not normalized; ";
            }
        }
    }

    // soft labels sum to 1
    CenterMap cm;
    cm.entries = {{0, 0}, {1, 1}, {2, 2}};
    cm.covered_classes = {0, 1, 2};
    for (int k = 0; k < 20 && ok; ++k) {
        Tensor centers = Tensor::zeros({3, 6});
        Tensor xf = Tensor::zeros({1, 6});
        for (double& v : centers.values) v = rng.normal(0.0, 1.0);
        for (double& v : xf.values) v = rng.normal(0.0, 1.0);
        auto sl = soft_label(m, xf, cm, centers, 3);
        double sum = 0.0;
        for (double p : sl->probs) sum += p;
        if (!sl || std::abs(sum - 1.0) > 1e-9) {
            ok = false;
            why += "soft label not normalized; ";
        }
    }

    // pair sampler: distinct pairs, deterministic under a fixed stream
    std::vector<double> conf(20, 0.99);
    RngStream pa(31, "pairs"), pb(31, "pairs");
    auto lista = sample_pairs(10, 20, 60, conf, 0.95, pa);
    auto listb = sample_pairs(10, 20, 60, conf, 0.95, pb);
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& p : lista) seen.insert({p.i_index, p.j_index});
    if (seen.size() != lista.size()) {
        ok = false;
        why += "pair sampler repeats pairs; ";
    }
    if (lista.size() != listb.size()) {
        ok = false;
        why += "pair sampler nondeterministic; ";
    } else {
        for (std::size_t k = 0; k < lista.size(); ++k)
            if (lista[k].i_index != listb[k].i_index || lista[k].j_index != listb[k].j_index) {
                ok = false;
                why += "pair sampler nondeterministic; ";
                break;
            }
    }

    // EMA trace stays inside the convex hull of teacher/student values
    ModelState student = m;
    RngStream init2(29, "init");
    TeacherState teacher = make_teacher(init_model(h, c, s, init2), 0.99, 0.0);
    teacher.step = 2;
    for (int step = 0; step < 10 && ok; ++step) {
        Tensor before = teacher.params.h_params.at("W0");
        ema_update(teacher, student);
        const Tensor& after = teacher.params.h_params.at("W0");
        const Tensor& sw = student.h_params.at("W0");
        for (std::size_t i = 0; i < after.size(); ++i) {
            double lo = std::min(before.values[i], sw.values[i]) - 1e-15;
            double hi = std::max(before.values[i], sw.values[i]) + 1e-15;
            if (after.values[i] < lo || after.values[i] > hi) {
                ok = false;
                why += "EMA left the convex hull; ";
                break;
            }
        }
    }

    // metrics total consistency on a short real run
    RngStream gen(3, "gen-data");
    Dataset moons = gen_two_moons(120, 0.15, gen);
    TrainConfig cfg = reduction_config();
    cfg.lambda1 = {1.0, 3};
    cfg.lambda2 = {1.0, 3};
    cfg.lambda3 = {0.3, 3};
    cfg.noise_sigma = 0.2;
    cfg.epochs = 5;
    SplitSpec spec{&moons, 8, 0.25, true, true, true};
    TrainResult res = train(cfg, make_split(spec, 4));
    for (const auto& r : res.metrics) {
        double expect = r.l_c + r.lambda1 * r.l_t + r.lambda2 * r.l_s + r.lambda3 * r.l_sc;
        if (std::abs(r.total - expect) > 1e-9) {
            ok = false;
            why += "metrics total inconsistent; ";
            break;
        }
    }

    report(7, ok, ok ? "symmetry, normalization, sampler, EMA and metrics properties hold" : why);
}

// ---------------------------------------------------------------------------
// 8. byte-identical artifacts through the CLI binary

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion_8() {
#ifndef MLSN_CLI_PATH
    report(8, false, "CLI path not wired into the build");
#else
    const std::string cli = MLSN_CLI_PATH;
    const std::string dir = "acceptance_tmp";
    std::string q = "\"" + cli + "\"";
    auto run = [&](const std::string& args) {
        std::string cmd = q + " " + args + " > /dev/null 2>&1";
        return std::system(cmd.c_str());
    };
    std::system(("rm -rf " + dir + " && mkdir -p " + dir).c_str());

    bool ok = true;
    std::string why;
    if (run("gen-data --two-moons --n 400 --noise 0.15 --seed 7 --out " + dir + "/moons.csv") !=
        0) {
        ok = false;
        why += "gen-data failed; ";
    }
    {
        std::ofstream cfg(dir + "/run.cfg");
        cfg << "dataset = " << dir << "/moons.csv\nn_labeled = 6\nepochs = 8\nseed = 1\n";
    }
    if (ok && (run("train --config " + dir + "/run.cfg --out-dir " + dir + "/a") != 0 ||
               run("train --config " + dir + "/run.cfg --out-dir " + dir + "/b") != 0)) {
        ok = false;
        why += "train failed; ";
    }
    if (ok && slurp(dir + "/a/metrics.csv") != slurp(dir + "/b/metrics.csv")) {
        ok = false;
        why += "metrics CSVs differ between identical runs; ";
    }
    if (ok && slurp(dir + "/a/metrics.csv").empty()) {
        ok = false;
        why += "metrics CSV empty; ";
    }
    if (ok &&
        (run("experiment --config " + dir + "/run.cfg --methods supervised,mlsn --seeds 2 --out " +
             dir + "/s1.txt") != 0 ||
         run("experiment --config " + dir + "/run.cfg --methods supervised,mlsn --seeds 2 --out " +
             dir + "/s2.txt") != 0)) {
        ok = false;
        why += "experiment failed; ";
    }
    if (ok && slurp(dir + "/s1.txt") != slurp(dir + "/s2.txt")) {
        ok = false;
        why += "experiment summaries differ; ";
    }
    std::system(("rm -rf " + dir).c_str());
    report(8, ok, ok ? "train metrics and experiment summaries are byte-identical" : why);
#endif
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    if (g_failures == 0) {
        std::printf("all acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d acceptance criteria failed\n", g_failures);
    return 1;
}
