#include "mlsn/trainer.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mlsn {

namespace {

struct NamedParam {
    std::string key;
    Tensor* tensor;
};

std::vector<NamedParam> all_params(ModelState& m) {
    std::vector<NamedParam> out;
    for (auto& [name, t] : m.h_params.entries) out.push_back({"h." + name, &t});
    for (auto& [name, t] : m.c_params.entries) out.push_back({"c." + name, &t});
    for (auto& [name, t] : m.s_params.entries) out.push_back({"s." + name, &t});
    return out;
}

class SgdOptimizer {
public:
    SgdOptimizer(const TrainConfig& cfg) : cfg_(cfg) {}

    void step(std::vector<NamedParam>& params) {
        for (auto& p : params) {
            if (cfg_.optimizer == Optimizer::PlainSgd) {
                for (std::size_t i = 0; i < p.tensor->values.size(); ++i)
                    p.tensor->values[i] -= cfg_.learning_rate * p.tensor->grad[i];
            } else {
                auto& v = velocity_[p.key];
                if (v.size() != p.tensor->values.size()) v.assign(p.tensor->values.size(), 0.0);
                for (std::size_t i = 0; i < p.tensor->values.size(); ++i) {
                    v[i] = cfg_.momentum * v[i] + p.tensor->grad[i];
                    p.tensor->values[i] -= cfg_.learning_rate * v[i];
                }
            }
        }
    }

private:
    const TrainConfig& cfg_;
    std::map<std::string, std::vector<double>> velocity_;
};

Tensor gather_dataset_rows(const Dataset& ds, const std::vector<std::size_t>& rows) {
    Tensor out = Tensor::zeros({rows.size(), ds.dim()});
    for (std::size_t r = 0; r < rows.size(); ++r)
        std::copy_n(ds.features.values.data() + rows[r] * ds.dim(), ds.dim(),
                    out.values.data() + r * ds.dim());
    return out;
}

Tensor vstack(const Tensor& a, const Tensor& b) {
    if (b.rows() == 0) return a;
    Tensor out = Tensor::zeros({a.rows() + b.rows(), a.cols()});
    std::copy(a.values.begin(), a.values.end(), out.values.begin());
    std::copy(b.values.begin(), b.values.end(), out.values.begin() + a.values.size());
    return out;
}

}  // namespace

std::vector<std::string> TrainConfig::validate() const {
    std::vector<std::string> bad;
    if (epochs < 0) bad.push_back("epochs: must be >= 0");
    if (batch_size == 0) bad.push_back("batch_size: must be positive");
    if (labeled_batch_size == 0 || labeled_batch_size > batch_size)
        bad.push_back("labeled_batch_size: must be in [1, batch_size]");
    if (learning_rate <= 0.0) bad.push_back("learning_rate: must be positive");
    if (momentum < 0.0 || momentum >= 1.0) bad.push_back("momentum: must be in [0, 1)");
    if (gamma < 0.0) bad.push_back("gamma: must be non-negative");
    if (alpha_pos <= 0.0 || alpha_pos >= 1.0) bad.push_back("alpha_pos: must be in (0, 1)");
    if (tau < 0.0) bad.push_back("tau: must be non-negative");
    if (lambda1.w_max < 0.0) bad.push_back("lambda1_max: must be non-negative");
    if (lambda2.w_max < 0.0) bad.push_back("lambda2_max: must be non-negative");
    if (lambda3.w_max < 0.0) bad.push_back("lambda3_max: must be non-negative");
    if (lambda1.ramp_epochs <= 0 || lambda2.ramp_epochs <= 0 || lambda3.ramp_epochs <= 0)
        bad.push_back("ramp_epochs: must be positive");
    if (noise_sigma < 0.0) bad.push_back("noise_sigma: must be non-negative");
    if (alpha_max < 0.0 || alpha_max >= 1.0) bad.push_back("alpha_max: must be in [0, 1)");
    return bad;
}

std::vector<std::size_t> BatchCycler::take(std::size_t count) {
    std::vector<std::size_t> out;
    out.reserve(count);
    while (out.size() < count) {
        if (pos_ >= deck_.size()) {
            deck_.resize(n_);
            for (std::size_t i = 0; i < n_; ++i) deck_[i] = i;
            rng_->shuffle(deck_);
            pos_ = 0;
        }
        out.push_back(deck_[pos_++]);
    }
    return out;
}

EpochPlan make_epoch_plan(std::size_t n_labeled, std::size_t n_unlabeled,
                          const TrainConfig& config, BatchCycler& bl_cycler,
                          RngStream& bu_rng) {
    EpochPlan plan;
    std::size_t bl_count = std::min(config.labeled_batch_size, n_labeled);
    std::size_t bu_size = config.batch_size - config.labeled_batch_size;
    std::size_t steps;
    if (n_unlabeled > 0) {
        if (bu_size == 0)
            throw ConfigError("batch_size must exceed labeled_batch_size when unlabeled data "
                              "is present");
        steps = (n_unlabeled + bu_size - 1) / bu_size;
        std::vector<std::size_t> perm(n_unlabeled);
        for (std::size_t i = 0; i < n_unlabeled; ++i) perm[i] = i;
        bu_rng.shuffle(perm);
        for (std::size_t s = 0; s < steps; ++s) {
            std::size_t lo = s * bu_size;
            std::size_t hi = std::min(lo + bu_size, n_unlabeled);
            plan.bu_batches.emplace_back(perm.begin() + lo, perm.begin() + hi);
        }
    } else {
        steps = (n_labeled + bl_count - 1) / bl_count;
        plan.bu_batches.assign(steps, {});
    }
    for (std::size_t s = 0; s < steps; ++s) plan.bl_batches.push_back(bl_cycler.take(bl_count));
    return plan;
}

double evaluate(const ModelState& state, const Dataset& test) {
    if (test.n() == 0) throw StateError("evaluate: empty test set");
    if (!test.fully_labeled()) throw StateError("evaluate: test set must be fully labeled");
    Tensor probs = classify(state, extract_features(state, test.features));
    std::size_t wrong = 0;
    for (std::size_t r = 0; r < test.n(); ++r)
        if (argmax_row(probs, r) != test.labels[r]) ++wrong;
    return static_cast<double>(wrong) / static_cast<double>(test.n());
}

double evaluate(const TrainResult& result, const Dataset& test, EvalWith eval_with) {
    return eval_with == EvalWith::Teacher ? evaluate(result.teacher.params, test)
                                          : evaluate(result.student, test);
}

namespace {

TrainResult train_impl(const TrainConfig& config, const SSLSplit& split,
                       const WeakPairSet* weak_pairs) {
    auto violations = config.validate();
    if (!violations.empty()) {
        std::string msg = "invalid config:";
        for (const auto& v : violations) msg += "\n  " + v;
        throw ConfigError(msg);
    }
    if (split.labeled.n() == 0) throw ConfigError("train: labeled set is empty");
    if (!split.labeled.fully_labeled()) throw ConfigError("train: labeled set has missing labels");
    if (config.h_spec.input_dim != split.labeled.dim())
        throw ConfigError("train: h_spec.input_dim does not match the dataset");

    std::size_t n_l = split.labeled.n();
    std::size_t n_u = split.unlabeled.n();
    int num_classes = static_cast<int>(config.c_spec.num_classes);

    if (weak_pairs)
        for (const auto& p : weak_pairs->pairs)
            if (p.i >= n_l + n_u || p.j >= n_l + n_u)
                throw StateError("weak pair index out of range");

    RngStream init_rng(config.seed, "init");
    RngStream bl_rng(config.seed, "bl_shuffle");
    RngStream bu_rng(config.seed, "bu_shuffle");
    RngStream pairs_rng(config.seed, "pairs");
    RngStream centers_rng(config.seed, "centers");
    RngStream noise_student_rng(config.seed, "noise_student");
    RngStream noise_teacher_rng(config.seed, "noise_teacher");
    RngStream weak_rng(config.seed, "weak_pairs");

    TrainResult res;
    res.student = init_model(config.h_spec, config.c_spec, config.s_spec, init_rng);
    res.teacher = make_teacher(res.student, config.alpha_max, config.noise_sigma);

    auto params = all_params(res.student);
    SgdOptimizer opt(config);
    BatchCycler bl_cycler(n_l, &bl_rng);

    // a weak pair's feature row, in labeled-then-unlabeled global order
    auto global_row = [&](std::size_t g, Tensor& dst, std::size_t dst_row) {
        const Dataset& ds = g < n_l ? split.labeled : split.unlabeled;
        std::size_t r = g < n_l ? g : g - n_l;
        std::copy_n(ds.features.values.data() + r * ds.dim(), ds.dim(),
                    dst.values.data() + dst_row * ds.dim());
    };

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        double lam1 = config.enable_consistency ? ramp_weight(config.lambda1, epoch) : 0.0;
        double lam2 = config.enable_similarity ? ramp_weight(config.lambda2, epoch) : 0.0;
        double lam3 = config.enable_cotraining ? ramp_weight(config.lambda3, epoch) : 0.0;

        EpochPlan plan = make_epoch_plan(n_l, n_u, config, bl_cycler, bu_rng);
        std::size_t steps = plan.bl_batches.size();
        double sum_lc = 0.0, sum_lt = 0.0, sum_ls = 0.0, sum_lsc = 0.0;

        for (std::size_t s = 0; s < steps; ++s) {
            const auto& bl = plan.bl_batches[s];
            const auto& bu = plan.bu_batches[s];
            std::size_t n_bl = bl.size(), n_bu = bu.size();

            Tensor x_bl = gather_dataset_rows(split.labeled, bl);
            Tensor x_bu = n_bu > 0 ? gather_dataset_rows(split.unlabeled, bu)
                                   : Tensor::zeros({0, split.labeled.dim()});
            Tensor x_all = vstack(x_bl, x_bu);
            std::vector<int> y_bl(n_bl);
            for (std::size_t i = 0; i < n_bl; ++i) y_bl[i] = split.labeled.labels[bl[i]];

            // ---- value pass: confidences, predictions, pair targets, y_sc
            Tensor feat_val = extract_features(res.student, x_all);
            Tensor prob_val = classify(res.student, feat_val);
            std::vector<double> conf(n_bu);
            std::vector<int> yhat(n_bl + n_bu);
            for (std::size_t r = 0; r < n_bl + n_bu; ++r) yhat[r] = argmax_row(prob_val, r);
            for (std::size_t u = 0; u < n_bu; ++u) {
                std::size_t r = n_bl + u;
                double mx = 0.0;
                for (int k2 = 0; k2 < num_classes; ++k2)
                    mx = std::max(mx, prob_val.at(r, static_cast<std::size_t>(k2)));
                conf[u] = mx;
            }
            auto class_of = [&](std::size_t r) {
                return r < n_bl ? y_bl[r] : yhat[r];
            };

            std::vector<PairSample> pairs;
            Tensor x_weak;                       // weak mode: rows referenced this batch
            bool weak_batch = false;
            if (config.enable_similarity) {
                if (weak_pairs) {
                    const auto& wp = weak_pairs->pairs;
                    std::vector<std::size_t> chosen;
                    if (wp.size() <= config.pairs_per_batch) {
                        chosen.resize(wp.size());
                        for (std::size_t t = 0; t < wp.size(); ++t) chosen[t] = t;
                    } else {
                        std::vector<std::size_t> idx(wp.size());
                        for (std::size_t t = 0; t < wp.size(); ++t) idx[t] = t;
                        for (std::size_t t = 0; t < config.pairs_per_batch; ++t) {
                            std::size_t j = t + weak_rng.uniform_int(wp.size() - t);
                            std::swap(idx[t], idx[j]);
                            chosen.push_back(idx[t]);
                        }
                    }
                    if (!chosen.empty()) {
                        weak_batch = true;
                        std::map<std::size_t, std::size_t> local;
                        for (std::size_t t : chosen) {
                            local.emplace(wp[t].i, 0);
                            local.emplace(wp[t].j, 0);
                        }
                        x_weak = Tensor::zeros({local.size(), split.labeled.dim()});
                        std::size_t next = 0;
                        for (auto& [g, l] : local) {
                            l = next;
                            global_row(g, x_weak, next++);
                        }
                        for (std::size_t t : chosen) {
                            PairSample p;
                            p.i_index = local[wp[t].i];
                            p.j_index = local[wp[t].j];
                            p.target = wp[t].same;
                            p.source = PairSource::TrueLabel;
                            pairs.push_back(p);
                        }
                    }
                } else {
                    pairs = sample_pairs(n_bl, n_bu, config.pairs_per_batch, conf, config.tau,
                                         pairs_rng);
                    for (auto& p : pairs) {
                        // labeled endpoints keep their true class, unlabeled
                        // ones use the classifier's argmax
                        p.target = p.source == PairSource::TrueLabel
                                       ? true_similarity_target(y_bl[p.i_index], y_bl[p.j_index])
                                       : pseudo_similarity_target(class_of(p.i_index),
                                                                  class_of(p.j_index));
                    }
                }
            }

            std::vector<std::size_t> sc_rows;  // batch rows with a soft label
            Tensor sc_targets;
            if (config.enable_cotraining && n_bu > 0) {
                std::vector<std::pair<std::size_t, int>> bl_labels;
                for (std::size_t i = 0; i < n_bl; ++i) bl_labels.push_back({i, y_bl[i]});
                CenterMap centers = select_class_centers(bl_labels, centers_rng);
                if (centers.covers_all(num_classes)) {
                    Tensor center_feats =
                        Tensor::zeros({static_cast<std::size_t>(num_classes),
                                       config.h_spec.feature_dim});
                    for (int k2 = 0; k2 < num_classes; ++k2) {
                        std::size_t src = centers.entries.at(k2);
                        std::copy_n(
                            feat_val.values.data() + src * config.h_spec.feature_dim,
                            config.h_spec.feature_dim,
                            center_feats.values.data() + k2 * config.h_spec.feature_dim);
                    }
                    std::vector<std::vector<double>> targets;
                    for (std::size_t u = 0; u < n_bu; ++u) {
                        if (conf[u] < config.tau) continue;
                        std::size_t r = n_bl + u;
                        Tensor xf = Tensor::zeros({1, config.h_spec.feature_dim});
                        std::copy_n(feat_val.values.data() + r * config.h_spec.feature_dim,
                                    config.h_spec.feature_dim, xf.values.begin());
                        auto sl = soft_label(res.student, xf, centers, center_feats, num_classes);
                        if (sl) {
                            sc_rows.push_back(r);
                            targets.push_back(sl->probs);
                        }
                    }
                    if (!sc_rows.empty()) {
                        sc_targets = Tensor::zeros(
                            {sc_rows.size(), static_cast<std::size_t>(num_classes)});
                        for (std::size_t t = 0; t < sc_rows.size(); ++t)
                            std::copy(targets[t].begin(), targets[t].end(),
                                      sc_targets.values.begin() + t * num_classes);
                    }
                }
            }

            // ---- training graph
            Graph g;
            Graph::NodeId xin = g.constant(x_all);
            Graph::NodeId feats = build_feature_extractor(g, res.student, xin);
            Graph::NodeId probs = build_classifier(g, res.student, feats);

            std::vector<std::size_t> bl_rows(n_bl);
            for (std::size_t i = 0; i < n_bl; ++i) bl_rows[i] = i;
            Graph::NodeId lc_node =
                cross_entropy_node(g, g.gather_rows(probs, bl_rows), y_bl,
                                   static_cast<std::size_t>(num_classes));

            Graph::NodeId lt_node = -1;
            if (config.enable_consistency && n_bu > 0) {
                Tensor x_scope = x_all;
                if (config.consistency_scope == ConsistencyScope::Labeled) x_scope = x_bl;
                if (config.consistency_scope == ConsistencyScope::Unlabeled) x_scope = x_bu;
                Tensor teacher_probs =
                    teacher_predict(res.teacher, x_scope, noise_teacher_rng);
                Tensor x_student = perturb(x_scope, config.noise_sigma, noise_student_rng);
                Graph::NodeId xs = g.constant(std::move(x_student));
                Graph::NodeId ps =
                    build_classifier(g, res.student, build_feature_extractor(g, res.student, xs));
                lt_node = consistency_node(g, ps, teacher_probs);
            }

            Graph::NodeId ls_node = -1;
            if (config.enable_similarity && !pairs.empty()) {
                if (weak_batch) {
                    Graph::NodeId xw = g.constant(x_weak);
                    Graph::NodeId fw = build_feature_extractor(g, res.student, xw);
                    ls_node = similarity_loss_node(g, res.student, fw, pairs, config.gamma,
                                                   config.alpha_pos);
                } else {
                    ls_node = similarity_loss_node(g, res.student, feats, pairs, config.gamma,
                                                   config.alpha_pos);
                }
            }
            // post-ramp pseudo pairs mixed into weak-label mode
            Graph::NodeId ls_mix_node = -1;
            if (weak_pairs && config.weak_mix_pseudo && config.enable_similarity &&
                epoch >= config.lambda2.ramp_epochs) {
                auto mix = sample_pairs(n_bl, n_bu, config.pairs_per_batch, conf, config.tau,
                                        pairs_rng);
                for (auto& p : mix)
                    p.target = p.source == PairSource::TrueLabel
                                   ? true_similarity_target(y_bl[p.i_index], y_bl[p.j_index])
                                   : pseudo_similarity_target(class_of(p.i_index),
                                                              class_of(p.j_index));
                if (!mix.empty())
                    ls_mix_node = similarity_loss_node(g, res.student, feats, mix, config.gamma,
                                                       config.alpha_pos);
            }

            Graph::NodeId lsc_node = -1;
            if (!sc_rows.empty())
                lsc_node = soft_cross_entropy_node(g, g.gather_rows(probs, sc_rows), sc_targets);

            Graph::NodeId total = lc_node;
            if (lt_node >= 0) total = g.add(total, g.scale(lt_node, lam1));
            if (ls_node >= 0) total = g.add(total, g.scale(ls_node, lam2));
            if (ls_mix_node >= 0) total = g.add(total, g.scale(ls_mix_node, 0.5 * lam2));
            if (lsc_node >= 0) total = g.add(total, g.scale(lsc_node, lam3));

            g.forward();
            sum_lc += g.output(lc_node).values[0];
            if (lt_node >= 0) sum_lt += g.output(lt_node).values[0];
            if (ls_node >= 0) sum_ls += g.output(ls_node).values[0];
            if (lsc_node >= 0) sum_lsc += g.output(lsc_node).values[0];

            res.student.h_params.zero_grads();
            res.student.c_params.zero_grads();
            res.student.s_params.zero_grads();
            g.backward();
            opt.step(params);
            ema_update(res.teacher, res.student);
        }

        MetricsRow row;
        row.epoch = epoch;
        double d_steps = static_cast<double>(steps);
        LossBreakdown b = total_loss(sum_lc / d_steps, sum_lt / d_steps, sum_ls / d_steps,
                                     sum_lsc / d_steps, lam1, lam2, lam3);
        row.l_c = b.l_c;
        row.l_t = b.l_t;
        row.l_s = b.l_s;
        row.l_sc = b.l_sc;
        row.total = b.total;
        row.lambda1 = lam1;
        row.lambda2 = lam2;
        row.lambda3 = lam3;
        const ModelState& eval_model =
            config.eval_with == EvalWith::Teacher ? res.teacher.params : res.student;
        row.train_error = evaluate(eval_model, split.labeled);
        row.test_error = split.test.n() > 0 ? evaluate(eval_model, split.test) : 0.0;
        res.metrics.push_back(row);
    }

    const ModelState& eval_model =
        config.eval_with == EvalWith::Teacher ? res.teacher.params : res.student;
    res.final_test_error = split.test.n() > 0 ? evaluate(eval_model, split.test) : 0.0;
    return res;
}

}  // namespace

TrainResult train(const TrainConfig& config, const SSLSplit& split) {
    return train_impl(config, split, nullptr);
}

TrainResult train_weak_label_mode(const TrainConfig& config, const SSLSplit& split,
                                  const WeakPairSet& weak_pairs) {
    return train_impl(config, split, &weak_pairs);
}

ExperimentSummary summarize(const std::vector<double>& errors) {
    ExperimentSummary s;
    s.errors = errors;
    s.n_runs = static_cast<int>(errors.size());
    if (errors.empty()) return s;
    for (double e : errors) s.mean += e;
    s.mean /= s.n_runs;
    if (s.n_runs > 1) {
        double acc = 0.0;
        for (double e : errors) acc += (e - s.mean) * (e - s.mean);
        s.stddev = std::sqrt(acc / (s.n_runs - 1));
    }
    return s;
}

SSLSplit make_split(const SplitSpec& spec, std::uint64_t seed) {
    if (!spec.source) throw ConfigError("make_split: no source dataset");
    RngStream rng(seed, "split");
    SSLSplit split =
        split_ssl(*spec.source, spec.n_labeled, spec.test_fraction, spec.stratified, rng);
    if (spec.standardize) {
        Standardizer std_;
        std_.fit(split.labeled.features, split.unlabeled.features);
        std_.apply(split);
    }
    return split;
}

ExperimentSummary run_experiment(const TrainConfig& config, const SplitSpec& split_spec,
                                 int n_seeds) {
    if (n_seeds < 1) throw ConfigError("run_experiment: n_seeds must be >= 1");
    std::vector<double> errors;
    for (int i = 0; i < n_seeds; ++i) {
        TrainConfig cfg = config;
        cfg.seed = config.seed + static_cast<std::uint64_t>(i);
        std::uint64_t split_seed = split_spec.fresh_split_per_seed ? cfg.seed : config.seed;
        SSLSplit split = make_split(split_spec, split_seed);
        TrainResult r = train(cfg, split);
        errors.push_back(r.final_test_error);
    }
    return summarize(errors);
}

FeatureExport export_features(const ModelState& state, const Dataset& dataset) {
    if (dataset.n() < 2) throw StateError("export_features: need at least 2 rows for PCA");
    FeatureExport out;
    out.raw = extract_features(state, dataset.features);

    std::size_t n = out.raw.rows(), p = out.raw.cols();
    Eigen::MatrixXd x(n, p);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < p; ++c) x(r, c) = out.raw.at(r, c);
    Eigen::RowVectorXd mean = x.colwise().mean();
    x.rowwise() -= mean;
    Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    // eigenvalues ascending; take the top two columns
    Eigen::MatrixXd comps(p, 2);
    comps.col(0) = es.eigenvectors().col(p - 1);
    comps.col(1) = es.eigenvectors().col(p - 2);
    // deterministic sign: largest-magnitude entry of each component positive
    for (int c = 0; c < 2; ++c) {
        Eigen::Index imax;
        comps.col(c).cwiseAbs().maxCoeff(&imax);
        if (comps(imax, c) < 0.0) comps.col(c) = -comps.col(c);
    }
    Eigen::MatrixXd proj = x * comps;
    out.projection = Tensor::zeros({n, 2});
    for (std::size_t r = 0; r < n; ++r) {
        out.projection.at(r, 0) = proj(r, 0);
        out.projection.at(r, 1) = proj(r, 1);
    }
    return out;
}

std::string metrics_to_csv(const std::vector<MetricsRow>& rows) {
    std::ostringstream out;
    out << "epoch,l_c,l_t,l_s,l_sc,total,lambda1,lambda2,lambda3,train_error,test_error\n";
    char buf[32];
    auto put = [&](double v, bool last = false) {
        std::snprintf(buf, sizeof(buf), "%.12g", v);
        out << buf << (last ? "\n" : ",");
    };
    for (const auto& r : rows) {
        out << r.epoch << ",";
        put(r.l_c);
        put(r.l_t);
        put(r.l_s);
        put(r.l_sc);
        put(r.total);
        put(r.lambda1);
        put(r.lambda2);
        put(r.lambda3);
        put(r.train_error);
        put(r.test_error, true);
    }
    return out.str();
}

void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write metrics file: " + path);
    out << metrics_to_csv(rows);
}

std::string summary_to_text(const std::string& label, const ExperimentSummary& s) {
    std::ostringstream out;
    char buf[64];
    out << label << ": ";
    std::snprintf(buf, sizeof(buf), "mean_error=%.6f std=%.6f runs=%d", s.mean, s.stddev,
                  s.n_runs);
    out << buf << " per_seed=[";
    for (std::size_t i = 0; i < s.errors.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.6f", s.errors[i]);
        out << (i ? "," : "") << buf;
    }
    out << "]";
    return out.str();
}

}  // namespace mlsn
