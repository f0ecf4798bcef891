#pragma once

#include <string>
#include <vector>

#include "mlsn/data.hpp"
#include "mlsn/objectives.hpp"
#include "mlsn/teacher.hpp"

namespace mlsn {

enum class Optimizer { SgdMomentum, PlainSgd };
enum class EvalWith { Teacher, Student };
enum class ConsistencyScope { Both, Labeled, Unlabeled };

struct TrainConfig {
    int epochs = 60;
    std::size_t batch_size = 64;          // total minibatch: |BL| + |BU|
    std::size_t labeled_batch_size = 32;  // |BL|
    double learning_rate = 0.05;
    double momentum = 0.9;
    Optimizer optimizer = Optimizer::SgdMomentum;
    std::size_t pairs_per_batch = 128;  // m
    double gamma = 2.0;
    double alpha_pos = 0.25;
    double tau = 0.95;
    ScheduleSpec lambda1{1.0, 24};  // consistency
    ScheduleSpec lambda2{1.0, 24};  // similarity
    ScheduleSpec lambda3{0.3, 24};  // co-training
    double noise_sigma = 0.1;
    double alpha_max = 0.99;
    std::uint64_t seed = 1;
    EvalWith eval_with = EvalWith::Teacher;
    ConsistencyScope consistency_scope = ConsistencyScope::Both;
    bool enable_consistency = true;
    bool enable_similarity = true;
    bool enable_cotraining = true;
    // weak-label mode: mix pseudo-labeled pairs back in once the similarity
    // ramp has completed
    bool weak_mix_pseudo = false;

    FeatureExtractorSpec h_spec;
    ClassifierSpec c_spec;
    SimilarityNetSpec s_spec;

    // returns one message per violated field; empty means valid
    std::vector<std::string> validate() const;
};

struct MetricsRow {
    int epoch = 0;
    double l_c = 0.0, l_t = 0.0, l_s = 0.0, l_sc = 0.0, total = 0.0;
    double lambda1 = 0.0, lambda2 = 0.0, lambda3 = 0.0;
    double train_error = 0.0, test_error = 0.0;
};

struct TrainResult {
    ModelState student;
    TeacherState teacher;
    std::vector<MetricsRow> metrics;
    double final_test_error = 0.0;
};

// Deterministic minibatch plan for one epoch: BL cycles (with reshuffling)
// through the labeled rows, BU walks a fresh permutation of the unlabeled
// rows. Exposed so that reference loops can replay the exact batch stream.
struct EpochPlan {
    std::vector<std::vector<std::size_t>> bl_batches;
    std::vector<std::vector<std::size_t>> bu_batches;  // empty inner lists when no unlabeled data
};

class BatchCycler {
public:
    BatchCycler(std::size_t n, RngStream* rng) : n_(n), rng_(rng) {}
    std::vector<std::size_t> take(std::size_t count);

private:
    std::size_t n_;
    RngStream* rng_;
    std::vector<std::size_t> deck_;
    std::size_t pos_ = 0;
};

EpochPlan make_epoch_plan(std::size_t n_labeled, std::size_t n_unlabeled,
                          const TrainConfig& config, BatchCycler& bl_cycler,
                          RngStream& bu_rng);

TrainResult train(const TrainConfig& config, const SSLSplit& split);

// Same loop, but the L_S pair stream draws from the given weak pairs (global
// row indices over labeled rows followed by unlabeled rows).
TrainResult train_weak_label_mode(const TrainConfig& config, const SSLSplit& split,
                                  const WeakPairSet& weak_pairs);

double evaluate(const ModelState& state, const Dataset& test);
double evaluate(const TrainResult& result, const Dataset& test, EvalWith eval_with);

struct ExperimentSummary {
    std::vector<double> errors;  // per-seed final test errors
    double mean = 0.0;
    double stddev = 0.0;  // sample std; 0 for a single run
    int n_runs = 0;
};

ExperimentSummary summarize(const std::vector<double>& errors);

struct SplitSpec {
    const Dataset* source = nullptr;
    std::size_t n_labeled = 0;
    double test_fraction = 0.25;
    bool stratified = true;
    bool fresh_split_per_seed = true;
    bool standardize = true;
};

SSLSplit make_split(const SplitSpec& spec, std::uint64_t seed);

// Runs `train` for seeds config.seed .. config.seed + n_seeds - 1.
ExperimentSummary run_experiment(const TrainConfig& config, const SplitSpec& split_spec,
                                 int n_seeds);

struct FeatureExport {
    Tensor raw;         // n x p
    Tensor projection;  // n x 2, top-2 principal components
};

FeatureExport export_features(const ModelState& state, const Dataset& dataset);

// CSV writers shared by the CLI and the acceptance suite.
std::string metrics_to_csv(const std::vector<MetricsRow>& rows);
void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows);
std::string summary_to_text(const std::string& label, const ExperimentSummary& s);

}  // namespace mlsn
