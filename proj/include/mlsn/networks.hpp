#pragma once

#include <string>
#include <vector>

#include "mlsn/graph.hpp"
#include "mlsn/rng.hpp"
#include "mlsn/tensor.hpp"

namespace mlsn {

struct FeatureExtractorSpec {
    std::size_t input_dim = 2;
    std::vector<std::size_t> hidden_widths = {64, 64};
    std::size_t feature_dim = 32;
};

struct ClassifierSpec {
    std::size_t feature_dim = 32;
    std::size_t num_classes = 2;
    std::vector<std::size_t> hidden_widths = {};  // empty -> linear head
};

struct SimilarityNetSpec {
    std::size_t feature_dim = 32;  // pair input width is 2 * feature_dim
    std::vector<std::size_t> hidden_widths = {32};
};

// The three co-trained networks: shared feature extractor h, classifier
// head C and pairwise similarity branch S.
struct ModelState {
    FeatureExtractorSpec h_spec;
    ClassifierSpec c_spec;
    SimilarityNetSpec s_spec;
    ParamSet h_params;
    ParamSet c_params;
    ParamSet s_params;
};

void validate_specs(const FeatureExtractorSpec& h, const ClassifierSpec& c,
                    const SimilarityNetSpec& s);

// Glorot-uniform weights, zero biases, drawn from the given stream.
ModelState init_model(const FeatureExtractorSpec& h, const ClassifierSpec& c,
                      const SimilarityNetSpec& s, RngStream& rng);

// Graph builders. Each appends the corresponding sub-network to `g` and
// returns the output node. Parameters are referenced in-place from `state`.
Graph::NodeId build_feature_extractor(Graph& g, ModelState& state, Graph::NodeId x);
Graph::NodeId build_classifier(Graph& g, ModelState& state, Graph::NodeId features);
// rows of `feats_a` and `feats_b` are pre-gathered pair endpoints
Graph::NodeId build_pair_featurize(Graph& g, Graph::NodeId feats_a, Graph::NodeId feats_b);
Graph::NodeId build_similarity(Graph& g, ModelState& state, Graph::NodeId pair_features);

// Forward-only conveniences (no gradients).
Tensor extract_features(const ModelState& state, const Tensor& x_batch);
Tensor classify(const ModelState& state, const Tensor& features);
Tensor pair_featurize(const Tensor& f_i, const Tensor& f_j);
double similarity(const ModelState& state, const Tensor& f_i, const Tensor& f_j);
// similarity of one feature row against every row of `others`, as a column
Tensor similarity_many(const ModelState& state, const Tensor& f, const Tensor& others);

std::size_t param_count(const ModelState& state);

}  // namespace mlsn
