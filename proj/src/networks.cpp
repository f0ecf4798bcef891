#include "mlsn/networks.hpp"

#include <cmath>

namespace mlsn {

namespace {

// Appends an MLP: affine layers of the given widths, relu between (and after
// the last layer when `relu_last`). Parameters live in `ps` as W0/b0, W1/b1...
Graph::NodeId build_mlp(Graph& g, ParamSet& ps, Graph::NodeId x,
                        const std::vector<std::size_t>& widths, bool relu_last) {
    Graph::NodeId cur = x;
    for (std::size_t l = 0; l < widths.size(); ++l) {
        Graph::NodeId w = g.param(&ps.at("W" + std::to_string(l)));
        Graph::NodeId b = g.param(&ps.at("b" + std::to_string(l)));
        cur = g.affine(cur, w, b);
        if (l + 1 < widths.size() || relu_last) cur = g.relu(cur);
    }
    return cur;
}

void init_mlp(ParamSet& ps, std::size_t input_dim, const std::vector<std::size_t>& widths,
              RngStream& rng) {
    std::size_t fan_in = input_dim;
    for (std::size_t l = 0; l < widths.size(); ++l) {
        std::size_t fan_out = widths[l];
        double lim = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        Tensor w = Tensor::zeros({fan_in, fan_out});
        for (double& v : w.values) v = rng.uniform(-lim, lim);
        ps.add("W" + std::to_string(l), std::move(w));
        ps.add("b" + std::to_string(l), Tensor::zeros({fan_out}));
        fan_in = fan_out;
    }
}

std::vector<std::size_t> h_widths(const FeatureExtractorSpec& s) {
    auto w = s.hidden_widths;
    w.push_back(s.feature_dim);
    return w;
}

std::vector<std::size_t> c_widths(const ClassifierSpec& s) {
    auto w = s.hidden_widths;
    w.push_back(s.num_classes);
    return w;
}

std::vector<std::size_t> s_widths(const SimilarityNetSpec& s) {
    auto w = s.hidden_widths;
    w.push_back(1);
    return w;
}

}  // namespace

void validate_specs(const FeatureExtractorSpec& h, const ClassifierSpec& c,
                    const SimilarityNetSpec& s) {
    if (h.input_dim == 0) throw ConfigError("feature extractor input_dim must be positive");
    if (h.feature_dim < 2) throw ConfigError("feature_dim must be >= 2");
    if (h.hidden_widths.empty()) throw ConfigError("feature extractor needs a hidden layer");
    if (c.num_classes < 2) throw ConfigError("num_classes must be >= 2");
    if (c.feature_dim != h.feature_dim || s.feature_dim != h.feature_dim)
        throw ConfigError("classifier/similarity feature_dim must match the extractor");
    for (std::size_t w : h.hidden_widths)
        if (w == 0) throw ConfigError("zero hidden width");
    for (std::size_t w : c.hidden_widths)
        if (w == 0) throw ConfigError("zero hidden width");
    for (std::size_t w : s.hidden_widths)
        if (w == 0) throw ConfigError("zero hidden width");
}

ModelState init_model(const FeatureExtractorSpec& h, const ClassifierSpec& c,
                      const SimilarityNetSpec& s, RngStream& rng) {
    validate_specs(h, c, s);
    ModelState m;
    m.h_spec = h;
    m.c_spec = c;
    m.s_spec = s;
    init_mlp(m.h_params, h.input_dim, h_widths(h), rng);
    init_mlp(m.c_params, c.feature_dim, c_widths(c), rng);
    init_mlp(m.s_params, 2 * s.feature_dim, s_widths(s), rng);
    return m;
}

Graph::NodeId build_feature_extractor(Graph& g, ModelState& state, Graph::NodeId x) {
    return build_mlp(g, state.h_params, x, h_widths(state.h_spec), /*relu_last=*/true);
}

Graph::NodeId build_classifier(Graph& g, ModelState& state, Graph::NodeId features) {
    Graph::NodeId logits =
        build_mlp(g, state.c_params, features, c_widths(state.c_spec), /*relu_last=*/false);
    return g.softmax_rows(logits);
}

Graph::NodeId build_pair_featurize(Graph& g, Graph::NodeId feats_a, Graph::NodeId feats_b) {
    Graph::NodeId diff = g.abs_diff(feats_a, feats_b);
    Graph::NodeId prod = g.mul(feats_a, feats_b);
    return g.concat_cols(diff, prod);
}

Graph::NodeId build_similarity(Graph& g, ModelState& state, Graph::NodeId pair_features) {
    Graph::NodeId logit =
        build_mlp(g, state.s_params, pair_features, s_widths(state.s_spec), /*relu_last=*/false);
    return g.sigmoid(logit);
}

Tensor extract_features(const ModelState& state, const Tensor& x_batch) {
    if (x_batch.cols() != state.h_spec.input_dim)
        throw ShapeError("extract_features: input dim mismatch");
    auto& s = const_cast<ModelState&>(state);  // forward-only, parameters untouched
    Graph g;
    Graph::NodeId x = g.constant(x_batch);
    build_feature_extractor(g, s, x);
    return g.forward();
}

Tensor classify(const ModelState& state, const Tensor& features) {
    if (features.cols() != state.c_spec.feature_dim)
        throw ShapeError("classify: feature dim mismatch");
    auto& s = const_cast<ModelState&>(state);
    Graph g;
    Graph::NodeId f = g.constant(features);
    build_classifier(g, s, f);
    return g.forward();
}

Tensor pair_featurize(const Tensor& f_i, const Tensor& f_j) {
    if (f_i.size() != f_j.size()) throw ShapeError("pair_featurize: length mismatch");
    std::size_t p = f_i.size();
    Tensor out = Tensor::zeros({1, 2 * p});
    for (std::size_t k = 0; k < p; ++k) {
        out.values[k] = std::fabs(f_i.values[k] - f_j.values[k]);
        out.values[p + k] = f_i.values[k] * f_j.values[k];
    }
    return out;
}

double similarity(const ModelState& state, const Tensor& f_i, const Tensor& f_j) {
    if (f_i.size() != state.s_spec.feature_dim || f_j.size() != state.s_spec.feature_dim)
        throw ShapeError("similarity: feature dim mismatch");
    auto& s = const_cast<ModelState&>(state);
    Graph g;
    Graph::NodeId pf = g.constant(pair_featurize(f_i, f_j));
    build_similarity(g, s, pf);
    return g.forward().values[0];
}

Tensor similarity_many(const ModelState& state, const Tensor& f, const Tensor& others) {
    std::size_t p = state.s_spec.feature_dim;
    if (f.size() != p || others.cols() != p)
        throw ShapeError("similarity_many: feature dim mismatch");
    std::size_t n = others.rows();
    Tensor pf = Tensor::zeros({n, 2 * p});
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t k = 0; k < p; ++k) {
            pf.values[r * 2 * p + k] = std::fabs(f.values[k] - others.at(r, k));
            pf.values[r * 2 * p + p + k] = f.values[k] * others.at(r, k);
        }
    auto& s = const_cast<ModelState&>(state);
    Graph g;
    Graph::NodeId x = g.constant(std::move(pf));
    build_similarity(g, s, x);
    return g.forward();
}

std::size_t param_count(const ModelState& state) {
    std::size_t n = 0;
    for (const auto* ps : {&state.h_params, &state.c_params, &state.s_params})
        for (const auto& [name, t] : ps->entries) n += t.size();
    return n;
}

}  // namespace mlsn
