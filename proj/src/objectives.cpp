#include "mlsn/objectives.hpp"

#include <cmath>

namespace mlsn {

namespace {
constexpr double kClamp = 1e-12;

void check_row_stochastic(const Tensor& t, const char* what) {
    for (std::size_t r = 0; r < t.rows(); ++r) {
        double s = 0.0;
        for (std::size_t k = 0; k < t.cols(); ++k) s += t.at(r, k);
        if (std::fabs(s - 1.0) > 1e-6)
            throw StateError(std::string(what) + ": row " + std::to_string(r) +
                             " does not sum to 1");
    }
}
}  // namespace

double ramp_weight(const ScheduleSpec& spec, int epoch) {
    if (spec.ramp_epochs <= 0) return spec.w_max;
    double t = std::min<double>(epoch, spec.ramp_epochs) / spec.ramp_epochs;
    return spec.w_max * std::exp(-5.0 * (1.0 - t) * (1.0 - t));
}

LossBreakdown total_loss(double l_c, double l_t, double l_s, double l_sc,
                         double lambda1, double lambda2, double lambda3) {
    LossBreakdown b;
    b.l_c = l_c;
    b.l_t = l_t;
    b.l_s = l_s;
    b.l_sc = l_sc;
    b.lambda1 = lambda1;
    b.lambda2 = lambda2;
    b.lambda3 = lambda3;
    b.total = l_c + lambda1 * l_t + lambda2 * l_s + lambda3 * l_sc;
    return b;
}

Graph::NodeId cross_entropy_node(Graph& g, Graph::NodeId probs,
                                 const std::vector<int>& labels, std::size_t num_classes) {
    std::size_t n = labels.size();
    Tensor onehot = Tensor::zeros({n, num_classes});
    for (std::size_t r = 0; r < n; ++r) {
        int y = labels[r];
        if (y < 0 || static_cast<std::size_t>(y) >= num_classes)
            throw StateError("cross_entropy: label out of range");
        onehot.at(r, static_cast<std::size_t>(y)) = 1.0;
    }
    Graph::NodeId target = g.constant(std::move(onehot));
    Graph::NodeId picked = g.mul(g.log(probs), target);
    return g.scale(g.reduce_sum(picked), -1.0 / static_cast<double>(n));
}

Graph::NodeId soft_cross_entropy_node(Graph& g, Graph::NodeId probs, const Tensor& targets) {
    check_row_stochastic(targets, "soft_cross_entropy targets");
    std::size_t n = targets.rows();
    Graph::NodeId target = g.constant(targets);
    Graph::NodeId picked = g.mul(g.log(probs), target);
    return g.scale(g.reduce_sum(picked), -1.0 / static_cast<double>(n));
}

Graph::NodeId consistency_node(Graph& g, Graph::NodeId student_probs,
                               const Tensor& teacher_probs) {
    Graph::NodeId teacher = g.constant(teacher_probs);
    return g.reduce_mean(g.power(g.abs_diff(student_probs, teacher), 2.0));
}

Graph::NodeId focal_loss_node(Graph& g, Graph::NodeId preds, const std::vector<int>& targets,
                              double gamma, double alpha_pos) {
    if (gamma < 0.0) throw StateError("focal_loss: gamma must be non-negative");
    std::size_t m = targets.size();
    // p_t = t*p + (1-t)*(1-p), alpha_t = t*a + (1-t)*(1-a), built elementwise
    Tensor tvec = Tensor::zeros({m, 1});
    Tensor alpha = Tensor::zeros({m, 1});
    for (std::size_t i = 0; i < m; ++i) {
        tvec.values[i] = targets[i] ? 1.0 : 0.0;
        alpha.values[i] = targets[i] ? alpha_pos : 1.0 - alpha_pos;
    }
    Graph::NodeId t = g.constant(std::move(tvec));
    Graph::NodeId one_minus_t = g.add_scalar(g.scale(t, -1.0), 1.0);
    Graph::NodeId one_minus_p = g.add_scalar(g.scale(preds, -1.0), 1.0);
    Graph::NodeId pt = g.add(g.mul(t, preds), g.mul(one_minus_t, one_minus_p));
    Graph::NodeId one_minus_pt = g.add_scalar(g.scale(pt, -1.0), 1.0);
    Graph::NodeId mod = g.power(one_minus_pt, gamma);
    Graph::NodeId term = g.mul(g.constant(std::move(alpha)), g.mul(mod, g.log(pt)));
    return g.scale(g.reduce_mean(term), -1.0);
}

Graph::NodeId similarity_loss_node(Graph& g, ModelState& state, Graph::NodeId features,
                                   const std::vector<PairSample>& pairs, double gamma,
                                   double alpha_pos) {
    if (pairs.empty()) throw StateError("similarity_loss_node: empty pair list");
    std::vector<std::size_t> is, js;
    std::vector<int> targets;
    is.reserve(pairs.size());
    js.reserve(pairs.size());
    targets.reserve(pairs.size());
    for (const auto& p : pairs) {
        is.push_back(p.i_index);
        js.push_back(p.j_index);
        targets.push_back(p.target);
    }
    Graph::NodeId fi = g.gather_rows(features, std::move(is));
    Graph::NodeId fj = g.gather_rows(features, std::move(js));
    Graph::NodeId preds = build_similarity(g, state, build_pair_featurize(g, fi, fj));
    return focal_loss_node(g, preds, targets, gamma, alpha_pos);
}

double cross_entropy(const Tensor& probs, const std::vector<int>& labels) {
    if (probs.rows() != labels.size()) throw ShapeError("cross_entropy: row/label count mismatch");
    check_row_stochastic(probs, "cross_entropy probs");
    Graph g;
    cross_entropy_node(g, g.constant(probs), labels, probs.cols());
    return g.forward().values[0];
}

double soft_cross_entropy(const Tensor& probs, const Tensor& targets) {
    if (!probs.same_shape(targets)) throw ShapeError("soft_cross_entropy: shape mismatch");
    check_row_stochastic(probs, "soft_cross_entropy probs");
    Graph g;
    soft_cross_entropy_node(g, g.constant(probs), targets);
    return g.forward().values[0];
}

double consistency_loss(const Tensor& student_probs, const Tensor& teacher_probs) {
    if (!student_probs.same_shape(teacher_probs))
        throw ShapeError("consistency_loss: shape mismatch");
    Graph g;
    consistency_node(g, g.constant(student_probs), teacher_probs);
    return g.forward().values[0];
}

double focal_loss(double pred, int target, double gamma, double alpha_pos) {
    if (gamma < 0.0) throw StateError("focal_loss: gamma must be non-negative");
    double p = std::min(std::max(pred, kClamp), 1.0 - kClamp);
    double pt = target ? p : 1.0 - p;
    double at = target ? alpha_pos : 1.0 - alpha_pos;
    return -at * std::pow(1.0 - pt, gamma) * std::log(pt);
}

double similarity_loss(const ModelState& state, const std::vector<PairSample>& pairs,
                       const Tensor& features, double gamma, double alpha_pos) {
    if (pairs.empty()) return 0.0;
    for (const auto& p : pairs)
        if (p.i_index >= features.rows() || p.j_index >= features.rows())
            throw StateError("similarity_loss: pair index out of range");
    auto& s = const_cast<ModelState&>(state);
    Graph g;
    Graph::NodeId f = g.constant(features);
    similarity_loss_node(g, s, f, pairs, gamma, alpha_pos);
    return g.forward().values[0];
}

}  // namespace mlsn
