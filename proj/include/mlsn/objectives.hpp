#pragma once

#include <vector>

#include "mlsn/graph.hpp"
#include "mlsn/networks.hpp"
#include "mlsn/pseudo_labels.hpp"

namespace mlsn {

// Sigmoid ramp-up: w_max * exp(-5 * (1 - t/T)^2), saturating at T epochs.
struct ScheduleSpec {
    double w_max = 1.0;
    int ramp_epochs = 40;
};

double ramp_weight(const ScheduleSpec& spec, int epoch);

struct LossBreakdown {
    double l_c = 0.0, l_t = 0.0, l_s = 0.0, l_sc = 0.0;
    double lambda1 = 0.0, lambda2 = 0.0, lambda3 = 0.0;
    double total = 0.0;
};

LossBreakdown total_loss(double l_c, double l_t, double l_s, double l_sc,
                         double lambda1, double lambda2, double lambda3);

// Graph builders. Each returns a scalar node.
Graph::NodeId cross_entropy_node(Graph& g, Graph::NodeId probs,
                                 const std::vector<int>& labels, std::size_t num_classes);
Graph::NodeId soft_cross_entropy_node(Graph& g, Graph::NodeId probs, const Tensor& targets);
// teacher probabilities enter as a constant: no gradient flows into them
Graph::NodeId consistency_node(Graph& g, Graph::NodeId student_probs, const Tensor& teacher_probs);
// preds: column of pair probabilities; one focal term per pair, averaged
Graph::NodeId focal_loss_node(Graph& g, Graph::NodeId preds, const std::vector<int>& targets,
                              double gamma, double alpha_pos);
// gathers pair endpoints from `features`, runs S, applies focal loss
Graph::NodeId similarity_loss_node(Graph& g, ModelState& state, Graph::NodeId features,
                                   const std::vector<PairSample>& pairs, double gamma,
                                   double alpha_pos);

// Value-level versions (build a small graph internally).
double cross_entropy(const Tensor& probs, const std::vector<int>& labels);
double soft_cross_entropy(const Tensor& probs, const Tensor& targets);
double consistency_loss(const Tensor& student_probs, const Tensor& teacher_probs);
double focal_loss(double pred, int target, double gamma, double alpha_pos);
double similarity_loss(const ModelState& state, const std::vector<PairSample>& pairs,
                       const Tensor& features, double gamma, double alpha_pos);

}  // namespace mlsn
