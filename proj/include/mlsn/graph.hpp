#pragma once

#include <map>
#include <string>
#include <vector>

#include "mlsn/tensor.hpp"

namespace mlsn {

// Named parameter collection. std::map keeps iteration order deterministic.
struct ParamSet {
    std::map<std::string, Tensor> entries;

    Tensor& add(const std::string& name, Tensor t) {
        auto [it, inserted] = entries.emplace(name, std::move(t));
        if (!inserted) throw StateError("duplicate parameter name: " + name);
        it->second.ensure_grad();
        return it->second;
    }
    Tensor& at(const std::string& name) { return entries.at(name); }
    const Tensor& at(const std::string& name) const { return entries.at(name); }
    void zero_grads() {
        for (auto& [name, t] : entries) t.zero_grad();
    }
};

enum class OpKind {
    Input,
    Param,
    Affine,
    Relu,
    Sigmoid,
    SoftmaxRows,
    ConcatCols,
    AbsDiff,
    Mul,
    Add,
    GatherRows,
    ReduceMean,
    ReduceSum,
    Log,
    Power,
    Scale,
    AddScalar,
};

const char* op_name(OpKind k);

// Reverse-mode tape over dense double tensors. Nodes are appended in
// topological order by construction; forward() evaluates the tape and
// backward() propagates from a scalar root into parameter grad buffers.
class Graph {
public:
    using NodeId = int;

    // Leaf nodes ------------------------------------------------------------
    NodeId input(const std::string& name, std::vector<std::size_t> shape);
    NodeId constant(Tensor value);
    NodeId param(Tensor* storage);  // storage outlives the graph

    // Primitives ------------------------------------------------------------
    NodeId affine(NodeId x, NodeId w, NodeId b);  // x(n,a) * w(a,b) + b(b)
    NodeId relu(NodeId x);
    NodeId sigmoid(NodeId x);
    NodeId softmax_rows(NodeId x);
    NodeId concat_cols(NodeId a, NodeId b);
    NodeId abs_diff(NodeId a, NodeId b);
    NodeId mul(NodeId a, NodeId b);  // elementwise
    NodeId add(NodeId a, NodeId b);  // elementwise
    NodeId gather_rows(NodeId x, std::vector<std::size_t> rows);
    NodeId reduce_mean(NodeId x);
    NodeId reduce_sum(NodeId x);
    NodeId log(NodeId x);  // input clamped to >= 1e-12
    NodeId power(NodeId x, double exponent);
    NodeId scale(NodeId x, double factor);
    NodeId add_scalar(NodeId x, double offset);

    // Execution -------------------------------------------------------------
    // Evaluates the tape; returns the output of the last node. Named inputs
    // are bound from the map (all must be present with matching shapes).
    const Tensor& forward(const std::map<std::string, Tensor>& inputs = {});

    // Propagates d(root)/d(node) from a scalar root (the last node) and
    // accumulates into each Param node's external grad buffer. Exactly one
    // backward per forward.
    void backward();

    // Central finite-difference check of every parameter element against the
    // analytic gradient. Returns the max relative error.
    double grad_check(const std::map<std::string, Tensor>& inputs, double epsilon);

    const Tensor& output(NodeId id) const { return nodes_[id].out; }
    const std::vector<double>& node_grad(NodeId id) const { return nodes_[id].node_grad; }
    std::size_t node_count() const { return nodes_.size(); }

private:
    struct Node {
        OpKind kind;
        NodeId a = -1, b = -1, c = -1;
        Tensor out;
        std::vector<double> node_grad;
        Tensor* param = nullptr;
        std::string input_name;
        double scalar = 0.0;                // Power exponent / Scale / AddScalar
        std::vector<std::size_t> indices;   // GatherRows
    };

    NodeId push(Node n);
    Node& node(NodeId id);
    void eval_node(Node& n);
    void back_node(Node& n);
    void check_finite(const Node& n) const;
    std::vector<std::size_t> shape_of(NodeId id) const { return nodes_[id].out.shape; }

    std::vector<Node> nodes_;
    bool forward_done_ = false;
    bool backward_done_ = false;
};

}  // namespace mlsn
