#include "mlsn/graph.hpp"

#include <algorithm>
#include <cmath>

namespace mlsn {

namespace {
constexpr double kLogClamp = 1e-12;
}

const char* op_name(OpKind k) {
    switch (k) {
        case OpKind::Input: return "input";
        case OpKind::Param: return "parameter";
        case OpKind::Affine: return "affine";
        case OpKind::Relu: return "relu";
        case OpKind::Sigmoid: return "sigmoid";
        case OpKind::SoftmaxRows: return "softmax-rows";
        case OpKind::ConcatCols: return "concat-columns";
        case OpKind::AbsDiff: return "elementwise-abs-diff";
        case OpKind::Mul: return "elementwise-product";
        case OpKind::Add: return "elementwise-add";
        case OpKind::GatherRows: return "gather-rows";
        case OpKind::ReduceMean: return "reduce-mean";
        case OpKind::ReduceSum: return "reduce-sum";
        case OpKind::Log: return "log";
        case OpKind::Power: return "power";
        case OpKind::Scale: return "scalar-scale";
        case OpKind::AddScalar: return "scalar-add";
    }
    return "?";
}

Graph::NodeId Graph::push(Node n) {
    nodes_.push_back(std::move(n));
    forward_done_ = false;
    return static_cast<NodeId>(nodes_.size() - 1);
}

Graph::Node& Graph::node(NodeId id) {
    if (id < 0 || id >= static_cast<NodeId>(nodes_.size()))
        throw StateError("invalid node id");
    return nodes_[id];
}

Graph::NodeId Graph::input(const std::string& name, std::vector<std::size_t> shape) {
    Node n;
    n.kind = OpKind::Input;
    n.input_name = name;
    n.out = Tensor::zeros(std::move(shape));
    return push(std::move(n));
}

Graph::NodeId Graph::constant(Tensor value) {
    Node n;
    n.kind = OpKind::Input;
    n.out = std::move(value);
    return push(std::move(n));
}

Graph::NodeId Graph::param(Tensor* storage) {
    Node n;
    n.kind = OpKind::Param;
    n.param = storage;
    storage->ensure_grad();
    n.out = Tensor::zeros(storage->shape);
    return push(std::move(n));
}

Graph::NodeId Graph::affine(NodeId x, NodeId w, NodeId b) {
    auto xs = shape_of(x), ws = shape_of(w), bs = shape_of(b);
    if (xs.size() != 2 || ws.size() != 2 || bs.size() != 1 || xs[1] != ws[0] || ws[1] != bs[0])
        throw ShapeError("affine: incompatible shapes at node " + std::to_string(nodes_.size()));
    Node n;
    n.kind = OpKind::Affine;
    n.a = x; n.b = w; n.c = b;
    n.out = Tensor::zeros({xs[0], ws[1]});
    return push(std::move(n));
}

Graph::NodeId Graph::relu(NodeId x) {
    Node n; n.kind = OpKind::Relu; n.a = x; n.out = Tensor::zeros(shape_of(x));
    return push(std::move(n));
}

Graph::NodeId Graph::sigmoid(NodeId x) {
    Node n; n.kind = OpKind::Sigmoid; n.a = x; n.out = Tensor::zeros(shape_of(x));
    return push(std::move(n));
}

Graph::NodeId Graph::softmax_rows(NodeId x) {
    if (shape_of(x).size() != 2) throw ShapeError("softmax-rows expects a matrix");
    Node n; n.kind = OpKind::SoftmaxRows; n.a = x; n.out = Tensor::zeros(shape_of(x));
    return push(std::move(n));
}

Graph::NodeId Graph::concat_cols(NodeId a, NodeId b) {
    auto as = shape_of(a), bs = shape_of(b);
    if (as.size() != 2 || bs.size() != 2 || as[0] != bs[0])
        throw ShapeError("concat-columns: row counts differ");
    Node n; n.kind = OpKind::ConcatCols; n.a = a; n.b = b;
    n.out = Tensor::zeros({as[0], as[1] + bs[1]});
    return push(std::move(n));
}

Graph::NodeId Graph::abs_diff(NodeId a, NodeId b) {
    if (shape_of(a) != shape_of(b)) throw ShapeError("elementwise-abs-diff: shape mismatch");
    Node n; n.kind = OpKind::AbsDiff; n.a = a; n.b = b; n.out = Tensor::zeros(shape_of(a));
    return push(std::move(n));
}

Graph::NodeId Graph::mul(NodeId a, NodeId b) {
    if (shape_of(a) != shape_of(b)) throw ShapeError("elementwise-product: shape mismatch");
    Node n; n.kind = OpKind::Mul; n.a = a; n.b = b; n.out = Tensor::zeros(shape_of(a));
    return push(std::move(n));
}

Graph::NodeId Graph::add(NodeId a, NodeId b) {
    if (shape_of(a) != shape_of(b)) throw ShapeError("elementwise-add: shape mismatch");
    Node n; n.kind = OpKind::Add; n.a = a; n.b = b; n.out = Tensor::zeros(shape_of(a));
    return push(std::move(n));
}

Graph::NodeId Graph::gather_rows(NodeId x, std::vector<std::size_t> rows) {
    auto xs = shape_of(x);
    if (xs.size() != 2) throw ShapeError("gather-rows expects a matrix");
    for (std::size_t r : rows)
        if (r >= xs[0]) throw ShapeError("gather-rows: index out of range");
    Node n; n.kind = OpKind::GatherRows; n.a = x;
    n.out = Tensor::zeros({rows.size(), xs[1]});
    n.indices = std::move(rows);
    return push(std::move(n));
}

Graph::NodeId Graph::reduce_mean(NodeId x) {
    Node n; n.kind = OpKind::ReduceMean; n.a = x; n.out = Tensor::zeros({1});
    return push(std::move(n));
}

Graph::NodeId Graph::reduce_sum(NodeId x) {
    Node n; n.kind = OpKind::ReduceSum; n.a = x; n.out = Tensor::zeros({1});
    return push(std::move(n));
}

Graph::NodeId Graph::log(NodeId x) {
    Node n; n.kind = OpKind::Log; n.a = x; n.out = Tensor::zeros(shape_of(x));
    return push(std::move(n));
}

Graph::NodeId Graph::power(NodeId x, double exponent) {
    Node n; n.kind = OpKind::Power; n.a = x; n.scalar = exponent;
    n.out = Tensor::zeros(shape_of(x));
    return push(std::move(n));
}

Graph::NodeId Graph::scale(NodeId x, double factor) {
    Node n; n.kind = OpKind::Scale; n.a = x; n.scalar = factor;
    n.out = Tensor::zeros(shape_of(x));
    return push(std::move(n));
}

Graph::NodeId Graph::add_scalar(NodeId x, double offset) {
    Node n; n.kind = OpKind::AddScalar; n.a = x; n.scalar = offset;
    n.out = Tensor::zeros(shape_of(x));
    return push(std::move(n));
}

void Graph::check_finite(const Node& n) const {
    for (double v : n.out.values)
        if (!std::isfinite(v))
            throw NumericError(std::string("non-finite value in node '") + op_name(n.kind) + "'");
}

void Graph::eval_node(Node& n) {
    const auto va = [&](NodeId id) -> const std::vector<double>& { return nodes_[id].out.values; };
    switch (n.kind) {
        case OpKind::Input:
            break;  // bound in forward()
        case OpKind::Param:
            n.out.values = n.param->values;
            break;
        case OpKind::Affine: {
            const Tensor& x = nodes_[n.a].out;
            const Tensor& w = nodes_[n.b].out;
            const Tensor& b = nodes_[n.c].out;
            std::size_t rows = x.shape[0], in = x.shape[1], out = w.shape[1];
            for (std::size_t r = 0; r < rows; ++r) {
                for (std::size_t j = 0; j < out; ++j) {
                    double s = b.values[j];
                    for (std::size_t k = 0; k < in; ++k)
                        s += x.values[r * in + k] * w.values[k * out + j];
                    n.out.values[r * out + j] = s;
                }
            }
            break;
        }
        case OpKind::Relu: {
            const auto& x = va(n.a);
            for (std::size_t i = 0; i < x.size(); ++i)
                n.out.values[i] = x[i] > 0.0 ? x[i] : 0.0;
            break;
        }
        case OpKind::Sigmoid: {
            const auto& x = va(n.a);
            for (std::size_t i = 0; i < x.size(); ++i)
                n.out.values[i] = 1.0 / (1.0 + std::exp(-x[i]));
            break;
        }
        case OpKind::SoftmaxRows: {
            const Tensor& x = nodes_[n.a].out;
            std::size_t rows = x.shape[0], k = x.shape[1];
            for (std::size_t r = 0; r < rows; ++r) {
                const double* xr = x.values.data() + r * k;
                double mx = *std::max_element(xr, xr + k);
                double sum = 0.0;
                for (std::size_t j = 0; j < k; ++j) {
                    double e = std::exp(xr[j] - mx);
                    n.out.values[r * k + j] = e;
                    sum += e;
                }
                for (std::size_t j = 0; j < k; ++j) n.out.values[r * k + j] /= sum;
            }
            break;
        }
        case OpKind::ConcatCols: {
            const Tensor& a = nodes_[n.a].out;
            const Tensor& b = nodes_[n.b].out;
            std::size_t rows = a.shape[0], ca = a.shape[1], cb = b.shape[1];
            for (std::size_t r = 0; r < rows; ++r) {
                for (std::size_t j = 0; j < ca; ++j)
                    n.out.values[r * (ca + cb) + j] = a.values[r * ca + j];
                for (std::size_t j = 0; j < cb; ++j)
                    n.out.values[r * (ca + cb) + ca + j] = b.values[r * cb + j];
            }
            break;
        }
        case OpKind::AbsDiff: {
            const auto& a = va(n.a);
            const auto& b = va(n.b);
            for (std::size_t i = 0; i < a.size(); ++i) n.out.values[i] = std::fabs(a[i] - b[i]);
            break;
        }
        case OpKind::Mul: {
            const auto& a = va(n.a);
            const auto& b = va(n.b);
            for (std::size_t i = 0; i < a.size(); ++i) n.out.values[i] = a[i] * b[i];
            break;
        }
        case OpKind::Add: {
            const auto& a = va(n.a);
            const auto& b = va(n.b);
            for (std::size_t i = 0; i < a.size(); ++i) n.out.values[i] = a[i] + b[i];
            break;
        }
        case OpKind::GatherRows: {
            const Tensor& x = nodes_[n.a].out;
            std::size_t cols = x.shape[1];
            for (std::size_t r = 0; r < n.indices.size(); ++r)
                std::copy_n(x.values.data() + n.indices[r] * cols, cols,
                            n.out.values.data() + r * cols);
            break;
        }
        case OpKind::ReduceMean: {
            const auto& x = va(n.a);
            double s = 0.0;
            for (double v : x) s += v;
            n.out.values[0] = s / static_cast<double>(x.size());
            break;
        }
        case OpKind::ReduceSum: {
            const auto& x = va(n.a);
            double s = 0.0;
            for (double v : x) s += v;
            n.out.values[0] = s;
            break;
        }
        case OpKind::Log: {
            const auto& x = va(n.a);
            for (std::size_t i = 0; i < x.size(); ++i)
                n.out.values[i] = std::log(std::max(x[i], kLogClamp));
            break;
        }
        case OpKind::Power: {
            const auto& x = va(n.a);
            for (std::size_t i = 0; i < x.size(); ++i)
                n.out.values[i] = n.scalar == 0.0 ? 1.0 : std::pow(x[i], n.scalar);
            break;
        }
        case OpKind::Scale: {
            const auto& x = va(n.a);
            for (std::size_t i = 0; i < x.size(); ++i) n.out.values[i] = x[i] * n.scalar;
            break;
        }
        case OpKind::AddScalar: {
            const auto& x = va(n.a);
            for (std::size_t i = 0; i < x.size(); ++i) n.out.values[i] = x[i] + n.scalar;
            break;
        }
    }
    check_finite(n);
}

const Tensor& Graph::forward(const std::map<std::string, Tensor>& inputs) {
    if (nodes_.empty()) throw StateError("forward on empty graph");
    for (auto& n : nodes_) {
        if (n.kind == OpKind::Input && !n.input_name.empty()) {
            auto it = inputs.find(n.input_name);
            if (it == inputs.end()) throw StateError("unbound input: " + n.input_name);
            if (it->second.shape != n.out.shape)
                throw ShapeError("input shape mismatch for: " + n.input_name);
            n.out.values = it->second.values;
        }
        eval_node(n);
    }
    forward_done_ = true;
    backward_done_ = false;
    return nodes_.back().out;
}

void Graph::backward() {
    if (!forward_done_) throw StateError("backward called before forward");
    if (backward_done_) throw StateError("backward already applied to this forward pass");
    Node& root = nodes_.back();
    if (root.out.size() != 1) throw StateError("backward requires a scalar root");

    for (auto& n : nodes_) n.node_grad.assign(n.out.size(), 0.0);
    root.node_grad[0] = 1.0;

    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) back_node(*it);

    for (auto& n : nodes_)
        if (n.kind == OpKind::Param)
            for (std::size_t i = 0; i < n.node_grad.size(); ++i)
                n.param->grad[i] += n.node_grad[i];

    backward_done_ = true;
}

void Graph::back_node(Node& n) {
    const auto& g = n.node_grad;
    auto ga = [&](NodeId id) -> std::vector<double>& { return nodes_[id].node_grad; };
    auto va = [&](NodeId id) -> const std::vector<double>& { return nodes_[id].out.values; };
    switch (n.kind) {
        case OpKind::Input:
        case OpKind::Param:
            break;
        case OpKind::Affine: {
            const Tensor& x = nodes_[n.a].out;
            const Tensor& w = nodes_[n.b].out;
            auto& gx = ga(n.a);
            auto& gw = ga(n.b);
            auto& gb = ga(n.c);
            std::size_t rows = x.shape[0], in = x.shape[1], out = w.shape[1];
            for (std::size_t r = 0; r < rows; ++r) {
                for (std::size_t j = 0; j < out; ++j) {
                    double gj = g[r * out + j];
                    gb[j] += gj;
                    for (std::size_t k = 0; k < in; ++k) {
                        gx[r * in + k] += gj * w.values[k * out + j];
                        gw[k * out + j] += gj * x.values[r * in + k];
                    }
                }
            }
            break;
        }
        case OpKind::Relu: {
            const auto& x = va(n.a);
            auto& gx = ga(n.a);
            for (std::size_t i = 0; i < x.size(); ++i)
                if (x[i] > 0.0) gx[i] += g[i];
            break;
        }
        case OpKind::Sigmoid: {
            auto& gx = ga(n.a);
            for (std::size_t i = 0; i < g.size(); ++i) {
                double y = n.out.values[i];
                gx[i] += g[i] * y * (1.0 - y);
            }
            break;
        }
        case OpKind::SoftmaxRows: {
            auto& gx = ga(n.a);
            std::size_t rows = n.out.shape[0], k = n.out.shape[1];
            for (std::size_t r = 0; r < rows; ++r) {
                const double* y = n.out.values.data() + r * k;
                const double* gr = g.data() + r * k;
                double dot = 0.0;
                for (std::size_t j = 0; j < k; ++j) dot += gr[j] * y[j];
                for (std::size_t j = 0; j < k; ++j) gx[r * k + j] += y[j] * (gr[j] - dot);
            }
            break;
        }
        case OpKind::ConcatCols: {
            auto& gxa = ga(n.a);
            auto& gxb = ga(n.b);
            std::size_t rows = n.out.shape[0];
            std::size_t cola = nodes_[n.a].out.shape[1], colb = nodes_[n.b].out.shape[1];
            for (std::size_t r = 0; r < rows; ++r) {
                for (std::size_t j = 0; j < cola; ++j)
                    gxa[r * cola + j] += g[r * (cola + colb) + j];
                for (std::size_t j = 0; j < colb; ++j)
                    gxb[r * colb + j] += g[r * (cola + colb) + cola + j];
            }
            break;
        }
        case OpKind::AbsDiff: {
            const auto& a = va(n.a);
            const auto& b = va(n.b);
            auto& gxa = ga(n.a);
            auto& gxb = ga(n.b);
            for (std::size_t i = 0; i < g.size(); ++i) {
                double d = a[i] - b[i];
                double s = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);  // subgradient 0 at the kink
                gxa[i] += g[i] * s;
                gxb[i] -= g[i] * s;
            }
            break;
        }
        case OpKind::Mul: {
            const auto& a = va(n.a);
            const auto& b = va(n.b);
            auto& gxa = ga(n.a);
            auto& gxb = ga(n.b);
            for (std::size_t i = 0; i < g.size(); ++i) {
                gxa[i] += g[i] * b[i];
                gxb[i] += g[i] * a[i];
            }
            break;
        }
        case OpKind::Add: {
            auto& gxa = ga(n.a);
            auto& gxb = ga(n.b);
            for (std::size_t i = 0; i < g.size(); ++i) {
                gxa[i] += g[i];
                gxb[i] += g[i];
            }
            break;
        }
        case OpKind::GatherRows: {
            auto& gx = ga(n.a);
            std::size_t cols = nodes_[n.a].out.shape[1];
            for (std::size_t r = 0; r < n.indices.size(); ++r)
                for (std::size_t j = 0; j < cols; ++j)
                    gx[n.indices[r] * cols + j] += g[r * cols + j];
            break;
        }
        case OpKind::ReduceMean: {
            auto& gx = ga(n.a);
            double gm = g[0] / static_cast<double>(gx.size());
            for (double& v : gx) v += gm;
            break;
        }
        case OpKind::ReduceSum: {
            auto& gx = ga(n.a);
            for (double& v : gx) v += g[0];
            break;
        }
        case OpKind::Log: {
            const auto& x = va(n.a);
            auto& gx = ga(n.a);
            for (std::size_t i = 0; i < g.size(); ++i)
                if (x[i] > kLogClamp) gx[i] += g[i] / x[i];
            break;
        }
        case OpKind::Power: {
            const auto& x = va(n.a);
            auto& gx = ga(n.a);
            double e = n.scalar;
            if (e != 0.0)
                for (std::size_t i = 0; i < g.size(); ++i)
                    gx[i] += g[i] * e * std::pow(x[i], e - 1.0);
            break;
        }
        case OpKind::Scale: {
            auto& gx = ga(n.a);
            for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * n.scalar;
            break;
        }
        case OpKind::AddScalar: {
            auto& gx = ga(n.a);
            for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
            break;
        }
    }
}

double Graph::grad_check(const std::map<std::string, Tensor>& inputs, double epsilon) {
    if (epsilon <= 0.0 || epsilon > 1e-3) throw StateError("grad_check: epsilon out of (0, 1e-3]");

    std::vector<Tensor*> params;
    for (auto& n : nodes_)
        if (n.kind == OpKind::Param) params.push_back(n.param);
    for (Tensor* p : params) {
        p->ensure_grad();
        p->zero_grad();
    }

    forward(inputs);
    if (nodes_.back().out.size() != 1) throw StateError("grad_check requires a scalar root");
    backward();

    std::vector<std::vector<double>> analytic;
    analytic.reserve(params.size());
    for (Tensor* p : params) analytic.push_back(p->grad);

    double max_rel = 0.0;
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        Tensor* p = params[pi];
        for (std::size_t i = 0; i < p->values.size(); ++i) {
            double saved = p->values[i];
            p->values[i] = saved + epsilon;
            double fp = forward(inputs).values[0];
            p->values[i] = saved - epsilon;
            double fm = forward(inputs).values[0];
            p->values[i] = saved;
            double numeric = (fp - fm) / (2.0 * epsilon);
            double a = analytic[pi][i];
            double denom = std::max({std::fabs(a), std::fabs(numeric), 1e-12});
            max_rel = std::max(max_rel, std::fabs(a - numeric) / denom);
        }
    }
    forward(inputs);  // restore cached activations to the unperturbed point
    return max_rel;
}

}  // namespace mlsn
