#include "mlsn/gradcheck_suite.hpp"

#include <cmath>
#include <functional>

#include "mlsn/objectives.hpp"

namespace mlsn {

namespace {

constexpr double kEps = 1e-6;      // primitives
constexpr double kLossEps = 1e-5;  // composed losses: larger step keeps roundoff below tolerance

// values bounded away from relu/abs kinks by >= margin
Tensor random_tensor(std::vector<std::size_t> shape, RngStream& rng, double margin = 1e-1) {
    Tensor t = Tensor::zeros(std::move(shape));
    for (double& v : t.values) {
        double u = margin + rng.uniform(0.0, 0.9);
        v = rng.uniform01() < 0.5 ? -u : u;
    }
    return t;
}

Tensor random_positive(std::vector<std::size_t> shape, RngStream& rng) {
    Tensor t = Tensor::zeros(std::move(shape));
    for (double& v : t.values) v = rng.uniform(0.2, 1.0);
    return t;
}

Tensor random_stochastic_rows(std::size_t n, std::size_t k, RngStream& rng) {
    Tensor t = Tensor::zeros({n, k});
    for (std::size_t r = 0; r < n; ++r) {
        double sum = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            t.at(r, c) = rng.uniform(0.1, 1.0);
            sum += t.at(r, c);
        }
        for (std::size_t c = 0; c < k; ++c) t.at(r, c) /= sum;
    }
    return t;
}

GradCheckResult run_case(const std::string& name,
                         const std::function<double()>& check) {
    GradCheckResult r;
    r.name = name;
    r.max_rel_error = check();
    r.passed = r.max_rel_error < kGradCheckTolerance;
    return r;
}

ModelState small_model(RngStream& rng) {
    FeatureExtractorSpec h{3, {8}, 4};
    ClassifierSpec c{4, 3, {}};
    SimilarityNetSpec s{4, {6}};
    return init_model(h, c, s, rng);
}

}  // namespace

std::vector<GradCheckResult> run_gradcheck_suite() {
    std::vector<GradCheckResult> out;
    RngStream rng(20240917ull, "gradcheck");

    // --- primitives ---------------------------------------------------------
    {
        Tensor x = random_tensor({2, 3}, rng), w = random_tensor({3, 4}, rng);
        Tensor b = random_tensor({4}, rng);
        out.push_back(run_case("affine", [&] {
            Graph g;
            g.reduce_sum(g.affine(g.param(&x), g.param(&w), g.param(&b)));
            return g.grad_check({}, kEps);
        }));
    }
    {
        Tensor x = random_tensor({3, 3}, rng);
        out.push_back(run_case("relu", [&] {
            Graph g;
            g.reduce_sum(g.relu(g.param(&x)));
            return g.grad_check({}, kEps);
        }));
    }
    {
        Tensor x = random_tensor({2, 4}, rng);
        out.push_back(run_case("sigmoid", [&] {
            Graph g;
            g.reduce_sum(g.sigmoid(g.param(&x)));
            return g.grad_check({}, kEps);
        }));
    }
    {
        Tensor x = random_tensor({3, 4}, rng);
        Tensor weights = random_tensor({3, 4}, rng);
        out.push_back(run_case("softmax-rows", [&] {
            Graph g;
            // weighted sum so every softmax entry matters
            g.reduce_sum(g.mul(g.softmax_rows(g.param(&x)), g.constant(weights)));
            return g.grad_check({}, kEps);
        }));
    }
    {
        Tensor a = random_tensor({2, 3}, rng), b = random_tensor({2, 2}, rng);
        Tensor weights = random_tensor({2, 5}, rng);
        out.push_back(run_case("concat-columns", [&] {
            Graph g;
            g.reduce_sum(g.mul(g.concat_cols(g.param(&a), g.param(&b)), g.constant(weights)));
            return g.grad_check({}, kEps);
        }));
    }
    {
        Tensor a = random_tensor({2, 3}, rng);
        Tensor b = random_tensor({2, 3}, rng);
        for (std::size_t i = 0; i < a.values.size(); ++i)
            if (std::fabs(a.values[i] - b.values[i]) < 1e-3) b.values[i] += 0.25;
        out.push_back(run_case("elementwise-abs-diff", [&] {
            Graph g;
            g.reduce_sum(g.abs_diff(g.param(&a), g.param(&b)));
            return g.grad_check({}, kEps);
        }));
    }
    {
        Tensor a = random_tensor({2, 3}, rng), b = random_tensor({2, 3}, rng);
        out.push_back(run_case("elementwise-product", [&] {
            Graph g;
            g.reduce_sum(g.mul(g.param(&a), g.param(&b)));
            return g.grad_check({}, kEps);
        }));
    }
    {
        Tensor a = random_tensor({2, 3}, rng), b = random_tensor({2, 3}, rng);
        out.push_back(run_case("elementwise-add", [&] {
            Graph g;
            g.reduce_sum(g.add(g.param(&a), g.param(&b)));
            return g.grad_check({}, kEps);
        }));
    }
    {
        Tensor x = random_tensor({4, 3}, rng);
        Tensor weights = random_tensor({3, 3}, rng);
        out.push_back(run_case("gather-rows", [&] {
            Graph g;
            g.reduce_sum(
                g.mul(g.gather_rows(g.param(&x), {0, 2, 2}), g.constant(weights)));
            return g.grad_check({}, kEps);
        }));
    }
    {
        Tensor x = random_tensor({3, 3}, rng);
        out.push_back(run_case("reduce-mean", [&] {
            Graph g;
            g.reduce_mean(g.param(&x));
            return g.grad_check({}, kEps);
        }));
    }
    {
        Tensor x = random_tensor({3, 3}, rng);
        out.push_back(run_case("reduce-sum", [&] {
            Graph g;
            g.reduce_sum(g.param(&x));
            return g.grad_check({}, kEps);
        }));
    }
    {
        Tensor x = random_positive({2, 3}, rng);
        out.push_back(run_case("log", [&] {
            Graph g;
            g.reduce_sum(g.log(g.param(&x)));
            return g.grad_check({}, kEps);
        }));
    }
    {
        Tensor x = random_positive({2, 3}, rng);
        out.push_back(run_case("power", [&] {
            Graph g;
            g.reduce_sum(g.power(g.param(&x), 2.0));
            return g.grad_check({}, kEps);
        }));
    }
    {
        Tensor x = random_tensor({2, 3}, rng);
        out.push_back(run_case("scalar-scale", [&] {
            Graph g;
            g.reduce_sum(g.scale(g.param(&x), -1.7));
            return g.grad_check({}, kEps);
        }));
    }
    {
        Tensor x = random_tensor({2, 3}, rng);
        out.push_back(run_case("scalar-add", [&] {
            Graph g;
            g.reduce_sum(g.add_scalar(g.param(&x), 0.3));
            return g.grad_check({}, kEps);
        }));
    }

    // --- losses through the full network stack ------------------------------
    Tensor x_batch = random_tensor({4, 3}, rng);
    std::vector<int> labels = {0, 2, 1, 1};

    out.push_back(run_case("loss L_C", [&] {
        ModelState m = small_model(rng);
        Graph g;
        auto probs = build_classifier(g, m, build_feature_extractor(g, m, g.constant(x_batch)));
        cross_entropy_node(g, probs, labels, 3);
        return g.grad_check({}, kLossEps);
    }));

    out.push_back(run_case("loss L_T", [&] {
        ModelState m = small_model(rng);
        Tensor teacher = random_stochastic_rows(4, 3, rng);
        Graph g;
        auto probs = build_classifier(g, m, build_feature_extractor(g, m, g.constant(x_batch)));
        consistency_node(g, probs, teacher);
        return g.grad_check({}, kLossEps);
    }));

    std::vector<PairSample> pairs;
    {
        PairSample p;
        p.i_index = 0; p.j_index = 1; p.target = 1; pairs.push_back(p);
        p.i_index = 2; p.j_index = 3; p.target = 0; pairs.push_back(p);
        p.i_index = 0; p.j_index = 3; p.target = 1; pairs.push_back(p);
    }
    for (double gamma : {0.0, 2.0}) {
        out.push_back(run_case("loss L_S focal gamma=" + std::to_string(int(gamma)), [&] {
            ModelState m = small_model(rng);
            Graph g;
            auto feats = build_feature_extractor(g, m, g.constant(x_batch));
            similarity_loss_node(g, m, feats, pairs, gamma, 0.25);
            return g.grad_check({}, kLossEps);
        }));
    }

    out.push_back(run_case("loss L_SC", [&] {
        ModelState m = small_model(rng);
        Tensor targets = random_stochastic_rows(2, 3, rng);
        Graph g;
        auto probs = build_classifier(g, m, build_feature_extractor(g, m, g.constant(x_batch)));
        soft_cross_entropy_node(g, g.gather_rows(probs, {2, 3}), targets);
        return g.grad_check({}, kLossEps);
    }));

    out.push_back(run_case("loss total", [&] {
        ModelState m = small_model(rng);
        Tensor teacher = random_stochastic_rows(4, 3, rng);
        Tensor targets = random_stochastic_rows(2, 3, rng);
        Graph g;
        auto feats = build_feature_extractor(g, m, g.constant(x_batch));
        auto probs = build_classifier(g, m, feats);
        auto lc = cross_entropy_node(g, g.gather_rows(probs, {0, 1}), {0, 2}, 3);
        auto lt = consistency_node(g, probs, teacher);
        auto ls = similarity_loss_node(g, m, feats, pairs, 2.0, 0.25);
        auto lsc = soft_cross_entropy_node(g, g.gather_rows(probs, {2, 3}), targets);
        auto total = g.add(g.add(lc, g.scale(lt, 0.7)),
                           g.add(g.scale(ls, 0.9), g.scale(lsc, 0.3)));
        (void)total;
        return g.grad_check({}, kLossEps);
    }));

    return out;
}

}  // namespace mlsn
