#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>

#include "mlsn/checkpoint.hpp"
#include "mlsn/networks.hpp"

using namespace mlsn;

namespace {

ModelState small_state(std::uint64_t seed = 11) {
    FeatureExtractorSpec h{3, {5}, 4};
    ClassifierSpec c{4, 3, {}};
    SimilarityNetSpec s{4, {6}};
    RngStream rng(seed, "init");
    return init_model(h, c, s, rng);
}

void zero_weights(ParamSet& ps) {
    for (auto& [name, t] : ps.entries)
        if (name[0] == 'W') std::fill(t.values.begin(), t.values.end(), 0.0);
}

}  // namespace

TEST_CASE("spec validation rejects degenerate dimensions") {
    FeatureExtractorSpec h{0, {8}, 4};
    ClassifierSpec c{4, 3, {}};
    SimilarityNetSpec s{4, {6}};
    CHECK_THROWS_AS(validate_specs(h, c, s), ConfigError);
    h.input_dim = 2;
    c.num_classes = 1;
    CHECK_THROWS_AS(validate_specs(h, c, s), ConfigError);
    c.num_classes = 3;
    s.feature_dim = 5;  // must match h.feature_dim
    CHECK_THROWS_AS(validate_specs(h, c, s), ConfigError);
}

TEST_CASE("init is deterministic and Glorot-bounded") {
    ModelState a = small_state();
    ModelState b = small_state();
    for (const auto& [name, t] : a.h_params.entries) {
        const Tensor& u = b.h_params.at(name);
        REQUIRE(t.size() == u.size());
        CHECK(std::memcmp(t.values.data(), u.values.data(),
                          t.size() * sizeof(double)) == 0);
    }
    // first h layer: fan_in 3, fan_out 5 -> |w| <= sqrt(6/8)
    const Tensor& w0 = a.h_params.at("W0");
    double bound = std::sqrt(6.0 / (3 + 5));
    for (double v : w0.values) CHECK(std::abs(v) <= bound);
    // biases start at zero
    for (double v : a.h_params.at("b0").values) CHECK(v == 0.0);
}

TEST_CASE("zero-weight extractor outputs relu(bias) broadcast over rows") {
    ModelState m = small_state();
    zero_weights(m.h_params);
    m.h_params.at("b0").values = {0.5, -1.0, 0.0, 2.0, 0.3};
    m.h_params.at("b1").values = {0.1, -0.2, 0.3, 0.0};
    Tensor x({2, 3}, {1, 2, 3, -4, 5, -6});
    Tensor f = extract_features(m, x);
    REQUIRE(f.shape == std::vector<std::size_t>({2, 4}));
    for (std::size_t r = 0; r < 2; ++r) {
        CHECK(f.at(r, 0) == doctest::Approx(0.1));
        CHECK(f.at(r, 1) == 0.0);
        CHECK(f.at(r, 2) == doctest::Approx(0.3));
        CHECK(f.at(r, 3) == 0.0);
    }
}

TEST_CASE("identity extractor passes non-negative inputs through") {
    FeatureExtractorSpec h{3, {3}, 3};
    ClassifierSpec c{3, 2, {}};
    SimilarityNetSpec s{3, {4}};
    RngStream rng(1, "init");
    ModelState m = init_model(h, c, s, rng);
    for (const char* name : {"W0", "W1"}) {
        Tensor& w = m.h_params.at(name);
        std::fill(w.values.begin(), w.values.end(), 0.0);
        for (std::size_t i = 0; i < 3; ++i) w.at(i, i) = 1.0;
    }
    Tensor x({2, 3}, {0.5, 0.0, 2.0, 1.0, 3.0, 0.25});
    Tensor f = extract_features(m, x);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(f.values[i] == x.values[i]);
}

TEST_CASE("extractor matches a straight-line reimplementation") {
    ModelState m = small_state(99);
    Tensor x({2, 3}, {0.3, -1.2, 0.7, 2.0, 0.1, -0.4});
    Tensor f = extract_features(m, x);

    auto layer = [](const Tensor& in, const Tensor& w, const Tensor& b) {
        Tensor out = Tensor::zeros({in.shape[0], w.shape[1]});
        for (std::size_t r = 0; r < in.shape[0]; ++r)
            for (std::size_t j = 0; j < w.shape[1]; ++j) {
                double acc = b.values[j];
                for (std::size_t k = 0; k < in.shape[1]; ++k)
                    acc += in.at(r, k) * w.at(k, j);
                out.at(r, j) = std::max(acc, 0.0);
            }
        return out;
    };
    Tensor ref = layer(layer(x, m.h_params.at("W0"), m.h_params.at("b0")),
                       m.h_params.at("W1"), m.h_params.at("b1"));
    REQUIRE(ref.size() == f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        CHECK(f.values[i] == doctest::Approx(ref.values[i]).epsilon(1e-12));
}

TEST_CASE("zero-weight classifier head is uniform") {
    ModelState m = small_state();
    zero_weights(m.c_params);
    Tensor f({2, 4}, {1, 2, 3, 4, -1, 0, 1, 2});
    Tensor p = classify(m, f);
    for (double v : p.values) CHECK(v == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("classifier closed form: logits (ln 3, 0) -> (0.75, 0.25)") {
    FeatureExtractorSpec h{2, {2}, 2};
    ClassifierSpec c{2, 2, {}};
    SimilarityNetSpec s{2, {3}};
    RngStream rng(1, "init");
    ModelState m = init_model(h, c, s, rng);
    zero_weights(m.c_params);
    m.c_params.at("b0").values = {std::log(3.0), 0.0};
    Tensor f({1, 2}, {0.0, 0.0});
    Tensor p = classify(m, f);
    CHECK(p.values[0] == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(p.values[1] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("classifier rows sum to 1 for random states") {
    RngStream data(4, "x");
    for (int trial = 0; trial < 5; ++trial) {
        ModelState m = small_state(100 + trial);
        Tensor x = Tensor::zeros({6, 3});
        for (double& v : x.values) v = data.normal(0.0, 2.0);
        Tensor p = classify(m, extract_features(m, x));
        for (std::size_t r = 0; r < 6; ++r) {
            double sum = 0.0;
            for (std::size_t k = 0; k < 3; ++k) sum += p.at(r, k);
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("pair featurization closed forms") {
    Tensor fi({1, 2}, {1.0, 2.0});
    Tensor fj({1, 2}, {3.0, 1.0});
    Tensor z = pair_featurize(fi, fj);
    REQUIRE(z.size() == 4);
    CHECK(z.values[0] == 2.0);  // |1-3|
    CHECK(z.values[1] == 1.0);  // |2-1|
    CHECK(z.values[2] == 3.0);  // 1*3
    CHECK(z.values[3] == 2.0);  // 2*1

    // f_i == f_j -> zero diff block, squared product block
    Tensor same = pair_featurize(fi, fi);
    CHECK(same.values[0] == 0.0);
    CHECK(same.values[1] == 0.0);
    CHECK(same.values[2] == 1.0);
    CHECK(same.values[3] == 4.0);
}

TEST_CASE("similarity is symmetric bit-for-bit and 0.5 under zero weights") {
    ModelState m = small_state(7);
    RngStream rng(3, "pairs");
    for (int k = 0; k < 100; ++k) {
        Tensor fi = Tensor::zeros({1, 4});
        Tensor fj = Tensor::zeros({1, 4});
        for (double& v : fi.values) v = rng.normal(0.0, 1.0);
        for (double& v : fj.values) v = rng.normal(0.0, 1.0);
        double sij = similarity(m, fi, fj);
        double sji = similarity(m, fj, fi);
        CHECK(std::memcmp(&sij, &sji, sizeof(double)) == 0);
        CHECK(sij > 0.0);
        CHECK(sij < 1.0);
    }

    zero_weights(m.s_params);
    for (auto& [name, t] : m.s_params.entries)
        if (name[0] == 'b') std::fill(t.values.begin(), t.values.end(), 0.0);
    Tensor fi({1, 4}, {1, 2, 3, 4});
    Tensor fj({1, 4}, {-1, 0, 2, 5});
    CHECK(similarity(m, fi, fj) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("forward helpers do not mutate the model") {
    ModelState m = small_state(21);
    ModelState copy = m;
    Tensor x({3, 3}, {1, 0, -1, 0.5, 2, 0.1, -2, 1, 3});
    Tensor f = extract_features(m, x);
    classify(m, f);
    similarity(m, Tensor({1, 4}, {1, 0, 1, 0}), Tensor({1, 4}, {0, 1, 0, 1}));
    for (const ParamSet* ps : {&m.h_params, &m.c_params, &m.s_params}) {
        const ParamSet& ref = ps == &m.h_params   ? copy.h_params
                              : ps == &m.c_params ? copy.c_params
                                                  : copy.s_params;
        for (const auto& [name, t] : ps->entries) {
            const Tensor& u = ref.at(name);
            CHECK(std::memcmp(t.values.data(), u.values.data(),
                              t.size() * sizeof(double)) == 0);
        }
    }
}

TEST_CASE("checkpoint round trip is bit-exact, with and without teacher") {
    ModelState m = small_state(31);
    TeacherState t = make_teacher(m, 0.97, 0.05);
    t.step = 42;
    const char* path = "ckpt_roundtrip_test.txt";
    save_checkpoint(path, m, &t);
    LoadedCheckpoint loaded = load_checkpoint(path);
    REQUIRE(loaded.teacher.has_value());
    CHECK(loaded.teacher->alpha_max == 0.97);
    CHECK(loaded.teacher->step == 42);
    CHECK(loaded.teacher->noise_sigma == 0.05);
    for (const auto& [name, orig] : m.h_params.entries) {
        const Tensor& got = loaded.student.h_params.at(name);
        REQUIRE(got.size() == orig.size());
        CHECK(std::memcmp(got.values.data(), orig.values.data(),
                          orig.size() * sizeof(double)) == 0);
    }
    for (const auto& [name, orig] : t.params.s_params.entries) {
        const Tensor& got = loaded.teacher->params.s_params.at(name);
        CHECK(std::memcmp(got.values.data(), orig.values.data(),
                          orig.size() * sizeof(double)) == 0);
    }

    save_checkpoint(path, m, nullptr);
    LoadedCheckpoint plain = load_checkpoint(path);
    CHECK(!plain.teacher.has_value());
    CHECK(plain.student.h_spec.feature_dim == m.h_spec.feature_dim);
    std::remove(path);
}
