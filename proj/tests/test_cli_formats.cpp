#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "mlsn/config.hpp"

using namespace mlsn;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config file parsing: key=value, comments, blank lines") {
    const char* path = "cfg_parse_test.cfg";
    {
        std::ofstream out(path);
        out << "# a comment\n"
            << "epochs = 12\n"
            << "\n"
            << "learning_rate=0.01  # trailing comment\n"
            << "dataset = moons.csv\n";
    }
    auto kv = read_config_file(path);
    CHECK(kv.at("epochs") == "12");
    CHECK(kv.at("learning_rate") == "0.01");
    CHECK(kv.at("dataset") == "moons.csv");
    std::remove(path);
}

TEST_CASE("resolve_settings applies overrides onto defaults") {
    RunSettings def = resolve_settings({});
    CHECK(def.train.epochs == 60);
    CHECK(def.train.learning_rate == 0.05);
    CHECK(def.test_fraction == 0.25);

    RunSettings s = resolve_settings({{"epochs", "10"},
                                      {"learning_rate", "0.2"},
                                      {"lambda2_max", "0.5"},
                                      {"n_labeled", "6"},
                                      {"hidden_widths", "16,16"},
                                      {"feature_dim", "8"},
                                      {"eval_with", "student"},
                                      {"optimizer", "sgd"}});
    CHECK(s.train.epochs == 10);
    CHECK(s.train.learning_rate == 0.2);
    CHECK(s.train.lambda2.w_max == 0.5);
    CHECK(s.n_labeled == 6);
    CHECK(s.train.h_spec.hidden_widths == std::vector<std::size_t>({16, 16}));
    CHECK(s.train.h_spec.feature_dim == 8);
    CHECK(s.train.c_spec.feature_dim == 8);
    CHECK(s.train.s_spec.feature_dim == 8);
    CHECK(s.train.eval_with == EvalWith::Student);
    CHECK(s.train.optimizer == Optimizer::PlainSgd);
}

TEST_CASE("resolve_settings default ramp follows the epoch budget") {
    RunSettings s = resolve_settings({{"epochs", "100"}});
    CHECK(s.train.lambda1.ramp_epochs == 40);  // 40% of epochs
    RunSettings pinned = resolve_settings({{"epochs", "100"}, {"ramp_epochs", "7"}});
    CHECK(pinned.train.lambda1.ramp_epochs == 7);
}

TEST_CASE("resolve_settings collects every violation") {
    CHECK_THROWS_AS(resolve_settings({{"no_such_key", "1"}}), ConfigError);
    try {
        resolve_settings({{"epochs", "-3"}, {"learning_rate", "0"}, {"bogus", "x"}});
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        std::string msg = e.what();
        CHECK(msg.find("epochs") != std::string::npos);
        CHECK(msg.find("learning_rate") != std::string::npos);
        CHECK(msg.find("bogus") != std::string::npos);
    }
    CHECK_THROWS_AS(resolve_settings({{"epochs", "abc"}}), ConfigError);
}

TEST_CASE("settings round trip through the map form") {
    RunSettings s = resolve_settings({{"epochs", "13"}, {"tau", "0.8"}, {"seed", "9"}});
    auto m = settings_to_map(s);
    CHECK(m.at("epochs") == "13");
    CHECK(m.at("tau") == "0.8");
    CHECK(m.at("seed") == "9");
    RunSettings back = resolve_settings(m);
    CHECK(back.train.epochs == 13);
    CHECK(back.train.tau == 0.8);
    CHECK(back.train.seed == 9);
}

TEST_CASE("file digest is stable and content-sensitive") {
    const char* a = "digest_a_test.txt";
    const char* b = "digest_b_test.txt";
    {
        std::ofstream(a) << "hello";
        std::ofstream(b) << "hello";
    }
    CHECK(file_digest(a) == file_digest(b));
    {
        std::ofstream(b) << "hellp";
    }
    CHECK(file_digest(a) != file_digest(b));
    std::remove(a);
    std::remove(b);
}

TEST_CASE("manifest records settings, digests and artifacts") {
    const char* data = "manifest_data_test.csv";
    const char* manifest = "manifest_test.json";
    {
        std::ofstream(data) << "f1,f2,label\n1,2,0\n";
    }
    RunSettings s = resolve_settings({{"epochs", "5"}, {"seed", "3"}});
    s.dataset_path = data;
    write_manifest(manifest, s, {data}, {"out/metrics.csv"});
    std::string text = slurp(manifest);
    CHECK(text.find(kToolVersion) != std::string::npos);
    CHECK(text.find("manifest_data_test.csv") != std::string::npos);
    CHECK(text.find(file_digest(data)) != std::string::npos);
    CHECK(text.find("out/metrics.csv") != std::string::npos);
    CHECK(text.find("\"epochs\"") != std::string::npos);

    // byte-identical on rewrite
    std::string first = text;
    write_manifest(manifest, s, {data}, {"out/metrics.csv"});
    CHECK(slurp(manifest) == first);
    std::remove(data);
    std::remove(manifest);
}
