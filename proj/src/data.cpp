#include "mlsn/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace mlsn {

Dataset gen_two_moons(std::size_t n, double noise_sigma, RngStream& rng) {
    if (n < 2 || n % 2 != 0) throw ConfigError("gen_two_moons: n must be even and >= 2");
    Dataset ds;
    ds.name = "two-moons";
    ds.num_classes = 2;
    ds.features = Tensor::zeros({n, 2});
    ds.labels.resize(n);
    std::size_t half = n / 2;
    for (std::size_t i = 0; i < n; ++i) {
        double t = rng.uniform(0.0, M_PI);
        double x, y;
        if (i < half) {
            x = std::cos(t);
            y = std::sin(t);
            ds.labels[i] = 0;
        } else {
            x = 1.0 - std::cos(t);
            y = 0.5 - std::sin(t);
            ds.labels[i] = 1;
        }
        ds.features.at(i, 0) = x + (noise_sigma > 0.0 ? rng.normal(0.0, noise_sigma) : 0.0);
        ds.features.at(i, 1) = y + (noise_sigma > 0.0 ? rng.normal(0.0, noise_sigma) : 0.0);
    }
    return ds;
}

namespace {

// Seven-segment glyphs on an 8x8 grid. Segment layout:
//   A: row 1, cols 2-5     G: row 4 (middle)     D: row 6 (bottom)
//   F/B: upper verticals   E/C: lower verticals
const int kSegments[10] = {
    //  gfedcba
    0b0111111,  // 0
    0b0000110,  // 1
    0b1011011,  // 2
    0b1001111,  // 3
    0b1100110,  // 4
    0b1101101,  // 5
    0b1111101,  // 6
    0b0000111,  // 7
    0b1111111,  // 8
    0b1101111,  // 9
};

void render_digit(int digit, double* img /* 64 doubles */) {
    std::fill(img, img + 64, 0.0);
    int segs = kSegments[digit];
    auto set = [&](int r, int c) { img[r * 8 + c] = 16.0; };
    if (segs & 0b0000001)  // A
        for (int c = 2; c <= 5; ++c) set(1, c);
    if (segs & 0b0000010) {  // B
        set(2, 5); set(3, 5);
    }
    if (segs & 0b0000100) {  // C
        set(5, 5);
    }
    if (segs & 0b0001000)  // D
        for (int c = 2; c <= 5; ++c) set(6, c);
    if (segs & 0b0010000) {  // E
        set(5, 2);
    }
    if (segs & 0b0100000) {  // F
        set(2, 2); set(3, 2);
    }
    if (segs & 0b1000000)  // G
        for (int c = 2; c <= 5; ++c) set(4, c);
}

}  // namespace

Dataset gen_digits(std::size_t n, double noise_sigma, RngStream& rng) {
    if (n == 0) throw ConfigError("gen_digits: n must be positive");
    Dataset ds;
    ds.name = "digits8x8";
    ds.num_classes = 10;
    ds.features = Tensor::zeros({n, 64});
    ds.labels.resize(n);
    double base[64];
    for (std::size_t i = 0; i < n; ++i) {
        int digit = static_cast<int>(i % 10);
        ds.labels[i] = digit;
        render_digit(digit, base);
        int dr = static_cast<int>(rng.uniform_int(3)) - 1;
        int dc = static_cast<int>(rng.uniform_int(3)) - 1;
        double gain = rng.uniform(0.6, 1.0);
        double* row = ds.features.values.data() + i * 64;
        for (int r = 0; r < 8; ++r) {
            for (int c = 0; c < 8; ++c) {
                int sr = r - dr, sc = c - dc;
                double v = (sr >= 0 && sr < 8 && sc >= 0 && sc < 8) ? base[sr * 8 + sc] : 0.0;
                v = v * gain + rng.normal(0.0, noise_sigma);
                row[r * 8 + c] = std::clamp(v, 0.0, 16.0);
            }
        }
    }
    return ds;
}

Dataset load_csv_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open dataset file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty dataset file: " + path);

    // header: f1,...,fd,label
    std::size_t d = 0;
    {
        std::stringstream hs(line);
        std::string col;
        std::vector<std::string> cols;
        while (std::getline(hs, col, ',')) cols.push_back(col);
        if (cols.size() < 2 || cols.back() != "label")
            throw ConfigError(path + ": header must be f1,...,fd,label");
        d = cols.size() - 1;
    }

    std::vector<double> values;
    std::vector<int> labels;
    int max_label = -1;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() != d + 1)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected " +
                              std::to_string(d + 1) + " columns, got " +
                              std::to_string(cells.size()));
        try {
            for (std::size_t k = 0; k < d; ++k) values.push_back(std::stod(cells[k]));
            int y = std::stoi(cells[d]);
            labels.push_back(y);
            max_label = std::max(max_label, y);
        } catch (const std::exception&) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": malformed row");
        }
    }
    if (labels.empty()) throw ConfigError(path + ": no data rows");

    Dataset ds;
    ds.name = path;
    ds.num_classes = max_label + 1;
    ds.features = Tensor({labels.size(), d}, std::move(values));
    ds.labels = std::move(labels);
    return ds;
}

void save_csv_dataset(const std::string& path, const Dataset& ds) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write dataset file: " + path);
    std::size_t d = ds.dim();
    for (std::size_t k = 1; k <= d; ++k) out << "f" << k << ",";
    out << "label\n";
    char buf[40];
    for (std::size_t i = 0; i < ds.n(); ++i) {
        for (std::size_t k = 0; k < d; ++k) {
            std::snprintf(buf, sizeof(buf), "%.17g", ds.features.at(i, k));
            out << buf << ",";
        }
        out << ds.labels[i] << "\n";
    }
}

WeakPairSet load_weak_pairs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open weak-pair file: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "i,j,same")
        throw ConfigError(path + ": expected header i,j,same");
    WeakPairSet out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        WeakPair p;
        if (std::sscanf(line.c_str(), "%zu,%zu,%d", &p.i, &p.j, &p.same) != 3)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": malformed row");
        out.pairs.push_back(p);
    }
    return out;
}

void save_weak_pairs(const std::string& path, const WeakPairSet& pairs) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write weak-pair file: " + path);
    out << "i,j,same\n";
    for (const auto& p : pairs.pairs) out << p.i << "," << p.j << "," << p.same << "\n";
}

namespace {
Dataset subset(const Dataset& ds, const std::vector<std::size_t>& rows, bool keep_labels) {
    Dataset out;
    out.name = ds.name;
    out.num_classes = ds.num_classes;
    out.features = Tensor::zeros({rows.size(), ds.dim()});
    out.labels.resize(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        std::copy_n(ds.features.values.data() + rows[r] * ds.dim(), ds.dim(),
                    out.features.values.data() + r * ds.dim());
        out.labels[r] = keep_labels ? ds.labels[rows[r]] : -1;
    }
    return out;
}
}  // namespace

SSLSplit split_ssl(const Dataset& dataset, std::size_t n_labeled, double test_fraction,
                   bool stratified, RngStream& rng) {
    if (!dataset.fully_labeled()) throw ConfigError("split_ssl: source dataset must be labeled");
    std::size_t n = dataset.n();
    std::size_t n_test = static_cast<std::size_t>(std::lround(test_fraction * n));
    if (n_test + n_labeled > n) throw ConfigError("split_ssl: infeasible labeled/test counts");
    int k = dataset.num_classes;
    if (stratified && n_labeled % k != 0)
        throw ConfigError("split_ssl: stratified n_labeled must be divisible by K");

    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    rng.shuffle(perm);

    std::vector<std::size_t> test_rows(perm.begin(), perm.begin() + n_test);
    std::vector<std::size_t> pool(perm.begin() + n_test, perm.end());

    std::vector<std::size_t> labeled_rows;
    std::vector<bool> taken(n, false);
    if (stratified) {
        std::size_t per_class = n_labeled / k;
        std::map<int, std::size_t> counts;
        for (std::size_t idx : pool) {
            int y = dataset.labels[idx];
            if (counts[y] < per_class) {
                labeled_rows.push_back(idx);
                taken[idx] = true;
                ++counts[y];
            }
        }
        if (labeled_rows.size() != n_labeled)
            throw ConfigError("split_ssl: not enough rows per class for stratified labeling");
    } else {
        labeled_rows.assign(pool.begin(), pool.begin() + n_labeled);
        for (std::size_t idx : labeled_rows) taken[idx] = true;
    }

    std::vector<std::size_t> unlabeled_rows;
    for (std::size_t idx : pool)
        if (!taken[idx]) unlabeled_rows.push_back(idx);

    SSLSplit split;
    split.labeled = subset(dataset, labeled_rows, true);
    split.unlabeled = subset(dataset, unlabeled_rows, false);
    split.test = subset(dataset, test_rows, true);
    return split;
}

WeakPairSet gen_weak_pairs(const Dataset& dataset, std::size_t n_pairs, RngStream& rng) {
    if (!dataset.fully_labeled()) throw ConfigError("gen_weak_pairs: dataset must be labeled");
    std::size_t n = dataset.n();
    std::size_t total = n >= 2 ? n * (n - 1) / 2 : 0;
    if (n_pairs > total) throw ConfigError("gen_weak_pairs: n_pairs exceeds C(n,2)");

    auto decode = [&](std::size_t pair_idx) {
        std::size_t i = 0, remaining = pair_idx, row_len = n - 1;
        while (remaining >= row_len) {
            remaining -= row_len;
            ++i;
            --row_len;
        }
        std::size_t j = i + 1 + remaining;
        WeakPair p;
        p.i = i;
        p.j = j;
        p.same = dataset.labels[i] == dataset.labels[j] ? 1 : 0;
        return p;
    };

    std::vector<std::size_t> all(total);
    for (std::size_t t = 0; t < total; ++t) all[t] = t;
    WeakPairSet out;
    out.pairs.reserve(n_pairs);
    for (std::size_t t = 0; t < n_pairs; ++t) {
        std::size_t j = t + rng.uniform_int(total - t);
        std::swap(all[t], all[j]);
        out.pairs.push_back(decode(all[t]));
    }
    return out;
}

void Standardizer::fit(const Tensor& rows) {
    std::size_t n = rows.rows(), d = rows.cols();
    mean.assign(d, 0.0);
    stddev.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < d; ++k) mean[k] += rows.at(i, k);
    for (std::size_t k = 0; k < d; ++k) mean[k] /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < d; ++k) {
            double diff = rows.at(i, k) - mean[k];
            stddev[k] += diff * diff;
        }
    for (std::size_t k = 0; k < d; ++k)
        stddev[k] = std::max(std::sqrt(stddev[k] / static_cast<double>(n)), 1e-12);
}

void Standardizer::fit(const Tensor& a, const Tensor& b) {
    Tensor all = Tensor::zeros({a.rows() + b.rows(), a.cols()});
    std::copy(a.values.begin(), a.values.end(), all.values.begin());
    std::copy(b.values.begin(), b.values.end(), all.values.begin() + a.values.size());
    fit(all);
}

void Standardizer::apply(Tensor& rows) const {
    if (rows.cols() != mean.size()) throw ShapeError("standardizer: column count mismatch");
    for (std::size_t i = 0; i < rows.rows(); ++i)
        for (std::size_t k = 0; k < rows.cols(); ++k)
            rows.at(i, k) = (rows.at(i, k) - mean[k]) / stddev[k];
}

void Standardizer::apply(SSLSplit& split) const {
    apply(split.labeled.features);
    if (split.unlabeled.n() > 0) apply(split.unlabeled.features);
    apply(split.test.features);
}

}  // namespace mlsn
