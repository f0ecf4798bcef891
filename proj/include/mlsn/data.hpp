#pragma once

#include <string>
#include <vector>

#include "mlsn/rng.hpp"
#include "mlsn/tensor.hpp"

namespace mlsn {

// Feature matrix plus per-row labels; label -1 marks an unlabeled row.
struct Dataset {
    Tensor features;  // n x d
    std::vector<int> labels;
    std::string name;
    int num_classes = 0;

    std::size_t n() const { return features.rows(); }
    std::size_t dim() const { return features.cols(); }
    bool fully_labeled() const {
        for (int y : labels)
            if (y < 0) return false;
        return true;
    }
};

struct SSLSplit {
    Dataset labeled;    // D_L: every row labeled
    Dataset unlabeled;  // U: labels erased
    Dataset test;       // held out, labeled
};

struct WeakPair {
    std::size_t i = 0, j = 0;
    int same = 0;
};

struct WeakPairSet {
    std::vector<WeakPair> pairs;
};

// Two interleaving noisy semicircles, n/2 points per class.
Dataset gen_two_moons(std::size_t n, double noise_sigma, RngStream& rng);

// Synthetic 8x8 seven-segment digit images (d=64, K=10): per-sample pixel
// shift, intensity jitter and Gaussian noise on top of fixed glyphs.
Dataset gen_digits(std::size_t n, double noise_sigma, RngStream& rng);

// CSV schema: header f1,...,fd,label; label integer in [0,K) or -1.
Dataset load_csv_dataset(const std::string& path);
void save_csv_dataset(const std::string& path, const Dataset& ds);

// Weak-pair CSV: header i,j,same.
WeakPairSet load_weak_pairs(const std::string& path);
void save_weak_pairs(const std::string& path, const WeakPairSet& pairs);

SSLSplit split_ssl(const Dataset& dataset, std::size_t n_labeled, double test_fraction,
                   bool stratified, RngStream& rng);

// Distinct unordered pairs with their same-class flag; the labels themselves
// are not carried along.
WeakPairSet gen_weak_pairs(const Dataset& dataset, std::size_t n_pairs, RngStream& rng);

// Per-column standardization; statistics come from the training rows only.
struct Standardizer {
    std::vector<double> mean, stddev;
    void fit(const Tensor& rows);
    void fit(const Tensor& a, const Tensor& b);  // union of two row sets
    void apply(Tensor& rows) const;
    void apply(SSLSplit& split) const;
};

}  // namespace mlsn
