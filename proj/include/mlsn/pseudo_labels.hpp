#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "mlsn/rng.hpp"
#include "mlsn/tensor.hpp"

namespace mlsn {

struct ModelState;

enum class PairSource { TrueLabel, PseudoLabel };

// An unordered sample pair with its binary similarity target.
struct PairSample {
    std::size_t i_index = 0;
    std::size_t j_index = 0;
    int target = 0;  // y_simi
    PairSource source = PairSource::TrueLabel;
};

int true_similarity_target(int y_i, int y_j);
int pseudo_similarity_target(int yhat_i, int yhat_j);

// Argmax over one row of a probability matrix; ties go to the lowest index.
int argmax_row(const Tensor& probs, std::size_t row);

// One randomly drawn labeled sample per class present in the batch.
struct CenterMap {
    std::map<int, std::size_t> entries;  // class -> batch index
    std::vector<int> covered_classes;

    bool covers_all(int num_classes) const {
        return static_cast<int>(covered_classes.size()) == num_classes;
    }
};

CenterMap select_class_centers(const std::vector<std::pair<std::size_t, int>>& batch_labels,
                               RngStream& rng);

struct SoftLabel {
    std::vector<double> probs;  // sums to 1
};

// Similarities of x against the K class-center features, normalized into a
// distribution. Returns nullopt when the centers do not cover all K classes.
// center_feats row k holds the features of the class-k center.
std::optional<SoftLabel> soft_label(const ModelState& state, const Tensor& x_feat,
                                    const CenterMap& centers, const Tensor& center_feats,
                                    int num_classes);

// Draws m distinct unordered pairs uniformly from the eligible pairs of a
// batch laid out as [0, n_l) labeled then [n_l, n_l+n_u) unlabeled. An
// unlabeled endpoint is eligible only when its confidence (max classifier
// probability, indexed by unlabeled position) reaches tau. Targets are left
// at 0 for the caller to fill in. When m exceeds the eligible pair count,
// all eligible pairs are returned and `truncated` is set.
std::vector<PairSample> sample_pairs(std::size_t n_l, std::size_t n_u, std::size_t m,
                                     const std::vector<double>& confidence, double tau,
                                     RngStream& rng, bool* truncated = nullptr);

}  // namespace mlsn
