#include "mlsn/pseudo_labels.hpp"

#include <algorithm>

#include "mlsn/networks.hpp"

namespace mlsn {

int true_similarity_target(int y_i, int y_j) { return y_i == y_j ? 1 : 0; }

int pseudo_similarity_target(int yhat_i, int yhat_j) { return yhat_i == yhat_j ? 1 : 0; }

int argmax_row(const Tensor& probs, std::size_t row) {
    std::size_t k = probs.cols();
    std::size_t best = 0;
    for (std::size_t j = 1; j < k; ++j)
        if (probs.at(row, j) > probs.at(row, best)) best = j;
    return static_cast<int>(best);
}

CenterMap select_class_centers(const std::vector<std::pair<std::size_t, int>>& batch_labels,
                               RngStream& rng) {
    std::map<int, std::vector<std::size_t>> by_class;
    for (const auto& [idx, y] : batch_labels) by_class[y].push_back(idx);
    CenterMap out;
    for (const auto& [y, members] : by_class) {
        std::size_t pick = members[rng.uniform_int(members.size())];
        out.entries[y] = pick;
        out.covered_classes.push_back(y);
    }
    return out;
}

std::optional<SoftLabel> soft_label(const ModelState& state, const Tensor& x_feat,
                                    const CenterMap& centers, const Tensor& center_feats,
                                    int num_classes) {
    if (!centers.covers_all(num_classes)) return std::nullopt;
    if (center_feats.rows() != static_cast<std::size_t>(num_classes))
        throw ShapeError("soft_label: center feature row count != K");
    Tensor sims = similarity_many(state, x_feat, center_feats);
    SoftLabel out;
    out.probs.resize(num_classes);
    double sum = 0.0;
    for (int k = 0; k < num_classes; ++k) sum += sims.values[k];
    if (sum < 1e-9) {
        std::fill(out.probs.begin(), out.probs.end(), 1.0 / num_classes);
    } else {
        for (int k = 0; k < num_classes; ++k) out.probs[k] = sims.values[k] / sum;
    }
    return out;
}

std::vector<PairSample> sample_pairs(std::size_t n_l, std::size_t n_u, std::size_t m,
                                     const std::vector<double>& confidence, double tau,
                                     RngStream& rng, bool* truncated) {
    if (confidence.size() != n_u) throw StateError("sample_pairs: confidence size != n_u");
    if (truncated) *truncated = false;

    std::vector<std::size_t> eligible;
    eligible.reserve(n_l + n_u);
    for (std::size_t i = 0; i < n_l; ++i) eligible.push_back(i);
    for (std::size_t u = 0; u < n_u; ++u)
        if (confidence[u] >= tau) eligible.push_back(n_l + u);

    std::size_t e = eligible.size();
    std::size_t total = e >= 2 ? e * (e - 1) / 2 : 0;

    auto decode = [&](std::size_t pair_idx) {
        // unordered pair index over eligible[]: row-major upper triangle
        std::size_t i = 0;
        std::size_t remaining = pair_idx;
        std::size_t row_len = e - 1;
        while (remaining >= row_len) {
            remaining -= row_len;
            ++i;
            --row_len;
        }
        std::size_t j = i + 1 + remaining;
        PairSample p;
        p.i_index = eligible[i];
        p.j_index = eligible[j];
        p.source = (p.i_index < n_l && p.j_index < n_l) ? PairSource::TrueLabel
                                                        : PairSource::PseudoLabel;
        return p;
    };

    std::vector<PairSample> out;
    if (m >= total) {
        if (truncated && m > total) *truncated = true;
        out.reserve(total);
        for (std::size_t t = 0; t < total; ++t) out.push_back(decode(t));
        return out;
    }

    // partial Fisher-Yates over pair indices
    std::vector<std::size_t> all(total);
    for (std::size_t t = 0; t < total; ++t) all[t] = t;
    out.reserve(m);
    for (std::size_t t = 0; t < m; ++t) {
        std::size_t j = t + rng.uniform_int(total - t);
        std::swap(all[t], all[j]);
        out.push_back(decode(all[t]));
    }
    return out;
}

}  // namespace mlsn
