#pragma once

// Average-linkage (UPGMA) agglomerative clustering and dendrogram cuts.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "msid/similarity.hpp"

namespace msid {

// Dense symmetric matrix with zero diagonal.
class DissimilarityMatrix {
public:
    explicit DissimilarityMatrix(std::size_t n = 0) : n_(n), values_(n * n, 0.0) {}

    std::size_t size() const { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return values_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }

private:
    std::size_t n_;
    std::vector<double> values_;
};

// D[i][j] = 1 - (S[i][j] + S[j][i]) / 2
DissimilarityMatrix to_dissimilarity(const SimilarityMatrix& similarity);

// Leaves are 0..n-1; the k-th merge creates node n + k (scipy convention).
struct Merge {
    std::size_t left = 0;
    std::size_t right = 0;
    double height = 0.0;
    std::size_t size = 0;
};

struct Dendrogram {
    std::size_t leaves = 0;
    std::vector<Merge> merges;
};

// Repeatedly merges the two clusters with the smallest average pairwise
// dissimilarity. Ties go to the pair with the smallest first id, then the
// smallest second id. Throws msid::Error for fewer than two leaves.
Dendrogram agglomerate(const DissimilarityMatrix& d);

struct Decomposition {
    std::string codebase;
    WeightVector weights;
    // Members sorted; clusters sorted by their member lists.
    std::vector<std::vector<std::string>> clusters;

    std::size_t n_clusters() const { return clusters.size(); }

    nlohmann::json to_json() const;
    static Decomposition from_json(const nlohmann::json& j);
};

// Undoes the last n - 1 merges. Throws msid::Error unless 1 <= n <= leaves.
std::vector<std::vector<std::size_t>> cut_indices(const Dendrogram& dendrogram, std::size_t n);

Decomposition cut(const Dendrogram& dendrogram, std::size_t n, const std::vector<std::string>& entities);

// similarity -> dissimilarity -> dendrogram -> n-cluster cut
Decomposition decompose(const SimilarityMatrix& similarity, std::size_t n);

} // namespace msid
