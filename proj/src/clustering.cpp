#include "msid/clustering.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "msid/error.hpp"

namespace msid {

DissimilarityMatrix to_dissimilarity(const SimilarityMatrix& similarity) {
    const auto n = similarity.size();
    DissimilarityMatrix d(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = std::clamp(1.0 - (similarity(i, j) + similarity(j, i)) / 2.0, 0.0, 1.0);
            d(i, j) = v;
            d(j, i) = v;
        }
    }
    return d;
}

Dendrogram agglomerate(const DissimilarityMatrix& d) {
    const auto n = d.size();
    if (n < 2) {
        throw Error("clustering needs at least 2 entities");
    }

    // Working distances indexed by slot; slot s holds node ids[s].
    DissimilarityMatrix dist = d;
    std::vector<std::size_t> ids(n);
    std::vector<std::size_t> sizes(n, 1);
    std::vector<bool> active(n, true);
    std::iota(ids.begin(), ids.end(), std::size_t{0});

    Dendrogram out;
    out.leaves = n;
    out.merges.reserve(n - 1);

    for (std::size_t step = 0; step + 1 < n; ++step) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_a = 0;
        std::size_t best_b = 0;
        std::pair<std::size_t, std::size_t> best_key{std::numeric_limits<std::size_t>::max(), 0};

        for (std::size_t a = 0; a < n; ++a) {
            if (!active[a]) {
                continue;
            }
            for (std::size_t b = a + 1; b < n; ++b) {
                if (!active[b]) {
                    continue;
                }
                const double v = dist(a, b);
                const std::pair<std::size_t, std::size_t> key = std::minmax(ids[a], ids[b]);
                if (v < best || (v == best && key < best_key)) {
                    best = v;
                    best_a = a;
                    best_b = b;
                    best_key = key;
                }
            }
        }

        const auto new_size = sizes[best_a] + sizes[best_b];
        out.merges.push_back({best_key.first, best_key.second, best, new_size});

        // Merged cluster lives in slot best_a. Writing the average as
        // lo + (hi - lo) * w keeps it >= lo, so heights never decrease.
        for (std::size_t k = 0; k < n; ++k) {
            if (!active[k] || k == best_a || k == best_b) {
                continue;
            }
            const double da = dist(best_a, k);
            const double db = dist(best_b, k);
            const bool a_low = da <= db;
            const double lo = a_low ? da : db;
            const double hi = a_low ? db : da;
            const double w_hi = static_cast<double>(a_low ? sizes[best_b] : sizes[best_a]) /
                                static_cast<double>(new_size);
            const double v = lo + (hi - lo) * w_hi;
            dist(best_a, k) = v;
            dist(k, best_a) = v;
        }
        active[best_b] = false;
        sizes[best_a] = new_size;
        ids[best_a] = n + step;
    }
    return out;
}

std::vector<std::vector<std::size_t>> cut_indices(const Dendrogram& dendrogram, std::size_t n) {
    const auto leaves = dendrogram.leaves;
    if (n < 1 || n > leaves) {
        throw Error("cannot cut " + std::to_string(leaves) + " entities into " + std::to_string(n) + " clusters");
    }

    // Union-find over node ids, applying the first leaves - n merges.
    std::vector<std::size_t> parent(leaves + dendrogram.merges.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    const auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (std::size_t k = 0; k < leaves - n; ++k) {
        const auto& m = dendrogram.merges[k];
        const auto node = leaves + k;
        parent[find(m.left)] = node;
        parent[find(m.right)] = node;
    }

    std::vector<std::vector<std::size_t>> clusters;
    std::vector<std::size_t> slot_of_root(parent.size(), std::numeric_limits<std::size_t>::max());
    for (std::size_t leaf = 0; leaf < leaves; ++leaf) {
        const auto root = find(leaf);
        if (slot_of_root[root] == std::numeric_limits<std::size_t>::max()) {
            slot_of_root[root] = clusters.size();
            clusters.emplace_back();
        }
        clusters[slot_of_root[root]].push_back(leaf);
    }
    return clusters;
}

Decomposition cut(const Dendrogram& dendrogram, std::size_t n, const std::vector<std::string>& entities) {
    if (entities.size() != dendrogram.leaves) {
        throw Error("entity list does not match the dendrogram");
    }
    Decomposition out;
    for (const auto& members : cut_indices(dendrogram, n)) {
        auto& cluster = out.clusters.emplace_back();
        for (const auto i : members) {
            cluster.push_back(entities[i]);
        }
        std::sort(cluster.begin(), cluster.end());
    }
    std::sort(out.clusters.begin(), out.clusters.end());
    return out;
}

Decomposition decompose(const SimilarityMatrix& similarity, std::size_t n) {
    return cut(agglomerate(to_dissimilarity(similarity)), n, similarity.entities());
}

nlohmann::json Decomposition::to_json() const {
    return {
        {"codebase", codebase},
        {"weights", weights.w},
        {"nClusters", clusters.size()},
        {"clusters", clusters},
    };
}

Decomposition Decomposition::from_json(const nlohmann::json& j) {
    try {
        Decomposition d;
        d.codebase = j.at("codebase").get<std::string>();
        d.weights.w = j.at("weights").get<std::array<int, kMeasureCount>>();
        d.clusters = j.at("clusters").get<std::vector<std::vector<std::string>>>();
        if (j.at("nClusters").get<std::size_t>() != d.clusters.size()) {
            throw SchemaError("decomposition: nClusters does not match the cluster list");
        }
        return d;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("decomposition: ") + e.what());
    }
}

} // namespace msid
