#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace ttok {

enum class KMeansEngine {
    /// Exact dynamic program over sorted values; optimal and deterministic.
    dp,
    /// Lloyd iterations with k-means++ seeding and restarts.
    lloyd,
};

std::string_view to_string(KMeansEngine e);
std::optional<KMeansEngine> parse_kmeans_engine(std::string_view text);

struct KMeansOptions {
    KMeansEngine engine = KMeansEngine::dp;
    std::uint64_t seed = 0;
    int restarts = 10;
    int max_iterations = 300;
    double tolerance = 1e-4;  // relative inertia change
    int threads = 0;
};

struct KMeansResult {
    std::vector<double> centroids;  // strictly ascending
    double sse = 0.0;               // nearest-centroid SSE over the input
    std::size_t requested_k = 0;
    bool k_reduced = false;         // k exceeded the number of distinct values
};

/// Clusters scalar values into at most k groups. Throws Error(domain) on
/// empty or non-finite input.
KMeansResult kmeans1d(std::span<const double> values, std::size_t k, const KMeansOptions& opts = {});

/// Nearest-centroid SSE (ties to the lower index).
double assignment_sse(std::span<const double> values, std::span<const double> centroids);

}  // namespace ttok
