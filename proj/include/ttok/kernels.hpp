#pragma once

// Data-parallel inner loops. Every kernel has a serial counterpart in
// kernels::reference that the tests compare against and the benchmark
// target times. Results never depend on the thread count.

#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <span>
#include <vector>

#include <omp.h>

namespace ttok::kernels {

/// 0 keeps the OpenMP default team size.
inline int team_size(int threads) { return threads > 0 ? threads : omp_get_max_threads(); }

/// Runs fn(i) for i in [0, n). If any call throws, the exception from the
/// lowest failing index is rethrown after the loop.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
    std::exception_ptr first_error;
    std::size_t first_index = std::numeric_limits<std::size_t>::max();
    const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static) num_threads(team_size(threads))
    for (std::int64_t i = 0; i < count; ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(ttok_parallel_for_error)
            {
                if (static_cast<std::size_t>(i) < first_index) {
                    first_index = static_cast<std::size_t>(i);
                    first_error = std::current_exception();
                }
            }
        }
    }
    if (first_error) std::rethrow_exception(first_error);
}

/// Histogram counts of transformed values u into `bins` bins of `width`
/// starting at lo. Values outside the range clamp to the edge bins.
std::vector<std::uint64_t> bin_counts(std::span<const double> u, double lo, double width,
                                      std::size_t bins, int threads = 0);

/// Bin index per transformed value, same clamping rule as bin_counts.
std::vector<std::uint32_t> bin_indices(std::span<const double> u, double lo, double width,
                                       std::size_t bins, int threads = 0);

/// Index of the nearest centroid (ascending centroids, ties to the lower index).
std::uint32_t nearest_centroid(double x, std::span<const double> centroids);

std::vector<std::uint32_t> nearest_centroids(std::span<const double> x,
                                             std::span<const double> centroids, int threads = 0);

/// Sum of squares in index order, so the result is independent of threading.
double ordered_sum_of_squares(std::span<const double> residuals);

/// Weighted prefix sums over sorted values, centered for numerical stability.
/// cost(i, j) is the within-cluster SSE of the half-open run [i, j).
class SegmentCost {
public:
    SegmentCost(std::span<const double> sorted_values, std::span<const double> weights);

    double operator()(std::size_t i, std::size_t j) const {
        const double w = w_[j] - w_[i];
        if (w <= 0.0) return 0.0;
        const double s1 = s1_[j] - s1_[i];
        const double c = (s2_[j] - s2_[i]) - s1 * s1 / w;
        return c > 0.0 ? c : 0.0;
    }

    std::size_t size() const { return w_.size() - 1; }

private:
    std::vector<double> w_, s1_, s2_;
};

/// One layer of the 1-D k-means dynamic program:
///   cur[j] = min_{i in [layer, j)} prev[i] + cost(i, j)   for j in [layer + 1, n]
/// with the leftmost minimizing i stored in arg[j]. Divide-and-conquer over
/// monotone split points; the recursion fans out as OpenMP tasks.
void dp_layer(const SegmentCost& cost, std::size_t layer, std::span<const double> prev,
              std::span<double> cur, std::span<std::uint32_t> arg, int threads = 0);

namespace reference {

std::vector<std::uint64_t> bin_counts(std::span<const double> u, double lo, double width,
                                      std::size_t bins);

std::vector<std::uint32_t> bin_indices(std::span<const double> u, double lo, double width,
                                       std::size_t bins);

/// Linear scan; defines the tie rule the fast path must reproduce.
std::uint32_t nearest_centroid(double x, std::span<const double> centroids);

/// Exhaustive O(n^2) evaluation of the same recurrence as kernels::dp_layer.
void dp_layer(const SegmentCost& cost, std::size_t layer, std::span<const double> prev,
              std::span<double> cur, std::span<std::uint32_t> arg);

}  // namespace reference

/// Bin index with the clamping rule shared by all binning kernels.
inline std::uint32_t bin_index(double u, double lo, double width, std::size_t bins) {
    const double pos = (u - lo) / width;
    if (!(pos > 0.0)) return 0;
    const double last = static_cast<double>(bins - 1);
    if (pos >= last + 1.0) return static_cast<std::uint32_t>(bins - 1);
    const double j = static_cast<double>(static_cast<std::uint64_t>(pos));
    return static_cast<std::uint32_t>(j > last ? last : j);
}

}  // namespace ttok::kernels
