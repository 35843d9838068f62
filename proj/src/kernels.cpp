#include "ttok/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace ttok::kernels {

std::vector<std::uint64_t> bin_counts(std::span<const double> u, double lo, double width,
                                      std::size_t bins, int threads) {
    std::vector<std::uint64_t> counts(bins, 0);
    const auto n = static_cast<std::int64_t>(u.size());
#pragma omp parallel num_threads(team_size(threads))
    {
        std::vector<std::uint64_t> local(bins, 0);
#pragma omp for schedule(static) nowait
        for (std::int64_t i = 0; i < n; ++i) ++local[bin_index(u[i], lo, width, bins)];
#pragma omp critical(ttok_bin_counts_merge)
        for (std::size_t j = 0; j < bins; ++j) counts[j] += local[j];
    }
    return counts;
}

std::vector<std::uint32_t> bin_indices(std::span<const double> u, double lo, double width,
                                       std::size_t bins, int threads) {
    std::vector<std::uint32_t> out(u.size());
    const auto n = static_cast<std::int64_t>(u.size());
#pragma omp parallel for schedule(static) num_threads(team_size(threads))
    for (std::int64_t i = 0; i < n; ++i) out[i] = bin_index(u[i], lo, width, bins);
    return out;
}

std::uint32_t nearest_centroid(double x, std::span<const double> c) {
    const std::size_t n = c.size();
    std::size_t idx = static_cast<std::size_t>(std::lower_bound(c.begin(), c.end(), x) - c.begin());
    if (idx == n) idx = n - 1;
    if (idx > 0) {
        const double d_lo = std::abs(x - c[idx - 1]);
        const double d_hi = std::abs(x - c[idx]);
        if (d_lo <= d_hi) {
            --idx;
            // Neighbours that round to the same distance win the tie.
            while (idx > 0 && std::abs(x - c[idx - 1]) == d_lo) --idx;
        }
    }
    return static_cast<std::uint32_t>(idx);
}

std::vector<std::uint32_t> nearest_centroids(std::span<const double> x,
                                             std::span<const double> centroids, int threads) {
    std::vector<std::uint32_t> out(x.size());
    const auto n = static_cast<std::int64_t>(x.size());
#pragma omp parallel for schedule(static) num_threads(team_size(threads))
    for (std::int64_t i = 0; i < n; ++i) out[i] = nearest_centroid(x[i], centroids);
    return out;
}

double ordered_sum_of_squares(std::span<const double> r) {
    double s = 0.0;
    for (double v : r) s += v * v;
    return s;
}

SegmentCost::SegmentCost(std::span<const double> x, std::span<const double> w) {
    const std::size_t n = x.size();
    double total_w = 0.0, total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        total_w += w[i];
        total += w[i] * x[i];
    }
    const double center = total_w > 0.0 ? total / total_w : 0.0;
    w_.assign(n + 1, 0.0);
    s1_.assign(n + 1, 0.0);
    s2_.assign(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - center;
        w_[i + 1] = w_[i] + w[i];
        s1_[i + 1] = s1_[i] + w[i] * d;
        s2_[i + 1] = s2_[i] + w[i] * d * d;
    }
}

namespace {

struct LayerSolver {
    const SegmentCost& cost;
    std::size_t layer;
    std::span<const double> prev;
    std::span<double> cur;
    std::span<std::uint32_t> arg;

    static constexpr std::size_t kTaskCutoff = 2048;

    void solve(std::size_t jl, std::size_t jr, std::size_t optl, std::size_t optr) {
        if (jl > jr) return;
        const std::size_t mid = jl + (jr - jl) / 2;
        const std::size_t hi = std::min(mid - 1, optr);
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_i = std::max(optl, layer);
        for (std::size_t i = std::max(optl, layer); i <= hi; ++i) {
            const double v = prev[i] + cost(i, mid);
            if (v < best) {
                best = v;
                best_i = i;
            }
        }
        cur[mid] = best;
        arg[mid] = static_cast<std::uint32_t>(best_i);

        if (jr - jl > kTaskCutoff) {
            if (mid > jl) {
#pragma omp task default(shared) firstprivate(jl, mid, optl, best_i)
                solve(jl, mid - 1, optl, best_i);
            }
#pragma omp task default(shared) firstprivate(mid, jr, best_i, optr)
            solve(mid + 1, jr, best_i, optr);
#pragma omp taskwait
        } else {
            if (mid > jl) solve(jl, mid - 1, optl, best_i);
            solve(mid + 1, jr, best_i, optr);
        }
    }
};

}  // namespace

void dp_layer(const SegmentCost& cost, std::size_t layer, std::span<const double> prev,
              std::span<double> cur, std::span<std::uint32_t> arg, int threads) {
    const std::size_t n = cost.size();
    if (layer + 1 > n) return;
    LayerSolver solver{cost, layer, prev, cur, arg};
    if (n - layer <= LayerSolver::kTaskCutoff || team_size(threads) == 1) {
        solver.solve(layer + 1, n, layer, n - 1);
        return;
    }
#pragma omp parallel num_threads(team_size(threads))
#pragma omp single nowait
    solver.solve(layer + 1, n, layer, n - 1);
}

namespace reference {

std::vector<std::uint64_t> bin_counts(std::span<const double> u, double lo, double width,
                                      std::size_t bins) {
    std::vector<std::uint64_t> counts(bins, 0);
    for (double v : u) ++counts[bin_index(v, lo, width, bins)];
    return counts;
}

std::vector<std::uint32_t> bin_indices(std::span<const double> u, double lo, double width,
                                       std::size_t bins) {
    std::vector<std::uint32_t> out;
    out.reserve(u.size());
    for (double v : u) out.push_back(bin_index(v, lo, width, bins));
    return out;
}

std::uint32_t nearest_centroid(double x, std::span<const double> c) {
    std::size_t best = 0;
    double best_d = std::abs(x - c[0]);
    for (std::size_t j = 1; j < c.size(); ++j) {
        const double d = std::abs(x - c[j]);
        if (d < best_d) {
            best_d = d;
            best = j;
        }
    }
    return static_cast<std::uint32_t>(best);
}

void dp_layer(const SegmentCost& cost, std::size_t layer, std::span<const double> prev,
              std::span<double> cur, std::span<std::uint32_t> arg) {
    const std::size_t n = cost.size();
    for (std::size_t j = layer + 1; j <= n; ++j) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_i = layer;
        for (std::size_t i = layer; i < j; ++i) {
            const double v = prev[i] + cost(i, j);
            if (v < best) {
                best = v;
                best_i = i;
            }
        }
        cur[j] = best;
        arg[j] = static_cast<std::uint32_t>(best_i);
    }
}

}  // namespace reference

}  // namespace ttok::kernels
