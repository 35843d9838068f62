#include "ttok/kmeans1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "ttok/error.hpp"
#include "ttok/kernels.hpp"

namespace ttok {

std::string_view to_string(KMeansEngine e) { return e == KMeansEngine::dp ? "dp" : "lloyd"; }

std::optional<KMeansEngine> parse_kmeans_engine(std::string_view text) {
    if (text == "dp") return KMeansEngine::dp;
    if (text == "lloyd") return KMeansEngine::lloyd;
    return std::nullopt;
}

double assignment_sse(std::span<const double> values, std::span<const double> centroids) {
    std::vector<double> r(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        r[i] = values[i] - centroids[kernels::nearest_centroid(values[i], centroids)];
    return kernels::ordered_sum_of_squares(r);
}

namespace {

struct Weighted {
    std::vector<double> x;  // sorted, distinct
    std::vector<double> w;
};

Weighted compress(std::span<const double> values) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    Weighted out;
    for (double v : sorted) {
        if (!out.x.empty() && out.x.back() == v) {
            out.w.back() += 1.0;
        } else {
            out.x.push_back(v);
            out.w.push_back(1.0);
        }
    }
    return out;
}

// Anchored weighted mean: a run of one distinct value returns it exactly.
double run_mean(const Weighted& d, std::size_t begin, std::size_t end) {
    const double anchor = d.x[begin];
    double s = 0.0, w = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        s += d.w[i] * (d.x[i] - anchor);
        w += d.w[i];
    }
    return anchor + s / w;
}

void make_strictly_ascending(std::vector<double>& c) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
}

std::vector<double> fit_dp(const Weighted& d, std::size_t k, int threads) {
    const std::size_t n = d.x.size();
    const kernels::SegmentCost cost(d.x, d.w);

    std::vector<double> prev(n + 1), cur(n + 1);
    for (std::size_t j = 1; j <= n; ++j) prev[j] = cost(0, j);
    std::vector<std::vector<std::uint32_t>> arg(k);
    for (std::size_t m = 1; m < k; ++m) {
        arg[m].assign(n + 1, 0);
        std::fill(cur.begin(), cur.end(), std::numeric_limits<double>::infinity());
        kernels::dp_layer(cost, m, prev, cur, arg[m], threads);
        std::swap(prev, cur);
    }

    std::vector<double> centroids(k);
    std::size_t end = n;
    for (std::size_t m = k; m-- > 1;) {
        const std::size_t begin = arg[m][end];
        centroids[m] = run_mean(d, begin, end);
        end = begin;
    }
    centroids[0] = run_mean(d, 0, end);
    return centroids;
}

// Inertia and assignment of weighted points to sorted centroids.
double assign(const Weighted& d, std::span<const double> c, std::vector<std::uint32_t>& label) {
    double inertia = 0.0;
    for (std::size_t i = 0; i < d.x.size(); ++i) {
        label[i] = kernels::nearest_centroid(d.x[i], c);
        const double r = d.x[i] - c[label[i]];
        inertia += d.w[i] * r * r;
    }
    return inertia;
}

std::vector<double> kmeanspp_seed(const Weighted& d, std::size_t k, std::mt19937_64& rng) {
    const std::size_t n = d.x.size();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto sample = [&](const std::vector<double>& mass, double total) {
        double target = unit(rng) * total;
        for (std::size_t i = 0; i < n; ++i) {
            target -= mass[i];
            if (target < 0.0) return i;
        }
        return n - 1;
    };

    std::vector<double> centers;
    centers.push_back(d.x[sample(d.w, std::accumulate(d.w.begin(), d.w.end(), 0.0))]);
    std::vector<double> closest(n), mass(n);
    for (std::size_t i = 0; i < n; ++i) closest[i] = (d.x[i] - centers[0]) * (d.x[i] - centers[0]);

    const std::size_t trials = 2 + static_cast<std::size_t>(std::log(static_cast<double>(k)));
    while (centers.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) total += (mass[i] = d.w[i] * closest[i]);
        if (total <= 0.0) break;
        // Greedy variant: keep the candidate that lowers the potential most.
        double best_pot = std::numeric_limits<double>::infinity();
        std::size_t best = 0;
        for (std::size_t t = 0; t < trials; ++t) {
            const std::size_t cand = sample(mass, total);
            double pot = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double dd = (d.x[i] - d.x[cand]) * (d.x[i] - d.x[cand]);
                pot += d.w[i] * std::min(closest[i], dd);
            }
            if (pot < best_pot) {
                best_pot = pot;
                best = cand;
            }
        }
        centers.push_back(d.x[best]);
        for (std::size_t i = 0; i < n; ++i)
            closest[i] = std::min(closest[i], (d.x[i] - d.x[best]) * (d.x[i] - d.x[best]));
    }
    make_strictly_ascending(centers);
    return centers;
}

std::vector<double> fit_lloyd(const Weighted& d, std::size_t k, const KMeansOptions& opts) {
    std::mt19937_64 rng(opts.seed);
    const std::size_t n = d.x.size();
    std::vector<double> best_centers;
    double best_inertia = std::numeric_limits<double>::infinity();
    std::vector<std::uint32_t> label(n);

    for (int run = 0; run < std::max(1, opts.restarts); ++run) {
        std::vector<double> c = kmeanspp_seed(d, k, rng);
        double inertia = assign(d, c, label);
        for (int it = 0; it < opts.max_iterations; ++it) {
            std::vector<double> sum(c.size(), 0.0), weight(c.size(), 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                sum[label[i]] += d.w[i] * d.x[i];
                weight[label[i]] += d.w[i];
            }
            for (std::size_t j = 0; j < c.size(); ++j) {
                if (weight[j] > 0.0) {
                    c[j] = sum[j] / weight[j];
                } else {
                    // Empty cluster: move it onto the worst-served point.
                    std::size_t far = 0;
                    double far_d = -1.0;
                    for (std::size_t i = 0; i < n; ++i) {
                        const double r = d.x[i] - c[label[i]];
                        if (r * r > far_d) {
                            far_d = r * r;
                            far = i;
                        }
                    }
                    c[j] = d.x[far];
                }
            }
            make_strictly_ascending(c);
            const double next = assign(d, c, label);
            const bool converged = inertia - next <= opts.tolerance * inertia;
            inertia = next;
            if (converged) break;
        }
        if (inertia < best_inertia) {
            best_inertia = inertia;
            best_centers = c;
        }
    }
    return best_centers;
}

}  // namespace

KMeansResult kmeans1d(std::span<const double> values, std::size_t k, const KMeansOptions& opts) {
    if (values.empty()) throw Error(ErrorKind::domain, "k-means needs at least one value");
    if (k == 0) throw Error(ErrorKind::invalid_parameter, "k-means needs k >= 1");
    for (double v : values)
        if (!std::isfinite(v)) throw Error(ErrorKind::domain, "k-means input contains non-finite values");

    const Weighted data = compress(values);
    KMeansResult res;
    res.requested_k = k;
    if (k > data.x.size()) {
        k = data.x.size();
        res.k_reduced = true;
    }
    res.centroids = opts.engine == KMeansEngine::dp ? fit_dp(data, k, opts.threads) : fit_lloyd(data, k, opts);
    make_strictly_ascending(res.centroids);
    res.sse = assignment_sse(values, res.centroids);
    return res;
}

}  // namespace ttok
