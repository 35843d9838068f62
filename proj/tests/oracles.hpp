#pragma once

// Independent reference computations used by the unit and acceptance tests.
// None of these call into the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <limits>
#include <string>
#include <vector>

namespace oracle {

// glibc printf formats the exact binary value and rounds half to even.
inline std::string fixed(double v, int precision) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    return buf;
}

inline std::uint32_t float_bits(float f) {
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    return u;
}

inline float bits_float(std::uint32_t u) {
    float f;
    std::memcpy(&f, &u, 4);
    return f;
}

// Little-endian byte split done with shifts.
inline std::vector<unsigned> le_bytes(std::uint32_t u) {
    return {u & 0xFFu, (u >> 8) & 0xFFu, (u >> 16) & 0xFFu, (u >> 24) & 0xFFu};
}

struct Civil {
    int year, month, day, hour, minute, second;
};

inline Civil gmtime(std::int64_t t) {
    std::time_t tt = static_cast<std::time_t>(t);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    return {tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec};
}

inline std::int64_t timegm(int y, int mo, int d, int h = 0, int mi = 0, int s = 0) {
    std::tm tm{};
    tm.tm_year = y - 1900;
    tm.tm_mon = mo - 1;
    tm.tm_mday = d;
    tm.tm_hour = h;
    tm.tm_min = mi;
    tm.tm_sec = s;
    return static_cast<std::int64_t>(::timegm(&tm));
}

inline double sse_about_mean(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    long double m = 0;
    for (double x : xs) m += x;
    m /= xs.size();
    long double s = 0;
    for (double x : xs) s += (x - m) * (x - m);
    return static_cast<double>(s);
}

// Minimum within-cluster SSE over every assignment of n points to at most k
// labels (k^n enumeration, no contiguity assumption).
inline double brute_force_kmeans_sse(const std::vector<double>& xs, std::size_t k) {
    const std::size_t n = xs.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= k;
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> groups(k);
    for (std::size_t code = 0; code < total; ++code) {
        for (auto& g : groups) g.clear();
        std::size_t c = code;
        for (std::size_t i = 0; i < n; ++i) {
            groups[c % k].push_back(xs[i]);
            c /= k;
        }
        double s = 0;
        for (const auto& g : groups) s += sse_about_mean(g);
        best = std::min(best, s);
    }
    return best;
}

inline bool rel_close(double a, double b, double rel) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) <= rel * scale || std::abs(a - b) <= 1e-12;
}

// Greedy residual reconstruction in transformed space: at each level pick the
// nearest centroid by linear scan (lowest index on ties), subtract it.
inline double rsq_greedy(double u, const std::vector<std::vector<double>>& levels) {
    double r = u, sum = 0;
    for (const auto& c : levels) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < c.size(); ++j)
            if (std::abs(r - c[j]) < std::abs(r - c[best])) best = j;
        r -= c[best];
        sum += c[best];
    }
    return sum;
}

}  // namespace oracle
