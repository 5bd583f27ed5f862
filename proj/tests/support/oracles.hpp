// Independent reference computations used to cross-check the library.
// Kept deliberately naive: no tables, no shared code with src/.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

namespace oracle {

inline std::uint32_t bitwise_crc32(const std::vector<std::uint8_t>& data) {
    std::uint32_t crc = 0xFFFFFFFFu;
    for (std::uint8_t byte : data) {
        crc ^= byte;
        for (int k = 0; k < 8; ++k) crc = (crc >> 1) ^ (0xEDB88320u & (0u - (crc & 1u)));
    }
    return ~crc;
}

struct ChiSquare {
    double statistic = 0.0;
    long dof = 0;
};

// Histogram by map, pairs keyed by the even member.
inline ChiSquare histogram_chi_square(const std::vector<std::int32_t>& samples, long min_pair_count = 1) {
    std::map<long, long> counts;
    for (auto v : samples) counts[v]++;
    std::map<long, std::pair<long, long>> pairs;
    for (const auto& [value, n] : counts) {
        const long even = value - (((value % 2) + 2) % 2);
        if (value == even) pairs[even].first += n;
        else pairs[even].second += n;
    }
    ChiSquare r;
    long used = 0;
    for (const auto& [even, c] : pairs) {
        const long total = c.first + c.second;
        if (total < min_pair_count) continue;
        const double e = total / 2.0;
        r.statistic += (c.first - e) * (c.first - e) / e;
        ++used;
    }
    r.dof = used > 0 ? used - 1 : 0;
    return r;
}

// Upper tail of chi-square by series expansion of the regularized lower gamma.
inline double chi_square_upper_tail(double x, long dof) {
    if (dof == 0) return x > 0 ? 0.0 : 1.0;
    if (x <= 0) return 1.0;
    const double a = dof / 2.0, z = x / 2.0;
    if (z < a + 1) {
        double term = 1.0 / a, sum = term;
        for (int n = 1; n < 100000; ++n) {
            term *= z / (a + n);
            sum += term;
            if (term < sum * 1e-17) break;
        }
        return 1.0 - std::exp(-z + a * std::log(z) - std::lgamma(a)) * sum;
    }
    // continued fraction (modified Lentz) for the upper tail
    double b = z + 1 - a, c = 1e300, d = 1 / b, h = d;
    for (int i = 1; i < 100000; ++i) {
        const double an = -i * (i - a);
        b += 2;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1) < 1e-16) break;
    }
    return std::exp(-z + a * std::log(z) - std::lgamma(a)) * h;
}

// O(N^2) DFT magnitude of one frame.
inline std::vector<double> dft_magnitudes(const std::vector<double>& frame) {
    const std::size_t n = frame.size();
    std::vector<double> mags(n / 2 + 1);
    for (std::size_t k = 0; k <= n / 2; ++k) {
        std::complex<double> acc = 0;
        for (std::size_t t = 0; t < n; ++t)
            acc += frame[t] * std::polar(1.0, -2.0 * M_PI * static_cast<double>(k * t % n) / static_cast<double>(n));
        mags[k] = std::abs(acc);
    }
    return mags;
}

inline double shannon_entropy(const std::vector<std::uint8_t>& data) {
    std::map<std::uint8_t, double> counts;
    for (auto b : data) counts[b] += 1;
    double h = 0;
    for (const auto& [b, c] : counts) {
        const double p = c / static_cast<double>(data.size());
        h -= p * std::log2(p);
    }
    return h;
}

}  // namespace oracle
