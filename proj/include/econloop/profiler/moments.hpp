#pragma once

#include <cstddef>
#include <optional>
#include <span>

namespace econloop::profiler {

struct Moments {
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0;  // sample (n - 1) variance; 0 when n < 2
    double min = 0.0;
    double max = 0.0;
    std::optional<double> skewness;  // adjusted Fisher-Pearson, n >= 3 and variance > 0

    double sd() const;
};

/// Mean first, then central moments. NaN entries are skipped.
Moments two_pass_moments(std::span<const double> values);

/// Single-pass accumulator (Welford for the mean/variance with the
/// Terriberry extension for the third central moment).
class RunningMoments {
public:
    void add(double x);
    Moments result() const;

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
    double m3_ = 0.0;
    double min_ = 0.0;
    double max_ = 0.0;
};

/// Pearson correlation over pairwise-complete observations (NaN = missing).
/// Returns nullopt when fewer than two pairs remain or either side is constant.
struct PairCorrelation {
    double r = 0.0;
    std::size_t n_pairs = 0;
};
std::optional<PairCorrelation> pearson(std::span<const double> a, std::span<const double> b);

}  // namespace econloop::profiler
