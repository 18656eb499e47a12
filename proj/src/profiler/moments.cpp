#include "econloop/profiler/moments.hpp"

#include <algorithm>
#include <cmath>

namespace econloop::profiler {

double Moments::sd() const { return std::sqrt(variance); }

namespace {

std::optional<double> adjusted_skewness(std::size_t n, double m2_sum, double m3_sum) {
    if (n < 3 || m2_sum <= 0.0) return std::nullopt;
    const double dn = static_cast<double>(n);
    const double m2 = m2_sum / dn;
    const double m3 = m3_sum / dn;
    const double g1 = m3 / std::pow(m2, 1.5);
    return g1 * std::sqrt(dn * (dn - 1.0)) / (dn - 2.0);
}

}  // namespace

Moments two_pass_moments(std::span<const double> values) {
    Moments m;
    double sum = 0.0;
    for (double v : values) {
        if (std::isnan(v)) continue;
        if (m.n == 0) m.min = m.max = v;
        m.min = std::min(m.min, v);
        m.max = std::max(m.max, v);
        sum += v;
        ++m.n;
    }
    if (m.n == 0) return m;
    m.mean = sum / static_cast<double>(m.n);
    double s2 = 0.0, s3 = 0.0;
    for (double v : values) {
        if (std::isnan(v)) continue;
        const double d = v - m.mean;
        s2 += d * d;
        s3 += d * d * d;
    }
    m.variance = m.n > 1 ? s2 / static_cast<double>(m.n - 1) : 0.0;
    m.skewness = adjusted_skewness(m.n, s2, s3);
    return m;
}

void RunningMoments::add(double x) {
    if (std::isnan(x)) return;
    if (n_ == 0) min_ = max_ = x;
    min_ = std::min(min_, x);
    max_ = std::max(max_, x);
    const double n1 = static_cast<double>(n_);
    ++n_;
    const double n = static_cast<double>(n_);
    const double delta = x - mean_;
    const double delta_n = delta / n;
    const double term1 = delta * delta_n * n1;
    mean_ += delta_n;
    m3_ += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * m2_;
    m2_ += term1;
}

Moments RunningMoments::result() const {
    Moments m;
    m.n = n_;
    if (n_ == 0) return m;
    m.mean = mean_;
    m.min = min_;
    m.max = max_;
    m.variance = n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
    m.skewness = adjusted_skewness(n_, m2_, m3_);
    return m;
}

std::optional<PairCorrelation> pearson(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = std::min(a.size(), b.size());
    double sa = 0.0, sb = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::isnan(a[i]) || std::isnan(b[i])) continue;
        sa += a[i];
        sb += b[i];
        ++pairs;
    }
    if (pairs < 2) return std::nullopt;
    const double ma = sa / static_cast<double>(pairs);
    const double mb = sb / static_cast<double>(pairs);
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::isnan(a[i]) || std::isnan(b[i])) continue;
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    if (saa <= 0.0 || sbb <= 0.0) return std::nullopt;
    const double r = std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
    return PairCorrelation{r, pairs};
}

}  // namespace econloop::profiler
