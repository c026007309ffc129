#include "genre/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace genre {

SsimParams SsimParams::global() {
    SsimParams p;
    p.windowed = false;
    return p;
}

SsimParams SsimParams::windowed_default() { return SsimParams{}; }

double psnr_db(const Image& reference, const Image& test, PsnrPeak peak) {
    if (!reference.same_shape(test)) throw std::invalid_argument("psnr: image shapes differ");
    if (reference.size() == 0) throw std::invalid_argument("psnr: empty image");
    double se = 0.0;
    for (std::size_t i = 0; i < reference.samples.size(); ++i) {
        const double e = reference.samples[i] - test.samples[i];
        se += e * e;
    }
    if (se == 0.0) return std::numeric_limits<double>::infinity();
    const Image& src = peak == PsnrPeak::ReferenceMax ? reference : test;
    double pk = src.samples[0];
    for (double v : src.samples) pk = std::max(pk, v);
    const double mse = se / static_cast<double>(reference.size());
    return 10.0 * std::log10(pk * pk / mse);
}

namespace {

struct Moments {
    double mu1, mu2, var1, var2, cov;
};

double ssim_term(const Moments& m, double c1, double c2) {
    return ((2.0 * m.mu1 * m.mu2 + c1) * (2.0 * m.cov + c2)) /
           ((m.mu1 * m.mu1 + m.mu2 * m.mu2 + c1) * (m.var1 + m.var2 + c2));
}

}  // namespace

double ssim(const Image& reference, const Image& test, const SsimParams& params) {
    if (!reference.same_shape(test)) throw std::invalid_argument("ssim: image shapes differ");
    if (reference.size() == 0) throw std::invalid_argument("ssim: empty image");
    if (params.dynamic_range <= 0.0) throw std::invalid_argument("ssim: bad dynamic range");
    const double c1 = params.k1 * params.dynamic_range * params.k1 * params.dynamic_range;
    const double c2 = params.k2 * params.dynamic_range * params.k2 * params.dynamic_range;

    if (!params.windowed) {
        const double n = static_cast<double>(reference.size());
        Moments m{0, 0, 0, 0, 0};
        for (std::size_t i = 0; i < reference.samples.size(); ++i) {
            m.mu1 += reference.samples[i];
            m.mu2 += test.samples[i];
        }
        m.mu1 /= n;
        m.mu2 /= n;
        for (std::size_t i = 0; i < reference.samples.size(); ++i) {
            const double d1 = reference.samples[i] - m.mu1;
            const double d2 = test.samples[i] - m.mu2;
            m.var1 += d1 * d1;
            m.var2 += d2 * d2;
            m.cov += d1 * d2;
        }
        m.var1 /= n;
        m.var2 /= n;
        m.cov /= n;
        return ssim_term(m, c1, c2);
    }

    const int n = params.window_size;
    if (n < 1) throw std::invalid_argument("ssim: window size must be positive");
    if (n > reference.width || n > reference.height)
        throw std::invalid_argument("ssim: window larger than image");

    // Normalized window weights; the Gaussian is the separable product.
    std::vector<double> w1d(n);
    if (params.gaussian_window) {
        const double half = (n - 1) / 2.0;
        for (int i = 0; i < n; ++i) {
            const double x = i - half;
            w1d[i] = std::exp(-x * x / (2.0 * params.window_sigma * params.window_sigma));
        }
    } else {
        for (int i = 0; i < n; ++i) w1d[i] = 1.0;
    }
    double wsum = 0.0;
    for (double v : w1d) wsum += v;
    for (double& v : w1d) v /= wsum;

    double total = 0.0;
    std::size_t count = 0;
    std::vector<double> col1(n), col2(n);
    for (int r0 = 0; r0 + n <= reference.height; ++r0) {
        for (int c0 = 0; c0 + n <= reference.width; ++c0) {
            Moments m{0, 0, 0, 0, 0};
            double s11 = 0.0, s22 = 0.0, s12 = 0.0;
            for (int i = 0; i < n; ++i) {
                // Weighted column sums first keeps the inner loop tight.
                double a1 = 0, a2 = 0, b11 = 0, b22 = 0, b12 = 0;
                for (int j = 0; j < n; ++j) {
                    const double x1 = reference.at(r0 + i, c0 + j);
                    const double x2 = test.at(r0 + i, c0 + j);
                    const double wj = w1d[j];
                    a1 += wj * x1;
                    a2 += wj * x2;
                    b11 += wj * x1 * x1;
                    b22 += wj * x2 * x2;
                    b12 += wj * x1 * x2;
                }
                const double wi = w1d[i];
                m.mu1 += wi * a1;
                m.mu2 += wi * a2;
                s11 += wi * b11;
                s22 += wi * b22;
                s12 += wi * b12;
            }
            m.var1 = s11 - m.mu1 * m.mu1;
            m.var2 = s22 - m.mu2 * m.mu2;
            m.cov = s12 - m.mu1 * m.mu2;
            total += ssim_term(m, c1, c2);
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

}  // namespace genre
