#include "genre/image.hpp"

#include <cmath>
#include <stdexcept>

namespace genre {

Image::Image(int w, int h, double fill) : width(w), height(h) {
    if (w <= 0 || h <= 0)
        throw std::invalid_argument("image dimensions must be positive");
    samples.assign(static_cast<std::size_t>(w) * h, fill);
}

std::vector<double> row_vectorize(const Image& img) {
    return img.samples;  // storage is already row-major
}

Image devectorize(const std::vector<double>& v, int width, int height) {
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("image dimensions must be positive");
    if (v.size() != static_cast<std::size_t>(width) * height)
        throw std::invalid_argument("vector length does not match image dimensions");
    Image img(width, height);
    img.samples = v;
    return img;
}

NoiseDistribution noise_from_name(const std::string& name) {
    if (name == "gaussian") return NoiseDistribution::Gaussian;
    if (name == "uniform") return NoiseDistribution::Uniform;
    if (name == "laplacian") return NoiseDistribution::Laplacian;
    if (name == "custom") return NoiseDistribution::Custom;
    throw std::invalid_argument("unknown noise distribution: " + name);
}

const char* noise_name(NoiseDistribution d) {
    switch (d) {
        case NoiseDistribution::Gaussian: return "gaussian";
        case NoiseDistribution::Uniform: return "uniform";
        case NoiseDistribution::Laplacian: return "laplacian";
        case NoiseDistribution::Custom: return "custom";
    }
    return "?";
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// 53-bit uniform in [0, 1); the transform is spelled out so results do not
// depend on the standard library's distribution implementations.
double uniform01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

constexpr double kPi = 3.14159265358979323846;

}  // namespace

Image add_noise(const Image& clean, const NoiseModel& model) {
    if (clean.width <= 0 || clean.height <= 0)
        throw std::invalid_argument("add_noise: empty image");
    if (model.sigma < 0.0)
        throw std::invalid_argument("add_noise: sigma must be nonnegative");
    if (model.distribution == NoiseDistribution::Custom && !model.custom_sampler)
        throw std::invalid_argument("add_noise: custom distribution needs a sampler");

    Image out = clean;
    if (model.sigma == 0.0 && model.distribution != NoiseDistribution::Custom)
        return out;

    for (int r = 0; r < clean.height; ++r) {
        std::mt19937_64 eng(splitmix64(model.seed ^ splitmix64(static_cast<std::uint64_t>(r) + 1)));
        int c = 0;
        switch (model.distribution) {
            case NoiseDistribution::Gaussian: {
                // Box-Muller pairs; the spare value never crosses rows.
                while (c < clean.width) {
                    double u1 = 1.0 - uniform01(eng);  // (0, 1]
                    double u2 = uniform01(eng);
                    double rad = std::sqrt(-2.0 * std::log(u1));
                    out.at(r, c) += model.sigma * rad * std::cos(2.0 * kPi * u2);
                    if (++c < clean.width) {
                        out.at(r, c) += model.sigma * rad * std::sin(2.0 * kPi * u2);
                        ++c;
                    }
                }
                break;
            }
            case NoiseDistribution::Uniform: {
                const double half_range = model.sigma * std::sqrt(3.0);
                for (; c < clean.width; ++c)
                    out.at(r, c) += half_range * (2.0 * uniform01(eng) - 1.0);
                break;
            }
            case NoiseDistribution::Laplacian: {
                const double b = model.sigma / std::sqrt(2.0);
                for (; c < clean.width; ++c) {
                    double u = uniform01(eng) - 0.5;  // [-0.5, 0.5)
                    double t = 1.0 - 2.0 * std::abs(u);
                    if (t <= 0.0) t = 0x1.0p-53;
                    double sign = u < 0.0 ? -1.0 : 1.0;
                    out.at(r, c) += -b * sign * std::log(t);
                }
                break;
            }
            case NoiseDistribution::Custom: {
                for (; c < clean.width; ++c)
                    out.at(r, c) += model.sigma * model.custom_sampler(eng);
                break;
            }
        }
    }
    return out;
}

Image quantize_to_8bit(const Image& img) {
    Image out = img;
    for (double& v : out.samples) {
        double q = std::round(v);  // ties away from zero
        if (q < 0.0) q = 0.0;
        if (q > 255.0) q = 255.0;
        v = q;
    }
    return out;
}

}  // namespace genre
