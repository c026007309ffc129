#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace genre {

// Grayscale image with double-precision samples, row-major storage.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<double> samples;

    Image() = default;
    Image(int w, int h, double fill = 0.0);

    double& at(int r, int c) { return samples[static_cast<std::size_t>(r) * width + c]; }
    double at(int r, int c) const { return samples[static_cast<std::size_t>(r) * width + c]; }
    std::size_t size() const { return samples.size(); }
    bool same_shape(const Image& o) const { return width == o.width && height == o.height; }
};

// Row-major vectorization (row 0 first) and its inverse.
std::vector<double> row_vectorize(const Image& img);
Image devectorize(const std::vector<double>& v, int width, int height);

enum class NoiseDistribution { Gaussian, Uniform, Laplacian, Custom };

NoiseDistribution noise_from_name(const std::string& name);
const char* noise_name(NoiseDistribution d);

// Zero-mean additive noise parameterized by its standard deviation.
// Uniform is drawn from [-sigma*sqrt(3), +sigma*sqrt(3)]; Laplacian has scale
// b = sigma/sqrt(2). Custom supplies a zero-mean unit-variance sampler that is
// scaled by sigma.
struct NoiseModel {
    NoiseDistribution distribution = NoiseDistribution::Gaussian;
    double sigma = 0.0;
    std::uint64_t seed = 1;
    std::function<double(std::mt19937_64&)> custom_sampler;
};

// Adds noise deterministically for a given seed: each row uses its own
// substream (engine seeded from splitmix64 of seed and row index) and all
// variate transforms are done by hand, so output is bit-identical across
// platforms and standard libraries.
Image add_noise(const Image& clean, const NoiseModel& model);

// Round to nearest integer (ties away from zero) and clip to [0, 255].
Image quantize_to_8bit(const Image& img);

}  // namespace genre
