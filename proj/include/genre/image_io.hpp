#pragma once

#include <stdexcept>
#include <string>

#include "genre/uwt.hpp"

namespace genre {

// All file failures below throw IoError with a distinct message for missing
// files, malformed headers, wrong bit depth, and truncated payloads.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dispatch on extension: .pgm (binary P5 or ASCII P2, maxval <= 255) and
// 8-bit grayscale .png.
Image read_image(const std::string& path);

// 8-bit grayscale output; samples are rounded to nearest and clipped to
// [0, 255], so integer-valued images round-trip exactly.
void write_image(const std::string& path, const Image& img);

Image read_pgm(const std::string& path);
void write_pgm(const std::string& path, const Image& img);
Image read_png(const std::string& path);
void write_png(const std::string& path, const Image& img);

// Raw subband container: 16-byte header (magic "UWB1", then width, height,
// band count as little-endian u32) followed by band_count row-major float32
// planes in band order.
void write_subbands(const std::string& path, const SubbandSet& bands);
SubbandSet read_subbands(const std::string& path);

}  // namespace genre
