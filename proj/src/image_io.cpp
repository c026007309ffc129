#include "genre/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <vector>

namespace genre {

namespace {

std::string lower_ext(const std::string& path) {
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return "";
    std::string ext = path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

// Reads the next PGM header token, skipping whitespace and '#' comments.
bool next_token(std::istream& in, std::string& tok) {
    tok.clear();
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    while (c != EOF && !std::isspace(c)) {
        tok.push_back(static_cast<char>(c));
        c = in.get();
    }
    return !tok.empty();
}

long parse_dim(const std::string& tok, const std::string& path, const char* what) {
    std::size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(tok, &pos);
    } catch (...) {
        throw IoError("malformed PGM header (" + std::string(what) + ") in " + path);
    }
    if (pos != tok.size() || v <= 0)
        throw IoError("malformed PGM header (" + std::string(what) + ") in " + path);
    return v;
}

std::vector<unsigned char> to_bytes(const Image& img) {
    std::vector<unsigned char> bytes(img.size());
    for (std::size_t i = 0; i < img.samples.size(); ++i) {
        const double q = std::round(img.samples[i]);
        bytes[i] = static_cast<unsigned char>(q < 0.0 ? 0.0 : q > 255.0 ? 255.0 : q);
    }
    return bytes;
}

void put_u32le(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::uint32_t get_u32le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

Image read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::string tok;
    if (!next_token(in, tok) || (tok != "P5" && tok != "P2"))
        throw IoError("not a PGM file (bad magic) in " + path);
    const bool binary = tok == "P5";
    if (!next_token(in, tok)) throw IoError("malformed PGM header (width) in " + path);
    const long w = parse_dim(tok, path, "width");
    if (!next_token(in, tok)) throw IoError("malformed PGM header (height) in " + path);
    const long h = parse_dim(tok, path, "height");
    if (!next_token(in, tok)) throw IoError("malformed PGM header (maxval) in " + path);
    const long maxval = parse_dim(tok, path, "maxval");
    if (maxval > 255) throw IoError("unsupported PGM bit depth (maxval > 255) in " + path);
    if (w > 1 << 20 || h > 1 << 20) throw IoError("unreasonable PGM dimensions in " + path);

    Image img(static_cast<int>(w), static_cast<int>(h));
    if (binary) {
        std::vector<unsigned char> bytes(img.size());
        in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (static_cast<std::size_t>(in.gcount()) != bytes.size())
            throw IoError("truncated PGM payload in " + path);
        for (std::size_t i = 0; i < bytes.size(); ++i) img.samples[i] = bytes[i];
    } else {
        for (std::size_t i = 0; i < img.size(); ++i) {
            if (!next_token(in, tok)) throw IoError("truncated PGM payload in " + path);
            std::size_t pos = 0;
            long v = -1;
            try {
                v = std::stol(tok, &pos);
            } catch (...) {
            }
            if (pos != tok.size() || v < 0 || v > maxval)
                throw IoError("bad PGM sample value in " + path);
            img.samples[i] = static_cast<double>(v);
        }
    }
    return img;
}

void write_pgm(const std::string& path, const Image& img) {
    if (img.width <= 0 || img.height <= 0) throw std::invalid_argument("write_pgm: empty image");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    const std::vector<unsigned char> bytes = to_bytes(img);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("failed writing PGM payload to " + path);
}

Image read_png(const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) throw IoError("cannot open file: " + path);
    unsigned char sig[8];
    if (std::fread(sig, 1, 8, fp) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
        std::fclose(fp);
        throw IoError("not a PNG file (bad signature) in " + path);
    }
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw IoError("failed to initialize PNG reader for " + path);
    }
    Image img;
    std::vector<png_bytep> rows;
    std::vector<unsigned char> data;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw IoError("failed to decode PNG: " + path);
    }
    png_init_io(png, fp);
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);
    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const int depth = png_get_bit_depth(png, info);
    const int color = png_get_color_type(png, info);
    if (depth != 8 || color != PNG_COLOR_TYPE_GRAY) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw IoError("PNG must be 8-bit grayscale: " + path);
    }
    img = Image(static_cast<int>(w), static_cast<int>(h));
    data.resize(static_cast<std::size_t>(w) * h);
    rows.resize(h);
    for (png_uint_32 r = 0; r < h; ++r) rows[r] = data.data() + static_cast<std::size_t>(r) * w;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    for (std::size_t i = 0; i < data.size(); ++i) img.samples[i] = data[i];
    return img;
}

void write_png(const std::string& path, const Image& img) {
    if (img.width <= 0 || img.height <= 0) throw std::invalid_argument("write_png: empty image");
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw IoError("cannot open file for writing: " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw IoError("failed to initialize PNG writer for " + path);
    }
    std::vector<unsigned char> bytes = to_bytes(img);
    std::vector<png_bytep> rows(img.height);
    for (int r = 0; r < img.height; ++r)
        rows[r] = bytes.data() + static_cast<std::size_t>(r) * img.width;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw IoError("failed to encode PNG: " + path);
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

Image read_image(const std::string& path) {
    const std::string ext = lower_ext(path);
    if (ext == "pgm") return read_pgm(path);
    if (ext == "png") return read_png(path);
    throw IoError("unsupported image format (expected .pgm or .png): " + path);
}

void write_image(const std::string& path, const Image& img) {
    const std::string ext = lower_ext(path);
    if (ext == "pgm") return write_pgm(path, img);
    if (ext == "png") return write_png(path, img);
    throw IoError("unsupported image format (expected .pgm or .png): " + path);
}

void write_subbands(const std::string& path, const SubbandSet& bands) {
    if (bands.levels < 1 || bands.bands.size() != static_cast<std::size_t>(band_count(bands.levels)))
        throw std::invalid_argument("write_subbands: malformed subband set");
    const Image& first = bands.bands.front();
    std::string header = "UWB1";
    put_u32le(header, static_cast<std::uint32_t>(first.width));
    put_u32le(header, static_cast<std::uint32_t>(first.height));
    put_u32le(header, static_cast<std::uint32_t>(bands.bands.size()));
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    std::vector<unsigned char> plane(first.size() * 4);
    for (const Image& b : bands.bands) {
        if (!b.same_shape(first)) throw std::invalid_argument("write_subbands: band shapes differ");
        for (std::size_t i = 0; i < b.samples.size(); ++i) {
            const float f = static_cast<float>(b.samples[i]);
            std::uint32_t u;
            std::memcpy(&u, &f, 4);
            plane[i * 4 + 0] = static_cast<unsigned char>(u & 0xff);
            plane[i * 4 + 1] = static_cast<unsigned char>((u >> 8) & 0xff);
            plane[i * 4 + 2] = static_cast<unsigned char>((u >> 16) & 0xff);
            plane[i * 4 + 3] = static_cast<unsigned char>((u >> 24) & 0xff);
        }
        out.write(reinterpret_cast<const char*>(plane.data()),
                  static_cast<std::streamsize>(plane.size()));
    }
    if (!out) throw IoError("failed writing subband payload to " + path);
}

SubbandSet read_subbands(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    unsigned char header[16];
    in.read(reinterpret_cast<char*>(header), 16);
    if (in.gcount() != 16 || std::memcmp(header, "UWB1", 4) != 0)
        throw IoError("not a subband container (bad magic): " + path);
    const std::uint32_t w = get_u32le(header + 4);
    const std::uint32_t h = get_u32le(header + 8);
    const std::uint32_t nb = get_u32le(header + 12);
    if (w == 0 || h == 0 || w > (1u << 20) || h > (1u << 20))
        throw IoError("unreasonable subband dimensions in " + path);
    if (nb < 4 || (nb - 1) % 3 != 0)
        throw IoError("subband count is not 3*levels+1 in " + path);
    SubbandSet out;
    out.levels = static_cast<int>((nb - 1) / 3);
    out.bands.resize(nb);
    std::vector<unsigned char> plane(static_cast<std::size_t>(w) * h * 4);
    for (std::uint32_t b = 0; b < nb; ++b) {
        in.read(reinterpret_cast<char*>(plane.data()), static_cast<std::streamsize>(plane.size()));
        if (static_cast<std::size_t>(in.gcount()) != plane.size())
            throw IoError("truncated subband payload in " + path);
        Image img(static_cast<int>(w), static_cast<int>(h));
        for (std::size_t i = 0; i < img.size(); ++i) {
            const std::uint32_t u = get_u32le(plane.data() + i * 4);
            float f;
            std::memcpy(&f, &u, 4);
            img.samples[i] = static_cast<double>(f);
        }
        out.bands[b] = std::move(img);
    }
    return out;
}

}  // namespace genre
