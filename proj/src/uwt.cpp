#include "genre/uwt.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace genre {

namespace {

inline int wrap(int i, int n) {
    int m = i % n;
    return m < 0 ? m + n : m;
}

void check_decomposable(const Image& img, int levels) {
    if (img.width <= 0 || img.height <= 0)
        throw std::invalid_argument("decompose: empty image");
    if (levels < 1 || levels > 15)
        throw std::invalid_argument("decompose: levels must be in [1, 15]");
    const int block = 1 << levels;
    if (img.width % block != 0 || img.height % block != 0)
        throw std::invalid_argument("decompose: image dimensions must be divisible by 2^levels");
}

// Per-quadrant signs of the combined kernels: s[q1][q2] where q1/q2 select the
// low (offset < L/2) or high half along rows/columns. LH is h along rows and
// the wavelet along columns, so its sign flips with q2 only.
struct SignMap {
    double s00, s01, s10, s11;
};

SignMap sign_map(BandKind k) {
    switch (k) {
        case BandKind::LL: return {+1.0, +1.0, +1.0, +1.0};
        case BandKind::LH: return {-1.0, +1.0, -1.0, +1.0};
        case BandKind::HL: return {-1.0, -1.0, +1.0, +1.0};
        case BandKind::HH: return {+1.0, -1.0, -1.0, +1.0};
    }
    throw std::invalid_argument("bad band kind");
}

bool wavelet_rows(BandKind k) { return k == BandKind::HL || k == BandKind::HH; }
bool wavelet_cols(BandKind k) { return k == BandKind::LH || k == BandKind::HH; }

// 2-tap filter along columns of each row: out(r,c) = a0*in(r,c) + ad*in(r,c -+ d).
// Analysis convolves (looks back), synthesis correlates (looks forward).
Image hfilter2(const Image& in, int d, double a0, double ad, bool synthesis, OpCount* ops) {
    Image out(in.width, in.height);
    const int sgn = synthesis ? 1 : -1;
    for (int r = 0; r < in.height; ++r)
        for (int c = 0; c < in.width; ++c)
            out.at(r, c) = a0 * in.at(r, c) + ad * in.at(r, wrap(c + sgn * d, in.width));
    if (ops) ops->additions += in.size();
    return out;
}

Image vfilter2(const Image& in, int d, double a0, double ad, bool synthesis, OpCount* ops) {
    Image out(in.width, in.height);
    const int sgn = synthesis ? 1 : -1;
    for (int r = 0; r < in.height; ++r) {
        const int rr = wrap(r + sgn * d, in.height);
        for (int c = 0; c < in.width; ++c)
            out.at(r, c) = a0 * in.at(r, c) + ad * in.at(rr, c);
    }
    if (ops) ops->additions += in.size();
    return out;
}

// Full-tap circular filtering along rows / columns.
Image hfilter_taps(const Image& in, const std::vector<double>& taps, bool synthesis, OpCount* ops) {
    Image out(in.width, in.height);
    const int L = static_cast<int>(taps.size());
    const int sgn = synthesis ? 1 : -1;
    std::vector<int> idx(static_cast<std::size_t>(in.width) * L);
    for (int c = 0; c < in.width; ++c)
        for (int m = 0; m < L; ++m)
            idx[static_cast<std::size_t>(c) * L + m] = wrap(c + sgn * m, in.width);
    for (int r = 0; r < in.height; ++r)
        for (int c = 0; c < in.width; ++c) {
            double acc = 0.0;
            const int* cc = &idx[static_cast<std::size_t>(c) * L];
            for (int m = 0; m < L; ++m) acc += taps[m] * in.at(r, cc[m]);
            out.at(r, c) = acc;
        }
    if (ops) ops->additions += in.size() * static_cast<std::uint64_t>(L - 1);
    return out;
}

Image vfilter_taps(const Image& in, const std::vector<double>& taps, bool synthesis, OpCount* ops) {
    Image out(in.width, in.height);
    const int L = static_cast<int>(taps.size());
    const int sgn = synthesis ? 1 : -1;
    for (int r = 0; r < in.height; ++r) {
        for (int c = 0; c < in.width; ++c) out.at(r, c) = 0.0;
        for (int m = 0; m < L; ++m) {
            const int rr = wrap(r + sgn * m, in.height);
            const double t = taps[m];
            for (int c = 0; c < in.width; ++c) out.at(r, c) += t * in.at(rr, c);
        }
    }
    if (ops) ops->additions += in.size() * static_cast<std::uint64_t>(L - 1);
    return out;
}

// Direct 2-D circular convolution (analysis) or correlation (synthesis).
Image filter_2d_full(const Image& in, const Image& kernel, bool synthesis, OpCount* ops) {
    Image out(in.width, in.height);
    const int K1 = kernel.height, K2 = kernel.width;
    const int sgn = synthesis ? 1 : -1;
    std::vector<int> cidx(static_cast<std::size_t>(in.width) * K2);
    for (int c = 0; c < in.width; ++c)
        for (int m = 0; m < K2; ++m)
            cidx[static_cast<std::size_t>(c) * K2 + m] = wrap(c + sgn * m, in.width);
    for (int r = 0; r < in.height; ++r) {
        for (int m1 = 0; m1 < K1; ++m1) {
            const int rr = wrap(r + sgn * m1, in.height);
            for (int c = 0; c < in.width; ++c) {
                double acc = m1 == 0 ? 0.0 : out.at(r, c);
                const int* cc = &cidx[static_cast<std::size_t>(c) * K2];
                for (int m2 = 0; m2 < K2; ++m2) acc += kernel.at(m1, m2) * in.at(rr, cc[m2]);
                out.at(r, c) = acc;
            }
        }
    }
    if (ops)
        ops->additions +=
            in.size() * (static_cast<std::uint64_t>(K1) * static_cast<std::uint64_t>(K2) - 1);
    return out;
}

// Running box sums of length `len`, unnormalized. Analysis windows end at the
// index (sum of in(r, c-m), m in [0,len)); synthesis windows start at it.
// Steady state costs 2 additions per sample; the first column of each row is
// a direct sum, tracked as warm-up.
Image hbox(const Image& in, int len, bool synthesis, OpCount* ops) {
    Image out(in.width, in.height);
    const int W = in.width;
    for (int r = 0; r < in.height; ++r) {
        double acc = 0.0;
        for (int m = 0; m < len; ++m) acc += in.at(r, wrap(synthesis ? m : -m, W));
        out.at(r, 0) = acc;
        for (int c = 1; c < W; ++c) {
            if (synthesis)
                acc += -in.at(r, wrap(c - 1, W)) + in.at(r, wrap(c - 1 + len, W));
            else
                acc += in.at(r, c) - in.at(r, wrap(c - len, W));
            out.at(r, c) = acc;
        }
    }
    if (ops) {
        ops->additions += static_cast<std::uint64_t>(in.height) * (in.width - 1) * 2;
        ops->init_additions += static_cast<std::uint64_t>(in.height) * (len - 1);
    }
    return out;
}

Image vbox(const Image& in, int len, bool synthesis, OpCount* ops) {
    Image out(in.width, in.height);
    const int H = in.height;
    for (int c = 0; c < in.width; ++c) {
        double acc = 0.0;
        for (int m = 0; m < len; ++m) acc += in.at(wrap(synthesis ? m : -m, H), c);
        out.at(0, c) = acc;
    }
    for (int r = 1; r < H; ++r)
        for (int c = 0; c < in.width; ++c) {
            double acc = out.at(r - 1, c);
            if (synthesis)
                acc += -in.at(wrap(r - 1, H), c) + in.at(wrap(r - 1 + len, H), c);
            else
                acc += in.at(r, c) - in.at(wrap(r - len, H), c);
            out.at(r, c) = acc;
        }
    if (ops) {
        ops->additions += static_cast<std::uint64_t>(in.width) * (in.height - 1) * 2;
        ops->init_additions += static_cast<std::uint64_t>(in.width) * (len - 1);
    }
    return out;
}

// Running wavelet sums, unnormalized: -1 over the near half-window, +1 over
// the far half (half length d). Steady state is 3 additions per sample.
Image hwave(const Image& in, int d, bool synthesis, OpCount* ops) {
    Image out(in.width, in.height);
    const int W = in.width;
    const int L = 2 * d;
    for (int r = 0; r < in.height; ++r) {
        double acc = 0.0;
        for (int m = 0; m < L; ++m) {
            const double s = m < d ? -1.0 : 1.0;
            acc += s * in.at(r, wrap(synthesis ? m : -m, W));
        }
        out.at(r, 0) = acc;
        for (int c = 1; c < W; ++c) {
            if (synthesis)
                acc += in.at(r, wrap(c - 1, W)) - 2.0 * in.at(r, wrap(c - 1 + d, W)) +
                       in.at(r, wrap(c - 1 + L, W));
            else
                acc += -in.at(r, c) + 2.0 * in.at(r, wrap(c - d, W)) - in.at(r, wrap(c - L, W));
            out.at(r, c) = acc;
        }
    }
    if (ops) {
        ops->additions += static_cast<std::uint64_t>(in.height) * (in.width - 1) * 3;
        ops->init_additions += static_cast<std::uint64_t>(in.height) * (L - 1);
    }
    return out;
}

Image vwave(const Image& in, int d, bool synthesis, OpCount* ops) {
    Image out(in.width, in.height);
    const int H = in.height;
    const int L = 2 * d;
    for (int c = 0; c < in.width; ++c) {
        double acc = 0.0;
        for (int m = 0; m < L; ++m) {
            const double s = m < d ? -1.0 : 1.0;
            acc += s * in.at(wrap(synthesis ? m : -m, H), c);
        }
        out.at(0, c) = acc;
    }
    for (int r = 1; r < H; ++r)
        for (int c = 0; c < in.width; ++c) {
            double acc = out.at(r - 1, c);
            if (synthesis)
                acc += in.at(wrap(r - 1, H), c) - 2.0 * in.at(wrap(r - 1 + d, H), c) +
                       in.at(wrap(r - 1 + L, H), c);
            else
                acc += -in.at(r, c) + 2.0 * in.at(wrap(r - d, H), c) - in.at(wrap(r - L, H), c);
            out.at(r, c) = acc;
        }
    if (ops) {
        ops->additions += static_cast<std::uint64_t>(in.width) * (in.height - 1) * 3;
        ops->init_additions += static_cast<std::uint64_t>(in.width) * (L - 1);
    }
    return out;
}

// Fetch the four quadrant samples around a pixel: D at the pixel itself,
// B offset along columns, C along rows, A along both. Analysis looks back,
// synthesis forward.
struct Quad {
    double d, a, c, b;
};

inline Quad fetch_quad(const Image& s, int r, int c, int d, bool synthesis) {
    const int off = synthesis ? d : -d;
    const int rr = wrap(r + off, s.height);
    const int cc = wrap(c + off, s.width);
    return {s.at(r, c), s.at(rr, cc), s.at(rr, c), s.at(r, cc)};
}

// All four bands of one level from quadrant samples with shared pair sums:
// 4 shared additions + 1 combining addition per band = 8 per pixel.
void quadrant_combine_shared(const Image& s, int d, bool synthesis, double scale, Image* ll,
                             Image* lh, Image* hl, Image* hh, OpCount* ops) {
    *ll = Image(s.width, s.height);
    *lh = Image(s.width, s.height);
    *hl = Image(s.width, s.height);
    *hh = Image(s.width, s.height);
    for (int r = 0; r < s.height; ++r)
        for (int c = 0; c < s.width; ++c) {
            const Quad q = fetch_quad(s, r, c, d, synthesis);
            const double pa = q.d + q.a, ma = q.d - q.a;
            const double pc = q.c + q.b, mc = q.c - q.b;
            ll->at(r, c) = scale * (pa + pc);
            hh->at(r, c) = scale * (pa - pc);
            lh->at(r, c) = scale * (-ma - mc);
            hl->at(r, c) = scale * (mc - ma);
        }
    if (ops) ops->additions += s.size() * 8;
}

// Single band from quadrant samples without sharing: 3 additions per pixel.
Image quadrant_combine_direct(const Image& s, int d, bool synthesis, double scale, BandKind kind,
                              OpCount* ops) {
    Image out(s.width, s.height);
    const SignMap m = sign_map(kind);
    for (int r = 0; r < s.height; ++r)
        for (int c = 0; c < s.width; ++c) {
            const Quad q = fetch_quad(s, r, c, d, synthesis);
            out.at(r, c) = scale * (m.s00 * q.d + m.s01 * q.b + m.s10 * q.c + m.s11 * q.a);
        }
    if (ops) ops->additions += s.size() * 3;
    return out;
}

Image add_images(const Image& x, const Image& y) {
    Image out = x;
    for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i] += y.samples[i];
    return out;
}

Image scale_image(Image x, double s) {
    for (double& v : x.samples) v *= s;
    return x;
}

}  // namespace

const char* realization_name(Realization r) {
    switch (r) {
        case Realization::Uwt1d: return "uwt1d";
        case Realization::Uwt2d: return "uwt2d";
        case Realization::ConvCombined1d: return "conv1d";
        case Realization::ConvCombined2d: return "conv2d";
        case Realization::Ruwt1d: return "ruwt1d";
        case Realization::Ruwt2d: return "ruwt2d";
    }
    return "?";
}

Realization realization_from_name(const std::string& name) {
    if (name == "uwt1d") return Realization::Uwt1d;
    if (name == "uwt2d") return Realization::Uwt2d;
    if (name == "conv1d") return Realization::ConvCombined1d;
    if (name == "conv2d") return Realization::ConvCombined2d;
    if (name == "ruwt1d") return Realization::Ruwt1d;
    if (name == "ruwt2d") return Realization::Ruwt2d;
    throw std::invalid_argument("unknown realization: " + name);
}

int band_count(int levels) {
    if (levels < 1 || levels > 15) throw std::invalid_argument("band_count: levels out of range");
    return 3 * levels + 1;
}

BandId band_id(int index, int levels) {
    if (levels < 1 || index < 0 || index >= band_count(levels))
        throw std::invalid_argument("band index out of range");
    if (index == 3 * levels) return {levels, BandKind::LL};
    static const BandKind kinds[3] = {BandKind::LH, BandKind::HL, BandKind::HH};
    return {index / 3 + 1, kinds[index % 3]};
}

int band_index(const BandId& id, int levels) {
    if (id.kind == BandKind::LL) {
        if (id.level != levels) throw std::invalid_argument("LL band lives at the last level");
        return 3 * levels;
    }
    if (id.level < 1 || id.level > levels) throw std::invalid_argument("band level out of range");
    const int k = id.kind == BandKind::LH ? 0 : id.kind == BandKind::HL ? 1 : 2;
    return (id.level - 1) * 3 + k;
}

std::string band_name(int index, int levels) {
    const BandId id = band_id(index, levels);
    const char* kind = id.kind == BandKind::LH   ? "LH"
                       : id.kind == BandKind::HL ? "HL"
                       : id.kind == BandKind::HH ? "HH"
                                                 : "LL";
    return std::string(kind) + std::to_string(id.level);
}

double OpCount::per_output_pixel() const {
    return output_pixels ? static_cast<double>(additions) / static_cast<double>(output_pixels)
                         : 0.0;
}

std::vector<double> combined_refinement_filter(int level) {
    if (level < 1 || level > 15) throw std::invalid_argument("filter level out of range");
    const int L = 1 << level;
    return std::vector<double>(L, 1.0 / L);
}

std::vector<double> combined_wavelet_filter(int level) {
    if (level < 1 || level > 15) throw std::invalid_argument("filter level out of range");
    const int L = 1 << level;
    std::vector<double> f(L, 1.0 / L);
    for (int m = 0; m < L / 2; ++m) f[m] = -1.0 / L;
    return f;
}

Image combined_kernel(const BandId& id) {
    const auto rowf =
        wavelet_rows(id.kind) ? combined_wavelet_filter(id.level) : combined_refinement_filter(id.level);
    const auto colf =
        wavelet_cols(id.kind) ? combined_wavelet_filter(id.level) : combined_refinement_filter(id.level);
    const int L = static_cast<int>(rowf.size());
    Image k(L, L);
    for (int m1 = 0; m1 < L; ++m1)
        for (int m2 = 0; m2 < L; ++m2) k.at(m1, m2) = rowf[m1] * colf[m2];
    return k;
}

double kernel_energy(const BandId& id) {
    if (id.level < 1 || id.level > 15) throw std::invalid_argument("band level out of range");
    return std::ldexp(1.0, -2 * id.level);  // exact 4^-level
}

LevelBands analyze_level(const Image& input, int level, bool two_d, OpCount* ops) {
    const int d = 1 << (level - 1);
    if (input.width < 2 * d || input.height < 2 * d)
        throw std::invalid_argument("analyze_level: image too small for level");
    LevelBands out;
    if (two_d) {
        quadrant_combine_shared(input, d, false, 0.25, &out.ll, &out.lh, &out.hl, &out.hh, ops);
    } else {
        const Image sh = hfilter2(input, d, 0.5, 0.5, false, ops);
        const Image sg = hfilter2(input, d, -0.5, 0.5, false, ops);
        out.ll = vfilter2(sh, d, 0.5, 0.5, false, ops);
        out.hl = vfilter2(sh, d, -0.5, 0.5, false, ops);
        out.lh = vfilter2(sg, d, 0.5, 0.5, false, ops);
        out.hh = vfilter2(sg, d, -0.5, 0.5, false, ops);
    }
    if (ops) ops->output_pixels += input.size() * 4;
    return out;
}

LevelBands analyze_level_combined(const Image& img, int level, Realization r, OpCount* ops) {
    const int L = 1 << level;
    const int d = L / 2;
    if (img.width < L || img.height < L)
        throw std::invalid_argument("analyze_level_combined: image too small for level");
    LevelBands out;
    switch (r) {
        case Realization::ConvCombined1d: {
            const auto fr = combined_refinement_filter(level);
            const auto fw = combined_wavelet_filter(level);
            const Image sh = hfilter_taps(img, fr, false, ops);
            const Image sg = hfilter_taps(img, fw, false, ops);
            out.ll = vfilter_taps(sh, fr, false, ops);
            out.hl = vfilter_taps(sh, fw, false, ops);
            out.lh = vfilter_taps(sg, fr, false, ops);
            out.hh = vfilter_taps(sg, fw, false, ops);
            break;
        }
        case Realization::ConvCombined2d: {
            out.lh = filter_2d_full(img, combined_kernel({level, BandKind::LH}), false, ops);
            out.hl = filter_2d_full(img, combined_kernel({level, BandKind::HL}), false, ops);
            out.hh = filter_2d_full(img, combined_kernel({level, BandKind::HH}), false, ops);
            out.ll = filter_2d_full(img, combined_kernel({level, BandKind::LL}), false, ops);
            break;
        }
        case Realization::Ruwt1d: {
            const double s = 1.0 / (static_cast<double>(L) * L);
            const Image sh = hbox(img, L, false, ops);
            const Image sg = hwave(img, d, false, ops);
            out.ll = scale_image(vbox(sh, L, false, ops), s);
            out.hl = scale_image(vwave(sh, d, false, ops), s);
            out.lh = scale_image(vbox(sg, L, false, ops), s);
            out.hh = scale_image(vwave(sg, d, false, ops), s);
            break;
        }
        case Realization::Ruwt2d: {
            const double s = 1.0 / (static_cast<double>(L) * L);
            const Image rb = hbox(img, d, false, ops);
            const Image S = vbox(rb, d, false, ops);
            out.lh = quadrant_combine_direct(S, d, false, s, BandKind::LH, ops);
            out.hl = quadrant_combine_direct(S, d, false, s, BandKind::HL, ops);
            out.hh = quadrant_combine_direct(S, d, false, s, BandKind::HH, ops);
            out.ll = quadrant_combine_direct(S, d, false, s, BandKind::LL, ops);
            break;
        }
        default:
            throw std::invalid_argument("analyze_level_combined: not a combined realization");
    }
    if (ops) ops->output_pixels += img.size() * 4;
    return out;
}

SubbandSet decompose(const Image& img, int levels, Realization r, OpCount* ops) {
    check_decomposable(img, levels);
    SubbandSet out;
    out.levels = levels;
    out.bands.resize(band_count(levels));
    switch (r) {
        case Realization::Uwt1d:
        case Realization::Uwt2d: {
            const bool two_d = r == Realization::Uwt2d;
            Image ll = img;
            for (int j = 1; j <= levels; ++j) {
                LevelBands lb = analyze_level(ll, j, two_d, ops);
                out.bands[(j - 1) * 3 + 0] = std::move(lb.lh);
                out.bands[(j - 1) * 3 + 1] = std::move(lb.hl);
                out.bands[(j - 1) * 3 + 2] = std::move(lb.hh);
                ll = std::move(lb.ll);
            }
            out.bands[3 * levels] = std::move(ll);
            break;
        }
        default: {
            for (int j = 1; j <= levels; ++j) {
                LevelBands lb = analyze_level_combined(img, j, r, ops);
                out.bands[(j - 1) * 3 + 0] = std::move(lb.lh);
                out.bands[(j - 1) * 3 + 1] = std::move(lb.hl);
                out.bands[(j - 1) * 3 + 2] = std::move(lb.hh);
                if (j == levels) out.bands[3 * levels] = std::move(lb.ll);
            }
            break;
        }
    }
    return out;
}

SubbandSet decompose_recursive(const Image& img, int levels, bool two_d, OpCount* ops) {
    return decompose(img, levels, two_d ? Realization::Ruwt2d : Realization::Ruwt1d, ops);
}

Image synthesize_band(const Image& band, const BandId& id, Realization r, OpCount* ops) {
    if (band.width <= 0 || band.height <= 0)
        throw std::invalid_argument("synthesize_band: empty band");
    const int L = 1 << id.level;
    const int d = L / 2;
    Image psi;
    switch (r) {
        case Realization::Uwt1d: {
            Image cur = band;
            for (int k = id.level; k >= 1; --k) {
                const int dk = 1 << (k - 1);
                const bool vg = k == id.level && wavelet_rows(id.kind);
                const bool hg = k == id.level && wavelet_cols(id.kind);
                cur = vfilter2(cur, dk, vg ? -0.5 : 0.5, 0.5, true, ops);
                cur = hfilter2(cur, dk, hg ? -0.5 : 0.5, 0.5, true, ops);
            }
            psi = std::move(cur);
            break;
        }
        case Realization::Uwt2d: {
            Image cur = band;
            for (int k = id.level; k >= 1; --k) {
                const int dk = 1 << (k - 1);
                const BandKind kind = k == id.level ? id.kind : BandKind::LL;
                cur = quadrant_combine_direct(cur, dk, true, 0.25, kind, ops);
            }
            psi = std::move(cur);
            break;
        }
        case Realization::ConvCombined1d: {
            const auto vf = wavelet_rows(id.kind) ? combined_wavelet_filter(id.level)
                                                  : combined_refinement_filter(id.level);
            const auto hf = wavelet_cols(id.kind) ? combined_wavelet_filter(id.level)
                                                  : combined_refinement_filter(id.level);
            psi = hfilter_taps(vfilter_taps(band, vf, true, ops), hf, true, ops);
            break;
        }
        case Realization::ConvCombined2d: {
            psi = filter_2d_full(band, combined_kernel(id), true, ops);
            break;
        }
        case Realization::Ruwt1d: {
            const double s = 1.0 / (static_cast<double>(L) * L);
            Image cur = wavelet_rows(id.kind) ? vwave(band, d, true, ops) : vbox(band, L, true, ops);
            cur = wavelet_cols(id.kind) ? hwave(cur, d, true, ops) : hbox(cur, L, true, ops);
            psi = scale_image(std::move(cur), s);
            break;
        }
        case Realization::Ruwt2d: {
            const double s = 1.0 / (static_cast<double>(L) * L);
            const Image rb = hbox(band, d, true, ops);
            const Image S = vbox(rb, d, true, ops);
            psi = quadrant_combine_direct(S, d, true, s, id.kind, ops);
            break;
        }
        default:
            throw std::invalid_argument("unknown realization");
    }
    if (ops) ops->output_pixels += band.size();
    return psi;
}

std::vector<Image> recompose(const SubbandSet& bands, Realization r, OpCount* ops) {
    if (bands.levels < 1 || bands.bands.size() != static_cast<std::size_t>(band_count(bands.levels)))
        throw std::invalid_argument("recompose: malformed subband set");
    for (const Image& b : bands.bands)
        if (!b.same_shape(bands.bands[0]))
            throw std::invalid_argument("recompose: band shapes differ");
    std::vector<Image> psis(bands.bands.size());
    for (std::size_t i = 0; i < bands.bands.size(); ++i)
        psis[i] = synthesize_band(bands.bands[i], band_id(static_cast<int>(i), bands.levels), r, ops);
    return psis;
}

Image shrink_and_combine(const std::vector<Image>& psis, const std::vector<double>& alpha) {
    if (psis.empty()) throw std::invalid_argument("shrink_and_combine: no bands");
    if (psis.size() != alpha.size())
        throw std::invalid_argument("shrink_and_combine: alpha size does not match band count");
    Image out(psis[0].width, psis[0].height, 0.0);
    for (std::size_t k = 0; k < psis.size(); ++k) {
        if (!psis[k].same_shape(out)) throw std::invalid_argument("shrink_and_combine: shape mismatch");
        const double a = alpha[k];
        for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i] += a * psis[k].samples[i];
    }
    return out;
}

Image synthesize_level_joint(const LevelBands& bands, int level, bool two_d, OpCount* ops) {
    const int d = 1 << (level - 1);
    if (!bands.ll.same_shape(bands.lh) || !bands.ll.same_shape(bands.hl) ||
        !bands.ll.same_shape(bands.hh))
        throw std::invalid_argument("synthesize_level_joint: band shapes differ");
    Image out;
    if (!two_d) {
        // Adjoint of the separable analysis; the cross-band additions below are
        // deliberately not counted (cost accounting covers filter adds only).
        const Image lhat =
            add_images(vfilter2(bands.ll, d, 0.5, 0.5, true, ops), vfilter2(bands.hl, d, -0.5, 0.5, true, ops));
        const Image ghat =
            add_images(vfilter2(bands.lh, d, 0.5, 0.5, true, ops), vfilter2(bands.hh, d, -0.5, 0.5, true, ops));
        out = add_images(hfilter2(lhat, d, 0.5, 0.5, true, ops), hfilter2(ghat, d, -0.5, 0.5, true, ops));
    } else {
        out = quadrant_combine_direct(bands.ll, d, true, 0.25, BandKind::LL, ops);
        out = add_images(out, quadrant_combine_direct(bands.lh, d, true, 0.25, BandKind::LH, ops));
        out = add_images(out, quadrant_combine_direct(bands.hl, d, true, 0.25, BandKind::HL, ops));
        out = add_images(out, quadrant_combine_direct(bands.hh, d, true, 0.25, BandKind::HH, ops));
    }
    if (ops) ops->output_pixels += out.size();
    return out;
}

}  // namespace genre
