#include "genre/fixedpoint.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "genre/metrics.hpp"

namespace genre {

namespace {

void check_format(const QFormat& f) {
    if (f.int_bits < 0 || f.frac_bits < 0 || f.int_bits + f.frac_bits > 56)
        throw std::invalid_argument("fixed-point format out of supported range");
}

inline int wrap(int i, int n) {
    int m = i % n;
    return m < 0 ? m + n : m;
}

struct RawGrid {
    int width = 0, height = 0;
    std::vector<std::int64_t> v;
    RawGrid() = default;
    RawGrid(int w, int h) : width(w), height(h), v(static_cast<std::size_t>(w) * h, 0) {}
    std::int64_t& at(int r, int c) { return v[static_cast<std::size_t>(r) * width + c]; }
    std::int64_t at(int r, int c) const { return v[static_cast<std::size_t>(r) * width + c]; }
};

// Move a raw value between fraction widths. Dropping bits is an arithmetic
// shift, i.e. truncation toward -infinity, matching the hardware datapath.
inline std::int64_t shift_to_frac(std::int64_t raw, int from_frac, int to_frac) {
    if (to_frac >= from_frac) return raw << (to_frac - from_frac);
    return raw >> (from_frac - to_frac);
}

inline std::int64_t saturate(std::int64_t raw, const QFormat& fmt, std::uint64_t* overflow) {
    const std::int64_t lo = fmt.min_raw(), hi = fmt.max_raw();
    if (raw < lo) {
        ++*overflow;
        return lo;
    }
    if (raw > hi) {
        ++*overflow;
        return hi;
    }
    return raw;
}

Image grid_to_image(const RawGrid& g, int frac) {
    Image img(g.width, g.height);
    const double res = std::ldexp(1.0, -frac);
    for (std::size_t i = 0; i < g.v.size(); ++i) img.samples[i] = static_cast<double>(g.v[i]) * res;
    return img;
}

RawGrid image_to_grid(const Image& img, int frac) {
    RawGrid g(img.width, img.height);
    for (std::size_t i = 0; i < g.v.size(); ++i)
        g.v[i] = std::llround(std::ldexp(img.samples[i], frac));
    return g;
}

void check_8bit(const Image& y8) {
    for (double v : y8.samples)
        if (!(v >= 0.0 && v <= 255.0 && v == std::floor(v)))
            throw std::invalid_argument("fixed-point pipeline requires 8-bit integer samples");
}

struct SignMap {
    std::int64_t s00, s01, s10, s11;
};

SignMap sign_map(BandKind k) {
    switch (k) {
        case BandKind::LL: return {+1, +1, +1, +1};
        case BandKind::LH: return {-1, +1, -1, +1};
        case BandKind::HL: return {-1, -1, +1, +1};
        case BandKind::HH: return {+1, -1, -1, +1};
    }
    throw std::invalid_argument("bad band kind");
}

// One quadrant stage on raw values: the four-sample combination carries two
// extra fraction bits (the /4), then truncates into the target format.
RawGrid quadrant_stage(const RawGrid& in, int d, bool synthesis, BandKind kind, int in_frac,
                       const QFormat& out_fmt, std::uint64_t* overflow) {
    RawGrid out(in.width, in.height);
    const SignMap m = sign_map(kind);
    const int off = synthesis ? d : -d;
    for (int r = 0; r < in.height; ++r) {
        const int rr = wrap(r + off, in.height);
        for (int c = 0; c < in.width; ++c) {
            const int cc = wrap(c + off, in.width);
            const std::int64_t combo = m.s00 * in.at(r, c) + m.s01 * in.at(r, cc) +
                                       m.s10 * in.at(rr, c) + m.s11 * in.at(rr, cc);
            const std::int64_t shifted = shift_to_frac(combo, in_frac + 2, out_fmt.frac_bits);
            out.at(r, c) = saturate(shifted, out_fmt, overflow);
        }
    }
    return out;
}

void check_schedule(const FormatSchedule& sched, int levels) {
    if (levels < 1) throw std::invalid_argument("levels must be >= 1");
    if (sched.levels() < levels)
        throw std::invalid_argument("format schedule does not cover the requested levels");
    if (sched.synthesis_frac.size() != sched.analysis_frac.size())
        throw std::invalid_argument("malformed format schedule");
}

}  // namespace

std::int64_t QFormat::min_raw() const {
    return is_signed ? -(std::int64_t(1) << (int_bits + frac_bits)) : 0;
}

std::int64_t QFormat::max_raw() const { return (std::int64_t(1) << (int_bits + frac_bits)) - 1; }

double QFormat::resolution() const { return std::ldexp(1.0, -frac_bits); }

std::string QFormat::name() const {
    return std::string(is_signed ? "Q" : "UQ") + std::to_string(int_bits) + "." +
           std::to_string(frac_bits);
}

std::int64_t quantize_raw(double x, const QFormat& fmt, RoundMode mode, bool* overflow) {
    check_format(fmt);
    if (!std::isfinite(x)) throw std::invalid_argument("quantize: value is not finite");
    const double scaled = std::ldexp(x, fmt.frac_bits);
    const double q = mode == RoundMode::Truncate ? std::floor(scaled) : std::round(scaled);
    const double lo = static_cast<double>(fmt.min_raw()), hi = static_cast<double>(fmt.max_raw());
    if (q < lo) {
        if (overflow) *overflow = true;
        return fmt.min_raw();
    }
    if (q > hi) {
        if (overflow) *overflow = true;
        return fmt.max_raw();
    }
    return static_cast<std::int64_t>(q);
}

double quantize(double x, const QFormat& fmt, RoundMode mode, bool* overflow) {
    return static_cast<double>(quantize_raw(x, fmt, mode, overflow)) * fmt.resolution();
}

FormatSchedule FormatSchedule::untruncated(int levels) {
    if (levels < 1 || levels > 12) throw std::invalid_argument("schedule levels out of range");
    FormatSchedule s;
    s.name = "untruncated";
    for (int j = 1; j <= levels; ++j) {
        s.analysis_frac.push_back(2 * j);
        s.synthesis_frac.push_back(4 * j);
    }
    return s;
}

FormatSchedule FormatSchedule::truncated(int levels) {
    if (levels < 1 || levels > 12) throw std::invalid_argument("schedule levels out of range");
    FormatSchedule s;
    s.name = "truncated";
    for (int j = 1; j <= levels; ++j) {
        s.analysis_frac.push_back(std::min(2 * j, 6));
        s.synthesis_frac.push_back(std::min(4 * j, 6));
    }
    return s;
}

QFormat FormatSchedule::analysis_format(int level, bool ll) const {
    if (level < 1 || level > levels()) throw std::invalid_argument("schedule level out of range");
    return QFormat{!ll, ll ? 8 : 7, analysis_frac[level - 1]};
}

QFormat FormatSchedule::synthesis_format(int band_level, bool ll) const {
    if (band_level < 1 || band_level > levels())
        throw std::invalid_argument("schedule level out of range");
    return QFormat{!ll, ll ? 8 : 7, synthesis_frac[band_level - 1]};
}

FixedSubbandSet decompose_fixed(const Image& y8, int levels, const FormatSchedule& sched) {
    check_schedule(sched, levels);
    if (y8.width <= 0 || y8.height <= 0) throw std::invalid_argument("decompose_fixed: empty image");
    const int block = 1 << levels;
    if (y8.width % block != 0 || y8.height % block != 0)
        throw std::invalid_argument("decompose_fixed: image dimensions must be divisible by 2^levels");
    check_8bit(y8);

    FixedSubbandSet out;
    out.values.levels = levels;
    out.values.bands.resize(band_count(levels));
    out.formats.resize(band_count(levels));

    RawGrid ll = image_to_grid(y8, 0);
    int ll_frac = 0;
    for (int j = 1; j <= levels; ++j) {
        const int d = 1 << (j - 1);
        const QFormat detail_fmt = sched.analysis_format(j, false);
        const QFormat ll_fmt = sched.analysis_format(j, true);
        RawGrid lh = quadrant_stage(ll, d, false, BandKind::LH, ll_frac, detail_fmt, &out.overflow_count);
        RawGrid hl = quadrant_stage(ll, d, false, BandKind::HL, ll_frac, detail_fmt, &out.overflow_count);
        RawGrid hh = quadrant_stage(ll, d, false, BandKind::HH, ll_frac, detail_fmt, &out.overflow_count);
        RawGrid lln = quadrant_stage(ll, d, false, BandKind::LL, ll_frac, ll_fmt, &out.overflow_count);
        out.values.bands[(j - 1) * 3 + 0] = grid_to_image(lh, detail_fmt.frac_bits);
        out.values.bands[(j - 1) * 3 + 1] = grid_to_image(hl, detail_fmt.frac_bits);
        out.values.bands[(j - 1) * 3 + 2] = grid_to_image(hh, detail_fmt.frac_bits);
        out.formats[(j - 1) * 3 + 0] = detail_fmt;
        out.formats[(j - 1) * 3 + 1] = detail_fmt;
        out.formats[(j - 1) * 3 + 2] = detail_fmt;
        ll = std::move(lln);
        ll_frac = ll_fmt.frac_bits;
        if (j == levels) {
            out.values.bands[3 * levels] = grid_to_image(ll, ll_frac);
            out.formats[3 * levels] = ll_fmt;
        }
    }
    return out;
}

FixedSubbandSet recompose_fixed(const FixedSubbandSet& bands, const FormatSchedule& sched) {
    const int levels = bands.values.levels;
    check_schedule(sched, levels);
    if (bands.values.bands.size() != static_cast<std::size_t>(band_count(levels)) ||
        bands.formats.size() != bands.values.bands.size())
        throw std::invalid_argument("recompose_fixed: malformed subband set");

    FixedSubbandSet out;
    out.values.levels = levels;
    out.values.bands.resize(bands.values.bands.size());
    out.formats.resize(bands.formats.size());

    for (std::size_t i = 0; i < bands.values.bands.size(); ++i) {
        const BandId id = band_id(static_cast<int>(i), levels);
        const bool is_ll = id.kind == BandKind::LL;
        const int cap = sched.synthesis_frac[id.level - 1];
        int frac = bands.formats[i].frac_bits;
        RawGrid cur = image_to_grid(bands.values.bands[i], frac);
        QFormat fmt = bands.formats[i];
        for (int k = id.level; k >= 1; --k) {
            const int d = 1 << (k - 1);
            const BandKind kind = k == id.level ? id.kind : BandKind::LL;
            const int target = std::min(frac + 2, cap);
            fmt = QFormat{!is_ll, is_ll ? 8 : 7, target};
            cur = quadrant_stage(cur, d, true, kind, frac, fmt, &out.overflow_count);
            frac = target;
        }
        out.values.bands[i] = grid_to_image(cur, frac);
        out.formats[i] = fmt;
    }
    return out;
}

namespace {

// Accumulated truncation bound: each stage that drops bits adds at most one
// quantization step of its output format.
double schedule_error_bound(const FormatSchedule& sched, int levels) {
    std::vector<double> band_err(band_count(levels), 0.0);
    double e_ll = 0.0;
    int frac = 0;
    for (int j = 1; j <= levels; ++j) {
        const int natural = frac + 2;
        const int f = sched.analysis_frac[j - 1];
        const double step = f < natural ? std::ldexp(1.0, -f) : 0.0;
        for (int k = 0; k < 3; ++k) band_err[(j - 1) * 3 + k] = e_ll + step;
        e_ll += step;
        frac = f;
        if (j == levels) band_err[3 * levels] = e_ll;
    }
    double bound = 0.0;
    for (int i = 0; i < band_count(levels); ++i) {
        const BandId id = band_id(i, levels);
        double e = band_err[i];
        int f = sched.analysis_frac[id.level - 1];
        for (int k = id.level; k >= 1; --k) {
            const int natural = f + 2;
            const int f2 = std::min(natural, sched.synthesis_frac[id.level - 1]);
            if (f2 < natural) e += std::ldexp(1.0, -f2);
            f = f2;
        }
        bound = std::max(bound, e);
    }
    return bound;
}

}  // namespace

FixedResult pipeline_fixed(const Image& y8, double sigma, const FormatSchedule& sched,
                           const DenoiseConfig& cfg, const Image* clean) {
    if (sigma < 0.0) throw std::invalid_argument("pipeline_fixed: sigma must be nonnegative");
    if (clean && !clean->same_shape(y8))
        throw std::invalid_argument("pipeline_fixed: clean reference shape mismatch");
    FixedSubbandSet fb = decompose_fixed(y8, cfg.levels, sched);
    FixedSubbandSet fpsi = recompose_fixed(fb, sched);

    // Float reference through the same (quadrant) datapath for the error fields.
    const SubbandSet bands_f = decompose(y8, cfg.levels, Realization::Uwt2d);
    const std::vector<Image> psis_f = recompose(bands_f, Realization::Uwt2d);
    double max_err = 0.0;
    for (std::size_t i = 0; i < bands_f.bands.size(); ++i) {
        for (std::size_t p = 0; p < bands_f.bands[i].samples.size(); ++p) {
            max_err = std::max(max_err, std::abs(fb.values.bands[i].samples[p] -
                                                 bands_f.bands[i].samples[p]));
            max_err = std::max(max_err, std::abs(fpsi.values.bands[i].samples[p] -
                                                 psis_f[i].samples[p]));
        }
    }

    GramSystem sys = accumulate_gram(fpsi.values.bands, y8);
    sys.sigma2 = sigma * sigma;
    sys.q = trace_terms(cfg.levels, y8.width, y8.height, sys.sigma2);

    FixedResult res;
    if (sigma == 0.0) {
        SolverConfig gd = cfg.solver;
        gd.method = SolverMethod::GradientDescent;
        res.alpha = solve_gradient_descent(sys, gd, &res.solver);
    } else if (cfg.solver.method == SolverMethod::ClosedForm) {
        res.alpha = solve_closed_form(sys, &res.solver);
    } else {
        res.alpha = solve_gradient_descent(sys, cfg.solver, &res.solver);
    }
    res.image = quantize_to_8bit(shrink_and_combine(fpsi.values.bands, res.alpha));
    res.risk = genre_risk(fpsi.values.bands, y8, res.alpha, sys.sigma2, sys.q);

    res.report.schedule = sched.name;
    res.report.overflow_count = fb.overflow_count + fpsi.overflow_count;
    res.report.max_subband_error = max_err;
    res.report.subband_error_bound = schedule_error_bound(sched, cfg.levels);
    if (clean) {
        res.report.clean_given = true;
        // The float pipeline's 8-bit output is the comparison point.
        GramSystem fsys = accumulate_gram(psis_f, y8);
        fsys.sigma2 = sys.sigma2;
        fsys.q = sys.q;
        std::vector<double> falpha;
        if (sigma == 0.0) {
            SolverConfig gd = cfg.solver;
            gd.method = SolverMethod::GradientDescent;
            falpha = solve_gradient_descent(fsys, gd);
        } else if (cfg.solver.method == SolverMethod::ClosedForm) {
            falpha = solve_closed_form(fsys);
        } else {
            falpha = solve_gradient_descent(fsys, cfg.solver);
        }
        const Image float_out = quantize_to_8bit(shrink_and_combine(psis_f, falpha));
        const double psnr_fixed = psnr_db(*clean, res.image);
        const double psnr_float = psnr_db(*clean, float_out);
        res.report.output_psnr_db = psnr_fixed;
        res.report.psnr_delta_db = psnr_fixed - psnr_float;
    }
    return res;
}

}  // namespace genre
