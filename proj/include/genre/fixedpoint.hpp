#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "genre/risk.hpp"

namespace genre {

// Two's-complement fixed-point format: sign (optional), int_bits integer
// bits, frac_bits fraction bits. Signed range [-2^m, 2^m - 2^-n], unsigned
// [0, 2^m - 2^-n]. Values are held as int64 raws scaled by 2^-n.
struct QFormat {
    bool is_signed = true;
    int int_bits = 7;
    int frac_bits = 0;

    std::int64_t min_raw() const;
    std::int64_t max_raw() const;
    double min_value() const { return static_cast<double>(min_raw()) * resolution(); }
    double max_value() const { return static_cast<double>(max_raw()) * resolution(); }
    double resolution() const;  // 2^-frac_bits
    int total_bits() const { return (is_signed ? 1 : 0) + int_bits + frac_bits; }
    std::string name() const;  // "Q7.4", "UQ8.2"
};

// Truncate drops bits toward -infinity (arithmetic shift); Nearest rounds to
// the closest representable value with ties away from zero. Both saturate at
// the format limits and set *overflow when they do.
enum class RoundMode { Truncate, Nearest };

double quantize(double x, const QFormat& fmt, RoundMode mode, bool* overflow = nullptr);
std::int64_t quantize_raw(double x, const QFormat& fmt, RoundMode mode, bool* overflow = nullptr);

// Per-level fraction-bit schedule of the fixed datapath. Analysis level j
// natively grows two fraction bits (the 1/4 scaling); synthesis adds two more
// per stage, so an untruncated level-j band ends at 2j fraction bits after
// analysis and 4j after synthesis. The truncated schedule caps both at the
// published word widths. Detail bands are signed with 7 integer bits; the LL
// branch is unsigned with 8 integer bits and the same fraction schedule.
struct FormatSchedule {
    std::string name;
    std::vector<int> analysis_frac;   // per level, 1-based level j at index j-1
    std::vector<int> synthesis_frac;  // cap for stages of a band of that level

    static FormatSchedule untruncated(int levels);  // 2j / 4j, lossless
    static FormatSchedule truncated(int levels);    // caps [2,4,6,6,6] / [4,6,6,6,6]

    QFormat analysis_format(int level, bool ll) const;
    QFormat synthesis_format(int band_level, bool ll) const;
    int levels() const { return static_cast<int>(analysis_frac.size()); }
};

struct FixedSubbandSet {
    SubbandSet values;             // exact double values of the fixed-point raws
    std::vector<QFormat> formats;  // per band
    std::uint64_t overflow_count = 0;
};

// Bit-accurate analysis (quadrant datapath, truncation toward -infinity at
// each level's format). Input samples must be 8-bit integers. Overflow cannot
// occur for valid 8-bit input; the sticky count reports if it ever does.
FixedSubbandSet decompose_fixed(const Image& y8, int levels, const FormatSchedule& sched);

// Bit-accurate per-band synthesis of the analysis output.
FixedSubbandSet recompose_fixed(const FixedSubbandSet& bands, const FormatSchedule& sched);

struct FixedReport {
    std::string schedule;
    std::uint64_t overflow_count = 0;
    double max_subband_error = 0.0;    // max |fixed - float| over analysis + synthesis outputs
    double subband_error_bound = 0.0;  // accumulated quantization-step bound of the schedule
    bool clean_given = false;
    double output_psnr_db = 0.0;   // vs clean, when given
    double psnr_delta_db = 0.0;    // PSNR(fixed output) - PSNR(float output), when clean given
};

struct FixedResult {
    Image image;  // 8-bit output values
    std::vector<double> alpha;
    double risk = 0.0;
    SolverReport solver;
    FixedReport report;
};

// Full fixed-point pipeline: fixed filter banks for analysis and synthesis,
// Gram accumulation and the shrinkage solve in full precision on the fixed
// psi values, output rounded to 8 bits. The float pipeline is run alongside
// to fill the error fields of the report.
FixedResult pipeline_fixed(const Image& y8, double sigma, const FormatSchedule& sched,
                           const DenoiseConfig& cfg = {}, const Image* clean = nullptr);

}  // namespace genre
