#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "genre/costmodel.hpp"
#include "genre/fixedpoint.hpp"
#include "genre/image.hpp"
#include "genre/image_io.hpp"
#include "genre/metrics.hpp"
#include "genre/risk.hpp"
#include "genre/uwt.hpp"

namespace {

using json = nlohmann::ordered_json;

enum class Precision { Float, Fixed, FixedFull };

Precision precision_from_name(const std::string& s) {
    if (s == "float") return Precision::Float;
    if (s == "fixed") return Precision::Fixed;
    if (s == "fixed-full") return Precision::FixedFull;
    throw std::invalid_argument("unknown precision: " + s);
}

const char* precision_name(Precision p) {
    switch (p) {
        case Precision::Float: return "float";
        case Precision::Fixed: return "fixed";
        case Precision::FixedFull: return "fixed-full";
    }
    return "?";
}

int reflect_index(int i, int n) {
    if (n <= 1) return 0;
    int period = 2 * n;
    i %= period;
    if (i < 0) i += period;
    return i < n ? i : period - 1 - i;
}

// Pad on the right/bottom by symmetric reflection up to a multiple of `mult`.
genre::Image pad_reflect(const genre::Image& img, int mult) {
    int w = (img.width + mult - 1) / mult * mult;
    int h = (img.height + mult - 1) / mult * mult;
    genre::Image out(w, h);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            out.at(r, c) = img.at(reflect_index(r, img.height), reflect_index(c, img.width));
    return out;
}

genre::Image crop(const genre::Image& img, int width, int height) {
    if (img.width == width && img.height == height) return img;
    genre::Image out(width, height);
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c) out.at(r, c) = img.at(r, c);
    return out;
}

double json_safe(double v) { return std::isfinite(v) ? v : 0.0; }

std::string fixed_str(double v, int prec) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os << std::fixed << std::setprecision(prec) << v;
    return os.str();
}

std::string sci_str(double v) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(3) << v;
    return os.str();
}

void emit_report(const std::string& text, const std::string& report_file) {
    if (report_file.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(report_file, std::ios::binary);
    if (!out) throw genre::IoError("cannot open report file " + report_file);
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
}

struct DenoiseOptions {
    std::string input;
    std::string output;
    std::string clean;
    std::string dump_subbands;
    std::string report_format = "human";
    std::string report_file;
    std::string realization = "uwt2d";
    std::string solver = "closed";
    std::string precision = "float";
    std::string add_noise;
    std::string pad = "none";
    std::string psnr_peak = "ref";
    double sigma = 0.0;
    int levels = 5;
    double mu = 1.0 / 8192.0;
    int max_iters = 20000;
    double tol = 1e-6;
    std::uint64_t seed = 1;
    bool quantize_input = false;
};

int run_denoise(const DenoiseOptions& o) {
    Precision prec = precision_from_name(o.precision);
    genre::DenoiseConfig cfg;
    cfg.levels = o.levels;
    cfg.realization = genre::realization_from_name(o.realization);
    cfg.solver.method = (o.solver == "gd") ? genre::SolverMethod::GradientDescent
                                           : genre::SolverMethod::ClosedForm;
    cfg.solver.mu = o.mu;
    cfg.solver.max_iterations = o.max_iters;
    cfg.solver.tolerance = o.tol;

    genre::Image processed = genre::read_image(o.input);
    bool noise_added = !o.add_noise.empty();
    if (noise_added) {
        genre::NoiseModel nm;
        nm.distribution = genre::noise_from_name(o.add_noise);
        nm.sigma = o.sigma;
        nm.seed = o.seed;
        processed = genre::add_noise(processed, nm);
    }
    bool quantized = o.quantize_input || prec != Precision::Float;
    if (quantized) processed = genre::quantize_to_8bit(processed);

    genre::Image noisy = processed;  // what the denoiser sees, original size
    int ow = processed.width, oh = processed.height;
    int mult = 1 << o.levels;
    bool padded = false;
    genre::Image work = processed;
    if (ow % mult != 0 || oh % mult != 0) {
        if (o.pad != "reflect")
            throw std::invalid_argument("image size " + std::to_string(ow) + "x" + std::to_string(oh) +
                                        " is not divisible by 2^levels; pass --pad reflect");
        work = pad_reflect(processed, mult);
        padded = true;
    }

    genre::Image out_full;
    std::vector<double> alpha;
    double risk = 0.0;
    genre::SolverReport srep;
    genre::FixedReport frep;
    if (prec == Precision::Float) {
        genre::DenoiseResult res = genre::denoise(work, o.sigma, cfg);
        out_full = std::move(res.image);
        alpha = std::move(res.alpha);
        risk = res.risk;
        srep = res.solver;
    } else {
        genre::FormatSchedule sched = (prec == Precision::Fixed)
                                          ? genre::FormatSchedule::truncated(o.levels)
                                          : genre::FormatSchedule::untruncated(o.levels);
        genre::FixedResult res = genre::pipeline_fixed(work, o.sigma, sched, cfg, nullptr);
        out_full = std::move(res.image);
        alpha = std::move(res.alpha);
        risk = res.risk;
        srep = res.solver;
        frep = res.report;
    }
    genre::Image out = genre::quantize_to_8bit(crop(out_full, ow, oh));
    if (!o.output.empty()) genre::write_image(o.output, out);
    if (!o.dump_subbands.empty())
        genre::write_subbands(o.dump_subbands, genre::decompose(work, o.levels, cfg.realization));

    bool have_clean = !o.clean.empty();
    double in_psnr = 0, in_ssim = 0, out_psnr = 0, out_ssim = 0;
    if (have_clean) {
        genre::Image clean = genre::read_image(o.clean);
        if (!clean.same_shape(noisy))
            throw std::invalid_argument("clean reference shape does not match the input");
        genre::PsnrPeak pk = (o.psnr_peak == "test") ? genre::PsnrPeak::TestMax
                                                     : genre::PsnrPeak::ReferenceMax;
        genre::SsimParams sp = genre::SsimParams::windowed_default();
        in_psnr = genre::psnr_db(clean, noisy, pk);
        in_ssim = genre::ssim(clean, noisy, sp);
        out_psnr = genre::psnr_db(clean, out, pk);
        out_ssim = genre::ssim(clean, out, sp);
    }

    std::string text;
    if (o.report_format == "json") {
        json j;
        j["command"] = "denoise";
        j["input"] = o.input;
        j["width"] = ow;
        j["height"] = oh;
        j["sigma"] = o.sigma;
        j["levels"] = o.levels;
        j["realization"] = genre::realization_name(cfg.realization);
        j["precision"] = precision_name(prec);
        if (noise_added)
            j["noise"] = {{"distribution", o.add_noise}, {"sigma", o.sigma}, {"seed", o.seed}};
        else
            j["noise"] = nullptr;
        j["quantized_input"] = quantized;
        j["padded"] = padded ? json({{"width", work.width}, {"height", work.height}}) : json(nullptr);
        j["solver"] = {{"method", srep.method == genre::SolverMethod::ClosedForm ? "closed-form"
                                                                                 : "gradient-descent"},
                       {"iterations", srep.iterations},
                       {"residual_inf", json_safe(srep.residual_inf)},
                       {"condition", json_safe(srep.condition)},
                       {"mu_lambda_max", json_safe(srep.mu_lambda_max)},
                       {"converged", srep.converged},
                       {"rank_deficient", srep.rank_deficient}};
        json bands = json::array(), avals = json::array();
        for (std::size_t i = 0; i < alpha.size(); ++i) {
            bands.push_back(genre::band_name(static_cast<int>(i), o.levels));
            avals.push_back(alpha[i]);
        }
        j["bands"] = bands;
        j["alpha"] = avals;
        j["risk"] = risk;
        if (prec != Precision::Float)
            j["fixed"] = {{"schedule", frep.schedule},
                          {"overflow_count", frep.overflow_count},
                          {"max_subband_error", frep.max_subband_error},
                          {"error_bound", frep.subband_error_bound}};
        else
            j["fixed"] = nullptr;
        if (have_clean)
            j["metrics"] = {{"input_psnr_db", json_safe(in_psnr)},
                            {"input_ssim", in_ssim},
                            {"output_psnr_db", json_safe(out_psnr)},
                            {"output_ssim", out_ssim},
                            {"psnr_gain_db", json_safe(out_psnr - in_psnr)}};
        else
            j["metrics"] = nullptr;
        j["output"] = o.output.empty() ? json(nullptr) : json(o.output);
        j["subbands"] = o.dump_subbands.empty() ? json(nullptr) : json(o.dump_subbands);
        text = j.dump(2);
    } else {
        std::ostringstream os;
        os << "input:        " << o.input << " (" << ow << "x" << oh << ")\n";
        if (noise_added)
            os << "noise:        " << o.add_noise << " sigma=" << o.sigma << " seed=" << o.seed << "\n";
        if (quantized) os << "quantized:    input rounded to 8-bit\n";
        if (padded) os << "padded:       " << work.width << "x" << work.height << " (reflect)\n";
        os << "levels:       " << o.levels << "\n";
        os << "realization:  " << genre::realization_name(cfg.realization) << "\n";
        os << "precision:    " << precision_name(prec);
        if (prec != Precision::Float) os << " (" << frep.schedule << ")";
        os << "\n";
        if (srep.method == genre::SolverMethod::ClosedForm)
            os << "solver:       closed-form, condition " << sci_str(srep.condition)
               << ", residual " << sci_str(srep.residual_inf) << "\n";
        else
            os << "solver:       gradient-descent, " << srep.iterations << " iterations, residual "
               << sci_str(srep.residual_inf) << (srep.converged ? "" : " (iteration cap hit)") << "\n";
        os << "risk:         " << fixed_str(risk, 4) << " (estimated output MSE)\n";
        os << "alpha:       ";
        for (std::size_t i = 0; i < alpha.size(); ++i)
            os << " " << genre::band_name(static_cast<int>(i), o.levels) << "="
               << fixed_str(alpha[i], 4);
        os << "\n";
        if (prec != Precision::Float)
            os << "fixed:        overflows=" << frep.overflow_count << ", max subband error "
               << sci_str(frep.max_subband_error) << " (bound " << sci_str(frep.subband_error_bound)
               << ")\n";
        if (have_clean) {
            os << "psnr:         " << fixed_str(out_psnr, 3) << " dB (input " << fixed_str(in_psnr, 3)
               << " dB, gain " << fixed_str(out_psnr - in_psnr, 3) << " dB)\n";
            os << "ssim:         " << fixed_str(out_ssim, 4) << " (input " << fixed_str(in_ssim, 4)
               << ")\n";
        }
        if (!o.output.empty()) os << "wrote:        " << o.output << "\n";
        if (!o.dump_subbands.empty()) os << "subbands:     " << o.dump_subbands << "\n";
        text = os.str();
    }
    emit_report(text, o.report_file);
    return 0;
}

struct EvaluateOptions {
    std::vector<std::string> images;
    std::string distribution = "gaussian";
    std::string realization = "uwt2d";
    std::string precision = "float";
    std::string format = "csv";
    std::string output_dir;
    std::string report_file;
    double sigma = 25.0;
    int levels = 5;
    std::uint64_t seed = 1;
    bool no_quantize = false;
};

int run_evaluate(const EvaluateOptions& o) {
    Precision prec = precision_from_name(o.precision);
    genre::DenoiseConfig cfg;
    cfg.levels = o.levels;
    cfg.realization = genre::realization_from_name(o.realization);
    genre::SsimParams sp = genre::SsimParams::windowed_default();

    struct Row {
        std::string name;
        double in_psnr, in_ssim, out_psnr, out_ssim;
    };
    std::vector<Row> rows;
    for (std::size_t idx = 0; idx < o.images.size(); ++idx) {
        const std::string& path = o.images[idx];
        genre::Image clean = genre::read_image(path);
        genre::NoiseModel nm;
        nm.distribution = genre::noise_from_name(o.distribution);
        nm.sigma = o.sigma;
        nm.seed = o.seed + idx;
        genre::Image noisy = genre::add_noise(clean, nm);
        if (!o.no_quantize || prec != Precision::Float) noisy = genre::quantize_to_8bit(noisy);

        int mult = 1 << o.levels;
        genre::Image work = (clean.width % mult || clean.height % mult) ? pad_reflect(noisy, mult) : noisy;
        genre::Image out_full;
        if (prec == Precision::Float) {
            out_full = genre::denoise(work, o.sigma, cfg).image;
        } else {
            genre::FormatSchedule sched = (prec == Precision::Fixed)
                                              ? genre::FormatSchedule::truncated(o.levels)
                                              : genre::FormatSchedule::untruncated(o.levels);
            out_full = genre::pipeline_fixed(work, o.sigma, sched, cfg, nullptr).image;
        }
        genre::Image out = genre::quantize_to_8bit(crop(out_full, clean.width, clean.height));
        if (!o.output_dir.empty()) {
            std::filesystem::path dir(o.output_dir);
            std::filesystem::create_directories(dir);
            std::filesystem::path dst = dir / (std::filesystem::path(path).stem().string() + "_denoised.png");
            genre::write_image(dst.string(), out);
        }
        Row r;
        r.name = std::filesystem::path(path).stem().string();
        r.in_psnr = genre::psnr_db(clean, noisy);
        r.in_ssim = genre::ssim(clean, noisy, sp);
        r.out_psnr = genre::psnr_db(clean, out);
        r.out_ssim = genre::ssim(clean, out, sp);
        rows.push_back(r);
    }

    std::ostringstream os;
    if (o.format == "json") {
        json arr = json::array();
        for (const Row& r : rows)
            arr.push_back({{"image", r.name},
                           {"distribution", o.distribution},
                           {"sigma", o.sigma},
                           {"precision", o.precision},
                           {"input_psnr_db", json_safe(r.in_psnr)},
                           {"input_ssim", r.in_ssim},
                           {"output_psnr_db", json_safe(r.out_psnr)},
                           {"output_ssim", r.out_ssim},
                           {"psnr_gain_db", json_safe(r.out_psnr - r.in_psnr)}});
        os << arr.dump(2);
    } else if (o.format == "csv") {
        os << "image,distribution,sigma,precision,input_psnr,input_ssim,output_psnr,output_ssim,psnr_gain\n";
        for (const Row& r : rows)
            os << r.name << "," << o.distribution << "," << fixed_str(o.sigma, 2) << "," << o.precision
               << "," << fixed_str(r.in_psnr, 4) << "," << fixed_str(r.in_ssim, 4) << ","
               << fixed_str(r.out_psnr, 4) << "," << fixed_str(r.out_ssim, 4) << ","
               << fixed_str(r.out_psnr - r.in_psnr, 4) << "\n";
    } else {
        os << std::left << std::setw(12) << "image" << std::right << std::setw(10) << "in psnr"
           << std::setw(10) << "in ssim" << std::setw(10) << "out psnr" << std::setw(10) << "out ssim"
           << std::setw(10) << "gain" << "\n";
        for (const Row& r : rows)
            os << std::left << std::setw(12) << r.name << std::right << std::setw(10)
               << fixed_str(r.in_psnr, 3) << std::setw(10) << fixed_str(r.in_ssim, 4) << std::setw(10)
               << fixed_str(r.out_psnr, 3) << std::setw(10) << fixed_str(r.out_ssim, 4) << std::setw(10)
               << fixed_str(r.out_psnr - r.in_psnr, 3) << "\n";
    }
    emit_report(os.str(), o.report_file);
    return 0;
}

struct CostOptions {
    int level = 5;
    int width = 512;
    int word_bits = 16;
};

int run_cost_tables(const CostOptions& o) {
    std::cout << "# additions per output pixel, filtering level " << o.level << "\n";
    std::cout << genre::additions_table_csv(o.level);
    std::cout << "\n# block RAMs, level " << o.level << ", line width " << o.width << ", "
              << o.word_bits << "-bit words\n";
    std::cout << genre::bram_table_csv(o.level, o.width, o.word_bits);
    return 0;
}

struct DumpOptions {
    std::string input;
    std::string output;
    std::string realization = "uwt2d";
    int levels = 5;
};

int run_dump_subbands(const DumpOptions& o) {
    genre::Image img = genre::read_image(o.input);
    genre::SubbandSet bands =
        genre::decompose(img, o.levels, genre::realization_from_name(o.realization));
    genre::write_subbands(o.output, bands);
    std::cout << "wrote " << bands.bands.size() << " bands (" << img.width << "x" << img.height
              << ", " << o.levels << " levels) to " << o.output << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Undecimated-wavelet image denoiser with a distribution-free risk estimator"};
    app.require_subcommand(1);

    const std::vector<std::string> realizations = {"uwt1d", "uwt2d", "conv1d",
                                                   "conv2d", "ruwt1d", "ruwt2d"};
    const std::vector<std::string> precisions = {"float", "fixed", "fixed-full"};
    const std::vector<std::string> distributions = {"gaussian", "uniform", "laplacian"};

    DenoiseOptions d;
    CLI::App* dc = app.add_subcommand("denoise", "Denoise one image");
    dc->add_option("-i,--input", d.input, "Input image (.pgm or .png)")->required();
    dc->add_option("-o,--output", d.output, "Denoised 8-bit output image");
    dc->add_option("-s,--sigma", d.sigma, "Noise standard deviation")
        ->required()
        ->check(CLI::NonNegativeNumber);
    dc->add_option("-l,--levels", d.levels, "Decomposition levels")
        ->default_val(5)
        ->check(CLI::Range(1, 10));
    dc->add_option("-r,--realization", d.realization, "Filter-bank realization")
        ->default_val("uwt2d")
        ->check(CLI::IsMember(realizations));
    dc->add_option("--solver", d.solver, "Shrinkage solver")
        ->default_val("closed")
        ->check(CLI::IsMember({"closed", "gd"}));
    dc->add_option("--mu", d.mu, "Gradient-descent step on the normalized system")
        ->default_val(1.0 / 8192.0);
    dc->add_option("--max-iters", d.max_iters, "Gradient-descent iteration cap")->default_val(20000);
    dc->add_option("--tol", d.tol, "Gradient-descent residual tolerance")->default_val(1e-6);
    dc->add_option("--precision", d.precision, "Datapath: float, fixed (truncated words), fixed-full")
        ->default_val("float")
        ->check(CLI::IsMember(precisions));
    dc->add_option("--add-noise", d.add_noise, "Add synthetic noise of --sigma before denoising")
        ->check(CLI::IsMember(distributions));
    dc->add_option("--seed", d.seed, "Noise seed")->default_val(1);
    dc->add_flag("--quantize-input", d.quantize_input,
                 "Round the (noisy) input to 8-bit before denoising (implied by fixed precision)");
    dc->add_option("--clean", d.clean, "Clean reference for PSNR/SSIM");
    dc->add_option("--pad", d.pad, "Handling of sizes not divisible by 2^levels")
        ->default_val("none")
        ->check(CLI::IsMember({"none", "reflect"}));
    dc->add_option("--dump-subbands", d.dump_subbands, "Write the analysis subbands (raw float32)");
    dc->add_option("--report", d.report_format, "Report format")
        ->default_val("human")
        ->check(CLI::IsMember({"human", "json"}));
    dc->add_option("--report-file", d.report_file, "Write the report here instead of stdout");
    dc->add_option("--psnr-peak", d.psnr_peak, "PSNR peak source: clean reference or test image")
        ->default_val("ref")
        ->check(CLI::IsMember({"ref", "test"}));

    EvaluateOptions e;
    CLI::App* ec = app.add_subcommand("evaluate",
                                      "Add noise to clean images, denoise, and tabulate PSNR/SSIM");
    ec->add_option("images", e.images, "Clean images")->required()->expected(-1);
    ec->add_option("-d,--distribution", e.distribution, "Noise distribution")
        ->default_val("gaussian")
        ->check(CLI::IsMember(distributions));
    ec->add_option("-s,--sigma", e.sigma, "Noise standard deviation")
        ->default_val(25.0)
        ->check(CLI::NonNegativeNumber);
    ec->add_option("-l,--levels", e.levels, "Decomposition levels")
        ->default_val(5)
        ->check(CLI::Range(1, 10));
    ec->add_option("-r,--realization", e.realization, "Filter-bank realization")
        ->default_val("uwt2d")
        ->check(CLI::IsMember(realizations));
    ec->add_option("--precision", e.precision, "Datapath")
        ->default_val("float")
        ->check(CLI::IsMember(precisions));
    ec->add_option("--seed", e.seed, "Base seed; image k uses seed+k")->default_val(1);
    ec->add_flag("--no-quantize-input", e.no_quantize,
                 "Skip the default 8-bit rounding of the noisy image");
    ec->add_option("--format", e.format, "Output format")
        ->default_val("csv")
        ->check(CLI::IsMember({"csv", "json", "human"}));
    ec->add_option("--output-dir", e.output_dir, "Write denoised images here");
    ec->add_option("--report-file", e.report_file, "Write the table here instead of stdout");

    CostOptions c;
    CLI::App* cc = app.add_subcommand("cost-tables", "Print the hardware complexity tables as CSV");
    cc->add_option("--level", c.level, "Filtering level")->default_val(5)->check(CLI::Range(1, 12));
    cc->add_option("--width", c.width, "Line width in pixels")->default_val(512)
        ->check(CLI::PositiveNumber);
    cc->add_option("--word-bits", c.word_bits, "Stored word width")->default_val(16)
        ->check(CLI::Range(1, 36));

    DumpOptions u;
    CLI::App* uc = app.add_subcommand("dump-subbands", "Decompose an image and write raw subbands");
    uc->add_option("-i,--input", u.input, "Input image")->required();
    uc->add_option("-o,--output", u.output, "Subband file")->required();
    uc->add_option("-l,--levels", u.levels, "Decomposition levels")
        ->default_val(5)
        ->check(CLI::Range(1, 10));
    uc->add_option("-r,--realization", u.realization, "Filter-bank realization")
        ->default_val("uwt2d")
        ->check(CLI::IsMember(realizations));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& ex) {
        return app.exit(ex);
    } catch (const CLI::CallForAllHelp& ex) {
        return app.exit(ex);
    } catch (const CLI::CallForVersion& ex) {
        return app.exit(ex);
    } catch (const CLI::ParseError& ex) {
        app.exit(ex);
        return 2;
    }

    try {
        if (dc->parsed()) return run_denoise(d);
        if (ec->parsed()) return run_evaluate(e);
        if (cc->parsed()) return run_cost_tables(c);
        if (uc->parsed()) return run_dump_subbands(u);
        std::cerr << "error: no subcommand\n";
        return 2;
    } catch (const genre::IoError& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
}
