#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "genre/image_io.hpp"
#include "genre/uwt.hpp"
#include "json.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

fs::path work_dir() {
    fs::path dir = fs::temp_directory_path() / "genre_cli_tests";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

CliResult run_cli(const std::string& args) {
    static int counter = 0;
    fs::path out = work_dir() / ("stdout" + std::to_string(counter) + ".txt");
    fs::path err = work_dir() / ("stderr" + std::to_string(counter) + ".txt");
    ++counter;
    std::string cmd = std::string("\"") + GENRE_CLI_PATH + "\" " + args + " > \"" + out.string() +
                      "\" 2> \"" + err.string() + "\"";
    int status = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

std::string make_clean_image(const std::string& name, int w, int h) {
    std::string path = (work_dir() / name).string();
    genre::write_pgm(path, genre::quantize_to_8bit(testutil::structured_image(w, h)));
    return path;
}

}  // namespace

TEST_CASE("cli help and usage errors") {
    CHECK(run_cli("--help").exit_code == 0);
    CHECK(run_cli("--help").out.find("denoise") != std::string::npos);
    CHECK(run_cli("denoise").exit_code == 2);            // missing required options
    CHECK(run_cli("transmogrify").exit_code == 2);       // unknown subcommand
    CHECK(run_cli("denoise -i x.pgm -s -3").exit_code == 2);  // negative sigma
    std::string clean = make_clean_image("usage.pgm", 32, 32);
    CHECK(run_cli("denoise -i \"" + clean + "\" -s 5 -r dwt97").exit_code == 2);
}

TEST_CASE("cli reports io failures with a dedicated exit code") {
    CliResult r = run_cli("denoise -i /nonexistent/in.pgm -s 5");
    CHECK(r.exit_code == 3);
    CHECK(r.err.find("error:") != std::string::npos);
}

TEST_CASE("cli cost tables") {
    CliResult r = run_cli("cost-tables");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("ruwt1d,3.75,5") != std::string::npos);
    CHECK(r.out.find("conv2d,1023,1023") != std::string::npos);
    CHECK(r.out.find("uwt2d,4,15") != std::string::npos);
    CHECK(run_cli("cost-tables --word-bits 99").exit_code == 2);
}

TEST_CASE("cli denoise end to end with a json report") {
    std::string clean = make_clean_image("clean32.pgm", 32, 32);
    std::string out = (work_dir() / "den32.png").string();
    CliResult r = run_cli("denoise -i \"" + clean + "\" -o \"" + out +
                          "\" -s 25 --add-noise gaussian --seed 3 -l 3 --clean \"" + clean +
                          "\" --report json");
    REQUIRE(r.exit_code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["width"] == 32);
    CHECK(j["levels"] == 3);
    CHECK(j["solver"]["method"] == "closed-form");
    CHECK(j["alpha"].size() == 10);
    CHECK(j["bands"][0] == "LH1");
    CHECK(j["bands"][9] == "LL3");
    CHECK(j["risk"].get<double>() > 0.0);
    CHECK(j["metrics"]["psnr_gain_db"].get<double>() > 0.0);
    genre::Image written = genre::read_image(out);
    CHECK(written.width == 32);
    CHECK(written.height == 32);
}

TEST_CASE("cli pads awkward sizes only on request") {
    std::string clean = make_clean_image("clean40.pgm", 40, 40);
    std::string out = (work_dir() / "den40.png").string();
    std::string base = "denoise -i \"" + clean + "\" -o \"" + out + "\" -s 20 --add-noise gaussian";
    CHECK(run_cli(base).exit_code == 2);
    CliResult r = run_cli(base + " --pad reflect");
    REQUIRE(r.exit_code == 0);
    genre::Image written = genre::read_image(out);
    CHECK(written.width == 40);  // cropped back after padding
    CHECK(written.height == 40);
}

TEST_CASE("cli fixed-point precision produces an 8-bit result and fixed stats") {
    std::string clean = make_clean_image("clean64.pgm", 64, 64);
    CliResult r = run_cli("denoise -i \"" + clean + "\" -s 15 --add-noise uniform --precision fixed " +
                          "-l 5 --report json");
    REQUIRE(r.exit_code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["precision"] == "fixed");
    CHECK(j["quantized_input"] == true);
    CHECK(j["fixed"]["overflow_count"] == 0);
    CHECK(j["fixed"]["max_subband_error"].get<double>() <=
          j["fixed"]["error_bound"].get<double>());
}

TEST_CASE("cli evaluate emits one csv row per image") {
    std::string clean = make_clean_image("eval32.pgm", 32, 32);
    CliResult r = run_cli("evaluate \"" + clean + "\" \"" + clean + "\" -s 10 --seed 2 -l 3");
    REQUIRE(r.exit_code == 0);
    std::istringstream lines(r.out);
    std::string header, row1, row2, extra;
    REQUIRE(std::getline(lines, header));
    CHECK(header ==
          "image,distribution,sigma,precision,input_psnr,input_ssim,output_psnr,output_ssim,psnr_gain");
    REQUIRE(std::getline(lines, row1));
    REQUIRE(std::getline(lines, row2));
    CHECK_FALSE(std::getline(lines, extra));
    CHECK(row1.find("eval32,gaussian,10.00,float,") == 0);
    // Same image, different per-image seeds: the rows must differ.
    CHECK(row1 != row2);
}

TEST_CASE("cli dump-subbands writes a readable container") {
    std::string clean = make_clean_image("dump32.pgm", 32, 32);
    std::string out = (work_dir() / "bands.uwb").string();
    CliResult r = run_cli("dump-subbands -i \"" + clean + "\" -o \"" + out + "\" -l 4 -r ruwt2d");
    REQUIRE(r.exit_code == 0);
    genre::SubbandSet bands = genre::read_subbands(out);
    CHECK(bands.levels == 4);
    CHECK(bands.bands.size() == 13);
}
