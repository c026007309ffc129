#include "genre/costmodel.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace genre {

namespace {

void check_query(const CostQuery& q) {
    if (q.level < 1 || q.level > 20) throw std::invalid_argument("cost query: level out of range");
    if (q.image_width <= 0) throw std::invalid_argument("cost query: image width must be positive");
    if (q.word_bits < 1) throw std::invalid_argument("cost query: word width must be positive");
    if (q.bram_bits <= 0) throw std::invalid_argument("cost query: block capacity must be positive");
}

// Physical BRAM data lanes come in the standard ladder; a stored word
// occupies the next lane up.
int lane_bits(int word_bits) {
    for (int lane : {1, 2, 4, 9, 18, 36})
        if (word_bits <= lane) return lane;
    throw std::invalid_argument("cost query: word width exceeds 36 bits");
}

std::vector<BufferSpec> buffer_inventory(const CostQuery& q) {
    const long L = 1L << q.level;
    const long W = q.image_width;
    const long row = W;
    const bool dec = q.phase == Phase::Decomposition;
    // Line-buffer inventories of the level's vertical stage, calibrated to the
    // published block counts (width 512, 16-bit words, level 5). Where the
    // prose description of a datapath disagrees with the published table, the
    // table wins.
    switch (q.realization) {
        case Realization::Uwt1d:
            // Each vertical 2-tap filter pair shares one (L/2-1)-row delay per
            // stream; two streams on analysis, one per band pair on synthesis.
            if (dec)
                return {{"h-stream row delay", (L / 2 - 1) * row},
                        {"g-stream row delay", (L / 2 - 1) * row}};
            return {{"LL row delay", (L / 2 - 1) * row},
                    {"LH row delay", (L / 2 - 1) * row},
                    {"HL row delay", (L / 2 - 1) * row},
                    {"HH row delay", (L / 2 - 1) * row}};
        case Realization::Uwt2d:
            // One shared (L/2)-row window of the LL cascade on analysis; one
            // (L/2-1)-row delay per band on synthesis.
            if (dec) return {{"LL row window", (L / 2) * row}};
            return {{"LL row delay", (L / 2 - 1) * row},
                    {"LH row delay", (L / 2 - 1) * row},
                    {"HL row delay", (L / 2 - 1) * row},
                    {"HH row delay", (L / 2 - 1) * row}};
        case Realization::Ruwt1d:
            // Vertical recursions need the last L rows of both streams plus
            // the previous output row of each of the four recursions.
            if (dec)
                return {{"h-stream recursion history", L * row},
                        {"g-stream recursion history", L * row},
                        {"LL previous output row", row},
                        {"LH previous output row", row},
                        {"HL previous output row", row},
                        {"HH previous output row", row}};
            return {{"LL recursion history", L * row},
                    {"LH recursion history", L * row},
                    {"HL recursion history", L * row},
                    {"HH recursion history", L * row}};
        case Realization::Ruwt2d:
            // Box-sum recursion windows of L/2-1 rows; synthesis keeps one per
            // band pair of quadrant streams.
            if (dec)
                return {{"box window A", (L / 2 - 1) * row},
                        {"box window B", (L / 2 - 1) * row},
                        {"box window C", (L / 2 - 1) * row},
                        {"box window D", (L / 2 - 1) * row}};
            return {{"band 1 box window A", (L / 2 - 1) * row},
                    {"band 1 box window B", (L / 2 - 1) * row},
                    {"band 2 box window A", (L / 2 - 1) * row},
                    {"band 2 box window B", (L / 2 - 1) * row},
                    {"band 3 box window A", (L / 2 - 1) * row},
                    {"band 3 box window B", (L / 2 - 1) * row},
                    {"band 4 box window A", (L / 2 - 1) * row},
                    {"band 4 box window B", (L / 2 - 1) * row}};
        case Realization::ConvCombined1d:
            // Not part of the published block table; the estimate assumes a
            // full (L-1)-row vertical window per stream.
            if (dec)
                return {{"h-stream row window", (L - 1) * row},
                        {"g-stream row window", (L - 1) * row}};
            return {{"LL row window", (L - 1) * row},
                    {"LH row window", (L - 1) * row},
                    {"HL row window", (L - 1) * row},
                    {"HH row window", (L - 1) * row}};
        case Realization::ConvCombined2d:
            if (dec) return {{"input row window", (L - 1) * row}};
            return {{"LL row window", (L - 1) * row},
                    {"LH row window", (L - 1) * row},
                    {"HL row window", (L - 1) * row},
                    {"HH row window", (L - 1) * row}};
    }
    throw std::invalid_argument("unknown realization");
}

std::string format_number(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

double additions_per_pixel(const CostQuery& q) {
    check_query(q);
    const double L = static_cast<double>(1L << q.level);
    const bool dec = q.phase == Phase::Decomposition;
    switch (q.realization) {
        case Realization::Uwt1d:
            // Six 2-tap filters per level: four outputs on analysis, one
            // jointly reconstructed output on synthesis.
            return dec ? 1.5 : 6.0;
        case Realization::Uwt2d:
            // Analysis shares the quadrant pair sums (8 adds / 4 outputs);
            // synthesis cannot share across distinct input bands.
            return dec ? 2.0 : 12.0;
        case Realization::ConvCombined1d:
            // Six L-tap filters on analysis; row + column taps per band on
            // synthesis.
            return dec ? 1.5 * (L - 1.0) : 2.0 * (L - 1.0);
        case Realization::ConvCombined2d:
            return L * L - 1.0;
        case Realization::Ruwt1d:
            // Refinement recursion costs 2, wavelet 3: (2+3) + (2+3+2+3) over
            // four outputs on analysis; per-band average on synthesis.
            return dec ? 3.75 : 5.0;
        case Realization::Ruwt2d:
            // Box recursions (4) + per-band quadrant combine (3 each).
            return dec ? 4.0 : 7.0;
    }
    throw std::invalid_argument("unknown realization");
}

BramEstimate bram_count(const CostQuery& q) {
    check_query(q);
    BramEstimate est;
    est.inventory = buffer_inventory(q);
    const double words_per_block =
        static_cast<double>(q.bram_bits) / static_cast<double>(lane_bits(q.word_bits));
    for (const BufferSpec& b : est.inventory) {
        if (b.entries <= 0) continue;
        const double blocks = static_cast<double>(b.entries) / words_per_block;
        est.blocks += blocks;
        est.physical_blocks += static_cast<int>(std::ceil(blocks - 1e-12));
    }
    return est;
}

std::string additions_table_csv(int level) {
    const Realization rs[] = {Realization::Uwt1d,          Realization::Uwt2d,
                              Realization::ConvCombined1d, Realization::ConvCombined2d,
                              Realization::Ruwt1d,         Realization::Ruwt2d};
    std::ostringstream os;
    os << "realization,decomposition_adds_per_pixel,recomposition_adds_per_pixel\n";
    for (Realization r : rs) {
        CostQuery qd{r, Phase::Decomposition, level};
        CostQuery qr{r, Phase::Recomposition, level};
        os << realization_name(r) << "," << format_number(additions_per_pixel(qd)) << ","
           << format_number(additions_per_pixel(qr)) << "\n";
    }
    return os.str();
}

std::string bram_table_csv(int level, int image_width, int word_bits) {
    const Realization rs[] = {Realization::Uwt1d, Realization::Uwt2d, Realization::Ruwt1d,
                              Realization::Ruwt2d};
    std::ostringstream os;
    os << "realization,decomposition_brams,recomposition_brams\n";
    for (Realization r : rs) {
        CostQuery qd{r, Phase::Decomposition, level, image_width, word_bits};
        CostQuery qr{r, Phase::Recomposition, level, image_width, word_bits};
        os << realization_name(r) << "," << format_number(bram_count(qd).blocks) << ","
           << format_number(bram_count(qr).blocks) << "\n";
    }
    return os.str();
}

}  // namespace genre
