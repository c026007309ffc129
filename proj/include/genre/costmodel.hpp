#pragma once

#include <string>
#include <vector>

#include "genre/uwt.hpp"

namespace genre {

enum class Phase { Decomposition, Recomposition };

struct CostQuery {
    Realization realization = Realization::Uwt2d;
    Phase phase = Phase::Decomposition;
    int level = 5;              // filtering level; L = 2^level
    int image_width = 512;      // line-buffer width in pixels
    int word_bits = 16;         // stored word width
    int bram_bits = 36 * 1024;  // physical block capacity
};

// Closed-form average additions per output pixel of the given filtering
// level. Steady-state filter additions only (recursion warm-up excluded);
// on the synthesis side the cross-band combining adders are not counted.
double additions_per_pixel(const CostQuery& q);

struct BufferSpec {
    std::string role;
    long entries;  // words of word_bits each
};

// Block-RAM demand of the level's line buffers. `blocks` is the exact
// rational total (entries mapped to the standard physical lane widths
// 1/2/4/9/18/36); `physical_blocks` rounds each buffer up to whole blocks.
struct BramEstimate {
    double blocks = 0.0;
    int physical_blocks = 0;
    std::vector<BufferSpec> inventory;
};

BramEstimate bram_count(const CostQuery& q);

// CSV renderings of the two complexity tables (all realizations x phases).
std::string additions_table_csv(int level = 5);
std::string bram_table_csv(int level = 5, int image_width = 512, int word_bits = 16);

}  // namespace genre
