#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tlra/tensor.hpp"

namespace tlra {

// Synthetic inputs, deterministic per seed.  Spec strings:
//   gaussian(8x8x8,1)               iid standard normal entries
//   lowrank(8x8x8,2x2x2,0.01,1)     core x frames plus noise of level sigma
//   composite-cur(6x6x6,2,1)        multilinear structure that nested
//                                   skeleton sampling reconstructs exactly
struct GeneratorSpec {
    enum class Kind { gaussian, lowrank, composite_cur };
    Kind kind = Kind::gaussian;
    std::vector<int> shape;
    std::vector<int> ranks;   // lowrank only
    double noise = 0.0;       // lowrank only
    int k = 0;                // composite_cur only
    std::uint64_t seed = 0;
};

GeneratorSpec parse_generator_spec(const std::string& text);

Tensor generate(const GeneratorSpec& spec);
Tensor generate(const std::string& spec);

}  // namespace tlra
