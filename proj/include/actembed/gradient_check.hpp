#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "actembed/autoencoder.hpp"

namespace actembed::autoencoder {

struct GradCheckCase {
    Mode mode = Mode::Joint;
    std::uint64_t seed = 0;
    std::vector<Index> shape;
    Scalar max_rel_error = 0.0;
    bool passed = false;
};

struct GradCheckReport {
    std::vector<GradCheckCase> cases;
    Scalar worst = 0.0;
    bool passed = false;
};

// Compares the analytic gradient against central finite differences
// (step 1e-5) on `num_networks` random small networks, all four modes each.
// An absolute difference under 1e-8 always passes; otherwise the relative
// error must stay at or below `tolerance`.
GradCheckReport check_gradients(int num_networks = 5, Scalar tolerance = 1e-5,
                                std::uint64_t seed = 1);

}  // namespace actembed::autoencoder
