#pragma once

#include <cstdint>
#include <vector>

namespace cma {

// Exact rank-statistic AUC (Mann-Whitney) with ties credited 0.5.
// Throws DegenerateInputError unless both classes are present.
double auroc(const std::vector<double>& scores, const std::vector<uint8_t>& labels);

}  // namespace cma
