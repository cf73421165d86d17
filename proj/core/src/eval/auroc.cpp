#include "cma/eval/auroc.hpp"

#include <algorithm>
#include <numeric>

#include "cma/errors.hpp"

namespace cma {

double auroc(const std::vector<double>& scores, const std::vector<uint8_t>& labels) {
    if (scores.size() != labels.size()) throw DimensionError("auroc: size mismatch");
    const size_t n = scores.size();
    size_t pos = 0;
    for (auto l : labels) pos += l ? 1 : 0;
    const size_t neg = n - pos;
    if (pos == 0 || neg == 0) throw DegenerateInputError("auroc: needs both classes");

    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return scores[a] < scores[b]; });

    // average ranks within tie groups, accumulate positive rank sum
    double rank_sum_pos = 0.0;
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (size_t k = i; k <= j; ++k)
            if (labels[order[k]]) rank_sum_pos += avg_rank;
        i = j + 1;
    }
    const double u = rank_sum_pos - 0.5 * static_cast<double>(pos) * (pos + 1);
    return u / (static_cast<double>(pos) * static_cast<double>(neg));
}

}  // namespace cma
