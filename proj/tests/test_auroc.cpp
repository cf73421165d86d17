#include <doctest.h>

#include <algorithm>
#include <random>

#include "cma/errors.hpp"
#include "cma/eval/auroc.hpp"

namespace {

// O(n^2) pairwise oracle: fraction of (positive, negative) pairs ranked
// correctly, ties counted as half.
double pairwise_auroc(const std::vector<double>& scores, const std::vector<uint8_t>& labels) {
    double wins = 0;
    int64_t pairs = 0;
    for (size_t i = 0; i < scores.size(); ++i) {
        if (!labels[i]) continue;
        for (size_t j = 0; j < scores.size(); ++j) {
            if (labels[j]) continue;
            ++pairs;
            if (scores[i] > scores[j]) wins += 1.0;
            else if (scores[i] == scores[j]) wins += 0.5;
        }
    }
    return wins / static_cast<double>(pairs);
}

}  // namespace

TEST_CASE("perfect separation and perfect inversion") {
    std::vector<double> scores = {0.1, 0.2, 0.8, 0.9};
    std::vector<uint8_t> labels = {0, 0, 1, 1};
    CHECK(cma::auroc(scores, labels) == 1.0);
    std::vector<uint8_t> inverted = {1, 1, 0, 0};
    CHECK(cma::auroc(scores, inverted) == 0.0);
}

TEST_CASE("all-equal scores give 0.5 by tie handling") {
    std::vector<double> scores = {0.3, 0.3, 0.3, 0.3};
    std::vector<uint8_t> labels = {0, 1, 0, 1};
    CHECK(cma::auroc(scores, labels) == 0.5);
}

TEST_CASE("single-class input is rejected") {
    std::vector<double> scores = {0.1, 0.2};
    CHECK_THROWS_AS(cma::auroc(scores, {1, 1}), cma::DegenerateInputError);
    CHECK_THROWS_AS(cma::auroc(scores, {0, 0}), cma::DegenerateInputError);
    CHECK_THROWS_AS(cma::auroc({}, {}), cma::DegenerateInputError);
}

TEST_CASE("rank implementation matches the pairwise oracle exactly, ties included") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        int n = 2 + static_cast<int>(rng() % 199);
        std::vector<double> scores(n);
        std::vector<uint8_t> labels(n);
        // quantize scores so ties happen frequently
        int levels = 1 + static_cast<int>(rng() % 20);
        bool has_pos = false, has_neg = false;
        for (int i = 0; i < n; ++i) {
            scores[i] = std::floor(u(rng) * levels) / levels;
            labels[i] = u(rng) < 0.4;
            (labels[i] ? has_pos : has_neg) = true;
        }
        if (!has_pos) labels[0] = 1;
        if (!has_neg) labels[n - 1] = 0;
        CHECK(cma::auroc(scores, labels) == pairwise_auroc(scores, labels));
    }
}

TEST_CASE("auroc is invariant under strictly monotone score transforms") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> scores(60);
    std::vector<uint8_t> labels(60);
    for (int i = 0; i < 60; ++i) {
        scores[i] = u(rng);
        labels[i] = i % 3 == 0;
    }
    double base = cma::auroc(scores, labels);
    std::vector<double> warped(60);
    for (int i = 0; i < 60; ++i) warped[i] = std::exp(3.0 * scores[i]) - 2.0;
    CHECK(cma::auroc(warped, labels) == base);
}

TEST_CASE("mismatched lengths are rejected") {
    CHECK_THROWS_AS(cma::auroc({0.1, 0.2}, {1}), cma::DimensionError);
}
