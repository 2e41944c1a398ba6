#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace snapilp::stats {

double mean(std::span<const double> xs);
// Sample standard deviation (n - 1 denominator); requires n >= 2.
double stddev(std::span<const double> xs);

// Half-width of the Student-t 95% interval for the mean; nullopt for n < 2.
std::optional<double> ci95_halfwidth(std::span<const double> xs);

// Two-sided one-sample t-test of mean 0 (a paired test on differences).
// nullopt for n < 2 or zero variance.
std::optional<double> ttest_p(std::span<const double> diffs);

// Two-sided Wilcoxon signed-rank test. Zero differences are dropped; needs at
// least 5 non-zero values. Exact null distribution when there are no ties and
// at most 50 values, else the normal approximation with tie correction.
std::optional<double> wilcoxon_p(std::span<const double> diffs);

// Average ranks (1-based), ties share the mean of their positions.
std::vector<double> ranks(std::span<const double> xs);

// Spearman correlation; nullopt for unequal lengths, n < 2 or a constant input.
std::optional<double> spearman(std::span<const double> x, std::span<const double> y);

struct Summary {
  std::size_t n = 0;
  double mean = 0.0;
  std::optional<double> ci95_halfwidth;
  std::optional<double> ttest_p;
  std::optional<double> wilcoxon_p;
  std::optional<double> spearman_rho;
};

Summary summarize(std::span<const double> diffs);

}  // namespace snapilp::stats
