#include "snapilp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace snapilp::stats {

double mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean of an empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double stddev(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("stddev needs two values");
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

std::optional<double> ci95_halfwidth(std::span<const double> xs) {
  if (xs.size() < 2) return std::nullopt;
  const boost::math::students_t dist(static_cast<double>(xs.size() - 1));
  const double t = boost::math::quantile(dist, 0.975);
  return t * stddev(xs) / std::sqrt(static_cast<double>(xs.size()));
}

std::optional<double> ttest_p(std::span<const double> diffs) {
  if (diffs.size() < 2) return std::nullopt;
  const double s = stddev(diffs);
  if (s == 0.0) return std::nullopt;
  const double t = mean(diffs) / (s / std::sqrt(static_cast<double>(diffs.size())));
  const boost::math::students_t dist(static_cast<double>(diffs.size() - 1));
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t))));
}

std::vector<double> ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return xs[a] < xs[b]; });
  std::vector<double> r(xs.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double avg = (static_cast<double>(i + j) / 2.0) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

std::optional<double> wilcoxon_p(std::span<const double> diffs) {
  std::vector<double> nz;
  for (double d : diffs)
    if (d != 0.0) nz.push_back(d);
  const std::size_t n = nz.size();
  if (n < 5) return std::nullopt;

  std::vector<double> mag(n);
  for (std::size_t i = 0; i < n; ++i) mag[i] = std::fabs(nz[i]);
  const auto r = ranks(mag);
  double r_plus = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (nz[i] > 0) r_plus += r[i];

  // Tie groups among the magnitudes.
  std::vector<double> sorted = mag;
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  bool ties = false;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    if (t > 1) ties = true;
    tie_term += t * t * t - t;
    i = j + 1;
  }

  const double nd = static_cast<double>(n);
  if (!ties && n <= 50) {
    // counts[s] = number of sign assignments with positive rank sum s.
    const std::size_t max_sum = n * (n + 1) / 2;
    std::vector<double> counts(max_sum + 1, 0.0);
    counts[0] = 1.0;
    for (std::size_t k = 1; k <= n; ++k) {
      for (std::size_t s = max_sum; s >= k; --s) counts[s] += counts[s - k];
    }
    const double total = std::ldexp(1.0, static_cast<int>(n));
    const auto t_stat = static_cast<std::size_t>(std::min(r_plus, nd * (nd + 1) / 2 - r_plus));
    double tail = 0.0;
    for (std::size_t s = 0; s <= t_stat; ++s) tail += counts[s];
    return std::min(1.0, 2.0 * tail / total);
  }

  const double mu = nd * (nd + 1) / 4.0;
  const double var = nd * (nd + 1) * (2 * nd + 1) / 24.0 - tie_term / 48.0;
  if (var <= 0) return std::nullopt;
  const double z = (r_plus - mu) / std::sqrt(var);
  const boost::math::normal norm;
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(norm, std::fabs(z))));
}

std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) return std::nullopt;
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double mx = mean(rx);
  const double my = mean(ry);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

Summary summarize(std::span<const double> diffs) {
  Summary s;
  s.n = diffs.size();
  if (diffs.empty()) return s;
  s.mean = mean(diffs);
  s.ci95_halfwidth = ci95_halfwidth(diffs);
  s.ttest_p = ttest_p(diffs);
  s.wilcoxon_p = wilcoxon_p(diffs);
  return s;
}

}  // namespace snapilp::stats
