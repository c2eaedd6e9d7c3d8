#include "ssfamon/limits.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ssfamon/common.hpp"

namespace ssfamon {

ControlLimit kde_limit(const std::vector<double>& x, double alpha) {
  if (!(alpha > 0.5 && alpha < 1.0)) throw UsageError("limit alpha must be in (0.5, 1)");
  if (x.size() < 30) throw DataError("control limit needs at least 30 samples, got " + std::to_string(x.size()));
  for (double v : x)
    if (!std::isfinite(v)) throw DataError("non-finite statistic value in control limit estimation");
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1));
  const auto [mnIt, mxIt] = std::minmax_element(x.begin(), x.end());
  const double mn = *mnIt, mx = *mxIt;

  ControlLimit lim;
  lim.alpha = alpha;
  if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) {
    std::vector<double> s(x);
    std::sort(s.begin(), s.end());
    size_t k = static_cast<size_t>(std::ceil(alpha * n)) - 1;
    lim.value = s[std::min(k, s.size() - 1)];
    lim.bandwidth = 0.0;
    return lim;
  }
  const double h = 1.06 * sd * std::pow(n, -0.2);
  const double inv = 1.0 / (h * std::sqrt(2.0));
  auto cdf = [&](double c) {
    double acc = 0.0;
    for (double v : x) acc += 0.5 * std::erfc(-(c - v) * inv);
    return acc / n;
  };
  double lo = mn - 3 * h, hi = mx + 3 * h;
  while (hi - lo > 1e-7 * std::max(1.0, std::abs(hi))) {
    double mid = 0.5 * (lo + hi);
    if (cdf(mid) >= alpha)
      hi = mid;
    else
      lo = mid;
  }
  lim.value = std::max(hi, mn);
  lim.bandwidth = h;
  return lim;
}

std::optional<bool> evaluate(const std::optional<double>& stat, const ControlLimit& limit) {
  if (!stat) return std::nullopt;
  return *stat > limit.value;
}

}  // namespace ssfamon
