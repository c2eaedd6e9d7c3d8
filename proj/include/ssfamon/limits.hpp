#pragma once

#include <optional>
#include <vector>

namespace ssfamon {

struct ControlLimit {
  double value = 0.0;
  double alpha = 0.95;
  double bandwidth = 0.0;  // 0 when the empirical quantile fallback was used
};

// Smallest c with Gaussian-KDE CDF(c) >= alpha, Silverman bandwidth.
ControlLimit kde_limit(const std::vector<double>& samples, double alpha);

std::optional<bool> evaluate(const std::optional<double>& stat, const ControlLimit& limit);

}  // namespace ssfamon
