#include "edgeq/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

namespace edgeq {

BatchStats batch_means(std::span<const double> samples, int batches) {
  BatchStats out;
  const std::size_t n = samples.size();
  if (n == 0) return out;

  long double sum = 0.0L;
  for (double x : samples) sum += x;
  out.mean = static_cast<double>(sum / n);
  if (n < 2) return out;

  long double ss = 0.0L;
  for (double x : samples) ss += (x - out.mean) * (x - out.mean);
  out.stddev = static_cast<double>(std::sqrt(ss / (n - 1)));

  std::size_t nb = static_cast<std::size_t>(std::max(2, batches));
  nb = std::min(nb, n / 2);
  if (nb < 2) return out;
  const std::size_t size = n / nb;
  const std::size_t skip = n - size * nb;

  std::vector<double> means(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < size; ++i) s += samples[skip + b * size + i];
    means[b] = static_cast<double>(s / size);
  }
  long double grand = 0.0L;
  for (double m : means) grand += m;
  grand /= nb;
  long double bss = 0.0L;
  for (double m : means) bss += (m - grand) * (m - grand);
  const double sd_means = static_cast<double>(std::sqrt(bss / (nb - 1)));

  const boost::math::students_t dist(static_cast<double>(nb - 1));
  out.stderr_mean = sd_means / std::sqrt(static_cast<double>(nb));
  out.ci95 = boost::math::quantile(boost::math::complement(dist, 0.025)) * out.stderr_mean;
  out.batches = static_cast<int>(nb);
  return out;
}

}  // namespace edgeq
