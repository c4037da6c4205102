#pragma once

#include <span>

namespace edgeq {

struct BatchStats {
  double mean = 0.0;
  // Standard deviation of the individual samples.
  double stddev = 0.0;
  // Standard error of the mean from non-overlapping batch means.
  double stderr_mean = 0.0;
  // Student-t 95% half-width over the batch means.
  double ci95 = 0.0;
  int batches = 0;
};

// Batch-means estimate over a correlated sample sequence. Uses `batches`
// contiguous equal batches (leading remainder dropped); falls back to fewer
// batches when the sample is too short.
BatchStats batch_means(std::span<const double> samples, int batches);

}  // namespace edgeq
