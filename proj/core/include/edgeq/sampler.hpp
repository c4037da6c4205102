#pragma once

#include "edgeq/queueing.hpp"
#include "edgeq/rng.hpp"

namespace edgeq {

enum class SampleFamily {
  Deterministic,
  Exponential,
  // Two atoms matched to (mean, variance); the lower atom sits at 0 when
  // the squared coefficient of variation exceeds 1.
  TwoPoint,
  // Balanced-means two-phase hyperexponential; needs scv >= 1.
  HyperExponential,
};

// Shape of a nonnegative distribution with unit mean; callers scale draws
// by the mean they need, which lets NIC stations rescale by the bandwidth
// in effect when service starts.
class Sampler {
 public:
  Sampler() = default;
  Sampler(SampleFamily family, double scv);

  static Sampler deterministic() { return {SampleFamily::Deterministic, 0.0}; }
  static Sampler exponential() { return {SampleFamily::Exponential, 1.0}; }
  // Maps a service distribution onto a family; General uses `general`.
  static Sampler for_service(const ServiceDistribution& service,
                             SampleFamily general = SampleFamily::TwoPoint);
  // Chooses the family from the moments alone: 0 -> deterministic,
  // 1 -> exponential, else `general`.
  static Sampler for_moments(double mean, double variance,
                             SampleFamily general = SampleFamily::TwoPoint);

  double unit(Rng& rng) const;
  double draw(Rng& rng, double mean) const { return mean * unit(rng); }

  SampleFamily family() const { return family_; }
  double scv() const { return scv_; }

 private:
  SampleFamily family_ = SampleFamily::Deterministic;
  double scv_ = 0.0;
  // TwoPoint: P(low) = p_, atoms low_ and high_.
  // HyperExponential: phase 1 with probability p_, phase means low_, high_.
  double p_ = 1.0;
  double low_ = 1.0;
  double high_ = 1.0;
};

}  // namespace edgeq
