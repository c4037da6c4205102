#include "edgeq/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "edgeq/error.hpp"

namespace edgeq {

Sampler::Sampler(SampleFamily family, double scv) : family_(family), scv_(scv) {
  if (!std::isfinite(scv) || scv < 0.0)
    throw Error(ErrorCode::InvalidArgument, "squared coefficient of variation must be >= 0");
  switch (family) {
    case SampleFamily::Deterministic:
      scv_ = 0.0;
      break;
    case SampleFamily::Exponential:
      scv_ = 1.0;
      break;
    case SampleFamily::TwoPoint: {
      // Unit mean, standard deviation sigma.
      const double sigma = std::sqrt(scv);
      p_ = std::max(0.5, scv / (1.0 + scv));
      low_ = std::max(0.0, 1.0 - sigma * std::sqrt((1.0 - p_) / p_));
      high_ = 1.0 + sigma * std::sqrt(p_ / (1.0 - p_));
      break;
    }
    case SampleFamily::HyperExponential: {
      if (scv < 1.0)
        throw Error(ErrorCode::InvalidArgument, "hyperexponential needs scv >= 1");
      p_ = 0.5 * (1.0 + std::sqrt((scv - 1.0) / (scv + 1.0)));
      low_ = 1.0 / (2.0 * p_);
      high_ = 1.0 / (2.0 * (1.0 - p_));
      break;
    }
  }
}

Sampler Sampler::for_service(const ServiceDistribution& service, SampleFamily general) {
  switch (service.kind) {
    case ServiceKind::Deterministic: return deterministic();
    case ServiceKind::Exponential: return exponential();
    case ServiceKind::General: break;
  }
  return for_moments(service.mean_s, service.variance_s2, general);
}

Sampler Sampler::for_moments(double mean, double variance, SampleFamily general) {
  if (!(mean > 0.0)) return deterministic();
  const double scv = variance / (mean * mean);
  if (scv == 0.0) return deterministic();
  if (std::abs(scv - 1.0) <= 1e-12 && general != SampleFamily::HyperExponential) return exponential();
  if (general == SampleFamily::HyperExponential && scv < 1.0)
    return Sampler(SampleFamily::TwoPoint, scv);
  return Sampler(general, scv);
}

double Sampler::unit(Rng& rng) const {
  switch (family_) {
    case SampleFamily::Deterministic:
      return 1.0;
    case SampleFamily::Exponential:
      return rng.exponential(1.0);
    case SampleFamily::TwoPoint:
      return rng.uniform() < p_ ? low_ : high_;
    case SampleFamily::HyperExponential: {
      const double phase_mean = rng.uniform() < p_ ? low_ : high_;
      return rng.exponential(phase_mean);
    }
  }
  return 1.0;
}

}  // namespace edgeq
