#pragma once

// Independent reference computations for the unit and acceptance tests.

#include <random>

#include <aqualoc/liegroup.hpp>

namespace aqualoc::testing {

// Truncated power series sum_{k=0..terms} A^k / k!.
template <typename M>
M series_exp(const M& a, int terms = 20) {
  M out = M::Identity();
  M term = M::Identity();
  for (int k = 1; k <= terms; ++k) {
    term = (term * a / static_cast<double>(k)).eval();
    out += term;
  }
  return out;
}

// sum_{k=0..terms} skew(w)^k / (k+1)!
inline Mat3 series_left_jacobian(const Vec3& w, int terms = 20) {
  Mat3 out = Mat3::Identity();
  Mat3 term = Mat3::Identity();
  for (int k = 1; k <= terms; ++k) {
    term = (term * skew(w) / static_cast<double>(k + 1)).eval();
    out += term;
  }
  return out;
}

// Posterior variance of a scalar Kalman update.
inline double kalman_variance(double prior, double noise) { return prior - prior * prior / (prior + noise); }

// Posterior mean of a scalar Kalman update.
inline double kalman_mean(double prior_mean, double prior_var, double measured, double noise) {
  return prior_mean + prior_var / (prior_var + noise) * (measured - prior_mean);
}

class Random {
 public:
  explicit Random(std::uint64_t seed = 20240611) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  Vec3 vec3(double scale = 1.0) { return Vec3(uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale)); }

  TangentVector tangent(double scale = 1.0) {
    TangentVector xi;
    for (int i = 0; i < 9; ++i) xi(i) = uniform(-scale, scale);
    return xi;
  }

  // Tangent vector with Euclidean norm at most `max_norm`.
  TangentVector tangent_in_ball(double max_norm) {
    TangentVector xi = tangent();
    return xi.normalized() * uniform(0.0, max_norm);
  }

  GroupElement element(double scale = 5.0) {
    GroupElement x;
    x.R = so3_exp(vec3(3.0));
    x.v = vec3(scale);
    x.p = vec3(scale);
    return x;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace aqualoc::testing
