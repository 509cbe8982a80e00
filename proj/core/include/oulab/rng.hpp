#pragma once

#include <cmath>
#include <cstdint>

namespace oulab::rng {

/// splitmix64 finalizer; good avalanche, cheap.
inline std::uint64_t mix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Stateless counter hash of (seed, path, step, coord, channel).
/// Channel 0 carries the per-coordinate Gaussian increments; other channels
/// are reserved for auxiliary draws (e.g. bridge crossing uniforms), so that
/// enabling a feature never perturbs the main noise stream.
inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t path, std::uint64_t step,
                                  std::uint32_t coord, std::uint32_t channel) {
  std::uint64_t k = mix(seed ^ 0x6A09E667F3BCC909ULL);
  k = mix(k ^ (path * 0xA24BAED4963EE407ULL));
  k = mix(k ^ (step * 0x9FB21C651E98DF25ULL));
  k = mix(k ^ (((static_cast<std::uint64_t>(coord) << 32) | channel) * 0xD6E8FEB86659FD93ULL));
  return k;
}

/// Uniform in the open interval (0,1).
inline double to_uniform(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Inverse normal CDF (Wichura, algorithm AS241 PPND16); |error| ~ 1e-16.
inline double inverse_normal_cdf(double p) {
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) *
                    r +
                4.5921953931549871457e+4) *
                   r +
               1.3731693765509461125e+4) *
                  r +
              1.9715909503065514427e+3) *
                 r +
             1.3314166789178437745e+2) *
                r +
            3.3871328727963666080e+0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) *
                    r +
                2.1213794301586595867e+4) *
                   r +
               5.3941960214247511077e+3) *
                  r +
              6.8718700749205790830e+2) *
                 r +
             4.2313330701600911252e+1) *
                r +
            1.0);
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) *
                   r +
               1.27045825245236838258e+0) *
                  r +
              3.64784832476320460504e+0) *
                 r +
             5.76949722146069140550e+0) *
                r +
            4.63033784615654529590e+0) *
               r +
           1.42343711074968357734e+0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) *
                   r +
               1.48103976427480074590e-1) *
                  r +
              6.89767334985100004550e-1) *
                 r +
             1.67638483018380384940e+0) *
                r +
            2.05319162663775882187e+0) *
               r +
           1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) *
                   r +
               2.65321895265761230930e-2) *
                  r +
              2.96560571828504891230e-1) *
                 r +
             1.78482653991729133580e+0) *
                r +
            5.46378491116411436990e+0) *
               r +
           6.65790464350110377720e+0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) *
                   r +
               7.86869131145613259100e-4) *
                  r +
              1.48753612908506148525e-2) *
                 r +
             1.36929880922735805310e-1) *
                r +
            5.99832206555887937690e-1) *
               r +
           1.0);
  }
  return (q < 0.0) ? -val : val;
}

/// Deterministic stream of standard normals / uniforms indexed by counters.
struct CounterStream {
  std::uint64_t seed = 0;

  double uniform(std::uint64_t path, std::uint64_t step, std::uint32_t coord,
                 std::uint32_t channel = 0) const {
    return to_uniform(counter_hash(seed, path, step, coord, channel));
  }

  double normal(std::uint64_t path, std::uint64_t step, std::uint32_t coord,
                std::uint32_t channel = 0) const {
    return inverse_normal_cdf(uniform(path, step, coord, channel));
  }
};

/// Small sequential generator for sampling tasks (band/boundary exploration).
class Sequence {
 public:
  explicit Sequence(std::uint64_t seed) : state_(mix(seed ^ 0xB5297A4D3C2C9FE5ULL)) {}
  std::uint64_t next_bits() {
    state_ = state_ + 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }
  double uniform() { return to_uniform(next_bits()); }
  double normal() { return inverse_normal_cdf(uniform()); }

 private:
  std::uint64_t state_;
};

}  // namespace oulab::rng
