#include "oulab/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <thread>

#include "oulab/rng.hpp"

namespace oulab {

void PathConfig::validate() const {
  if (!(step > 0.0)) throw Error("PathConfig: step must be positive");
  if (!(t_max >= step)) throw Error("PathConfig: t_max must be >= step");
  if (paths < 1) throw Error("PathConfig: need at least one path");
}

void ou_step(const SpectralGaussian& measure, std::span<double> x, double h,
             std::span<const double> noise) {
  if (!(h > 0.0)) throw Error("ou_step: step must be positive");
  const double decay = std::exp(-0.5 * h);
  const double var = 1.0 - std::exp(-h);
  for (size_t k = 0; k < x.size(); ++k) {
    x[k] = decay * x[k] + std::sqrt(measure.eigenvalue(static_cast<int>(k)) * var) * noise[k];
  }
}

namespace {

void parallel_paths(long paths, int threads, const std::function<void(long)>& body) {
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = std::min<long>(workers, paths);
  if (workers == 1) {
    for (long p = 0; p < paths; ++p) body(p);
    return;
  }
  std::atomic<long> next{0};
  const long chunk = std::max<long>(64, paths / (workers * 16));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      while (true) {
        const long begin = next.fetch_add(chunk);
        if (begin >= paths) break;
        const long end = std::min(begin + chunk, paths);
        for (long p = begin; p < end; ++p) body(p);
      }
    });
  }
  for (auto& t : pool) t.join();
}

struct Engine {
  const SpectralGaussian& measure;
  const LevelSetDomain& domain;
  const PathConfig& config;
  int n = 0;        // evolving coordinates
  int ambient = 0;  // domain's ambient dimension (state is padded to it)
  double decay = 0.0;
  std::vector<double> sigma;  // per-coordinate step standard deviation
  double bridge_var_scale = 0.0;

  Engine(const SpectralGaussian& m, const LevelSetDomain& d, const PathConfig& c,
         size_t point_dim)
      : measure(m), domain(d), config(c) {
    config.validate();
    n = config.dimension > 0 ? config.dimension : static_cast<int>(point_dim);
    ambient = d.dimension();  // the state is padded with zeros up to the view
    if (n < 1 || n > ambient || n > m.dimension()) {
      throw DimensionMismatch("mc: truncation dimension out of range");
    }
    decay = std::exp(-0.5 * config.step);
    const double var = 1.0 - std::exp(-config.step);
    sigma.resize(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) sigma[static_cast<size_t>(k)] = std::sqrt(m.eigenvalue(k) * var);
    bridge_var_scale = var;
  }

  void start_state(std::span<const double> x, std::vector<double>& state) const {
    state.assign(static_cast<size_t>(ambient), 0.0);
    for (int k = 0; k < n && k < static_cast<int>(x.size()); ++k) {
      state[static_cast<size_t>(k)] = x[k];
    }
  }

  void advance(std::vector<double>& state, long path, long step_index) const {
    const rng::CounterStream stream{config.seed};
    for (int k = 0; k < n; ++k) {
      const double z = stream.normal(static_cast<std::uint64_t>(path),
                                     static_cast<std::uint64_t>(step_index),
                                     static_cast<std::uint32_t>(k));
      state[static_cast<size_t>(k)] =
          decay * state[static_cast<size_t>(k)] + sigma[static_cast<size_t>(k)] * z;
    }
  }

  /// P(the continuous path crossed g = 0 inside the step), frozen-coefficient
  /// Brownian bridge on the scalar process g(X).
  double bridge_cross_probability(std::span<const double> prev_state, double g_prev, double g_cur,
                                  std::vector<double>& grad_buf) const {
    grad_buf.resize(static_cast<size_t>(ambient));
    domain.gradient(prev_state, grad_buf);
    double var_g = 0.0;
    for (int k = 0; k < n; ++k) {
      var_g += measure.eigenvalue(k) * grad_buf[static_cast<size_t>(k)] * grad_buf[static_cast<size_t>(k)];
    }
    var_g *= bridge_var_scale;
    if (var_g <= 0.0) return 0.0;
    return std::exp(-2.0 * g_prev * g_cur / var_g);
  }
};

}  // namespace

McEstimate killed_semigroup(const SpectralGaussian& measure, const LevelSetDomain& domain,
                            const PathField& F, double t, std::span<const double> x,
                            const PathConfig& config) {
  Engine eng(measure, domain, config, x.size());
  if (!(t > 0.0) || t > config.t_max + 1e-12) {
    throw Error("killed_semigroup: need 0 < t <= t_max");
  }
  {
    std::vector<double> s0;
    eng.start_state(x, s0);
    if (domain.value(s0) >= 0.0) {
      throw StartOutsideDomain("killed_semigroup: start point not in the domain");
    }
  }
  long full_steps = static_cast<long>(std::floor(t / config.step + 1e-12));
  double last = t - static_cast<double>(full_steps) * config.step;
  if (last < 1e-12 * config.step) last = 0.0;

  std::vector<double> vals(static_cast<size_t>(config.paths));
  parallel_paths(config.paths, config.threads, [&](long p) {
    std::vector<double> state, grad_buf;
    eng.start_state(x, state);
    const rng::CounterStream stream{config.seed};
    double g_prev = domain.value(state);
    bool alive = true;
    long j = 0;
    for (; j < full_steps && alive; ++j) {
      eng.advance(state, p, j);
      const double g = domain.value(state);
      if (g > 0.0) {
        alive = false;
      } else if (config.bridge) {
        const double pc = eng.bridge_cross_probability(state, g_prev, g, grad_buf);
        if (stream.uniform(static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(j), 0, 1) < pc)
          alive = false;
      }
      g_prev = g;
    }
    if (alive && last > 0.0) {
      const double d = std::exp(-0.5 * last);
      const double v = 1.0 - std::exp(-last);
      for (int k = 0; k < eng.n; ++k) {
        const double z = stream.normal(static_cast<std::uint64_t>(p),
                                       static_cast<std::uint64_t>(full_steps),
                                       static_cast<std::uint32_t>(k));
        state[static_cast<size_t>(k)] = d * state[static_cast<size_t>(k)] +
                                        std::sqrt(measure.eigenvalue(k) * v) * z;
      }
      if (domain.value(state) > 0.0) alive = false;
    }
    vals[static_cast<size_t>(p)] = alive ? F(state) : 0.0;
  });

  McEstimate est;
  est.paths = config.paths;
  double sum = 0.0, sumsq = 0.0;
  for (double v : vals) {
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / static_cast<double>(config.paths);
  est.estimate = mean;
  if (config.paths > 1) {
    const double var =
        std::max(0.0, (sumsq - sum * mean) / static_cast<double>(config.paths - 1));
    est.std_error = std::sqrt(var / static_cast<double>(config.paths));
  }
  return est;
}

McEstimate resolvent_mc(const SpectralGaussian& measure, const LevelSetDomain& domain,
                        const PathField& F, double lambda, std::span<const double> x,
                        const PathConfig& config, ExitEnsemble* ensemble) {
  if (!(lambda > 0.0)) throw NonPositiveLambda("resolvent_mc: lambda must be positive");
  Engine eng(measure, domain, config, x.size());
  {
    std::vector<double> s0;
    eng.start_state(x, s0);
    if (domain.value(s0) >= 0.0) {
      throw StartOutsideDomain("resolvent_mc: start point not in the domain");
    }
  }
  const long nsteps = static_cast<long>(std::llround(config.t_max / config.step));
  const double h = config.step;

  // Discount factors shared across paths.
  std::vector<double> discount(static_cast<size_t>(nsteps) + 1);
  for (long j = 0; j <= nsteps; ++j) {
    discount[static_cast<size_t>(j)] = std::exp(-lambda * static_cast<double>(j) * h);
  }

  std::vector<double> integrals(static_cast<size_t>(config.paths));
  std::vector<double> taus(static_cast<size_t>(config.paths));
  std::vector<unsigned char> censored(static_cast<size_t>(config.paths));
  std::vector<double> max_abs_f(static_cast<size_t>(config.paths));

  parallel_paths(config.paths, config.threads, [&](long p) {
    std::vector<double> state, grad_buf;
    eng.start_state(x, state);
    const rng::CounterStream stream{config.seed};
    double g_prev = domain.value(state);
    double integrand_prev = F(state);  // discount(0) = 1
    double f_peak = std::abs(integrand_prev);
    double integral = 0.0;
    bool alive = true;
    long j = 0;
    for (; j < nsteps; ++j) {
      eng.advance(state, p, j);
      const double f_val = F(state);
      f_peak = std::max(f_peak, std::abs(f_val));
      const double integrand = discount[static_cast<size_t>(j + 1)] * f_val;
      integral += 0.5 * h * (integrand_prev + integrand);
      integrand_prev = integrand;
      const double g = domain.value(state);
      if (g > 0.0) {
        alive = false;
        ++j;
        break;
      }
      if (config.bridge) {
        const double pc = eng.bridge_cross_probability(state, g_prev, g, grad_buf);
        if (stream.uniform(static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(j), 0, 1) < pc) {
          alive = false;
          ++j;
          break;
        }
      }
      g_prev = g;
    }
    integrals[static_cast<size_t>(p)] = integral;
    taus[static_cast<size_t>(p)] = static_cast<double>(j) * h;
    censored[static_cast<size_t>(p)] = alive ? 1 : 0;
    max_abs_f[static_cast<size_t>(p)] = f_peak;
  });

  McEstimate est;
  est.paths = config.paths;
  double sum = 0.0, sumsq = 0.0, f_sup = 0.0;
  long ncens = 0;
  for (long p = 0; p < config.paths; ++p) {
    const double v = integrals[static_cast<size_t>(p)];
    sum += v;
    sumsq += v * v;
    f_sup = std::max(f_sup, max_abs_f[static_cast<size_t>(p)]);
    ncens += censored[static_cast<size_t>(p)];
  }
  const double mean = sum / static_cast<double>(config.paths);
  est.estimate = mean;
  if (config.paths > 1) {
    const double var =
        std::max(0.0, (sumsq - sum * mean) / static_cast<double>(config.paths - 1));
    est.std_error = std::sqrt(var / static_cast<double>(config.paths));
  }
  est.censored = ncens;
  est.tail_bound = f_sup * std::exp(-lambda * config.t_max) / lambda;

  if (ensemble != nullptr) {
    ensemble->summary = est;
    ensemble->records.resize(static_cast<size_t>(config.paths));
    for (long p = 0; p < config.paths; ++p) {
      auto& rec = ensemble->records[static_cast<size_t>(p)];
      rec.tau = taus[static_cast<size_t>(p)];
      rec.integral = integrals[static_cast<size_t>(p)];
      rec.censored = censored[static_cast<size_t>(p)] != 0;
    }
  }
  return est;
}

void dump_ensemble(const ExitEnsemble& ensemble, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("dump_ensemble: cannot open '" + path + "'");
  char buf[24];
  for (size_t p = 0; p < ensemble.records.size(); ++p) {
    const std::uint64_t idx = p;
    std::memcpy(buf, &idx, 8);
    std::memcpy(buf + 8, &ensemble.records[p].tau, 8);
    std::memcpy(buf + 16, &ensemble.records[p].integral, 8);
    os.write(buf, sizeof(buf));
  }
}

KernelCheckResult kernel_check(const SpectralGaussian& measure, std::vector<double> tgrid,
                               std::span<const double> x, const PathConfig& config) {
  std::sort(tgrid.begin(), tgrid.end());
  const LevelSetDomain free_space = LevelSetDomain::whole_space(static_cast<int>(x.size()));
  Engine eng(measure, free_space, config, x.size());
  const double h = config.step;
  std::vector<long> steps_of(tgrid.size());
  for (size_t i = 0; i < tgrid.size(); ++i) {
    const long s = static_cast<long>(std::llround(tgrid[i] / h));
    if (std::abs(static_cast<double>(s) * h - tgrid[i]) > 1e-9) {
      throw Error("kernel_check: grid times must be multiples of the step");
    }
    steps_of[i] = s;
  }
  const long nsteps = steps_of.empty() ? 0 : steps_of.back();
  const int nt = static_cast<int>(tgrid.size());
  const int n = eng.n;

  // Per-path: Y_k(t_i) for every coordinate and grid time.
  const size_t stride = static_cast<size_t>(nt) * static_cast<size_t>(n);
  std::vector<double> ys(static_cast<size_t>(config.paths) * stride);
  parallel_paths(config.paths, config.threads, [&](long p) {
    std::vector<double> state;
    eng.start_state(x, state);
    size_t which = 0;
    for (long j = 0; j < nsteps; ++j) {
      eng.advance(state, p, j);
      const double t = static_cast<double>(j + 1) * h;
      while (which < steps_of.size() && steps_of[which] == j + 1) {
        const double drift = std::exp(-0.5 * t);
        for (int k = 0; k < n; ++k) {
          const double x0k = (static_cast<size_t>(k) < x.size()) ? x[static_cast<size_t>(k)] : 0.0;
          ys[static_cast<size_t>(p) * stride + which * static_cast<size_t>(n) +
             static_cast<size_t>(k)] = state[static_cast<size_t>(k)] - drift * x0k;
        }
        ++which;
      }
    }
  });

  KernelCheckResult result;
  const double npaths = static_cast<double>(config.paths);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < nt; ++i) {
      for (int j = i; j < nt; ++j) {
        double sum_i = 0.0, sum_j = 0.0, sum_prod = 0.0, sum_prod_sq = 0.0;
        for (long p = 0; p < config.paths; ++p) {
          const double yi = ys[static_cast<size_t>(p) * stride +
                               static_cast<size_t>(i) * static_cast<size_t>(n) + static_cast<size_t>(k)];
          const double yj = ys[static_cast<size_t>(p) * stride +
                               static_cast<size_t>(j) * static_cast<size_t>(n) + static_cast<size_t>(k)];
          sum_i += yi;
          sum_j += yj;
          const double prod = yi * yj;
          sum_prod += prod;
          sum_prod_sq += prod * prod;
        }
        const double mean_i = sum_i / npaths;
        const double mean_j = sum_j / npaths;
        const double cov = (sum_prod - npaths * mean_i * mean_j) / (npaths - 1.0);
        const double prod_var =
            std::max(0.0, sum_prod_sq / npaths - (sum_prod / npaths) * (sum_prod / npaths));
        const double se = std::sqrt(prod_var / npaths);
        const double t = tgrid[static_cast<size_t>(i)];
        const double s = tgrid[static_cast<size_t>(j)];
        const double analytic = measure.eigenvalue(k) * std::exp(-0.5 * (t + s)) *
                                (std::exp(std::min(t, s)) - 1.0);
        KernelCheckEntry entry;
        entry.coord = k;
        entry.t = t;
        entry.s = s;
        entry.empirical = cov;
        entry.analytic = analytic;
        entry.std_error = se;
        result.entries.push_back(entry);
        if (se > 0.0) {
          result.max_deviation =
              std::max(result.max_deviation, std::abs(cov - analytic) / se);
        }
      }
    }
  }
  return result;
}

std::vector<ConvergenceRow> cylindrical_convergence(const SpectralGaussian& measure,
                                                    const LevelSetDomain& domain,
                                                    const PathField& F, double lambda,
                                                    std::span<const double> x,
                                                    const std::vector<int>& dims,
                                                    const PathConfig& config) {
  std::vector<ConvergenceRow> rows;
  std::vector<double> prev_integrals;
  for (size_t idx = 0; idx < dims.size(); ++idx) {
    const int n = dims[idx];
    if (idx > 0 && n <= dims[idx - 1]) throw Error("cylindrical_convergence: dims must increase");
    ConvergenceRow row;
    row.n = n;
    PathConfig cfg = config;
    cfg.dimension = n;
    ExitEnsemble ensemble;
    try {
      const McEstimate est = resolvent_mc(measure, domain, F, lambda, x, cfg, &ensemble);
      row.estimate = est.estimate;
      row.std_error = est.std_error;
    } catch (const StartOutsideDomain&) {
      row.start_outside = true;
      rows.push_back(row);
      prev_integrals.clear();
      continue;
    }
    if (!prev_integrals.empty()) {
      double sum = 0.0, sumsq = 0.0;
      for (size_t p = 0; p < prev_integrals.size(); ++p) {
        const double d = ensemble.records[p].integral - prev_integrals[p];
        sum += d;
        sumsq += d * d;
      }
      const double count = static_cast<double>(prev_integrals.size());
      const double mean = sum / count;
      row.diff_prev = std::abs(mean);
      if (count > 1.0) {
        const double var = std::max(0.0, (sumsq - sum * mean) / (count - 1.0));
        row.diff_std_error = std::sqrt(var / count);
      }
    }
    prev_integrals.resize(ensemble.records.size());
    for (size_t p = 0; p < ensemble.records.size(); ++p) {
      prev_integrals[p] = ensemble.records[p].integral;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace oulab
