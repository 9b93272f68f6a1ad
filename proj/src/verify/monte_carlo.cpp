#include "drrbdo/verify/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "drrbdo/errors.hpp"
#include "drrbdo/truss/analysis.hpp"

namespace drrbdo::verify {

namespace {
// Inner samples are drawn in chunks to bound memory.
constexpr std::int64_t kChunk = 4096;
}  // namespace

void McConfig::validate() const {
  if (outer_samples < 1 || inner_samples < 1) throw ConfigurationError("sample counts must be at least 1");
}

FailureEstimate failure_probability(const robust::LinearizedConstraint& con, const VectorXd& mu,
                                    const MatrixXd& sigma, std::int64_t count, Rng& rng) {
  FailureEstimate est;
  for (std::int64_t done = 0; done < count; done += kChunk) {
    const Index n = Index(std::min(kChunk, count - done));
    const VectorXd values = (con.gradient.transpose() * sample_gaussian(mu, sigma, n, rng)).transpose();
    for (double v : values) est.failures += con.value + v > 0;
    est.evaluated += n;
  }
  est.probability = double(est.failures) / double(est.evaluated);
  return est;
}

FailureEstimate failure_probability_exact(const truss::TrussModel& model, const VectorXd& areas,
                                          const VectorXd& mu, const MatrixXd& sigma, std::int64_t count,
                                          Rng& rng) {
  FailureEstimate est;
  const double bound = model.compliance_bound();
  for (std::int64_t done = 0; done < count; done += kChunk) {
    const Index n = Index(std::min(kChunk, count - done));
    const MatrixXd zeta = sample_gaussian(mu, sigma, n, rng);
    for (Index i = 0; i < n; ++i) {
      const VectorXd x = areas + zeta.col(i);
      if (x.minCoeff() <= 0) {
        ++est.skipped;
        continue;
      }
      try {
        est.failures += truss::compliance(model, x) > bound;
        ++est.evaluated;
      } catch (const MechanismError&) {
        ++est.skipped;
      }
    }
  }
  est.probability = est.evaluated ? double(est.failures) / double(est.evaluated) : 0.0;
  return est;
}

Histogram make_histogram(const std::vector<double>& values, double lo, double hi, int bins) {
  if (bins < 1 || !(hi > lo)) throw ConfigurationError("histogram needs bins >= 1 and hi > lo");
  Histogram h;
  for (int b = 0; b <= bins; ++b) h.edges.push_back(lo + (hi - lo) * b / bins);
  h.counts.assign(std::size_t(bins), 0);
  for (double v : values) {
    if (v > hi) {
      ++h.overflow;
      continue;
    }
    const int b = std::clamp(int((v - lo) / (hi - lo) * bins), 0, bins - 1);
    ++h.counts[std::size_t(b)];
  }
  return h;
}

double certification_threshold(double epsilon, std::int64_t inner_samples) {
  return epsilon + 3 * std::sqrt(epsilon / double(inner_samples));
}

DoubleLoopResult double_loop(const truss::TrussModel& model, const VectorXd& areas,
                             const robust::MomentUncertainty& unc, const robust::ReliabilitySpec& spec,
                             const McConfig& cfg) {
  cfg.validate();
  unc.validate();
  const auto response = truss::analyze(model, areas);
  const robust::LinearizedConstraint con{response.compliance - model.compliance_bound(), response.gradient};

  const std::size_t outer = std::size_t(cfg.outer_samples);
  DoubleLoopResult out;
  out.moments.resize(outer);
  out.estimates.resize(outer);

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next++;
      if (i >= outer) return;
      try {
        Rng rng = Rng::substream(cfg.seed, i);
        MomentSampler sampler(unc);
        out.moments[i] = sampler.sample(rng);
        const auto& m = out.moments[i];
        out.estimates[i] = cfg.exact
                               ? failure_probability_exact(model, areas, m.mu, m.sigma, cfg.inner_samples, rng)
                               : failure_probability(con, m.mu, m.sigma, cfg.inner_samples, rng);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = outer;
        return;
      }
    }
  };
  const unsigned threads =
      std::max(1u, std::min<unsigned>(cfg.threads ? cfg.threads : std::thread::hardware_concurrency(),
                                      unsigned(std::min<std::size_t>(outer, 256))));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);

  std::vector<double> values;
  for (const auto& e : out.estimates) {
    values.push_back(e.probability);
    out.max = std::max(out.max, e.probability);
    out.mean += e.probability;
    out.skipped += e.skipped;
  }
  out.mean /= double(outer);
  out.histogram = make_histogram(values, 0, 1.2 * spec.epsilon, 50);
  return out;
}

}  // namespace drrbdo::verify
