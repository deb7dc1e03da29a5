#include "dpls/evaluate.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <optional>

#include "dpls/errors.hpp"
#include "dpls/parallel.hpp"

namespace dpls {

namespace {

std::int64_t overlap(const Region& a, const Region& b) {
  auto ia = a.indices().begin();
  auto ib = b.indices().begin();
  std::int64_t common = 0;
  while (ia != a.indices().end() && ib != b.indices().end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  return common;
}

// min over `others` of |r \ other|.
std::int64_t best_cover(const Region& r, std::span<const Region> others) {
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  for (const Region& o : others) best = std::min(best, static_cast<std::int64_t>(r.size()) - overlap(r, o));
  return best;
}

}  // namespace

double err_metric(std::span<const Region> truth, std::span<const Region> est) {
  if (truth.empty()) throw InputError("err_metric: truth list is empty");
  std::int64_t area = 0;
  for (const Region& t : truth) area += static_cast<std::int64_t>(t.size());
  if (area == 0) throw InputError("err_metric: truth regions are empty");
  if (est.empty()) return 1.0;
  for (const Region& e : est) {
    if (!(e.grid() == truth.front().grid())) throw InputError("err_metric: regions live on different grids");
  }
  std::int64_t miss = 0;
  for (const Region& e : est) miss += best_cover(e, truth);
  for (const Region& t : truth) miss += best_cover(t, est);
  return static_cast<double>(miss) / static_cast<double>(area);
}

DetectorConfig mc_config(const SimSetting& s, const GroundTruth& truth, const DetectorConfig& base) {
  DetectorConfig cfg = base;
  if (!cfg.beta) cfg.beta = s.delta * static_cast<double>(truth.delta_min);
  if (!cfg.mu0) cfg.mu0 = 0.0;
  if (!cfg.sigma2) cfg.sigma2 = s.sigma > 0.0 ? s.sigma * s.sigma : 1.0;
  return cfg;
}

McReport run_monte_carlo(const SimSetting& setting, const DetectorConfig& config, int B, const McOptions& opts) {
  if (B < 1) throw InputError("run_monte_carlo: B must be at least 1");
  const GroundTruth truth = make_truth(setting);
  DetectorConfig cfg = mc_config(setting, truth, config);
  cfg.workers = 1;
  cfg.keep_surface = false;
  std::optional<DependentSampler> sampler;
  if (setting.zeta) sampler.emplace(setting.grid, *setting.zeta);

  McReport rep;
  rep.setting = setting;
  rep.B = B;
  rep.m_star = truth.m_star;
  rep.replicates.resize(static_cast<std::size_t>(B));
  std::vector<std::vector<Region>> found(static_cast<std::size_t>(B));

  parallel_for(static_cast<std::size_t>(B), opts.workers, [&](std::size_t b) {
    ReplicateRecord& rec = rep.replicates[b];
    rec.seed = setting.seed + b + 1;
    const auto start = std::chrono::steady_clock::now();
    try {
      const Field f = sampler ? sampler->sample(truth, setting.sigma, rec.seed)
                              : sample_field(truth, setting.sigma, rec.seed);
      const DetectionResult r = detect(f, cfg);
      rec.m_hat = r.m_hat;
      rec.err = err_metric(truth.partition.anomalies(), r.regions);
      found[b] = r.regions;
    } catch (const Error& e) {
      rec.m_hat = -1;
      rec.err = 1.0;
      rec.failure = e.what();
    }
    rec.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  });

  rep.freq_map.assign(static_cast<std::size_t>(setting.grid.size()), 0);
  int hits = 0;
  double err_sum = 0.0;
  for (std::size_t b = 0; b < rep.replicates.size(); ++b) {
    if (rep.replicates[b].m_hat == truth.m_star) ++hits;
    err_sum += rep.replicates[b].err;
    for (const Region& r : found[b]) {
      for (CellIndex c : r.indices()) ++rep.freq_map[static_cast<std::size_t>(c)];
    }
  }
  rep.noc = static_cast<double>(hits) / B;
  rep.err = err_sum / B;
  try {
    rep.params = resolve_params(sample_field(truth, 0.0, 0), cfg);
  } catch (const Error&) {
    rep.params = CostParams{};
  }
  return rep;
}

}  // namespace dpls
