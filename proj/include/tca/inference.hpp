#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tca/condition.hpp"
#include "tca/linalg.hpp"
#include "tca/workflow.hpp"

namespace tca {

struct BootstrapSpec {
  std::size_t replications = 500;
  std::uint64_t seed = 0;
  double level = 0.90;
  unsigned threads = 0;               // 0: default_thread_count()
  bool freeze_normalization = false;  // keep the full-sample instrument scale in every draw
  double max_discard_fraction = 0.05;
};

struct VarSpec {
  std::size_t lags = 1;
  bool include_intercept = true;
};

// Percentile bands per system index for one condition.
struct EffectBands {
  EffectTable point;
  std::vector<double> channel_lower, channel_upper;
  std::vector<double> complement_lower, complement_upper;
  std::vector<double> total_lower, total_upper;
  std::size_t retained = 0;
  std::size_t discarded = 0;
  double worst_draw_gap = 0.0;        // max decomposition gap over retained draws
  std::size_t points_outside = 0;     // cells whose point estimate lies outside its band
};

// Seed of the generator for one draw; independent of thread scheduling.
[[nodiscard]] std::uint64_t draw_seed(std::uint64_t seed, std::size_t draw);

// `count` indices uniform on [0, n) from the draw's own stream.
[[nodiscard]] std::vector<std::size_t> resample_indices(std::uint64_t seed, std::size_t draw,
                                                        std::size_t n, std::size_t count);

// Type-7 quantile of sorted data.
[[nodiscard]] double quantile_sorted(const std::vector<double>& sorted, double p);

// Recursive iid residual bootstrap around the VAR estimate. One EffectBands
// per condition, all computed on the same draws.
[[nodiscard]] std::vector<EffectBands> bootstrap_effects(const Matrix& data,
                                                         const std::vector<std::string>& names,
                                                         const VarSpec& var_spec,
                                                         const AnalysisSpec& analysis,
                                                         const std::vector<std::string>& conditions,
                                                         const BootstrapSpec& spec);

}  // namespace tca
