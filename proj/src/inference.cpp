#include "tca/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include "tca/error.hpp"
#include "tca/parallel.hpp"

namespace tca {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Unbiased draw on [0, n) by rejection; std distributions are not portable.
std::size_t uniform_below(std::mt19937_64& rng, std::size_t n) {
  const std::uint64_t range = n;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t v = 0;
  do {
    v = rng();
  } while (v >= limit);
  return static_cast<std::size_t>(v % range);
}

bool degenerate(ErrorCode code) {
  switch (code) {
    case ErrorCode::RankDeficientRegressors:
    case ErrorCode::NotPositiveDefinite:
    case ErrorCode::SingularMatrix:
    case ErrorCode::ZeroImpact:
      return true;
    default:
      return false;
  }
}

struct DrawResult {
  bool ok = false;
  // Per condition: channel, complement, total.
  std::vector<std::vector<double>> channel, complement, total;
};

}  // namespace

std::uint64_t draw_seed(std::uint64_t seed, std::size_t draw) {
  return splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(draw));
}

std::vector<std::size_t> resample_indices(std::uint64_t seed, std::size_t draw, std::size_t n,
                                          std::size_t count) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "nothing to resample");
  std::mt19937_64 rng(draw_seed(seed, draw));
  std::vector<std::size_t> out(count);
  for (auto& i : out) i = uniform_below(rng, n);
  return out;
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::vector<EffectBands> bootstrap_effects(const Matrix& data, const std::vector<std::string>& names,
                                           const VarSpec& var_spec, const AnalysisSpec& analysis,
                                           const std::vector<std::string>& conditions,
                                           const BootstrapSpec& spec) {
  if (spec.replications < 1) throw Error(ErrorCode::InvalidArgument, "replications must be >= 1");
  if (!(spec.level > 0.0 && spec.level < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "confidence level must lie in (0, 1)");
  }
  if (conditions.empty()) throw Error(ErrorCode::InvalidArgument, "no conditions given");

  const ReducedVar fit = estimate_var_ols(data, var_spec.lags, var_spec.include_intercept, names);
  const PreparedShock point_shock = prepare_shock(fit, analysis);

  std::vector<TransmissionCondition> parsed;
  for (const auto& text : conditions) {
    parsed.push_back(parse_condition(text, point_shock.system.ordering.labels, analysis.horizon));
  }
  EffectOptions serial = analysis.effects;
  serial.threads = 1;
  auto tables_for = [&](const PreparedShock& s) {
    std::vector<EffectTable> out;
    EffectOptions opts = serial;
    opts.xi = s.xi;
    for (const auto& c : parsed) out.push_back(transmission_effect(s.system, c, opts));
    return out;
  };
  const std::vector<EffectTable> point = tables_for(point_shock);

  const std::size_t k = fit.k();
  const std::size_t p = var_spec.lags;
  const std::size_t n_res = fit.residuals.rows();
  Matrix centred = fit.residuals;
  for (std::size_t v = 0; v < k; ++v) {
    double mean = 0.0;
    for (std::size_t r = 0; r < n_res; ++r) mean += centred(r, v);
    mean /= static_cast<double>(n_res);
    for (std::size_t r = 0; r < n_res; ++r) centred(r, v) -= mean;
  }
  const Matrix initial = data.block(0, 0, p, k);
  const std::optional<double> frozen =
      spec.freeze_normalization ? std::optional<double>(point_shock.instrument_scale) : std::nullopt;

  std::vector<DrawResult> draws(spec.replications);
  parallel_for(spec.replications, spec.threads, [&](std::size_t d) {
    const auto idx = resample_indices(spec.seed, d, n_res, n_res);
    Matrix innov(n_res, k);
    for (std::size_t r = 0; r < n_res; ++r)
      for (std::size_t v = 0; v < k; ++v) innov(r, v) = centred(idx[r], v);
    DrawResult& out = draws[d];
    try {
      const Matrix sim = generate_var_path(fit.intercept, fit.coefs, initial, innov);
      const ReducedVar refit = estimate_var_ols(sim, p, var_spec.include_intercept, names);
      const PreparedShock s = prepare_shock(refit, analysis, frozen);
      for (const EffectTable& t : tables_for(s)) {
        out.channel.push_back(t.channel);
        out.complement.push_back(t.complement);
        out.total.push_back(t.total);
      }
      out.ok = true;
    } catch (const Error& e) {
      if (!degenerate(e.code())) throw;
      out.ok = false;
    }
  });

  std::size_t retained = 0;
  for (const auto& d : draws) retained += d.ok ? 1 : 0;
  const std::size_t discarded = spec.replications - retained;
  if (retained == 0 ||
      static_cast<double>(discarded) > spec.max_discard_fraction * static_cast<double>(spec.replications)) {
    throw Error(ErrorCode::BootstrapUnstable,
                std::to_string(discarded) + " of " + std::to_string(spec.replications) +
                    " bootstrap draws were degenerate and discarded");
  }

  const double lo_p = (1.0 - spec.level) / 2.0;
  const double hi_p = (1.0 + spec.level) / 2.0;
  std::vector<EffectBands> out;
  for (std::size_t c = 0; c < parsed.size(); ++c) {
    EffectBands b;
    b.point = point[c];
    b.retained = retained;
    b.discarded = discarded;
    const std::size_t n = b.point.size();
    for (auto* v : {&b.channel_lower, &b.channel_upper, &b.complement_lower, &b.complement_upper,
                    &b.total_lower, &b.total_upper})
      v->assign(n, 0.0);
    std::vector<double> ch, co, to;
    for (std::size_t j = 0; j < n; ++j) {
      ch.clear();
      co.clear();
      to.clear();
      for (const auto& d : draws) {
        if (!d.ok) continue;
        ch.push_back(d.channel[c][j]);
        co.push_back(d.complement[c][j]);
        to.push_back(d.total[c][j]);
        const double gap = std::abs(d.channel[c][j] + d.complement[c][j] - d.total[c][j]) /
                           std::max(1.0, std::abs(d.total[c][j]));
        b.worst_draw_gap = std::max(b.worst_draw_gap, gap);
      }
      std::sort(ch.begin(), ch.end());
      std::sort(co.begin(), co.end());
      std::sort(to.begin(), to.end());
      b.channel_lower[j] = quantile_sorted(ch, lo_p);
      b.channel_upper[j] = quantile_sorted(ch, hi_p);
      b.complement_lower[j] = quantile_sorted(co, lo_p);
      b.complement_upper[j] = quantile_sorted(co, hi_p);
      b.total_lower[j] = quantile_sorted(to, lo_p);
      b.total_upper[j] = quantile_sorted(to, hi_p);
      const double pt = b.point.channel[j];
      if (pt < b.channel_lower[j] || pt > b.channel_upper[j]) ++b.points_outside;
    }
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace tca
