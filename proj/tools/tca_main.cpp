// Command-line front end. Talks to the library only through the C API.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tca/tca.h"

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kCondition = 3, kBootstrap = 4, kExplosion = 5 };

int exit_code_for(tca_status s) {
  switch (s) {
    case TCA_OK: return kOk;
    case TCA_ERR_PARSE:
    case TCA_ERR_UNKNOWN_VARIABLE:
    case TCA_ERR_HORIZON_OUT_OF_RANGE:
    case TCA_ERR_UNSUPPORTED_CONDITION: return kCondition;
    case TCA_ERR_BOOTSTRAP_UNSTABLE: return kBootstrap;
    case TCA_ERR_TERM_EXPLOSION:
    case TCA_ERR_PATH_EXPLOSION:
    case TCA_ERR_TARGET_TOO_LARGE: return kExplosion;
    default: return kData;
  }
}

struct Failure {
  int code;
};

void check(tca_status s, const std::string& context = {}) {
  if (s == TCA_OK) return;
  std::fprintf(stderr, "tca: error: %s%s [%s]\n", context.empty() ? "" : (context + ": ").c_str(),
               tca_last_error(), tca_status_name(s));
  throw Failure{exit_code_for(s)};
}

[[noreturn]] void usage_error(const std::string& msg) {
  std::fprintf(stderr, "tca: error: %s\n", msg.c_str());
  throw Failure{kUsage};
}

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  Handle(Handle&& o) noexcept : p(o.p) { o.p = nullptr; }
  ~Handle() { Free(p); }
};

using DataHandle = Handle<tca_data, tca_data_free>;
using ModelHandle = Handle<tca_model, tca_model_free>;
using AnalysisHandle = Handle<tca_analysis, tca_analysis_free>;
using EffectsHandle = Handle<tca_effects, tca_effects_free>;

std::string output_path(const std::string& out, std::size_t index, std::size_t count) {
  if (count <= 1 || index == 0) return out;
  const std::filesystem::path p(out);
  std::filesystem::path name = p.stem();
  name += ".c" + std::to_string(index + 1);
  name += p.extension();
  return (p.parent_path() / name).string();
}

struct AnalysisArgs {
  std::string model;
  std::string order;
  std::string shock;
  std::string normalize;
  std::size_t horizon = 0;
  unsigned threads = 0;
  bool allow_large = false;
  std::string expansion = "ie";
};

void add_analysis_options(CLI::App* cmd, AnalysisArgs& a, bool order_required) {
  auto* order = cmd->add_option("--order", a.order, "Transmission ordering, comma-separated names");
  if (order_required) order->required();
  cmd->add_option("--shock", a.shock, "Shock to decompose (shock name, or the instrument)");
  cmd->add_option("--normalize", a.normalize, "Impact normalisation var=value (or just a shock size)");
  cmd->add_option("--threads", a.threads, "Worker threads (0: automatic; TCA_THREADS caps)");
  cmd->add_flag("--allow-large", a.allow_large, "Lift the soft cap on horizon and variable count");
  cmd->add_option("--expansion", a.expansion, "Condition expansion: ie or dnf")
      ->check(CLI::IsMember({"ie", "dnf"}));
}

AnalysisHandle make_analysis(const tca_model* model, const AnalysisArgs& a) {
  AnalysisHandle h;
  check(tca_analysis_create(model, &h.p));
  if (!a.order.empty()) check(tca_analysis_set_order(h.p, a.order.c_str()), "--order");
  if (!a.shock.empty()) check(tca_analysis_set_shock(h.p, a.shock.c_str()), "--shock");
  if (!a.normalize.empty()) {
    const auto eq = a.normalize.find('=');
    const std::string var = eq == std::string::npos ? std::string() : a.normalize.substr(0, eq);
    const std::string value = eq == std::string::npos ? a.normalize : a.normalize.substr(eq + 1);
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (value.empty() || end == nullptr || *end != '\0') {
      usage_error("--normalize expects var=value, got '" + a.normalize + "'");
    }
    check(tca_analysis_set_normalize(h.p, var.empty() ? nullptr : var.c_str(), v), "--normalize");
  }
  check(tca_analysis_set_horizon(h.p, a.horizon));
  check(tca_analysis_set_threads(h.p, a.threads));
  check(tca_analysis_set_allow_large(h.p, a.allow_large ? 1 : 0));
  check(tca_analysis_set_expansion(h.p, a.expansion == "dnf" ? TCA_EXPANSION_DISJOINT_DNF
                                                             : TCA_EXPANSION_INCLUSION_EXCLUSION));
  return h;
}

void check_partition(const std::vector<EffectsHandle>& effects) {
  std::vector<const tca_effects*> list;
  for (const auto& e : effects) list.push_back(e.p);
  double gap = 0.0;
  check(tca_effects_partition_gap(list.data(), list.size(), &gap));
  if (!(gap <= 1e-8)) {
    std::fprintf(stderr,
                 "tca: error: channels do not partition the total effect (max relative gap %.3g)\n",
                 gap);
    throw Failure{kCondition};
  }
}

void write_all(const std::vector<EffectsHandle>& effects, const std::vector<std::string>& conditions,
               const std::string& out, bool quiet) {
  for (std::size_t i = 0; i < effects.size(); ++i) {
    const std::string path = output_path(out, i, effects.size());
    check(tca_effects_write_csv(effects[i].p, path.c_str()), path);
    if (!quiet) {
      std::printf("wrote %s (condition \"%s\", K=%zu, h=%zu, max gap %.3g", path.c_str(),
                  conditions[i].c_str(), tca_effects_k(effects[i].p),
                  tca_effects_horizon(effects[i].p), tca_effects_max_gap(effects[i].p));
      if (tca_effects_has_bands(effects[i].p)) {
        std::printf(", discarded draws %zu", tca_effects_discarded_draws(effects[i].p));
      }
      std::printf(")\n");
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transmission channel analysis of impulse responses"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tca_version()));

  // estimate
  std::string est_data, est_out;
  std::size_t est_lags = 0;
  bool est_no_intercept = false, est_quiet = false;
  auto* estimate = app.add_subcommand("estimate", "Estimate a reduced-form VAR by OLS");
  estimate->add_option("--data", est_data, "CSV with a header row of names")->required();
  estimate->add_option("--lags", est_lags, "Lag order p")->required();
  estimate->add_flag("--no-intercept", est_no_intercept, "Omit the constant");
  estimate->add_option("--out", est_out, "Model JSON to write")->required();
  estimate->add_flag("--quiet", est_quiet, "Suppress the summary");

  // transmission
  AnalysisArgs tr;
  std::vector<std::string> tr_conditions;
  std::string tr_out;
  bool tr_partition = false, tr_quiet = false;
  auto* transmission = app.add_subcommand("transmission", "Decompose effects into a channel and its complement");
  transmission->add_option("--model", tr.model, "Model JSON")->required();
  add_analysis_options(transmission, tr, true);
  transmission->add_option("--condition", tr_conditions, "Channel condition (repeatable)")->required();
  transmission->add_option("--horizon", tr.horizon, "Maximum horizon h")->required();
  transmission->add_option("--out", tr_out, "Effects CSV to write")->required();
  transmission->add_flag("--assert-partition", tr_partition, "Require the channels to sum to the total");
  transmission->add_flag("--quiet", tr_quiet, "Suppress the summary");

  // bootstrap
  AnalysisArgs bs;
  std::vector<std::string> bs_conditions;
  std::string bs_out, bs_data;
  std::size_t bs_reps = 500, bs_lags = 0;
  std::uint64_t bs_seed = 0;
  double bs_level = 0.90;
  bool bs_partition = false, bs_quiet = false, bs_freeze = false, bs_no_intercept = false;
  auto* bootstrap = app.add_subcommand("bootstrap", "Effects with residual-bootstrap percentile bands");
  bootstrap->add_option("--model", bs.model, "Reduced-form model JSON (else estimated from --data)");
  bootstrap->add_option("--data", bs_data, "CSV the model was estimated on")->required();
  bootstrap->add_option("--lags", bs_lags, "Lag order when no --model is given");
  bootstrap->add_flag("--no-intercept", bs_no_intercept, "Omit the constant when estimating");
  add_analysis_options(bootstrap, bs, true);
  bootstrap->add_option("--condition", bs_conditions, "Channel condition (repeatable)")->required();
  bootstrap->add_option("--horizon", bs.horizon, "Maximum horizon h")->required();
  bootstrap->add_option("--out", bs_out, "Effects CSV to write")->required();
  bootstrap->add_option("--reps", bs_reps, "Bootstrap replications")->check(CLI::PositiveNumber);
  bootstrap->add_option("--seed", bs_seed, "Random seed");
  bootstrap->add_option("--level", bs_level, "Confidence level")->check(CLI::Range(0.0, 1.0));
  bootstrap->add_flag("--freeze-normalization", bs_freeze,
                      "Reuse the full-sample normalisation in every draw");
  bootstrap->add_flag("--assert-partition", bs_partition, "Require the channels to sum to the total");
  bootstrap->add_flag("--quiet", bs_quiet, "Suppress the summary");

  // paths
  AnalysisArgs pa;
  std::string pa_target;
  bool pa_all = false;
  auto* paths = app.add_subcommand("paths", "List every path from the shock to a target");
  paths->add_option("--model", pa.model, "Model JSON")->required();
  add_analysis_options(paths, pa, false);
  paths->add_option("--target", pa_target, "Target name_t or x<m> (default: all)");
  paths->add_option("--horizon", pa.horizon, "Maximum horizon h");
  paths->add_flag("--all-shocks", pa_all, "List paths from every shock");

  // verify
  std::string ve_file;
  double ve_tol = 1e-8;
  bool ve_quiet = false;
  auto* verify = app.add_subcommand("verify", "Check channel + complement = total in an effects CSV");
  verify->add_option("file", ve_file, "Effects CSV")->required();
  verify->add_option("--tol", ve_tol, "Relative tolerance");
  verify->add_flag("--quiet", ve_quiet, "Suppress the summary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    (void)app.exit(e);
    return kUsage;
  }

  try {
    if (estimate->parsed()) {
      DataHandle data;
      check(tca_data_read_csv(est_data.c_str(), &data.p), est_data);
      ModelHandle model;
      check(tca_model_estimate(data.p, est_lags, est_no_intercept ? 0 : 1, &model.p));
      check(tca_model_save(model.p, est_out.c_str()), est_out);
      if (!est_quiet) {
        double logdet = 0.0;
        check(tca_model_log_det_sigma(model.p, &logdet));
        std::printf("K=%zu T=%zu p=%zu log|Sigma_u|=%.17g\n", tca_model_k(model.p),
                    tca_model_nobs(model.p), tca_model_lags(model.p), logdet);
      }
    } else if (transmission->parsed()) {
      ModelHandle model;
      check(tca_model_load(tr.model.c_str(), &model.p), tr.model);
      AnalysisHandle analysis = make_analysis(model.p, tr);
      std::vector<EffectsHandle> effects;
      for (const auto& c : tr_conditions) {
        EffectsHandle e;
        check(tca_analysis_effects(analysis.p, c.c_str(), &e.p), "condition \"" + c + "\"");
        effects.push_back(std::move(e));
      }
      if (tr_partition) check_partition(effects);
      write_all(effects, tr_conditions, tr_out, tr_quiet);
    } else if (bootstrap->parsed()) {
      DataHandle data;
      check(tca_data_read_csv(bs_data.c_str(), &data.p), bs_data);
      ModelHandle model;
      if (!bs.model.empty()) {
        check(tca_model_load(bs.model.c_str(), &model.p), bs.model);
      } else {
        if (bs_lags == 0) usage_error("bootstrap needs --model or --lags");
        check(tca_model_estimate(data.p, bs_lags, bs_no_intercept ? 0 : 1, &model.p));
      }
      AnalysisHandle analysis = make_analysis(model.p, bs);
      check(tca_analysis_set_freeze_normalization(analysis.p, bs_freeze ? 1 : 0));
      std::vector<const char*> conds;
      for (const auto& c : bs_conditions) conds.push_back(c.c_str());
      std::vector<tca_effects*> raw(conds.size(), nullptr);
      const tca_status st = tca_analysis_bootstrap(analysis.p, data.p, conds.data(), conds.size(),
                                                   bs_reps, bs_seed, bs_level, raw.data());
      std::vector<EffectsHandle> effects(raw.size());
      for (std::size_t i = 0; i < raw.size(); ++i) effects[i].p = raw[i];
      check(st);
      if (bs_partition) check_partition(effects);
      write_all(effects, bs_conditions, bs_out, bs_quiet);
    } else if (paths->parsed()) {
      ModelHandle model;
      check(tca_model_load(pa.model.c_str(), &model.p), pa.model);
      AnalysisHandle analysis = make_analysis(model.p, pa);
      char* text = nullptr;
      check(tca_analysis_paths(analysis.p, pa_target.empty() ? nullptr : pa_target.c_str(),
                               pa_all ? 1 : 0, &text));
      std::fputs(text, stdout);
      tca_string_free(text);
    } else if (verify->parsed()) {
      std::size_t rows = 0, failures = 0;
      double worst = 0.0;
      const tca_status st = tca_verify_csv(ve_file.c_str(), ve_tol, &rows, &failures, &worst);
      check(st, ve_file);
      if (!ve_quiet) std::printf("ok: %zu rows, max relative gap %.3g\n", rows, worst);
    }
  } catch (const Failure& f) {
    return f.code;
  }
  return kOk;
}
