#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <exception>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config_file.hpp"
#include "manifest.hpp"
#include "tcan/error.hpp"

namespace {

using namespace tcan::cli;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("tcan");
  logger->set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
  spdlog::set_default_logger(logger);
  const char* lvl = std::getenv("TCAN_LOG_LEVEL");
  spdlog::set_level(lvl ? spdlog::level::from_str(lvl) : spdlog::level::info);
}

void add_overrides(CLI::App* cmd, std::map<std::string, std::string>& overrides,
                   const std::vector<std::string>& keys, const std::string& group) {
  for (const auto& k : keys) {
    cmd->add_option_function<std::string>(
           "--" + k, [&overrides, k](const std::string& v) { overrides[k] = v; }, "override config key " + k)
        ->group(group);
  }
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Cascade popularity prediction: data preparation, training, evaluation and diagnostics"};
  app.set_version_flag("--version", std::string(version_string()));
  app.require_subcommand(1);

  GenArgs gen;
  auto* c_gen = app.add_subcommand("gen", "Generate synthetic cascades");
  c_gen->add_option("--config", gen.config, "Generator config file (.json or key = value)");
  c_gen->add_option("-o,--out", gen.out, "Output cascade file")->required();
  add_overrides(c_gen, gen.overrides, gen_config_keys(), "Generator");

  PrepareArgs prep;
  auto* c_prep = app.add_subcommand("prepare", "Window, filter and split a cascade file");
  c_prep->add_option("-i,--input", prep.input, "Cascade file")->required()->check(CLI::ExistingFile);
  c_prep->add_option("--t-obs", prep.t_obs, "Observation cutoff (time units since publish)");
  c_prep->add_option("--t-obs-quantile", prep.t_obs_quantile, "Cutoff at this quantile of all join times");
  c_prep->add_option("--t-end", prep.t_end, "Prediction horizon")->required();
  c_prep->add_option("--min-obs", prep.min_obs, "Minimum observed size")->capture_default_str();
  c_prep->add_option("--ratios", prep.ratios, "train val test ratios")->expected(3)->delimiter(',')
      ->capture_default_str();
  c_prep->add_option("--seed", prep.seed, "Split seed")->capture_default_str();
  c_prep->add_option("--publish-lo", prep.publish_lo, "Keep publish times >= this");
  c_prep->add_option("--publish-hi", prep.publish_hi, "Keep publish times < this");
  c_prep->add_option("--publish-period", prep.publish_period, "Reduce publish times modulo this first");
  c_prep->add_option("-o,--out-dir", prep.out_dir, "Split directory")->required();

  TrainArgs tr;
  auto* c_train = app.add_subcommand("train", "Train a model on a prepared split");
  c_train->add_option("-s,--split-dir", tr.split_dir, "Split directory")->required()->check(CLI::ExistingDirectory);
  c_train->add_option("--config", tr.config, "Model config file (.json or key = value)");
  c_train->add_option("-o,--out-dir", tr.out_dir, "Output directory")->required();
  add_overrides(c_train, tr.overrides, model_config_keys(), "Model");

  EvalArgs ev;
  auto* c_eval = app.add_subcommand("eval", "Evaluate a checkpoint on a split part");
  c_eval->add_option("-s,--split-dir", ev.split_dir, "Split directory")->required()->check(CLI::ExistingDirectory);
  c_eval->add_option("-c,--checkpoint", ev.checkpoint, "Checkpoint file")->required()->check(CLI::ExistingFile);
  c_eval->add_option("--part", ev.part, "train, val or test")->capture_default_str();
  c_eval->add_option("--workers", ev.workers, "Evaluation threads")->capture_default_str();
  c_eval->add_option("-o,--out-dir", ev.out_dir, "Output directory")->required();

  PredictArgs pr;
  auto* c_pred = app.add_subcommand("predict", "Predict incremental popularity for raw cascades");
  c_pred->add_option("-c,--checkpoint", pr.checkpoint, "Checkpoint file")->required()->check(CLI::ExistingFile);
  c_pred->add_option("-i,--input", pr.input, "Cascade file")->required()->check(CLI::ExistingFile);
  c_pred->add_option("--t-obs", pr.t_obs, "Observation cutoff")->required();
  c_pred->add_option("-o,--out", pr.out, "Output CSV")->required();

  GradcheckArgs gc;
  auto* c_gc = app.add_subcommand("gradcheck", "Finite-difference gradient check of a freshly initialized model");
  c_gc->add_option("--config", gc.config, "Model config file (.json or key = value)");
  c_gc->add_option("--seed", gc.seed, "Seed for the model and the probe cascade")->capture_default_str();
  c_gc->add_option("--coords", gc.coords, "Coordinates per parameter, 0 for all")->capture_default_str();
  c_gc->add_option("--eps", gc.eps, "Central-difference step")->capture_default_str();
  c_gc->add_option("--tolerance", gc.tolerance, "Maximum relative error")->capture_default_str();
  c_gc->add_option("-o,--out", gc.out, "Optional JSON report");
  {
    auto keys = model_config_keys();
    std::erase(keys, "seed");
    add_overrides(c_gc, gc.overrides, keys, "Model");
  }

  ExplainArgs ex;
  auto* c_ex = app.add_subcommand("explain", "Dump attention weights and representations for one cascade");
  c_ex->add_option("-c,--checkpoint", ex.checkpoint, "Checkpoint file")->required()->check(CLI::ExistingFile);
  c_ex->add_option("-s,--split-dir", ex.split_dir, "Split directory to look the cascade up in");
  c_ex->add_option("-i,--input", ex.input, "Cascade file (with --t-obs)");
  c_ex->add_option("--t-obs", ex.t_obs, "Observation cutoff for --input");
  c_ex->add_option("--cascade-id", ex.cascade_id, "Cascade id")->required();
  c_ex->add_option("-o,--out", ex.out, "Output JSON")->required();

  BaselineArgs bl;
  auto* c_bl = app.add_subcommand("baseline", "Feature-linear ridge baseline on a prepared split");
  c_bl->add_option("-s,--split-dir", bl.split_dir, "Split directory")->required()->check(CLI::ExistingDirectory);
  c_bl->add_option("--lambda", bl.lambda, "Ridge penalty; negative selects on validation")->capture_default_str();
  c_bl->add_option("-o,--out-dir", bl.out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*c_gen) return cmd_gen(gen);
    if (*c_prep) return cmd_prepare(prep);
    if (*c_train) return cmd_train(tr);
    if (*c_eval) return cmd_eval(ev);
    if (*c_pred) return cmd_predict(pr);
    if (*c_gc) return cmd_gradcheck(gc);
    if (*c_ex) return cmd_explain(ex);
    if (*c_bl) return cmd_baseline(bl);
  } catch (const tcan::ValidationError& e) {
    spdlog::error("{}", e.what());
    return kValidation;
  } catch (const tcan::NumericalError& e) {
    spdlog::error("numerical failure: {}", e.what());
    return kNumerical;
  } catch (const tcan::IoError& e) {
    spdlog::error("I/O error: {}", e.what());
    return kIo;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kValidation;
  }
  return kValidation;
}
