#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tcan::cli {

/// Process exit codes.
enum ExitCode : int { kOk = 0, kValidation = 1, kNumerical = 2, kIo = 3 };

struct GenArgs {
  std::string config;
  std::string out;
  std::map<std::string, std::string> overrides;
};

struct PrepareArgs {
  std::string input;
  std::string out_dir;
  std::optional<double> t_obs;
  std::optional<double> t_obs_quantile;
  double t_end = 0.0;
  std::size_t min_obs = 10;
  std::vector<double> ratios{0.7, 0.15, 0.15};
  std::uint64_t seed = 1;
  std::optional<double> publish_lo;
  std::optional<double> publish_hi;
  double publish_period = 0.0;
};

struct TrainArgs {
  std::string split_dir;
  std::string config;
  std::string out_dir;
  std::map<std::string, std::string> overrides;
};

struct EvalArgs {
  std::string split_dir;
  std::string checkpoint;
  std::string out_dir;
  std::string part = "test";
  std::size_t workers = 1;
};

struct PredictArgs {
  std::string checkpoint;
  std::string input;
  std::string out;
  double t_obs = 0.0;
};

struct GradcheckArgs {
  std::string config;
  std::map<std::string, std::string> overrides;
  std::uint64_t seed = 1;
  std::size_t coords = 16;
  double eps = 1e-5;
  double tolerance = 1e-4;
  std::string out;
};

struct ExplainArgs {
  std::string checkpoint;
  std::string split_dir;
  std::string input;
  std::optional<double> t_obs;
  std::string cascade_id;
  std::string out;
};

struct BaselineArgs {
  std::string split_dir;
  std::string out_dir;
  double lambda = -1.0;
};

int cmd_gen(const GenArgs& a);
int cmd_prepare(const PrepareArgs& a);
int cmd_train(const TrainArgs& a);
int cmd_eval(const EvalArgs& a);
int cmd_predict(const PredictArgs& a);
int cmd_gradcheck(const GradcheckArgs& a);
int cmd_explain(const ExplainArgs& a);
int cmd_baseline(const BaselineArgs& a);

}  // namespace tcan::cli
