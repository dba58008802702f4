#pragma once

#include <string>
#include <vector>

#include "tcan/cascade.hpp"

namespace tcan::cli {

/// On-disk split: `{train,val,test}.cascades` plus `split.json` holding
/// the observation window and split parameters.
struct SplitSpec {
  double t_obs = 0.0;
  double t_end = 0.0;
  std::size_t min_obs = 0;
  SplitRatios ratios;
  std::uint64_t seed = 0;
};

inline const char* const kSplitParts[3] = {"train", "val", "test"};

std::string part_path(const std::string& dir, const std::string& part);
void write_split(const std::string& dir, const SplitSpec& spec, const std::vector<Cascade> (&parts)[3]);
SplitSpec read_split_spec(const std::string& dir);
/// Views of every part under the stored window.
DatasetSplit load_split(const std::string& dir);

void write_text_file(const std::string& path, const std::string& text);
void ensure_dir(const std::string& dir);

}  // namespace tcan::cli
