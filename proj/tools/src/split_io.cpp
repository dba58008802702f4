#include "split_io.hpp"

#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "tcan/error.hpp"

namespace tcan::cli {

using nlohmann::json;

std::string part_path(const std::string& dir, const std::string& part) {
  return (std::filesystem::path(dir) / (part + ".cascades")).string();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed for " + path);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

void write_split(const std::string& dir, const SplitSpec& spec, const std::vector<Cascade> (&parts)[3]) {
  ensure_dir(dir);
  json j{{"t_obs", spec.t_obs},
         {"t_end", spec.t_end},
         {"min_obs", spec.min_obs},
         {"ratios", {spec.ratios.train, spec.ratios.val, spec.ratios.test}},
         {"seed", spec.seed}};
  for (int s = 0; s < 3; ++s) {
    write_cascade_file(part_path(dir, kSplitParts[s]), parts[s]);
    j["counts"][kSplitParts[s]] = parts[s].size();
  }
  write_text_file((std::filesystem::path(dir) / "split.json").string(), j.dump(2) + "\n");
}

SplitSpec read_split_spec(const std::string& dir) {
  const std::string path = (std::filesystem::path(dir) / "split.json").string();
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  SplitSpec s;
  try {
    const json j = json::parse(in);
    s.t_obs = j.at("t_obs").get<double>();
    s.t_end = j.at("t_end").get<double>();
    s.min_obs = j.at("min_obs").get<std::size_t>();
    const auto r = j.at("ratios").get<std::vector<double>>();
    if (r.size() != 3) throw ValidationError("split.json ratios must have three entries");
    s.ratios = {r[0], r[1], r[2]};
    s.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return s;
}

DatasetSplit load_split(const std::string& dir) {
  const SplitSpec spec = read_split_spec(dir);
  DatasetSplit split;
  split.split_seed = spec.seed;
  split.ratios = spec.ratios;
  std::vector<CascadeViews>* dest[3] = {&split.train, &split.val, &split.test};
  for (int s = 0; s < 3; ++s) {
    for (const auto& c : read_cascade_file(part_path(dir, kSplitParts[s]))) {
      dest[s]->push_back(build_views(c, spec.t_obs, spec.t_end));
    }
  }
  return split;
}

}  // namespace tcan::cli
