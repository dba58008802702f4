#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tcan/error.hpp"

namespace tcan {

using NodeId = std::string;

/// One join event. The root record has an empty parent and join_time 0;
/// join_time is an offset from the cascade's publish_time.
struct CascadeRecord {
  NodeId parent;
  NodeId child;
  double join_time = 0.0;

  bool is_root() const { return parent.empty(); }
  friend bool operator==(const CascadeRecord&, const CascadeRecord&) = default;
};

/// Directed acyclic temporal graph of one post's diffusion. Records are a
/// tree rooted at `root`, sorted by (join_time, child id) with the root
/// record always first.
struct Cascade {
  std::string id;
  NodeId root;
  double publish_time = 0.0;
  std::vector<CascadeRecord> records;

  std::size_t size() const { return records.size(); }
  friend bool operator==(const Cascade&, const Cascade&) = default;
};

/// Structure of the observed prefix with timestamps stripped. Dense indices
/// follow join order, so index 0 is the root.
struct CascadeGraph {
  std::vector<NodeId> node_ids;
  std::unordered_map<NodeId, std::size_t> node_index;
  /// parent[i] is the dense index of i's parent, -1 for the root.
  std::vector<std::ptrdiff_t> parent;
  /// n*n row-major; entry (a, b) is 1 iff the directed edge a->b was observed.
  std::vector<std::uint8_t> adjacency;

  std::size_t size() const { return node_ids.size(); }
  bool edge(std::size_t from, std::size_t to) const { return adjacency[from * size() + to] != 0; }
  std::size_t num_edges() const;
};

struct CascadeSequence {
  std::vector<std::size_t> nodes;
  std::vector<double> times;

  std::size_t size() const { return nodes.size(); }
};

/// Everything a predictor sees for one cascade under an observation window,
/// plus the incremental-popularity label.
struct CascadeViews {
  std::string cascade_id;
  CascadeGraph graph;
  CascadeSequence sequence;
  std::size_t observed_size = 0;
  std::size_t label = 0;
  double t_obs = 0.0;
  double t_end = 0.0;

  const std::vector<double>& times() const { return sequence.times; }
};

struct SplitRatios {
  double train = 0.7;
  double val = 0.15;
  double test = 0.15;
};

struct DatasetSplit {
  std::vector<CascadeViews> train;
  std::vector<CascadeViews> val;
  std::vector<CascadeViews> test;
  std::uint64_t split_seed = 0;
  SplitRatios ratios;
};

/// Malformed cascade text. `line()` is 1-based, 0 when not line-bound.
class ParseError : public ValidationError {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Parse one line of the cascade format:
/// `<id>\t<root>\t<publish_time>\t<num_records>\t<path>:<t> <path>:<t> ...`
/// A node listed more than once keeps its earliest record; num_records
/// counts distinct nodes.
Cascade parse_cascade_line(std::string_view line, std::size_t line_no = 0);
std::vector<Cascade> parse_cascade_file(std::istream& in);
std::vector<Cascade> parse_cascade_text(std::string_view text);
std::vector<Cascade> read_cascade_file(const std::string& path);

/// Canonical line (no trailing newline). Paths are rebuilt from the parent
/// chain and times use the shortest round-trip decimal form.
std::string serialize_cascade(const Cascade& c);
void write_cascades(std::ostream& out, std::span<const Cascade> cascades);
void write_cascade_file(const std::string& path, std::span<const Cascade> cascades);

/// Throws ValidationError if any cascade invariant fails.
void validate_cascade(const Cascade& c);

/// Restrict `c` to join_time <= t_obs; the label counts joins in (t_obs, t_end].
CascadeViews build_views(const Cascade& c, double t_obs, double t_end);

std::vector<CascadeViews> filter_dataset(std::vector<CascadeViews> views, std::size_t min_obs);

/// Keep cascades whose publish time lies in [lo, hi). With period > 0 the
/// publish time is reduced modulo period first (e.g. hour-of-day windows).
std::vector<Cascade> filter_publish_window(std::vector<Cascade> cascades, double lo, double hi,
                                           double period = 0.0);

/// Sizes of a contiguous three-way partition of n items; each differs from
/// the exact ratio share by less than one.
std::array<std::size_t, 3> partition_sizes(std::size_t n, const SplitRatios& ratios);

/// Deterministic permutation used by split_dataset, grouped per split.
std::array<std::vector<std::size_t>, 3> split_indices(std::size_t n, const SplitRatios& ratios,
                                                      std::uint64_t seed);

DatasetSplit split_dataset(std::vector<CascadeViews> views, const SplitRatios& ratios,
                           std::uint64_t seed);

/// q-quantile (linear interpolation) of all non-root join times.
double join_time_quantile(std::span<const Cascade> cascades, double q);

}  // namespace tcan
