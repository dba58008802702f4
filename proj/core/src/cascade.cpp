#include "tcan/cascade.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "tcan/rng.hpp"

namespace tcan {

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw ValidationError("cannot format number");
  return std::string(buf, ptr);
}

double parse_double(std::string_view s, std::size_t line_no, const char* what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ParseError(line_no, std::string("bad ") + what + " '" + std::string(s) + "'");
  }
  if (!std::isfinite(v) || v < 0.0) {
    throw ParseError(line_no, std::string(what) + " must be finite and non-negative, got '" +
                                  std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

bool valid_node_id(std::string_view id) {
  if (id.empty()) return false;
  return std::none_of(id.begin(), id.end(), [](char ch) {
    return ch == '/' || ch == ':' || ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r';
  });
}

bool record_less(const CascadeRecord& a, const CascadeRecord& b) {
  if (a.is_root() != b.is_root()) return a.is_root();
  if (a.join_time != b.join_time) return a.join_time < b.join_time;
  return a.child < b.child;
}

// Resolved records plus the raw path text of each, for error messages.
struct RawRecord {
  CascadeRecord rec;
  std::string path;
  std::size_t order;
};

// Shared by the parser and validate_cascade: checks tree shape, parent
// existence, time monotonicity and acyclicity. `paths` may be empty.
void check_tree(const std::string& root, const std::vector<CascadeRecord>& records,
                const std::vector<std::string>& paths, std::size_t line_no) {
  std::unordered_map<std::string, std::size_t> at;
  at.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!at.emplace(records[i].child, i).second) {
      throw ParseError(line_no, "node '" + records[i].child + "' has more than one record");
    }
  }
  auto path_of = [&](std::size_t i) {
    if (!paths.empty()) return paths[i];
    const auto& r = records[i];
    return r.parent + "/" + r.child + ":" + format_double(r.join_time);
  };
  bool saw_root = false;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.is_root()) {
      if (r.child != root) throw ParseError(line_no, "record without parent is not the root");
      if (r.join_time != 0.0) throw ParseError(line_no, "root record must have join time 0");
      saw_root = true;
      continue;
    }
    if (r.parent == r.child) throw ParseError(line_no, "self-loop at '" + path_of(i) + "'");
    if (r.child == root) throw ParseError(line_no, "cycle: root has a parent at '" + path_of(i) + "'");
    auto it = at.find(r.parent);
    if (it == at.end()) {
      throw ParseError(line_no, "parent '" + r.parent + "' has no record (path '" + path_of(i) + "')");
    }
    const double pt = records[it->second].join_time;
    if (pt > r.join_time) {
      throw ParseError(line_no, "non-monotone path time at '" + path_of(i) + "': parent '" + r.parent +
                                    "' joined at " + format_double(pt));
    }
  }
  if (!saw_root) throw ParseError(line_no, "missing root record '" + root + ":0'");

  // Every node must reach the root through parent links.
  std::vector<std::uint8_t> state(records.size(), 0);  // 0 unseen, 1 on stack, 2 done
  for (std::size_t i = 0; i < records.size(); ++i) {
    std::vector<std::size_t> chain;
    std::size_t cur = i;
    while (state[cur] == 0) {
      state[cur] = 1;
      chain.push_back(cur);
      if (records[cur].is_root()) break;
      cur = at.at(records[cur].parent);
      if (state[cur] == 1) throw ParseError(line_no, "cycle through '" + records[cur].child + "'");
    }
    for (std::size_t c : chain) state[c] = 2;
  }
}

}  // namespace

ParseError::ParseError(std::size_t line, const std::string& what)
    : ValidationError(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

std::size_t CascadeGraph::num_edges() const {
  return static_cast<std::size_t>(std::count(adjacency.begin(), adjacency.end(), std::uint8_t{1}));
}

Cascade parse_cascade_line(std::string_view line, std::size_t line_no) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const auto fields = split(line, '\t');
  if (fields.size() != 5) {
    throw ParseError(line_no, "expected 5 tab-separated fields, got " + std::to_string(fields.size()));
  }
  Cascade c;
  c.id = std::string(fields[0]);
  if (c.id.empty() || c.id.find(' ') != std::string::npos) throw ParseError(line_no, "bad cascade id");
  c.root = std::string(fields[1]);
  if (!valid_node_id(c.root)) throw ParseError(line_no, "bad root id '" + c.root + "'");
  c.publish_time = parse_double(fields[2], line_no, "publish_time");

  std::size_t declared = 0;
  {
    auto [ptr, ec] = std::from_chars(fields[3].data(), fields[3].data() + fields[3].size(), declared);
    if (ec != std::errc{} || ptr != fields[3].data() + fields[3].size()) {
      throw ParseError(line_no, "bad num_records '" + std::string(fields[3]) + "'");
    }
  }

  std::vector<RawRecord> raw;
  std::size_t order = 0;
  for (std::string_view tok : split(fields[4], ' ')) {
    if (tok.empty()) continue;
    const std::size_t colon = tok.rfind(':');
    if (colon == std::string_view::npos) throw ParseError(line_no, "record '" + std::string(tok) + "' lacks ':t'");
    const std::string_view path = tok.substr(0, colon);
    const double t = parse_double(tok.substr(colon + 1), line_no, "join time");
    const auto hops = split(path, '/');
    for (auto h : hops) {
      if (!valid_node_id(h)) throw ParseError(line_no, "bad node id in path '" + std::string(path) + "'");
    }
    if (hops.front() != c.root) {
      throw ParseError(line_no, "path '" + std::string(path) + "' does not start at root '" + c.root + "'");
    }
    RawRecord r;
    r.path = std::string(tok);
    r.order = order++;
    r.rec.child = std::string(hops.back());
    r.rec.join_time = t;
    if (hops.size() >= 2) r.rec.parent = std::string(hops[hops.size() - 2]);
    raw.push_back(std::move(r));
  }
  for (const auto& r : raw) {
    if (!r.rec.is_root() && r.rec.parent == r.rec.child) {
      throw ParseError(line_no, "self-loop at '" + r.path + "'");
    }
  }

  // One record per child: earliest join time wins, file order breaks ties.
  std::map<std::string, std::size_t> best;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto [it, inserted] = best.emplace(raw[i].rec.child, i);
    if (!inserted) {
      const auto& cur = raw[it->second];
      if (raw[i].rec.join_time < cur.rec.join_time) it->second = i;
    }
  }
  if (best.size() != declared) {
    throw ParseError(line_no, "num_records is " + std::to_string(declared) + " but line has " +
                                  std::to_string(best.size()) + " distinct nodes");
  }
  std::vector<RawRecord> kept;
  kept.reserve(best.size());
  for (const auto& [child, idx] : best) kept.push_back(raw[idx]);
  std::sort(kept.begin(), kept.end(), [](const RawRecord& a, const RawRecord& b) {
    return record_less(a.rec, b.rec);
  });

  std::vector<std::string> paths;
  for (auto& k : kept) {
    c.records.push_back(k.rec);
    paths.push_back(k.path);
  }
  check_tree(c.root, c.records, paths, line_no);
  return c;
}

std::vector<Cascade> parse_cascade_file(std::istream& in) {
  std::vector<Cascade> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_cascade_line(line, line_no));
  }
  return out;
}

std::vector<Cascade> parse_cascade_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_cascade_file(in);
}

std::vector<Cascade> read_cascade_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open cascade file '" + path + "'");
  return parse_cascade_file(in);
}

std::string serialize_cascade(const Cascade& c) {
  std::unordered_map<std::string, const CascadeRecord*> by_child;
  for (const auto& r : c.records) by_child[r.child] = &r;
  std::ostringstream os;
  os << c.id << '\t' << c.root << '\t' << format_double(c.publish_time) << '\t' << c.records.size() << '\t';
  std::vector<std::string> hops;
  for (std::size_t i = 0; i < c.records.size(); ++i) {
    const auto& r = c.records[i];
    hops.clear();
    for (const CascadeRecord* cur = &r;;) {
      hops.push_back(cur->child);
      if (cur->is_root()) break;
      cur = by_child.at(cur->parent);
    }
    if (i > 0) os << ' ';
    for (auto it = hops.rbegin(); it != hops.rend(); ++it) {
      if (it != hops.rbegin()) os << '/';
      os << *it;
    }
    os << ':' << format_double(r.join_time);
  }
  return os.str();
}

void write_cascades(std::ostream& out, std::span<const Cascade> cascades) {
  for (const auto& c : cascades) out << serialize_cascade(c) << '\n';
}

void write_cascade_file(const std::string& path, std::span<const Cascade> cascades) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write cascade file '" + path + "'");
  write_cascades(out, cascades);
  if (!out) throw IoError("write failed for '" + path + "'");
}

void validate_cascade(const Cascade& c) {
  if (c.id.empty()) throw ValidationError("cascade id is empty");
  if (!valid_node_id(c.root)) throw ValidationError("bad root id '" + c.root + "'");
  if (!std::isfinite(c.publish_time) || c.publish_time < 0.0) {
    throw ValidationError("cascade " + c.id + ": bad publish_time");
  }
  for (const auto& r : c.records) {
    if (!valid_node_id(r.child) || (!r.is_root() && !valid_node_id(r.parent))) {
      throw ValidationError("cascade " + c.id + ": bad node id");
    }
    if (!std::isfinite(r.join_time) || r.join_time < 0.0) {
      throw ValidationError("cascade " + c.id + ": bad join time");
    }
  }
  if (c.records.empty() || !c.records.front().is_root()) {
    throw ValidationError("cascade " + c.id + ": first record must be the root");
  }
  if (!std::is_sorted(c.records.begin(), c.records.end(), record_less)) {
    throw ValidationError("cascade " + c.id + ": records not sorted by (join_time, child)");
  }
  try {
    check_tree(c.root, c.records, {}, 0);
  } catch (const ParseError& e) {
    throw ValidationError("cascade " + c.id + ": " + e.what());
  }
}

CascadeViews build_views(const Cascade& c, double t_obs, double t_end) {
  if (!(t_obs > 0.0) || !(t_end >= t_obs) || !std::isfinite(t_end)) {
    throw ValidationError("build_views needs 0 < t_obs <= t_end (got " + format_double(t_obs) + ", " +
                          format_double(t_end) + ")");
  }
  if (c.records.empty() || !c.records.front().is_root()) {
    throw ValidationError("cascade " + c.id + " has no root record");
  }
  if (c.records.front().join_time > t_obs) {
    throw ValidationError("cascade " + c.id + ": root not within observation window");
  }
  CascadeViews v;
  v.cascade_id = c.id;
  v.t_obs = t_obs;
  v.t_end = t_end;
  auto& g = v.graph;
  // Records are sorted by time, so the observed set is a prefix and every
  // parent precedes its children.
  for (const auto& r : c.records) {
    if (r.join_time <= t_obs) {
      const std::size_t idx = g.node_ids.size();
      g.node_ids.push_back(r.child);
      g.node_index.emplace(r.child, idx);
      v.sequence.nodes.push_back(idx);
      v.sequence.times.push_back(r.join_time);
    } else if (r.join_time <= t_end) {
      ++v.label;
    }
  }
  const std::size_t n = g.node_ids.size();
  if (n == 0) throw ValidationError("cascade " + c.id + ": empty observed set");
  g.parent.assign(n, -1);
  g.adjacency.assign(n * n, 0);
  for (const auto& r : c.records) {
    if (r.is_root() || r.join_time > t_obs) continue;
    const std::size_t child = g.node_index.at(r.child);
    auto it = g.node_index.find(r.parent);
    if (it == g.node_index.end()) {
      throw ValidationError("cascade " + c.id + ": parent '" + r.parent + "' outside window");
    }
    g.parent[child] = static_cast<std::ptrdiff_t>(it->second);
    g.adjacency[it->second * n + child] = 1;
  }
  v.observed_size = n;
  return v;
}

std::vector<CascadeViews> filter_dataset(std::vector<CascadeViews> views, std::size_t min_obs) {
  if (min_obs < 1) throw ValidationError("min_obs must be >= 1");
  std::erase_if(views, [&](const CascadeViews& v) { return v.observed_size < min_obs; });
  return views;
}

std::vector<Cascade> filter_publish_window(std::vector<Cascade> cascades, double lo, double hi, double period) {
  if (!(hi > lo)) throw ValidationError("publish window needs lo < hi");
  std::erase_if(cascades, [&](const Cascade& c) {
    double t = c.publish_time;
    if (period > 0.0) t = std::fmod(t, period);
    return t < lo || t >= hi;
  });
  return cascades;
}

std::array<std::size_t, 3> partition_sizes(std::size_t n, const SplitRatios& r) {
  const double ratios[3] = {r.train, r.val, r.test};
  double total = 0.0;
  for (double x : ratios) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw ValidationError("split ratios must be non-negative");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ValidationError("split ratios must sum to 1");

  // Largest-remainder apportionment.
  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> rem{};
  std::size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    const double share = ratios[i] * static_cast<double>(n);
    sizes[i] = static_cast<std::size_t>(std::floor(share));
    rem[i] = share - static_cast<double>(sizes[i]);
    assigned += sizes[i];
  }
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return rem[a] > rem[b]; });
  for (int k = 0; assigned < n; k = (k + 1) % 3) {
    ++sizes[order[k]];
    ++assigned;
  }
  return sizes;
}

std::array<std::vector<std::size_t>, 3> split_indices(std::size_t n, const SplitRatios& ratios, std::uint64_t seed) {
  if (n < 3) throw ValidationError("need at least 3 items to split, got " + std::to_string(n));
  const auto sizes = partition_sizes(n, ratios);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng = make_stream(seed, "split");
  for (std::size_t i = n - 1; i > 0; --i) {
    std::swap(perm[i], perm[uniform_index(rng, i + 1)]);
  }
  std::array<std::vector<std::size_t>, 3> out;
  std::size_t pos = 0;
  for (int s = 0; s < 3; ++s) {
    out[s].assign(perm.begin() + static_cast<std::ptrdiff_t>(pos),
                  perm.begin() + static_cast<std::ptrdiff_t>(pos + sizes[s]));
    pos += sizes[s];
  }
  return out;
}

DatasetSplit split_dataset(std::vector<CascadeViews> views, const SplitRatios& ratios, std::uint64_t seed) {
  const auto parts = split_indices(views.size(), ratios, seed);
  DatasetSplit split;
  split.split_seed = seed;
  split.ratios = ratios;
  std::vector<CascadeViews>* dest[3] = {&split.train, &split.val, &split.test};
  for (int s = 0; s < 3; ++s) {
    dest[s]->reserve(parts[s].size());
    for (std::size_t i : parts[s]) dest[s]->push_back(std::move(views[i]));
  }
  return split;
}

double join_time_quantile(std::span<const Cascade> cascades, double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("quantile must be in [0, 1]");
  std::vector<double> times;
  for (const auto& c : cascades) {
    for (const auto& r : c.records) {
      if (!r.is_root()) times.push_back(r.join_time);
    }
  }
  if (times.empty()) throw ValidationError("no non-root join times to take a quantile of");
  std::sort(times.begin(), times.end());
  const double pos = q * static_cast<double>(times.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, times.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return times[lo] + frac * (times[hi] - times[lo]);
}

}  // namespace tcan
