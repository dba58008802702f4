#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "tcan/cascade.hpp"
#include "tcan/synthgen.hpp"
#include "test_util.hpp"

using namespace tcan;
using tcan::testing::chain_cascade;
using tcan::testing::make_cascade;

namespace {

Cascade abc() { return parse_cascade_line("42\tA\t0\t3\tA:0 A/B:120 A/B/C:300"); }

std::vector<CascadeViews> views_of_sizes(std::initializer_list<std::size_t> sizes) {
  std::vector<CascadeViews> out;
  std::size_t k = 0;
  for (std::size_t n : sizes) {
    out.push_back(build_views(chain_cascade(n, "c" + std::to_string(k++)), 1e6, 1e6));
  }
  return out;
}

}  // namespace

TEST(Parse, ThreeNodeChain) {
  const Cascade c = abc();
  EXPECT_EQ(c.id, "42");
  EXPECT_EQ(c.root, "A");
  ASSERT_EQ(c.size(), 3u);
  EXPECT_TRUE(c.records[0].is_root());
  EXPECT_EQ(c.records[1], (CascadeRecord{"A", "B", 120}));
  EXPECT_EQ(c.records[2], (CascadeRecord{"B", "C", 300}));
}

TEST(Parse, Singleton) {
  const Cascade c = parse_cascade_line("7\tA\t0\t1\tA:0");
  ASSERT_EQ(c.size(), 1u);
  EXPECT_TRUE(c.records[0].is_root());
  const auto v = build_views(c, 1, 2);
  EXPECT_EQ(v.graph.num_edges(), 0u);
}

TEST(Parse, DuplicateKeepsEarliest) {
  const Cascade c = parse_cascade_line("9\tA\t0\t2\tA:0 A/B:50 A/B:80");
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.records[1], (CascadeRecord{"A", "B", 50}));
}

TEST(Parse, DuplicateOrderIndependent) {
  const Cascade c = parse_cascade_line("9\tA\t0\t2\tA:0 A/B:80 A/B:50");
  EXPECT_EQ(c.records[1].join_time, 50);
}

TEST(Parse, SortsByTimeThenId) {
  const Cascade d = parse_cascade_line("1\tA\t5\t4\tA:0 A/C:3 A/B:3 A/B/D:4");
  std::vector<std::string> got;
  for (const auto& r : d.records) got.push_back(r.child);
  EXPECT_EQ(got, (std::vector<std::string>{"A", "B", "C", "D"}));
}

TEST(Parse, Rejects) {
  const char* bad[] = {
      "1\tA\t0\t2\tA:0",                // count mismatch
      "1\tA\t0\t2\tA:0 B/C:1",          // path not from root
      "1\tA\t0\t2\tA:0 A/B:-1",         // negative time
      "1\tA\t0\t2\tA:0 A/B:nan",        // non-finite
      "1\tA\t0\t3\tA:0 A/B/C:1 A/B:2",  // child before parent
      "1\tA\t0\t2\tA:0 A/X/B:1",        // parent without record
      "1\tA\t0\t1\tA:3",                // root time not 0
      "1\tA\t0\t2\tA/B:1 A/B/C:2",      // missing root record
      "1\tA\t0\t2\tA:0 A/A:1",          // self-loop
      "1\tA\t0",                        // too few fields
      "1\tA\tx\t1\tA:0",                // bad publish time
      "1\tA\t0\t1\tA0",                 // missing ':'
  };
  for (const char* line : bad) EXPECT_THROW(parse_cascade_line(line), ParseError) << line;
}

TEST(Parse, FileSkipsBlankLinesAndReportsLineNumbers) {
  std::istringstream in("7\tA\t0\t1\tA:0\n\n8\tB\t0\t1\tB:0\n9\tC\t0\t9\tC:0\n");
  try {
    parse_cascade_file(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
  EXPECT_EQ(parse_cascade_text("7\tA\t0\t1\tA:0\n\n8\tB\t0\t1\tB:0\n").size(), 2u);
}

TEST(Serialize, CanonicalRoundTrip) {
  const std::string line = "42\tA\t0\t3\tA:0 A/B:120 A/B/C:300";
  EXPECT_EQ(serialize_cascade(parse_cascade_line(line)), line);
  // Non-canonical input: out of order, duplicate, trailing zeros.
  const Cascade c = parse_cascade_line("5\tA\t1.50\t3\tA:0 A/B/C:3.0 A/B:2 A/B:2.5");
  EXPECT_EQ(serialize_cascade(c), "5\tA\t1.5\t3\tA:0 A/B:2 A/B/C:3");
  EXPECT_EQ(parse_cascade_line(serialize_cascade(c)), c);
}

TEST(Serialize, ShortestRoundTripDoubles) {
  Cascade c = make_cascade("x", {{"", "r", 0}, {"r", "a", 0.1}, {"r", "b", 1.0 / 3.0}});
  c.publish_time = 1e17 + 8;
  EXPECT_EQ(parse_cascade_line(serialize_cascade(c)), c);
}

TEST(Views, ObservationWindows) {
  const Cascade c = abc();
  auto v = build_views(c, 200, 400);
  EXPECT_EQ(v.sequence.nodes, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(v.graph.node_ids, (std::vector<NodeId>{"A", "B"}));
  EXPECT_TRUE(v.graph.edge(0, 1));
  EXPECT_EQ(v.graph.num_edges(), 1u);
  EXPECT_EQ(v.observed_size, 2u);
  EXPECT_EQ(v.label, 1u);

  EXPECT_EQ(build_views(c, 400, 400).label, 0u);

  v = build_views(c, 50, 400);
  EXPECT_EQ(v.graph.node_ids, (std::vector<NodeId>{"A"}));
  EXPECT_EQ(v.graph.num_edges(), 0u);
  EXPECT_EQ(v.label, 2u);
}

TEST(Views, InclusiveBoundaries) {
  const Cascade c = abc();
  EXPECT_EQ(build_views(c, 120, 300).observed_size, 2u);
  EXPECT_EQ(build_views(c, 120, 300).label, 1u);
  EXPECT_EQ(build_views(c, 120, 299).label, 0u);
}

TEST(Views, RejectsBadWindows) {
  EXPECT_THROW(build_views(abc(), 0, 10), ValidationError);
  EXPECT_THROW(build_views(abc(), 10, 5), ValidationError);
}

TEST(Filter, Examples) {
  auto sizes = [](const std::vector<CascadeViews>& vs) {
    std::vector<std::size_t> s;
    for (const auto& v : vs) s.push_back(v.observed_size);
    return s;
  };
  EXPECT_EQ(sizes(filter_dataset(views_of_sizes({3, 10, 25}), 10)), (std::vector<std::size_t>{10, 25}));
  EXPECT_EQ(sizes(filter_dataset(views_of_sizes({3, 10, 25}), 1)), (std::vector<std::size_t>{3, 10, 25}));
  EXPECT_TRUE(filter_dataset(views_of_sizes({3, 4}), 10).empty());
}

TEST(Filter, PublishWindow) {
  std::vector<Cascade> cs;
  for (double p : {3600.0 * 7, 3600.0 * 8, 3600.0 * 17.5, 3600.0 * 18, 86400.0 + 3600 * 9}) {
    Cascade c = chain_cascade(2, std::to_string(p));
    c.publish_time = p;
    cs.push_back(c);
  }
  auto kept = filter_publish_window(cs, 8 * 3600.0, 18 * 3600.0, 86400.0);
  ASSERT_EQ(kept.size(), 3u);
  EXPECT_EQ(kept[2].publish_time, 86400.0 + 3600 * 9);
  EXPECT_EQ(filter_publish_window(cs, 8 * 3600.0, 18 * 3600.0).size(), 2u);
}

TEST(Split, Sizes) {
  auto p = partition_sizes(1000, {});
  EXPECT_EQ(p, (std::array<std::size_t, 3>{700, 150, 150}));
  p = partition_sizes(10, {0.8, 0.1, 0.1});
  EXPECT_EQ(p, (std::array<std::size_t, 3>{8, 1, 1}));
  EXPECT_THROW(partition_sizes(10, {0.5, 0.1, 0.1}), ValidationError);
}

TEST(Split, DeterministicPartition) {
  std::vector<CascadeViews> vs;
  for (int i = 0; i < 1000; ++i) vs.push_back(build_views(chain_cascade(2, std::to_string(i)), 5, 5));
  auto ids = [](const DatasetSplit& s) {
    std::array<std::vector<std::string>, 3> out;
    const std::vector<CascadeViews>* parts[3] = {&s.train, &s.val, &s.test};
    for (int k = 0; k < 3; ++k) {
      for (const auto& v : *parts[k]) out[k].push_back(v.cascade_id);
    }
    return out;
  };
  const auto a = ids(split_dataset(vs, {}, 3));
  const auto b = ids(split_dataset(vs, {}, 3));
  const auto c = ids(split_dataset(vs, {}, 4));
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  EXPECT_EQ(a[0].size(), 700u);
  std::set<std::string> all;
  for (const auto& part : a) all.insert(part.begin(), part.end());
  EXPECT_EQ(all.size(), 1000u);
}

TEST(Quantile, LinearInterpolation) {
  std::vector<Cascade> cs{chain_cascade(5)};  // times 1..4
  EXPECT_DOUBLE_EQ(join_time_quantile(cs, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(join_time_quantile(cs, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(join_time_quantile(cs, 0.5), 2.5);
}

TEST(Invariants, GeneratedViewsAreConsistent) {
  GenConfig g;
  g.n_cascades = 200;
  g.seed = 11;
  g.max_size = 200;
  g.n_users = 500;
  for (const auto& c : generate(g)) {
    EXPECT_NO_THROW(validate_cascade(c));
    std::size_t prev_obs = 0, prev_label = c.size();
    for (double t : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) {
      const auto v = build_views(c, t, 10.0);
      EXPECT_EQ(v.sequence.size(), v.observed_size);
      EXPECT_EQ(v.graph.size(), v.observed_size);
      EXPECT_EQ(v.graph.num_edges(), v.observed_size - 1);
      EXPECT_GE(v.observed_size, prev_obs);
      EXPECT_LE(v.label, prev_label);
      prev_obs = v.observed_size;
      prev_label = v.label;
    }
  }
}
