#include <gtest/gtest.h>

#include "cgra/error.hpp"
#include "support.hpp"

using namespace cgra;
using support::json;

namespace {

Dfg three_arrays(int length) {
  json vars = json::array();
  json nodes = json::array();
  for (const char* v : {"a", "b", "c"}) {
    vars.push_back({{"name", v}, {"length", length}});
    nodes.push_back({{"id", std::string("l") + v}, {"opcode", "LOAD"}, {"variable", v}});
  }
  return support::make_dfg(nodes, json::array(), vars);
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::IoError;
}

}  // namespace

TEST(Layout, RoundRobinByFirstUse) {
  const auto layout = assign_layout(three_arrays(8), support::geometry(2, 64));
  ASSERT_EQ(layout.entries.size(), 3u);
  EXPECT_EQ(*layout.find("a"), (LayoutEntry{"a", 0, 0, 8}));
  EXPECT_EQ(*layout.find("b"), (LayoutEntry{"b", 1, 0, 8}));
  EXPECT_EQ(*layout.find("c"), (LayoutEntry{"c", 0, 8, 8}));
}

TEST(Layout, ExactFit) {
  const Dfg g = support::make_dfg(json::array({{{"id", "l"}, {"opcode", "LOAD"}, {"variable", "a"}}}), json::array(),
                                  json::array({{{"name", "a"}, {"length", 32}}}));
  const auto layout = assign_layout(g, support::geometry(1, 32));
  EXPECT_EQ(*layout.find("a"), (LayoutEntry{"a", 0, 0, 32}));
}

TEST(Layout, BankOverflow) {
  const Dfg g = three_arrays(32);
  EXPECT_EQ(code_of([&] { assign_layout(g, support::geometry(1, 64)); }), ErrorCode::BankOverflow);
  EXPECT_NO_THROW(assign_layout(g, support::geometry(3, 32)));
}

TEST(Layout, MissingSize) {
  EXPECT_EQ(code_of([&] { assign_layout(three_arrays(4), support::geometry(), {{"a", 4}, {"b", 4}}); }),
            ErrorCode::MissingVariable);
}

TEST(Layout, EmbedAddresses) {
  const Dfg g = bundled_kernel("vecadd");
  LayoutFile layout{{{"a", 0, 0, 8}, {"b", 1, 0, 8}, {"c", 0, 8, 8}}};
  const Dfg e = embed_addresses(g, layout);
  EXPECT_EQ(e.nodes[e.index_of("la")].constant, 0);
  EXPECT_EQ(e.nodes[e.index_of("lb")].bank, 1);
  EXPECT_EQ(e.nodes[e.index_of("st")].constant, 8);
  EXPECT_EQ(e.nodes[e.index_of("st")].bank, 0);
  // Non-memory nodes keep their constants.
  EXPECT_EQ(e.nodes[e.index_of("i")].constant, g.nodes[g.index_of("i")].constant);
}

TEST(Layout, ScalarsTakeTopOfBank) {
  const Dfg g = bundled_kernel("accumulate");
  const auto layout = assign_layout(g, support::geometry(1, 32));
  EXPECT_EQ(*layout.find("x"), (LayoutEntry{"x", 0, 0, 16}));
  EXPECT_EQ(*layout.find("out"), (LayoutEntry{"out", 0, 31, 1}));
  EXPECT_EQ(embed_addresses(g, layout).nodes[g.index_of("st")].constant, 31);
}

TEST(Layout, EmbedMissingVariable) {
  LayoutFile layout{{{"a", 0, 0, 8}, {"b", 1, 0, 8}}};
  EXPECT_EQ(code_of([&] { embed_addresses(bundled_kernel("vecadd"), layout); }), ErrorCode::MissingVariable);
}

TEST(Layout, FileRoundTrip) {
  for (const auto& k : kernel_names()) {
    const auto layout = assign_layout(bundled_kernel(k), support::geometry(4, 64));
    EXPECT_EQ(parse_layout(serialize_layout(layout)), layout) << k;
  }
  EXPECT_EQ(code_of([] { parse_layout(R"([{"var": "a", "bank": 0, "base": 0, "len": 1, "x": 2}])"); }),
            ErrorCode::SchemaError);
}

TEST(Layout, Deterministic) {
  for (const auto& k : kernel_names())
    EXPECT_EQ(assign_layout(bundled_kernel(k), support::geometry(2, 64)),
              assign_layout(bundled_kernel(k), support::geometry(2, 64)));
}

// The same inputs give the same outputs whichever bank each variable lands in.
TEST(Layout, ReferenceOutputIsBankInvariant) {
  for (const auto& k : kernel_names()) {
    const Dfg g = bundled_kernel(k);
    std::vector<std::vector<long long>> outputs;
    for (int banks : {1, 2, 3, 4}) {
      const auto geo = support::geometry(banks, 128);
      const auto layout = assign_layout(g, geo);
      auto mem = MemoryImage::zeros(geo);
      for (const auto& v : g.variables) {
        std::vector<long long> vals(v.length);
        for (int i = 0; i < v.length; ++i) vals[i] = (i * 7 + v.name.size() * 13) % 23 - 11;
        support::poke(mem, layout, v.name, vals);
      }
      const auto out = reference_execute(embed_addresses(g, layout), mem, layout, g.iteration_count_hint.value_or(8));
      std::vector<long long> flat;
      for (const auto& v : g.variables) {
        const auto words = support::peek(out, layout, v.name);
        flat.insert(flat.end(), words.begin(), words.end());
      }
      outputs.push_back(flat);
    }
    for (std::size_t i = 1; i < outputs.size(); ++i) EXPECT_EQ(outputs[i], outputs[0]) << k;
  }
}
