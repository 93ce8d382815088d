#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "driverl/error.hpp"
#include "driverl/rag.hpp"

using namespace driverl;

namespace {

std::string read(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

TEST(Tokenize, LowercaseAlnum) {
  EXPECT_EQ(tokenize("Reverse the CAR, v_min<0!"),
            (std::vector<std::string>{"reverse", "the", "car", "v_min", "0"}));
  EXPECT_TRUE(tokenize("  ...  ").empty());
}

TEST(Score, MatchesHandComputation) {
  MemoryEntry e{0, MemoryFamily::mpc_memory, "the car the wall car road"};
  // unique entry tokens {the, car, wall, road}; query {car, road, sky}
  EXPECT_NEAR(lexical_score("Car road sky car", e), 2.0 / 2.0, 1e-15);
  EXPECT_EQ(lexical_score("nothing", e), 0.0);
  EXPECT_EQ(lexical_score("road car", e), lexical_score("car road", e));
}

TEST(Assets, ElevenEntriesEach) {
  EXPECT_EQ(default_mpc_memories().size(), 11u);
  EXPECT_EQ(default_decision_hints().size(), 11u);
  EXPECT_EQ(default_mpc_memories().entries()[0].header(), "# Memory Entry 0:");
  EXPECT_EQ(default_decision_hints().entries()[0].header(), "# Hint 1:");
  EXPECT_NE(default_mpc_memories().entries()[3].text.find("To reverse the car slowly on the racing line"),
            std::string::npos);
}

TEST(Assets, TextRoundTripsAndMatchesShippedFiles) {
  EXPECT_EQ(load_memories(mpc_memories_text()).to_text(), std::string(mpc_memories_text()));
  EXPECT_EQ(load_memories(decision_hints_text()).to_text(), std::string(decision_hints_text()));
  EXPECT_EQ(read(std::string(DRIVERL_SOURCE_DIR) + "/data/rag/mpc_memories.txt"), std::string(mpc_memories_text()));
  EXPECT_EQ(read(std::string(DRIVERL_SOURCE_DIR) + "/data/rag/decision_hints.txt"),
            std::string(decision_hints_text()));
}

TEST(Retrieve, ReverseQueryFindsEntryThree) {
  const auto r = default_mpc_memories().retrieve("reverse the car", 5);
  ASSERT_EQ(r.size(), 5u);
  EXPECT_TRUE(std::any_of(r.begin(), r.end(), [](const MemoryEntry& e) { return e.id == 3; }));
}

TEST(Retrieve, OrderingTiesAndBounds) {
  MemoryStore store({{2, MemoryFamily::decision_hint, "alpha beta"},
                     {1, MemoryFamily::decision_hint, "alpha gamma"},
                     {3, MemoryFamily::decision_hint, "delta"}});
  const auto r = store.retrieve("alpha", 10);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0].id, 1);
  EXPECT_EQ(r[1].id, 2);
  EXPECT_EQ(r[2].id, 3);
  EXPECT_EQ(store.retrieve("alpha", 1).size(), 1u);
  EXPECT_THROW(MemoryStore().retrieve("x"), Error);
  EXPECT_THROW(store.retrieve("x", 0), Error);
}

TEST(Retrieve, DeterministicNoDuplicatesPermutationInvariant) {
  std::mt19937_64 rng(4);
  const auto& store = default_mpc_memories();
  std::vector<std::string> words = {"reverse", "speed", "smooth", "wall", "centerline", "v_min", "qn", "car"};
  for (int i = 0; i < 100; ++i) {
    std::shuffle(words.begin(), words.end(), rng);
    std::string q;
    for (int k = 0; k < 4; ++k) q += words[k] + " ";
    const auto a = store.retrieve(q, 5);
    std::string q2;
    for (int k = 3; k >= 0; --k) q2 += words[k] + " ";
    const auto b = store.retrieve(q2, 5);
    ASSERT_EQ(a.size(), b.size());
    std::set<int> ids;
    for (std::size_t k = 0; k < a.size(); ++k) {
      EXPECT_EQ(a[k].id, b[k].id);
      ids.insert(a[k].id);
    }
    EXPECT_EQ(ids.size(), a.size());
  }
}

TEST(Retrieve, CustomScorer) {
  const auto& store = default_mpc_memories();
  const auto r = store.retrieve("anything", 3, [](std::string_view, const MemoryEntry& e) { return e.id; });
  EXPECT_EQ(r[0].id, 10);
  EXPECT_EQ(r[2].id, 8);
}

TEST(Load, Errors) {
  EXPECT_THROW(load_memories("# Hint 1:\na\n# Hint 1:\nb\n"), ParseError);
  EXPECT_THROW(load_memories("# Hint 1:\n\n# Hint 2:\nb\n"), ParseError);
  EXPECT_THROW(load_memories("# Hint 1:\na\n# Memory Entry 2:\nb\n"), ParseError);
  EXPECT_THROW(load_memories("preamble\n# Hint 1:\na\n"), ParseError);
  const auto s = load_memories("# Hint 4:\nfirst\n# Hint 2:\nsecond\nline\n");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.entries()[0].id, 4);
  EXPECT_EQ(s.entries()[1].text, "second\nline");
}
