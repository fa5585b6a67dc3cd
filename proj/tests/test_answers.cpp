#include <doctest.h>

#include "specbench/answers.hpp"
#include "specbench/dataset.hpp"

using namespace specbench;

TEST_CASE("strict parses the canonical formats") {
  auto a = parse_answer("(1),(3)", 43, true);
  CHECK(a.indices == std::set<int>{1, 3});
  CHECK(a.mode == ParseMode::Strict);
  CHECK_FALSE(a.failed);
  CHECK(a.warnings.empty());

  auto b = parse_answer("(37)", 43, true);
  CHECK(b.indices == std::set<int>{37});
  CHECK(b.mode == ParseMode::Strict);

  auto c = parse_answer("  (2) , (5) ", 43, true);
  CHECK(c.indices == std::set<int>{2, 5});
  CHECK(c.mode == ParseMode::Strict);
}

TEST_CASE("lenient fallback extracts embedded tokens and warns") {
  auto a = parse_answer("The answer is (2), (10).", 43, true);
  CHECK(a.indices == std::set<int>{2, 10});
  CHECK(a.mode == ParseMode::Lenient);
  CHECK_FALSE(a.failed);
  CHECK_FALSE(a.warnings.empty());
}

TEST_CASE("out of range index becomes a parse failure") {
  auto a = parse_answer("(50)", 43, true);
  CHECK(a.failed);
  CHECK(a.indices.empty());
  bool mentioned = false;
  for (const auto& w : a.warnings) {
    if (w.find("50") != std::string::npos) mentioned = true;
  }
  CHECK(mentioned);
}

TEST_CASE("empty and garbage answers fail without throwing") {
  CHECK(parse_answer("", 43, true).failed);
  CHECK(parse_answer("no idea", 43, true).failed);
  CHECK(parse_answer("()", 43, true).failed);
  CHECK(parse_answer("(999999999999999999999999)", 43, true).failed);
}

TEST_CASE("single label keeps the first surviving index") {
  auto a = parse_answer("(7),(3)", 10, false);
  CHECK(a.indices == std::set<int>{7});
  CHECK_FALSE(a.warnings.empty());

  // first token is out of range; the next one wins
  auto b = parse_answer("(50),(3)", 10, false);
  CHECK(b.indices == std::set<int>{3});
}

TEST_CASE("duplicates collapse") {
  auto a = parse_answer("(4),(4),(4)", 43, true);
  CHECK(a.indices == std::set<int>{4});
  CHECK(a.mode == ParseMode::Strict);
}

TEST_CASE("strict round-trip over random index sets") {
  SplitMix64 rng(123);
  for (int trial = 0; trial < 200; ++trial) {
    std::set<int> indices;
    const int size = 1 + static_cast<int>(rng.next() % 5);
    while (static_cast<int>(indices.size()) < size) {
      indices.insert(1 + static_cast<int>(rng.next() % 43));
    }
    const auto parsed = parse_answer(format_answer(indices), 43, true);
    CHECK(parsed.mode == ParseMode::Strict);
    CHECK(parsed.indices == indices);
  }
}

TEST_CASE("lenient accepts everything strict accepts, with identical indices") {
  SplitMix64 rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    std::set<int> indices;
    const int size = 1 + static_cast<int>(rng.next() % 4);
    while (static_cast<int>(indices.size()) < size) {
      indices.insert(1 + static_cast<int>(rng.next() % 43));
    }
    const std::string text = format_answer(indices);
    const auto strict = parse_answer(text, 43, true);
    REQUIRE(strict.mode == ParseMode::Strict);
    // force the lenient path by prefixing junk
    const auto lenient = parse_answer("x " + text, 43, true);
    CHECK(lenient.mode == ParseMode::Lenient);
    CHECK(lenient.indices == strict.indices);
  }
}

TEST_CASE("fuzzing random bytes never throws") {
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 2000; ++trial) {
    std::string text;
    const int len = static_cast<int>(rng.next() % 64);
    for (int i = 0; i < len; ++i) {
      text.push_back(static_cast<char>(rng.next() % 256));
    }
    const auto parsed = parse_answer(text, 43, true);
    for (int idx : parsed.indices) {
      CHECK(idx >= 1);
      CHECK(idx <= 43);
    }
  }
}

TEST_CASE("format_answer is ascending") {
  CHECK(format_answer({3, 1}) == "(1),(3)");
  CHECK(format_answer({37}) == "(37)");
  CHECK(format_answer({}) == "");
}
