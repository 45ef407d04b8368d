#include <random>

#include "btsampler/corpus.hpp"
#include "btsampler/error.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace btsampler;

namespace {

Sentence sentence(std::vector<std::string> tokens) { return {0, std::move(tokens)}; }

}  // namespace

TEST_CASE("load splits lines and tokens") {
  auto c = Corpus::parse("a b\nc");
  REQUIRE(c.size() == 2);
  CHECK(c[0].tokens == std::vector<std::string>{"a", "b"});
  CHECK(c[1].tokens == std::vector<std::string>{"c"});
  CHECK(c[0].id == 0);
  CHECK(c[1].id == 1);
}

TEST_CASE("marker is kept on load") {
  auto c = Corpus::parse("B@@ ahr\n");
  REQUIRE(c.size() == 1);
  CHECK(c[0].tokens == std::vector<std::string>{"B@@", "ahr"});
}

TEST_CASE("empty line is an error naming the line") {
  try {
    Corpus::parse("a\n\nb\n");
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()) == "empty sentence at line 2");
  }
  CHECK_THROWS_AS(Corpus::parse("\n"), DataError);
}

TEST_CASE("malformed separators and bytes are rejected") {
  CHECK_THROWS_AS(Corpus::parse("a  b\n"), DataError);
  CHECK_THROWS_AS(Corpus::parse("a b \n"), DataError);
  CHECK_THROWS_AS(Corpus::parse("a\tb\n"), DataError);
  CHECK_THROWS_AS(Corpus::parse("a b\r\n"), DataError);
  CHECK_THROWS_AS(Corpus::parse("caf\xe9\n"), DataError);
  CHECK_NOTHROW(Corpus::parse("caf\xc3\xa9 \xe2\x82\xac\n"));
  CHECK_THROWS_AS(Corpus::parse("a\n", {}, SubwordConvention{""}), UsageError);
}

TEST_CASE("load from disk and missing file") {
  auto dir = bts_test::scratch_dir("corpus");
  bts_test::spit(dir / "c.txt", "x y\nz\n");
  auto c = Corpus::load(dir / "c.txt");
  CHECK(c.size() == 2);
  CHECK(c.source_path() == (dir / "c.txt").string());
  CHECK_THROWS_AS(Corpus::load(dir / "missing.txt"), IoError);
}

TEST_CASE("serialize is byte-identical to the parsed text") {
  for (std::string text : {"a b\nc\n", "a b\nc", "x\n", "\xc3\xa9t\xc3\xa9 @@ x@@ y\n"}) {
    CHECK(Corpus::parse(text).serialize() == text);
  }
  std::mt19937_64 rng(11);
  for (int round = 0; round < 50; ++round) {
    auto c = bts_test::uniform_corpus(1 + rng() % 30, 8, 20, rng);
    const std::string text = c.serialize();
    CHECK(Corpus::parse(text).serialize() == text);
  }
}

TEST_CASE("word spans") {
  const SubwordConvention bpe;
  CHECK(word_spans(sentence({"the", "cat"}), bpe) ==
        std::vector<WordSpan>{{0, 0}, {1, 1}});
  CHECK(word_spans(sentence({"Stan@@", "ford", "University"}), bpe) ==
        std::vector<WordSpan>{{0, 1}, {2, 2}});
  CHECK(word_spans(sentence({"un@@", "believ@@", "able"}), bpe) ==
        std::vector<WordSpan>{{0, 2}});
  // trailing marker closes the last span
  CHECK(word_spans(sentence({"a", "b@@"}), bpe) ==
        std::vector<WordSpan>{{0, 0}, {1, 1}});
  CHECK(word_spans(sentence({"x|", "y"}), SubwordConvention{"|"}) ==
        std::vector<WordSpan>{{0, 1}});
}

TEST_CASE("word spans partition positions") {
  std::mt19937_64 rng(3);
  const SubwordConvention bpe;
  for (int round = 0; round < 500; ++round) {
    std::vector<std::string> toks(1 + rng() % 12);
    for (auto& t : toks) t = (rng() % 2) ? "p@@" : "q";
    const Sentence s = sentence(toks);
    std::size_t next = 0;
    for (const auto& span : word_spans(s, bpe)) {
      CHECK(span.first == next);
      CHECK(span.last >= span.first);
      for (std::size_t p = span.first; p < span.last; ++p) {
        CHECK(bpe.joins_next(toks[p]));
      }
      for (std::size_t p = span.first; p <= span.last; ++p) {
        CHECK(word_span_at(s, p, bpe) == span);
      }
      next = span.last + 1;
    }
    CHECK(next == toks.size());
  }
}
