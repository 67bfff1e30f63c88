#include <gtest/gtest.h>

#include <functional>
#include <sstream>

#include "gen.hpp"
#include "radsum/corpus.hpp"
#include "radsum/error.hpp"

using namespace radsum;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no radsum::Error thrown";
  return ErrorKind::Io;
}

std::string message_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

ReportRecord rec(std::string id, std::string findings, std::string impression, Split split = Split::train) {
  return {std::move(id), std::move(findings), std::move(impression), split};
}

}  // namespace

TEST(LoadCorpus, Jsonl) {
  std::istringstream in(
      R"({"id":"r1","findings":"Heart normal.","impression":"No active disease.","split":"train"})" "\n"
      "\n"
      R"({"id":"r2","findings":"Left effusion.","impression":"Effusion.","split":"validation"})" "\n"
      R"({"id":"r3","findings":"Clear lungs.","impression":"Normal.","split":"test"})" "\n");
  auto c = parse_corpus_jsonl(in);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[1].id, "r2");
  EXPECT_EQ(c[1].split, Split::validation);
  EXPECT_EQ(c[2].impression, "Normal.");
}

TEST(LoadCorpus, CsvWithQuotedFields) {
  std::istringstream in(
      "split,id,findings,impression\n"
      "train,r1,\"Heart normal, lungs clear.\",No active disease.\n"
      "validation,r2,\"Multi\nline\",\"He said \"\"ok\"\".\"\n"
      "test,r3,Clear.,Normal.\n");
  auto c = parse_corpus_csv(in);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0].findings, "Heart normal, lungs clear.");
  EXPECT_EQ(c[1].findings, "Multi\nline");
  EXPECT_EQ(c[1].impression, "He said \"ok\".");
}

TEST(LoadCorpus, DuplicateIdNamed) {
  std::istringstream in(
      R"({"id":"r1","findings":"a","impression":"b","split":"train"})" "\n"
      R"({"id":"r1","findings":"c","impression":"d","split":"train"})" "\n");
  auto fn = [&] { parse_corpus_jsonl(in); };
  std::istringstream again(in.str());
  EXPECT_EQ(kind_of(fn), ErrorKind::DuplicateId);
  EXPECT_NE(message_of([&] { parse_corpus_jsonl(again); }).find("r1"), std::string::npos);
}

TEST(LoadCorpus, MissingAndEmptyFields) {
  std::istringstream missing(R"({"id":"r1","findings":"a","split":"train"})" "\n");
  EXPECT_EQ(kind_of([&] { parse_corpus_jsonl(missing); }), ErrorKind::MissingField);
  std::istringstream blank(R"({"id":"r1","findings":"a","impression":"   ","split":"train"})" "\n");
  EXPECT_EQ(kind_of([&] { parse_corpus_jsonl(blank); }), ErrorKind::MissingField);
}

TEST(LoadCorpus, MalformedLineReportsLineNumber) {
  std::istringstream in(
      R"({"id":"r1","findings":"a","impression":"b","split":"train"})" "\n"
      "{not json\n");
  std::string msg;
  try {
    parse_corpus_jsonl(in);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Parse);
    msg = e.what();
  }
  EXPECT_NE(msg.find("line 2"), std::string::npos);
}

TEST(LoadCorpus, BadSplitAndRaggedCsv) {
  std::istringstream split(R"({"id":"r1","findings":"a","impression":"b","split":"dev"})" "\n");
  EXPECT_EQ(kind_of([&] { parse_corpus_jsonl(split); }), ErrorKind::Parse);
  std::istringstream ragged("id,findings,impression,split\nr1,a,b\n");
  EXPECT_EQ(kind_of([&] { parse_corpus_csv(ragged); }), ErrorKind::Parse);
}

TEST(LoadCorpus, FormatFromExtension) {
  EXPECT_EQ(format_for("x/reports.CSV"), CorpusFormat::csv);
  EXPECT_EQ(format_for("reports.jsonl"), CorpusFormat::jsonl);
  EXPECT_EQ(kind_of([] { load_corpus("/nonexistent/corpus.jsonl"); }), ErrorKind::Io);
}

TEST(LoadCorpus, Fixture) {
  auto c = load_corpus(std::string(RADSUM_FIXTURES) + "/fixture_corpus.jsonl");
  EXPECT_EQ(records_in_split(c, Split::validation).size(), 50u);
}

TEST(Clean, LongerImpressionExcluded) {
  auto r = clean_corpus({rec("a", "one two three four five", "one two three four five six seven")});
  ASSERT_EQ(r.excluded.size(), 1u);
  EXPECT_EQ(r.excluded[0].id, "a");
  EXPECT_EQ(r.excluded[0].findings_tokens, 5u);
  EXPECT_EQ(r.excluded[0].impression_tokens, 7u);
  EXPECT_TRUE(r.retained.empty());
}

TEST(Clean, EqualLengthRetained) {
  auto r = clean_corpus({rec("a", "one two three four five six", "six five four three two one")});
  EXPECT_EQ(r.retained.size(), 1u);
  EXPECT_TRUE(r.excluded.empty());
}

TEST(Clean, PunctuationCountsAsTokens) {
  EXPECT_EQ(word_token_count("No acute disease."), 4u);
  EXPECT_EQ(word_token_count(""), 0u);
}

TEST(Clean, PropertyNeverGrowsOrEdits) {
  testgen::Rng rng(31);
  for (int trial = 0; trial < 2000; ++trial) {
    Corpus c;
    const std::size_t n = testgen::uniform(rng, 0, 12);
    for (std::size_t i = 0; i < n; ++i) {
      c.push_back(rec("r" + std::to_string(i), testgen::messy_text(rng, 40), testgen::messy_text(rng, 40)));
    }
    auto r = clean_corpus(c);
    ASSERT_EQ(r.retained.size() + r.excluded.size(), c.size());
    std::size_t k = 0;
    for (const auto& kept : r.retained) {
      while (k < c.size() && c[k].id != kept.id) ++k;
      ASSERT_LT(k, c.size());
      ASSERT_EQ(kept, c[k]);
      ASSERT_LE(word_token_count(kept.impression), word_token_count(kept.findings));
    }
    for (const auto& ex : r.excluded) ASSERT_GT(ex.impression_tokens, ex.findings_tokens);
    // cleaning is idempotent
    auto again = clean_corpus(r.retained);
    ASSERT_EQ(again.retained, r.retained);
  }
}

TEST(Prevalence, AllNegated) {
  NegationLexicon lex;
  Corpus c{rec("a", "f", "No active disease.", Split::test), rec("b", "f", "No acute cardiopulmonary abnormality", Split::test),
           rec("c", "f", "Left effusion.", Split::train)};
  EXPECT_DOUBLE_EQ(negation_prevalence(c, Split::test, lex), 1.0);
  EXPECT_DOUBLE_EQ(negation_prevalence(c, Split::train, lex), 0.0);
  EXPECT_EQ(kind_of([&] { negation_prevalence(c, Split::validation, lex); }), ErrorKind::EmptyInput);
}
