#include <doctest.h>

#include <cmath>

#include "htdbu/error.hpp"
#include "htdbu/summary.hpp"

using namespace htdbu;

namespace {

const std::string kRoot = HTDBU_SOURCE_DIR;

double share(const Distribution& d, const std::string& label) {
  for (const auto& [l, p] : d)
    if (l == label) return p;
  return -1.0;
}

double total(const Distribution& d) {
  double s = 0.0;
  for (const auto& [l, p] : d) s += p;
  return s;
}

}  // namespace

TEST_CASE("bank target shares") {
  const Table bank = load_table(kRoot + "/fixtures/bank.csv");
  const auto s = summarize(bank, nullptr, std::string("y"));
  REQUIRE(s.target.has_value());
  CHECK(s.row_count == 4000);
  CHECK(share(s.target->distribution, "0") == doctest::Approx(0.883).epsilon(1e-12));
  CHECK(share(s.target->distribution, "1") == doctest::Approx(0.117).epsilon(1e-12));
  CHECK_FALSE(s.sentiment_distribution.has_value());
}

TEST_CASE("corpus label shares come from counting") {
  const TextCorpus corpus({{"a", Sentiment::Positive},
                           {"b", Sentiment::Positive},
                           {"c", Sentiment::Negative},
                           {"d", Sentiment::Neutral}});
  const Table t(Schema({{"v", ColumnKind::Numeric, {}}}), {Column::numeric({1.0, 2.0})});
  const auto s = summarize(t, &corpus);
  REQUIRE(s.sentiment_distribution.has_value());
  CHECK(s.sentiment_distribution->at(Sentiment::Positive) == 0.5);
  CHECK(s.sentiment_distribution->at(Sentiment::Negative) == 0.25);
  CHECK(s.sentiment_distribution->at(Sentiment::Neutral) == 0.25);
  CHECK_FALSE(s.target.has_value());
}

TEST_CASE("every frequency map sums to one") {
  for (const char* name : {"bank", "adult", "german"}) {
    const Table t = load_table(kRoot + "/fixtures/" + name + ".csv");
    const auto s = summarize(t);
    for (const auto& c : s.columns) {
      if (c.kind == ColumnKind::Categorical) {
        CHECK(std::abs(total(c.frequencies) - 1.0) <= 1e-9);
      } else {
        REQUIRE(c.stats.has_value());
        CHECK(c.stats->min <= c.stats->mean);
        CHECK(c.stats->mean <= c.stats->max);
      }
    }
  }
  const TextCorpus corpus = load_corpus(kRoot + "/fixtures/phrasebank.csv");
  double sum = 0.0;
  for (const auto& [label, p] : corpus.label_frequencies()) sum += p;
  CHECK(std::abs(sum - 1.0) <= 1e-9);
}

TEST_CASE("numeric stats use the population divisor") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const auto st = numeric_stats(v);
  CHECK(st.mean == 2.5);
  CHECK(st.std == doctest::Approx(std::sqrt(1.25)));
  CHECK(st.min == 1.0);
  CHECK(st.max == 4.0);
}

TEST_CASE("summary errors and json shape") {
  const Table bank = load_table(kRoot + "/fixtures/bank.csv");
  try {
    summarize(bank, nullptr, std::string("label"));
    FAIL("expected UnknownColumn");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnknownColumn);
  }
  CHECK_THROWS_AS(summarize(bank, nullptr, std::string("balance")), Error);

  const auto doc = to_json(summarize(bank, nullptr, std::string("y")));
  CHECK(doc["row_count"] == 4000);
  CHECK(doc["columns"].size() == bank.cols());
  CHECK(doc.contains("target"));
  CHECK_FALSE(doc.contains("sentiment_distribution"));
}
