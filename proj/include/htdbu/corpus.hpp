#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace htdbu {

enum class Sentiment { Positive, Neutral, Negative };

inline constexpr std::array<Sentiment, 3> kAllSentiments = {Sentiment::Positive, Sentiment::Neutral,
                                                            Sentiment::Negative};

std::string_view to_string(Sentiment s);
std::optional<Sentiment> parse_sentiment(std::string_view label);

struct CorpusEntry {
  std::string text;
  Sentiment sentiment;
};

// Sentiment-labelled text. Never empty.
class TextCorpus {
 public:
  // Throws EmptyInput when entries is empty.
  explicit TextCorpus(std::vector<CorpusEntry> entries);

  const std::vector<CorpusEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::size_t count(Sentiment s) const;
  std::map<Sentiment, double> label_frequencies() const;
  // Indices of entries carrying label s, in corpus order.
  const std::vector<std::size_t>& indices_of(Sentiment s) const;

 private:
  std::vector<CorpusEntry> entries_;
  std::array<std::vector<std::size_t>, 3> by_label_;
};

// CSV with a header naming "sentiment" and "text" columns (any order, extra
// columns ignored). Throws MissingFile, ParseError (unknown label or missing
// column), EmptyInput.
TextCorpus load_corpus(const std::filesystem::path& path);

}  // namespace htdbu
