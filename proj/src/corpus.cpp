#include "htdbu/corpus.hpp"

#include <algorithm>
#include <cctype>

#include "htdbu/csv.hpp"
#include "htdbu/error.hpp"

namespace htdbu {

std::string_view to_string(Sentiment s) {
  switch (s) {
    case Sentiment::Positive: return "positive";
    case Sentiment::Neutral: return "neutral";
    case Sentiment::Negative: return "negative";
  }
  return "neutral";
}

std::optional<Sentiment> parse_sentiment(std::string_view label) {
  for (auto s : kAllSentiments) {
    if (to_string(s) == label) return s;
  }
  return std::nullopt;
}

TextCorpus::TextCorpus(std::vector<CorpusEntry> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw Error(ErrorKind::EmptyInput, "text corpus is empty");
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    by_label_[static_cast<std::size_t>(entries_[i].sentiment)].push_back(i);
  }
}

std::size_t TextCorpus::count(Sentiment s) const { return by_label_[static_cast<std::size_t>(s)].size(); }

const std::vector<std::size_t>& TextCorpus::indices_of(Sentiment s) const {
  return by_label_[static_cast<std::size_t>(s)];
}

std::map<Sentiment, double> TextCorpus::label_frequencies() const {
  std::map<Sentiment, double> out;
  for (auto s : kAllSentiments) {
    out[s] = static_cast<double>(count(s)) / static_cast<double>(entries_.size());
  }
  return out;
}

TextCorpus load_corpus(const std::filesystem::path& path) {
  auto records = read_csv_file(path);
  if (records.empty()) throw Error(ErrorKind::EmptyInput, path.string() + " is empty");
  const auto& header = records.front();
  auto col = [&](std::string_view name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw Error(ErrorKind::ParseError, path.string() + ": missing '" + std::string(name) + "' column");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t s_col = col("sentiment");
  const std::size_t t_col = col("text");
  std::vector<CorpusEntry> entries;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != header.size()) {
      throw Error(ErrorKind::ParseError, path.string() + ": ragged row " + std::to_string(r));
    }
    std::string label = rec[s_col];
    std::transform(label.begin(), label.end(), label.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    auto s = parse_sentiment(label);
    if (!s) throw Error(ErrorKind::ParseError, "unknown sentiment label '" + rec[s_col] + "'");
    entries.push_back({rec[t_col], *s});
  }
  return TextCorpus(std::move(entries));
}

}  // namespace htdbu
