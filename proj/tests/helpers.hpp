#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "htdbu/error.hpp"
#include "htdbu/rng.hpp"
#include "htdbu/rule.hpp"
#include "htdbu/table.hpp"

namespace testing {

inline const std::string kRoot = HTDBU_SOURCE_DIR;

inline std::string fixture(const std::string& name) { return kRoot + "/fixtures/" + name; }

template <class Fn>
htdbu::ErrorKind error_kind(Fn&& fn) {
  try {
    fn();
  } catch (const htdbu::Error& e) {
    return e.kind();
  }
  return static_cast<htdbu::ErrorKind>(-1);
}

// Bank rows joined with phrasebank sentiment under a shipped rule, text removed.
inline htdbu::Table weak_benchmark(htdbu::BuiltinRule kind, std::uint64_t seed) {
  const auto bank = htdbu::load_table(fixture("bank.csv"));
  const auto corpus = htdbu::load_corpus(fixture("phrasebank.csv"));
  return htdbu::compose_weak_benchmark(bank, corpus, htdbu::builtin_rule(kind), seed).drop_column("text");
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

// Two numeric columns with correlation rho (bivariate normal).
inline htdbu::Table correlated_pair(std::size_t n, double rho, std::uint64_t seed) {
  htdbu::Rng rng(seed);
  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.normal();
    const double v = rng.normal();
    a[i] = u;
    b[i] = rho * u + std::sqrt(1.0 - rho * rho) * v;
  }
  using htdbu::ColumnKind;
  return htdbu::Table(htdbu::Schema({{"a", ColumnKind::Numeric, {}}, {"b", ColumnKind::Numeric, {}}}),
                      {htdbu::Column::numeric(a), htdbu::Column::numeric(b)});
}

}  // namespace testing
