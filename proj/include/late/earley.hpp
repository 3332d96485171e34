#ifndef LATE_EARLEY_HPP
#define LATE_EARLEY_HPP

#include <cstdint>
#include <span>
#include <unordered_set>
#include <vector>

#include "late/grammar.hpp"

namespace late {

// A dotted rule with its origin position. The set index k it lives in is
// the item's current position.
struct EarleyItem {
  std::uint32_t rule;
  std::uint32_t dot;
  std::uint32_t origin;

  bool operator==(const EarleyItem&) const = default;
};

inline std::uint64_t pack(const EarleyItem& it) {
  return std::uint64_t(it.rule) | (std::uint64_t(it.dot) << 20) |
         (std::uint64_t(it.origin) << 28);
}

// Per-position item sets. Entries carry the symbol after the dot so the
// completer's scan over a set stays a linear pass over flat records.
class EarleyChart {
 public:
  struct Entry {
    SymbolId next;  // kFinished when the dot is at the end
    std::uint32_t rule;
    std::uint32_t dot;
    std::uint32_t origin;

    EarleyItem item() const { return {rule, dot, origin}; }
  };
  static constexpr SymbolId kFinished = 0xffffffffu;

  EarleyChart() = default;
  void reset(std::size_t positions);

  /// Set semantics: returns false (and changes nothing) on duplicates.
  bool insert(std::size_t k, const EarleyItem& it, const Grammar& g);

  std::size_t positions() const { return sets_.size(); }
  std::span<const Entry> set(std::size_t k) const { return sets_[k].entries; }
  std::size_t total_items() const { return total_; }

 private:
  struct Set {
    std::vector<Entry> entries;
    std::unordered_set<std::uint64_t, U64Hash> seen;
  };
  std::vector<Set> sets_;
  std::size_t total_ = 0;
};

/// Scanner: next symbol is a terminal or epsilon. A matching terminal
/// advances the item into set k+1; epsilon advances it in place.
void earley_scan(const EarleyItem& it, std::size_t k, const Sentence& w, const Grammar& g,
                 EarleyChart& chart);

/// Predictor: next symbol is a nonterminal N; seeds (N -> •γ, k) into set k
/// for every rule N -> γ.
void earley_predict(const EarleyItem& it, std::size_t k, const Grammar& g, EarleyChart& chart);

/// Completer: it = (S -> α•, origin); advances every (T -> β • S γ, j) in
/// set(origin) into set k. Scans the snapshot of set(origin) taken at entry.
void earley_complete(const EarleyItem& it, std::size_t k, const Grammar& g, EarleyChart& chart);

/// Classic serial Earley parse. Refuses grammars with epsilon rules
/// (throws EngineRejection); see earley_parse_unchecked for why.
EarleyChart earley_parse(const Grammar& g, const Sentence& w);

/// The same parse without the epsilon-rule validation. With epsilon rules
/// present the classic algorithm stalls: once (N -> ε•, k) has completed,
/// a later (S -> α • N β, i, k) can only re-predict the already-present
/// (N -> •ε, k) and is never advanced again. Exposed so tests can
/// reproduce that behavior; production callers want earley_parse.
EarleyChart earley_parse_unchecked(const Grammar& g, const Sentence& w);

/// True iff a finished START item with origin 0 is in set |W|.
bool earley_recognize(const EarleyChart& chart, const Grammar& g, const Sentence& w);

/// Reusable engine with the chart-construction phase (seed + drain)
/// separated from allocation, so benchmarks can bracket only the former.
class EarleyParser {
 public:
  explicit EarleyParser(const Grammar& g) : g_(g) {}

  void prepare(const Sentence& w);
  void run();

  const EarleyChart& chart() const { return chart_; }
  EarleyChart take_chart() { return std::move(chart_); }

 private:
  const Grammar& g_;
  const Sentence* w_ = nullptr;
  EarleyChart chart_;
};

}  // namespace late

#endif  // LATE_EARLEY_HPP
