#ifndef LATE_LATE_HPP
#define LATE_LATE_HPP

#include <cstdint>
#include <random>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "late/grammar.hpp"

namespace late {

// A dotted rule with both its origin and current position. Unlike the
// per-set Earley chart, LATE items are self-contained, so they can be
// processed in any order.
struct LateItem {
  std::uint32_t rule;
  std::uint32_t dot;
  std::uint32_t origin;
  std::uint32_t current;

  bool operator==(const LateItem&) const = default;
};

inline std::uint64_t pack(const LateItem& it) {
  return std::uint64_t(it.rule) | (std::uint64_t(it.dot) << 20) |
         (std::uint64_t(it.origin) << 28) | (std::uint64_t(it.current) << 44);
}

inline LateItem unpack_late(std::uint64_t v) {
  return {static_cast<std::uint32_t>(v & 0xfffff), static_cast<std::uint32_t>((v >> 20) & 0xff),
          static_cast<std::uint32_t>((v >> 28) & 0xffff),
          static_cast<std::uint32_t>((v >> 44) & 0xffff)};
}

enum class QueuePolicy { Fifo, Lifo, Random };

/// The single global item set plus the queue of not-yet-processed items.
/// An item is enqueued exactly once, when it first enters the set, so the
/// number of dispatches equals the final chart cardinality.
class GlobalChart {
 public:
  GlobalChart() = default;
  /// Builds a quiescent chart (nothing pending) from an item collection.
  explicit GlobalChart(std::vector<LateItem> items);

  void set_policy(QueuePolicy policy, std::uint64_t seed = 0);

  /// Set semantics; newly inserted items are also enqueued.
  bool insert(const LateItem& it);
  bool contains(const LateItem& it) const { return seen_.contains(pack(it)); }

  bool pending_empty() const { return head_ == pending_.size(); }
  LateItem pop_pending();

  std::span<const LateItem> items() const { return items_; }
  std::size_t size() const { return items_.size(); }

 private:
  std::vector<LateItem> items_;  // discovery order
  std::unordered_set<std::uint64_t, U64Hash> seen_;
  std::vector<LateItem> pending_;
  std::size_t head_ = 0;
  QueuePolicy policy_ = QueuePolicy::Fifo;
  std::mt19937_64 rng_;
};

/// The requests map Q, replies map P, and completed set D. Keys pack a
/// symbol with an input position. Entries behave as sets: the engine
/// dispatches each item once, so duplicate registration cannot occur.
struct ParseTables {
  static std::uint64_t key(SymbolId sym, std::uint32_t pos) {
    return (std::uint64_t(sym) << 16) | pos;
  }
  static std::uint64_t triple(SymbolId sym, std::uint32_t i, std::uint32_t k) {
    return (std::uint64_t(sym) << 32) | (std::uint64_t(i) << 16) | k;
  }

  std::unordered_map<std::uint64_t, std::vector<LateItem>, U64Hash> requests;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>, U64Hash> replies;
  std::unordered_set<std::uint64_t, U64Hash> completed;

  std::span<const LateItem> requests_at(SymbolId sym, std::uint32_t pos) const;
  std::span<const std::uint32_t> replies_at(SymbolId sym, std::uint32_t pos) const;
  bool is_completed(SymbolId sym, std::uint32_t i, std::uint32_t k) const {
    return completed.contains(triple(sym, i, k));
  }
};

/// Scanner: epsilon advances the dot in place; a terminal matching w at the
/// item's current position advances into position current+1.
void late_scan(const LateItem& it, const Sentence& w, const Grammar& g, GlobalChart& chart);

/// Predictor for (S -> α • N β, i, k). Ordering is load-bearing: the item
/// is added to the requests map before the replies map is read, so a
/// concurrent completion is seen by at least one side.
void late_predict(const LateItem& it, const Grammar& g, GlobalChart& chart, ParseTables& t);

/// Completer for (S -> α•, i, k). Stops early if (S, i, k) was already
/// completed; otherwise records the reply before traversing the requests.
void late_complete(const LateItem& it, const Grammar& g, GlobalChart& chart, ParseTables& t);

void late_dispatch(const LateItem& it, const Grammar& g, const Sentence& w, GlobalChart& chart,
                   ParseTables& t);

GlobalChart late_parse(const Grammar& g, const Sentence& w);
/// Queue discipline only affects processing order; the final chart is the
/// same for every policy and seed (property-tested).
GlobalChart late_parse(const Grammar& g, const Sentence& w, QueuePolicy policy,
                       std::uint64_t seed = 0);

/// True iff a finished START item spanning the whole input (origin 0,
/// current |W|) is in the chart.
bool late_recognize(const GlobalChart& chart, const Grammar& g, const Sentence& w);

class LateParser {
 public:
  explicit LateParser(const Grammar& g, QueuePolicy policy = QueuePolicy::Fifo,
                      std::uint64_t seed = 0)
      : g_(g), policy_(policy), seed_(seed) {}

  void prepare(const Sentence& w);
  void run();

  const GlobalChart& chart() const { return chart_; }
  GlobalChart take_chart() { return std::move(chart_); }
  const ParseTables& tables() const { return tables_; }
  std::size_t dispatch_count() const { return dispatched_; }

 private:
  const Grammar& g_;
  QueuePolicy policy_;
  std::uint64_t seed_;
  const Sentence* w_ = nullptr;
  GlobalChart chart_;
  ParseTables tables_;
  std::size_t dispatched_ = 0;
};

}  // namespace late

#endif  // LATE_LATE_HPP
