#include "late/late.hpp"

namespace late {

GlobalChart::GlobalChart(std::vector<LateItem> items) : items_(std::move(items)) {
  seen_.reserve(items_.size() * 2);
  for (const LateItem& it : items_) seen_.insert(pack(it));
  head_ = 0;  // pending_ stays empty
}

void GlobalChart::set_policy(QueuePolicy policy, std::uint64_t seed) {
  policy_ = policy;
  rng_.seed(seed);
}

bool GlobalChart::insert(const LateItem& it) {
  if (!seen_.insert(pack(it)).second) return false;
  items_.push_back(it);
  pending_.push_back(it);
  return true;
}

LateItem GlobalChart::pop_pending() {
  switch (policy_) {
    case QueuePolicy::Fifo: {
      LateItem it = pending_[head_++];
      if (head_ > 4096 && head_ * 2 > pending_.size()) {
        pending_.erase(pending_.begin(), pending_.begin() + head_);
        head_ = 0;
      }
      return it;
    }
    case QueuePolicy::Lifo: {
      LateItem it = pending_.back();
      pending_.pop_back();
      return it;
    }
    case QueuePolicy::Random: {
      std::size_t span = pending_.size() - head_;
      std::size_t idx = head_ + rng_() % span;
      std::swap(pending_[idx], pending_.back());
      LateItem it = pending_.back();
      pending_.pop_back();
      return it;
    }
  }
  return {};  // unreachable
}

std::span<const LateItem> ParseTables::requests_at(SymbolId sym, std::uint32_t pos) const {
  auto it = requests.find(key(sym, pos));
  if (it == requests.end()) return {};
  return it->second;
}

std::span<const std::uint32_t> ParseTables::replies_at(SymbolId sym, std::uint32_t pos) const {
  auto it = replies.find(key(sym, pos));
  if (it == replies.end()) return {};
  return it->second;
}

void late_scan(const LateItem& it, const Sentence& w, const Grammar& g, GlobalChart& chart) {
  SymbolId t = g.rules()[it.rule].rhs[it.dot];
  if (t == kEpsilon) {
    chart.insert({it.rule, it.dot + 1, it.origin, it.current});
  } else if (it.current < w.size() && w.tokens[it.current] == t) {
    chart.insert({it.rule, it.dot + 1, it.origin, it.current + 1});
  }
}

void late_predict(const LateItem& it, const Grammar& g, GlobalChart& chart, ParseTables& t) {
  SymbolId n = g.rules()[it.rule].rhs[it.dot];
  std::uint64_t key = ParseTables::key(n, it.current);

  // Register the request first; only the first request for (N, k) seeds
  // N's rules at k.
  std::vector<LateItem>& reqs = t.requests[key];
  bool was_first = reqs.empty();
  reqs.push_back(it);
  if (was_first) {
    for (std::uint32_t r : g.rules_for(n)) {
      chart.insert({r, 0, it.current, it.current});
    }
  }
  // Then advance over every parse of N already completed at k. A j == k
  // reply (zero-length parse) is advanced like any other.
  if (auto found = t.replies.find(key); found != t.replies.end()) {
    for (std::uint32_t j : found->second) {
      chart.insert({it.rule, it.dot + 1, it.origin, j});
    }
  }
}

void late_complete(const LateItem& it, const Grammar& g, GlobalChart& chart, ParseTables& t) {
  SymbolId produced = g.rules()[it.rule].lhs;
  if (!t.completed.insert(ParseTables::triple(produced, it.origin, it.current)).second) {
    return;  // another finished rule already completed this (S, i, k)
  }
  std::uint64_t key = ParseTables::key(produced, it.origin);
  // Record the reply before traversing the requests (the mirror image of
  // the predictor's ordering).
  t.replies[key].push_back(it.current);
  if (auto found = t.requests.find(key); found != t.requests.end()) {
    for (const LateItem& req : found->second) {
      chart.insert({req.rule, req.dot + 1, req.origin, it.current});
    }
  }
}

void late_dispatch(const LateItem& it, const Grammar& g, const Sentence& w, GlobalChart& chart,
                   ParseTables& t) {
  const Rule& r = g.rules()[it.rule];
  if (it.dot == r.rhs.size()) {
    late_complete(it, g, chart, t);
  } else if (g.is_nonterminal(r.rhs[it.dot])) {
    late_predict(it, g, chart, t);
  } else {
    late_scan(it, w, g, chart);
  }
}

void LateParser::prepare(const Sentence& w) {
  if (w.size() > kMaxSentenceLen) throw EngineRejection("sentence too long");
  w_ = &w;
  chart_ = GlobalChart();
  chart_.set_policy(policy_, seed_);
  tables_ = ParseTables();
  dispatched_ = 0;
}

void LateParser::run() {
  const Sentence& w = *w_;
  for (std::uint32_t r : g_.rules_for(g_.start())) {
    chart_.insert({r, 0, 0, 0});
  }
  while (!chart_.pending_empty()) {
    late_dispatch(chart_.pop_pending(), g_, w, chart_, tables_);
    ++dispatched_;
  }
}

GlobalChart late_parse(const Grammar& g, const Sentence& w, QueuePolicy policy,
                       std::uint64_t seed) {
  LateParser p(g, policy, seed);
  p.prepare(w);
  p.run();
  return p.take_chart();
}

GlobalChart late_parse(const Grammar& g, const Sentence& w) {
  return late_parse(g, w, QueuePolicy::Fifo, 0);
}

bool late_recognize(const GlobalChart& chart, const Grammar& g, const Sentence& w) {
  auto len = static_cast<std::uint32_t>(w.size());
  for (std::uint32_t r : g.rules_for(g.start())) {
    LateItem done{r, static_cast<std::uint32_t>(g.rules()[r].rhs.size()), 0, len};
    if (chart.contains(done)) return true;
  }
  return false;
}

}  // namespace late
