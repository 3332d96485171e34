#include "late/earley.hpp"

namespace late {

void EarleyChart::reset(std::size_t positions) {
  sets_.assign(positions, {});
  total_ = 0;
}

bool EarleyChart::insert(std::size_t k, const EarleyItem& it, const Grammar& g) {
  Set& s = sets_[k];
  if (!s.seen.insert(pack(it)).second) return false;
  const Rule& r = g.rules()[it.rule];
  SymbolId next = (it.dot == r.rhs.size()) ? kFinished : r.rhs[it.dot];
  s.entries.push_back({next, it.rule, it.dot, it.origin});
  ++total_;
  return true;
}

void earley_scan(const EarleyItem& it, std::size_t k, const Sentence& w, const Grammar& g,
                 EarleyChart& chart) {
  SymbolId t = g.rules()[it.rule].rhs[it.dot];
  if (t == kEpsilon) {
    chart.insert(k, {it.rule, it.dot + 1, it.origin}, g);
  } else if (k < w.size() && w.tokens[k] == t) {
    chart.insert(k + 1, {it.rule, it.dot + 1, it.origin}, g);
  }
}

void earley_predict(const EarleyItem& it, std::size_t k, const Grammar& g, EarleyChart& chart) {
  SymbolId n = g.rules()[it.rule].rhs[it.dot];
  for (std::uint32_t r : g.rules_for(n)) {
    chart.insert(k, {r, 0, static_cast<std::uint32_t>(k)}, g);
  }
}

void earley_complete(const EarleyItem& it, std::size_t k, const Grammar& g, EarleyChart& chart) {
  SymbolId produced = g.rules()[it.rule].lhs;
  // The completer sees set(origin) as of entry. Re-fetch per step and copy
  // the entry: when origin == k (only reachable with epsilon rules), the
  // insert below appends to the very vector being scanned.
  std::size_t snapshot = chart.set(it.origin).size();
  for (std::size_t i = 0; i < snapshot; ++i) {
    EarleyChart::Entry e = chart.set(it.origin)[i];
    if (e.next == produced) {
      chart.insert(k, {e.rule, e.dot + 1, e.origin}, g);
    }
  }
}

void EarleyParser::prepare(const Sentence& w) {
  if (w.size() > kMaxSentenceLen) throw EngineRejection("sentence too long");
  w_ = &w;
  chart_.reset(w.size() + 1);
}

void EarleyParser::run() {
  const Sentence& w = *w_;
  for (std::uint32_t r : g_.rules_for(g_.start())) {
    chart_.insert(0, {r, 0, 0}, g_);
  }
  // Work-list per set: items added to set k while processing it are
  // dispatched before moving on; each item is dispatched exactly once.
  for (std::size_t k = 0; k < chart_.positions(); ++k) {
    for (std::size_t cursor = 0; cursor < chart_.set(k).size(); ++cursor) {
      EarleyChart::Entry e = chart_.set(k)[cursor];
      if (e.next == EarleyChart::kFinished) {
        earley_complete(e.item(), k, g_, chart_);
      } else if (g_.is_nonterminal(e.next)) {
        earley_predict(e.item(), k, g_, chart_);
      } else {
        earley_scan(e.item(), k, w, g_, chart_);
      }
    }
  }
}

EarleyChart earley_parse_unchecked(const Grammar& g, const Sentence& w) {
  EarleyParser p(g);
  p.prepare(w);
  p.run();
  return p.take_chart();
}

EarleyChart earley_parse(const Grammar& g, const Sentence& w) {
  EarleyValidation v = validate_for_earley(g);
  if (!v.ok()) throw EngineRejection(v.message(g));
  return earley_parse_unchecked(g, w);
}

bool earley_recognize(const EarleyChart& chart, const Grammar& g, const Sentence& w) {
  for (const EarleyChart::Entry& e : chart.set(w.size())) {
    if (e.next == EarleyChart::kFinished && e.origin == 0 &&
        g.rules()[e.rule].lhs == g.start()) {
      return true;
    }
  }
  return false;
}

}  // namespace late
