#include "late/oracle.hpp"

#include <algorithm>
#include <deque>
#include <optional>
#include <unordered_set>
#include <vector>

namespace late {
namespace {

constexpr std::uint64_t kInf = ~0ull;

// Minimum derivable terminal length per symbol, by fixpoint iteration.
// kInf marks non-productive nonterminals.
std::vector<std::uint64_t> min_lengths(const Grammar& g) {
  std::vector<std::uint64_t> min(g.symbol_count(), kInf);
  min[kEpsilon] = 0;
  for (SymbolId s = 0; s < g.symbol_count(); ++s) {
    if (g.is_terminal(s)) min[s] = 1;
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (const Rule& r : g.rules()) {
      std::uint64_t sum = 0;
      bool defined = true;
      for (SymbolId s : r.rhs) {
        if (min[s] == kInf) {
          defined = false;
          break;
        }
        sum += min[s];
      }
      if (defined && sum < min[r.lhs]) {
        min[r.lhs] = sum;
        changed = true;
      }
    }
  }
  return min;
}

// A leftmost sentential form: the input prefix w[0..pos) has been matched
// and `rest` still has to derive w[pos..). After normalization, rest is
// empty or starts with a nonterminal.
struct Form {
  std::uint32_t pos = 0;
  std::vector<SymbolId> rest;

  bool operator==(const Form&) const = default;
};

struct FormHash {
  std::size_t operator()(const Form& f) const noexcept {
    std::uint64_t h = f.pos + 0x9e3779b97f4a7c15ull;
    for (SymbolId s : f.rest) h = (h ^ s) * 0x100000001b3ull;
    return U64Hash{}(h);
  }
};

}  // namespace

bool brute_force_recognize(const Grammar& g, const Sentence& w, const OracleConfig& cfg) {
  if (w.size() > cfg.max_sentence_len) {
    throw OracleLimit("sentence length " + std::to_string(w.size()) +
                      " exceeds the oracle cap " + std::to_string(cfg.max_sentence_len));
  }
  const std::vector<std::uint64_t> min = min_lengths(g);

  // A minimal parse tree repeats no (nonterminal, span) pair on any
  // root-to-leaf path, which bounds the leftmost form length it can
  // produce; anything longer is prunable without losing completeness.
  const std::size_t form_cap = (2 * w.size() + 4) * (g.nonterminals().size() + 2) *
                               std::max<std::size_t>(2, g.max_rhs_len());

  auto normalized = [&](Form f) -> std::optional<Form> {
    std::size_t i = 0;
    while (i < f.rest.size()) {
      SymbolId s = f.rest[i];
      if (s == kEpsilon) {
        ++i;
      } else if (g.is_terminal(s)) {
        if (f.pos < w.size() && w.tokens[f.pos] == s) {
          ++f.pos;
          ++i;
        } else {
          return std::nullopt;  // terminal prefix mismatch
        }
      } else {
        break;
      }
    }
    f.rest.erase(f.rest.begin(), f.rest.begin() + i);
    std::uint64_t need = 0;
    for (SymbolId s : f.rest) {
      if (min[s] == kInf) return std::nullopt;  // non-productive
      need += min[s];
      if (f.pos + need > w.size()) return std::nullopt;
    }
    return f;
  };

  std::optional<Form> start = normalized(Form{0, {g.start()}});
  if (!start) return false;
  if (start->rest.empty()) return start->pos == w.size();

  std::unordered_set<Form, FormHash> visited{*start};
  std::deque<Form> queue{*start};
  std::size_t steps = 0;
  while (!queue.empty()) {
    Form f = std::move(queue.front());
    queue.pop_front();
    if (++steps > cfg.max_steps) throw OracleLimit("oracle step budget exceeded");

    SymbolId n = f.rest.front();
    for (std::uint32_t ri : g.rules_for(n)) {
      const std::vector<SymbolId>& rhs = g.rules()[ri].rhs;
      Form next;
      next.pos = f.pos;
      next.rest.reserve(rhs.size() + f.rest.size() - 1);
      next.rest.insert(next.rest.end(), rhs.begin(), rhs.end());
      next.rest.insert(next.rest.end(), f.rest.begin() + 1, f.rest.end());
      std::optional<Form> norm = normalized(std::move(next));
      if (!norm) continue;
      if (norm->rest.empty()) {
        if (norm->pos == w.size()) return true;
        continue;
      }
      if (norm->rest.size() > form_cap) continue;
      if (visited.insert(*norm).second) queue.push_back(std::move(*norm));
    }
  }
  return false;
}

}  // namespace late
