#include "late/grammar.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace late {
namespace {

const std::string kEpsilonName = "EPSILON";
const std::string kStartName = "START";
const std::string kArrow = "->";
const std::string kPipe = "|";

std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

[[noreturn]] void fail_line(std::size_t lineno, const std::string& msg) {
  throw GrammarError("line " + std::to_string(lineno) + ": " + msg);
}

}  // namespace

SymbolId Grammar::intern(const std::string& name, SymbolKind kind) {
  for (SymbolId id = 0; id < names_.size(); ++id) {
    if (names_[id] == name) return id;
  }
  names_.push_back(name);
  kinds_.push_back(kind);
  return static_cast<SymbolId>(names_.size() - 1);
}

std::optional<SymbolId> Grammar::lookup(std::string_view name) const {
  for (SymbolId id = 0; id < names_.size(); ++id) {
    if (names_[id] == name) return id;
  }
  return std::nullopt;
}

Grammar Grammar::from_rules(const std::vector<RawRule>& raw) {
  if (raw.size() > kMaxRules) {
    throw GrammarError("too many rules (" + std::to_string(raw.size()) + " > " +
                       std::to_string(kMaxRules) + ")");
  }
  Grammar g;
  g.intern(kEpsilonName, SymbolKind::Epsilon);  // id 0, always present

  // Kind inference: every lhs name is a nonterminal, everything else a
  // terminal. Two passes so rhs interning cannot mis-kind a later lhs.
  for (const RawRule& r : raw) {
    if (r.lhs == kEpsilonName) throw GrammarError("EPSILON cannot be a left-hand side");
    if (r.lhs == kArrow || r.lhs == kPipe) throw GrammarError("invalid lhs '" + r.lhs + "'");
    g.intern(r.lhs, SymbolKind::Nonterminal);
  }
  for (const RawRule& r : raw) {
    if (r.rhs.empty()) {
      throw GrammarError("rule for " + r.lhs + " has an empty right-hand side (use EPSILON)");
    }
    if (r.rhs.size() > kMaxRhsLen) {
      throw GrammarError("rule for " + r.lhs + " exceeds the maximum rhs length");
    }
    Rule rule;
    rule.lhs = *g.lookup(r.lhs);
    for (const std::string& s : r.rhs) {
      if (s == kArrow || s == kPipe) throw GrammarError("invalid symbol '" + s + "'");
      if (s == kEpsilonName) {
        if (r.rhs.size() != 1) {
          throw GrammarError("EPSILON must be the only symbol in its alternative (rule for " +
                             r.lhs + ")");
        }
        rule.rhs.push_back(kEpsilon);
        g.has_epsilon_rules_ = true;
      } else {
        auto id = g.lookup(s);
        rule.rhs.push_back(id ? *id : g.intern(s, SymbolKind::Terminal));
      }
    }
    g.max_rhs_len_ = std::max(g.max_rhs_len_, rule.rhs.size());
    g.rules_.push_back(std::move(rule));
  }

  auto start = g.lookup(kStartName);
  if (!start || !g.is_nonterminal(*start)) {
    throw GrammarError("grammar has no rule for the start symbol START");
  }
  g.start_ = *start;

  // Undefined nonterminals cannot arise through kind inference, but guard
  // the invariant for any future construction path.
  g.rules_by_lhs_.assign(g.names_.size(), {});
  for (std::uint32_t i = 0; i < g.rules_.size(); ++i) {
    g.rules_by_lhs_[g.rules_[i].lhs].push_back(i);
  }
  for (const Rule& r : g.rules_) {
    for (SymbolId s : r.rhs) {
      if (g.is_nonterminal(s) && g.rules_by_lhs_[s].empty()) {
        throw GrammarError("undefined nonterminal " + g.name(s));
      }
    }
  }
  return g;
}

Grammar Grammar::parse(std::string_view text) {
  std::vector<RawRule> raw;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    std::vector<std::string> toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks.size() < 2 || toks[1] != kArrow) fail_line(lineno, "expected 'LHS -> ...'");
    if (toks[0] == kEpsilonName) fail_line(lineno, "EPSILON cannot be a left-hand side");
    if (toks[0] == kPipe || toks[0] == kArrow) fail_line(lineno, "invalid lhs '" + toks[0] + "'");

    std::vector<std::vector<std::string>> alts(1);
    for (std::size_t i = 2; i < toks.size(); ++i) {
      if (toks[i] == kPipe) {
        if (alts.back().empty()) fail_line(lineno, "empty alternative");
        alts.emplace_back();
      } else if (toks[i] == kArrow) {
        fail_line(lineno, "unexpected '->'");
      } else {
        alts.back().push_back(toks[i]);
      }
    }
    if (alts.back().empty()) fail_line(lineno, "empty alternative");
    for (auto& alt : alts) {
      if (alt.size() > 1) {
        for (const std::string& s : alt) {
          if (s == kEpsilonName) {
            fail_line(lineno, "EPSILON must be the only symbol in its alternative");
          }
        }
      }
      raw.push_back(RawRule{toks[0], std::move(alt)});
    }
  }
  return from_rules(raw);
}

std::span<const std::uint32_t> Grammar::rules_for(SymbolId lhs) const {
  return rules_by_lhs_[lhs];
}

std::vector<SymbolId> Grammar::terminals() const {
  std::vector<SymbolId> out;
  for (SymbolId id = 0; id < names_.size(); ++id) {
    if (kinds_[id] == SymbolKind::Terminal) out.push_back(id);
  }
  return out;
}

std::vector<SymbolId> Grammar::nonterminals() const {
  std::vector<SymbolId> out;
  for (SymbolId id = 0; id < names_.size(); ++id) {
    if (kinds_[id] == SymbolKind::Nonterminal) out.push_back(id);
  }
  return out;
}

std::string Grammar::rule_text(std::uint32_t rule_index) const {
  const Rule& r = rules_[rule_index];
  std::string out = name(r.lhs) + " ->";
  for (SymbolId s : r.rhs) {
    out += ' ';
    out += name(s);
  }
  return out;
}

std::string Grammar::to_text() const {
  std::string out;
  for (std::uint32_t i = 0; i < rules_.size(); ++i) {
    out += rule_text(i);
    out += '\n';
  }
  return out;
}

bool Grammar::operator==(const Grammar& other) const {
  if (rules_.size() != other.rules_.size()) return false;
  for (std::uint32_t i = 0; i < rules_.size(); ++i) {
    if (rule_text(i) != other.rule_text(i)) return false;
  }
  return name(start_) == other.name(other.start_);
}

std::string Sentence::to_text(const Grammar& g) const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += g.name(tokens[i]);
  }
  return out;
}

Sentence tokenize(std::string_view text, const Grammar& g) {
  Sentence s;
  std::size_t position = 0;
  for (const std::string& tok : split_ws(text)) {
    auto id = g.lookup(tok);
    if (!id || !g.is_terminal(*id)) {
      throw TokenError("unknown token '" + tok + "' at position " + std::to_string(position),
                       position);
    }
    s.tokens.push_back(*id);
    ++position;
  }
  return s;
}

EarleyValidation validate_for_earley(const Grammar& g) {
  EarleyValidation v;
  for (std::uint32_t i = 0; i < g.rules().size(); ++i) {
    if (g.rules()[i].rhs.size() == 1 && g.rules()[i].rhs[0] == kEpsilon) {
      v.epsilon_rules.push_back(i);
    }
  }
  return v;
}

std::string EarleyValidation::message(const Grammar& g) const {
  std::string out = "grammar has epsilon rules:";
  for (std::uint32_t i : epsilon_rules) {
    out += ' ';
    out += g.rule_text(i);
    out += ';';
  }
  return out;
}

namespace {

// Picks a separator so that name+sep+index collides with nothing already
// in the grammar and no two generated names collide with each other.
std::string pick_copy_separator(const Grammar& g, const std::vector<SymbolId>& bases,
                                std::uint32_t m) {
  for (std::size_t width = 0;; ++width) {
    std::string sep(width, '_');
    std::unordered_set<std::string> seen;
    bool ok = true;
    for (SymbolId base : bases) {
      for (std::uint32_t i = 0; i < m && ok; ++i) {
        std::string candidate = g.name(base) + sep + std::to_string(i);
        if (g.lookup(candidate) || !seen.insert(candidate).second) ok = false;
      }
      if (!ok) break;
    }
    if (ok) return sep;
  }
}

std::string fresh_name(const Grammar& g, std::string base,
                       const std::vector<std::string>& taken) {
  auto clashes = [&](const std::string& n) {
    if (g.lookup(n)) return true;
    return std::find(taken.begin(), taken.end(), n) != taken.end();
  };
  while (clashes(base)) base += '_';
  return base;
}

}  // namespace

Grammar replicate_nonterminals(const Grammar& g, std::uint32_t m, std::size_t rule_cap) {
  if (m == 0) throw GrammarError("replication factor must be >= 1");

  std::vector<SymbolId> replicated;
  for (SymbolId nt : g.nonterminals()) {
    if (nt != g.start()) replicated.push_back(nt);
  }
  std::string sep = pick_copy_separator(g, replicated, m);
  auto copy_name = [&](SymbolId base, std::uint32_t i) {
    return g.name(base) + sep + std::to_string(i);
  };
  auto is_replicated = [&](SymbolId s) { return g.is_nonterminal(s) && s != g.start(); };

  // The expanded size is m^(number of replicated occurrences, lhs included
  // when it is not START); fail fast before materializing anything big.
  std::size_t total = 0;
  for (const Rule& r : g.rules()) {
    std::size_t occ = is_replicated(r.lhs) ? 1 : 0;
    for (SymbolId s : r.rhs) occ += is_replicated(s) ? 1 : 0;
    std::size_t count = 1;
    for (std::size_t i = 0; i < occ; ++i) {
      count *= m;
      if (count > rule_cap) break;
    }
    total += count;
    if (total > rule_cap) {
      throw GrammarError("replication would exceed the rule cap (" + std::to_string(rule_cap) +
                         ")");
    }
  }

  std::vector<RawRule> raw;
  raw.reserve(total);
  for (const Rule& r : g.rules()) {
    std::vector<std::size_t> vary;  // 0 = lhs, 1+i = rhs position i
    if (is_replicated(r.lhs)) vary.push_back(0);
    for (std::size_t i = 0; i < r.rhs.size(); ++i) {
      if (is_replicated(r.rhs[i])) vary.push_back(1 + i);
    }
    std::vector<std::uint32_t> choice(vary.size(), 0);
    while (true) {
      RawRule out;
      out.lhs = g.name(r.lhs);
      std::vector<std::string> rhs;
      for (SymbolId s : r.rhs) rhs.push_back(g.name(s));
      for (std::size_t v = 0; v < vary.size(); ++v) {
        if (vary[v] == 0) {
          out.lhs = copy_name(r.lhs, choice[v]);
        } else {
          rhs[vary[v] - 1] = copy_name(r.rhs[vary[v] - 1], choice[v]);
        }
      }
      out.rhs = std::move(rhs);
      raw.push_back(std::move(out));
      // odometer, last position fastest
      std::size_t v = vary.size();
      while (v > 0 && ++choice[v - 1] == m) choice[--v] = 0;
      if (v == 0) break;
    }
  }
  return Grammar::from_rules(raw);
}

Grammar wrap_wildcard(const Grammar& g) {
  std::vector<std::string> taken;
  std::string inner = fresh_name(g, "INNER", taken);
  taken.push_back(inner);
  std::string wild = fresh_name(g, "WILD", taken);
  taken.push_back(wild);
  std::string wildcard = fresh_name(g, "WILDCARD", taken);

  std::vector<RawRule> raw;
  raw.push_back({"START", {wild, inner}});
  raw.push_back({"START", {wild, inner, wild}});
  raw.push_back({"START", {inner, wild}});
  raw.push_back({wild, {wild, wildcard}});
  raw.push_back({wild, {wildcard}});
  for (SymbolId t : g.terminals()) raw.push_back({wildcard, {g.name(t)}});
  for (const Rule& r : g.rules()) {
    RawRule out;
    out.lhs = (r.lhs == g.start()) ? inner : g.name(r.lhs);
    for (SymbolId s : r.rhs) out.rhs.push_back(s == g.start() ? inner : g.name(s));
    raw.push_back(std::move(out));
  }
  return Grammar::from_rules(raw);
}

}  // namespace late
