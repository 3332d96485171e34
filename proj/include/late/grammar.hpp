#ifndef LATE_GRAMMAR_HPP
#define LATE_GRAMMAR_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace late {

// Symbols are interned per grammar. Id 0 is always the epsilon symbol,
// whether or not the grammar uses it.
using SymbolId = std::uint32_t;
inline constexpr SymbolId kEpsilon = 0;

enum class SymbolKind : std::uint8_t { Terminal, Nonterminal, Epsilon };

// Packing limits for chart items (see earley.hpp / late.hpp). Grammar
// construction and the engines enforce these.
inline constexpr std::size_t kMaxRules = 1u << 20;
inline constexpr std::size_t kMaxRhsLen = 255;
inline constexpr std::size_t kMaxSentenceLen = 65535;
inline constexpr std::size_t kDefaultReplicationCap = 1'000'000;

// splitmix64; std::hash<uint64_t> is the identity in libstdc++, which
// clusters badly on packed keys.
struct U64Hash {
  std::size_t operator()(std::uint64_t x) const noexcept {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return static_cast<std::size_t>(x ^ (x >> 31));
  }
};

class GrammarError : public std::runtime_error {
 public:
  explicit GrammarError(const std::string& what) : std::runtime_error(what) {}
};

class TokenError : public std::runtime_error {
 public:
  TokenError(const std::string& what, std::size_t position)
      : std::runtime_error(what), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Thrown when an engine refuses its input (e.g. the classic Earley engine
// on a grammar with epsilon rules).
class EngineRejection : public std::runtime_error {
 public:
  explicit EngineRejection(const std::string& what) : std::runtime_error(what) {}
};

struct Rule {
  SymbolId lhs;
  std::vector<SymbolId> rhs;  // never empty; an epsilon rule is rhs == {kEpsilon}

  bool operator==(const Rule&) const = default;
};

// A rule written with symbol names, used to build grammars programmatically.
struct RawRule {
  std::string lhs;
  std::vector<std::string> rhs;
};

/// A context-free grammar over interned symbols. The start symbol is the
/// nonterminal named START. Symbol kinds are inferred: a name is a
/// nonterminal iff it appears on a left-hand side; everything else is a
/// terminal (the reserved name EPSILON is the empty-string symbol).
/// Immutable after construction; safe to share across threads.
class Grammar {
 public:
  /// Parses the grammar text format:
  ///   one rule per line:   LHS -> sym sym ...
  ///   alternatives:        LHS -> a | b c
  ///   epsilon rule:        LHS -> EPSILON
  ///   comments:            # to end of line
  /// The start symbol must be named START. Throws GrammarError with a
  /// 1-based line number on syntax problems.
  static Grammar parse(std::string_view text);

  /// Builds a grammar from name-level rules, applying the same kind
  /// inference and validation as parse().
  static Grammar from_rules(const std::vector<RawRule>& raw);

  const std::vector<Rule>& rules() const { return rules_; }
  std::span<const std::uint32_t> rules_for(SymbolId lhs) const;

  SymbolId start() const { return start_; }
  std::size_t symbol_count() const { return names_.size(); }
  const std::string& name(SymbolId id) const { return names_[id]; }
  SymbolKind kind(SymbolId id) const { return kinds_[id]; }
  bool is_terminal(SymbolId id) const { return kinds_[id] == SymbolKind::Terminal; }
  bool is_nonterminal(SymbolId id) const { return kinds_[id] == SymbolKind::Nonterminal; }

  std::optional<SymbolId> lookup(std::string_view name) const;

  /// Terminal symbols in id (first appearance) order; excludes epsilon.
  std::vector<SymbolId> terminals() const;
  std::vector<SymbolId> nonterminals() const;

  bool has_epsilon_rules() const { return has_epsilon_rules_; }
  std::size_t max_rhs_len() const { return max_rhs_len_; }

  /// One rule per line, `LHS -> sym sym`; re-parsing yields an identical
  /// grammar (same rule order, same interning order).
  std::string to_text() const;

  /// `LHS -> sym sym` for diagnostics and dumps.
  std::string rule_text(std::uint32_t rule_index) const;

  bool operator==(const Grammar& other) const;

 private:
  Grammar() = default;

  SymbolId intern(const std::string& name, SymbolKind kind);

  std::vector<std::string> names_;
  std::vector<SymbolKind> kinds_;
  std::vector<Rule> rules_;
  std::vector<std::vector<std::uint32_t>> rules_by_lhs_;
  SymbolId start_ = 0;
  bool has_epsilon_rules_ = false;
  std::size_t max_rhs_len_ = 0;
};

struct Sentence {
  std::vector<SymbolId> tokens;

  std::size_t size() const { return tokens.size(); }
  Sentence prefix(std::size_t len) const {
    return Sentence{{tokens.begin(), tokens.begin() + len}};
  }
  std::string to_text(const Grammar& g) const;
};

/// Splits on whitespace and maps each token to a terminal of g. Throws
/// TokenError naming the token and its 0-based position otherwise.
Sentence tokenize(std::string_view text, const Grammar& g);

struct EarleyValidation {
  std::vector<std::uint32_t> epsilon_rules;  // offending rule indices
  bool ok() const { return epsilon_rules.empty(); }
  std::string message(const Grammar& g) const;
};

/// The classic Earley engine refuses grammars with epsilon rules; this
/// reports every offending rule. Not an error: rejection is a value.
EarleyValidation validate_for_earley(const Grammar& g);

/// Replaces every non-START nonterminal X by m identical copies X0..X(m-1)
/// and expands each rule over all copy choices of its lhs and of each rhs
/// occurrence independently. Terminals, epsilon and START are untouched.
/// Throws GrammarError if the expanded rule count exceeds rule_cap.
Grammar replicate_nonterminals(const Grammar& g, std::uint32_t m,
                               std::size_t rule_cap = kDefaultReplicationCap);

/// Renames the original start symbol and adds wrapper rules so the new
/// START matches the original language surrounded by at least one run of
/// arbitrary terminals of g:
///   START -> WILD INNER | WILD INNER WILD | INNER WILD
///   WILD  -> WILD WILDCARD | WILDCARD
///   WILDCARD -> t   (one rule per distinct terminal)
/// Adds exactly 5 + |terminals| rules and no new terminals.
Grammar wrap_wildcard(const Grammar& g);

}  // namespace late

#endif  // LATE_GRAMMAR_HPP
