#ifndef LATE_CANONICAL_HPP
#define LATE_CANONICAL_HPP

#include <compare>
#include <string>
#include <vector>

#include "late/earley.hpp"
#include "late/late.hpp"

namespace late {

// The comparable form of a chart: (current position, rule, dot, origin)
// tuples, strictly sorted, no duplicates. Both engines canonicalize into
// this, which is what "the final charts will be the same" is tested on.
struct CanonicalItem {
  std::uint32_t k;
  std::uint32_t rule;
  std::uint32_t dot;
  std::uint32_t origin;

  auto operator<=>(const CanonicalItem&) const = default;
};

struct CanonicalChart {
  std::vector<CanonicalItem> items;

  std::size_t size() const { return items.size(); }
  bool operator==(const CanonicalChart&) const = default;
};

CanonicalChart canonicalize_earley(const EarleyChart& chart);
CanonicalChart canonicalize_late(const GlobalChart& chart);
/// Re-sort; idempotent on already-canonical charts.
CanonicalChart canonicalize(const CanonicalChart& chart);

struct ChartDiff {
  std::vector<CanonicalItem> only_a;
  std::vector<CanonicalItem> only_b;

  bool equal() const { return only_a.empty() && only_b.empty(); }
};

ChartDiff compare_charts(const CanonicalChart& a, const CanonicalChart& b);

/// One `k<TAB>LHS -> pre • post<TAB>origin` line per item, lines sorted
/// lexicographically. Byte-identical across engines for the same input.
std::string dump(const CanonicalChart& chart, const Grammar& g);

/// The dotted-rule text used in dumps and diffs, e.g. `START -> a • b`.
std::string dotted_rule_text(const Grammar& g, std::uint32_t rule, std::uint32_t dot);

}  // namespace late

#endif  // LATE_CANONICAL_HPP
