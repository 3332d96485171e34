#include "late/canonical.hpp"

#include <algorithm>

namespace late {

CanonicalChart canonicalize_earley(const EarleyChart& chart) {
  CanonicalChart out;
  out.items.reserve(chart.total_items());
  for (std::size_t k = 0; k < chart.positions(); ++k) {
    for (const EarleyChart::Entry& e : chart.set(k)) {
      out.items.push_back({static_cast<std::uint32_t>(k), e.rule, e.dot, e.origin});
    }
  }
  std::sort(out.items.begin(), out.items.end());
  return out;
}

CanonicalChart canonicalize_late(const GlobalChart& chart) {
  CanonicalChart out;
  out.items.reserve(chart.size());
  for (const LateItem& it : chart.items()) {
    out.items.push_back({it.current, it.rule, it.dot, it.origin});
  }
  std::sort(out.items.begin(), out.items.end());
  return out;
}

CanonicalChart canonicalize(const CanonicalChart& chart) {
  CanonicalChart out = chart;
  std::sort(out.items.begin(), out.items.end());
  out.items.erase(std::unique(out.items.begin(), out.items.end()), out.items.end());
  return out;
}

ChartDiff compare_charts(const CanonicalChart& a, const CanonicalChart& b) {
  ChartDiff d;
  std::set_difference(a.items.begin(), a.items.end(), b.items.begin(), b.items.end(),
                      std::back_inserter(d.only_a));
  std::set_difference(b.items.begin(), b.items.end(), a.items.begin(), a.items.end(),
                      std::back_inserter(d.only_b));
  return d;
}

std::string dotted_rule_text(const Grammar& g, std::uint32_t rule, std::uint32_t dot) {
  const Rule& r = g.rules()[rule];
  std::string out = g.name(r.lhs) + " ->";
  for (std::uint32_t i = 0; i <= r.rhs.size(); ++i) {
    if (i == dot) out += " \xe2\x80\xa2";  // U+2022
    if (i < r.rhs.size()) {
      out += ' ';
      out += g.name(r.rhs[i]);
    }
  }
  return out;
}

std::string dump(const CanonicalChart& chart, const Grammar& g) {
  std::vector<std::string> lines;
  lines.reserve(chart.items.size());
  for (const CanonicalItem& it : chart.items) {
    lines.push_back(std::to_string(it.k) + '\t' + dotted_rule_text(g, it.rule, it.dot) + '\t' +
                    std::to_string(it.origin));
  }
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const std::string& l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

}  // namespace late
