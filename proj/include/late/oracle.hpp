#ifndef LATE_ORACLE_HPP
#define LATE_ORACLE_HPP

#include <cstdint>
#include <stdexcept>

#include "late/grammar.hpp"

namespace late {

class OracleLimit : public std::runtime_error {
 public:
  explicit OracleLimit(const std::string& what) : std::runtime_error(what) {}
};

struct OracleConfig {
  std::size_t max_sentence_len = 10;
  std::size_t max_steps = 5'000'000;
};

/// Independent recognition oracle: breadth-first expansion of leftmost
/// sentential forms, sharing no chart-parsing machinery with the engines.
/// Forms are pruned when their matched prefix diverges from w or when the
/// minimum derivable length of the remainder exceeds what is left of w;
/// a visited set plus a form-length cap makes cyclic grammars (A -> B,
/// B -> A) and nullable pumping terminate. Throws OracleLimit if w is
/// longer than the cap or the step budget runs out.
bool brute_force_recognize(const Grammar& g, const Sentence& w, const OracleConfig& cfg = {});

}  // namespace late

#endif  // LATE_ORACLE_HPP
