#ifndef LATE_BENCH_HPP
#define LATE_BENCH_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "late/grammar.hpp"
#include "late/late.hpp"
#include "late/parallel.hpp"

namespace late {

class BenchError : public std::runtime_error {
 public:
  explicit BenchError(const std::string& what) : std::runtime_error(what) {}
};

enum class EngineKind { Earley, LateSerial, LateParallel };

std::string_view engine_name(EngineKind e);  // earley | late-serial | late-parallel
/// Accepts "late" as an alias for late-serial.
std::optional<EngineKind> engine_from_name(std::string_view name);

/// Physical core count from /proc/cpuinfo (unique physical id/core id
/// pairs); 0 when not derivable.
int physical_cores();

/// p as used in the efficiency metric: physical cores when derivable,
/// capped by the configured worker count; the configured count otherwise.
unsigned effective_processors(unsigned workers);

struct BenchConfig {
  unsigned workers = 1;  // late-parallel only
  QueuePolicy policy = QueuePolicy::Fifo;
  std::uint64_t seed = 0;
  int warmup_runs = 3;
  double warmup_budget_s = 2.0;  // stop warming up early past this
  int max_trials = 100;
  double min_total_s = 1.0;
};

struct BenchResult {
  std::string engine;
  unsigned workers = 1;
  std::string grammar_id;
  std::string sentence_id;
  int trials = 0;
  double total_s = 0.0;
  double mean_s = 0.0;
  std::size_t chart_items = 0;
};

/// Wall-clock timing of chart construction only: the bracket opens after
/// the engine's structures are allocated/reset and closes at fixpoint.
/// Trials stop at 100 or once the total exceeds 1 second, whichever comes
/// first, after up to warmup_runs untimed runs (one of which records
/// chart_items). Engine rejections (e.g. Earley on an epsilon grammar)
/// propagate.
BenchResult measure_runtime(EngineKind engine, const Grammar& g, const Sentence& w,
                            const BenchConfig& cfg = {});

/// Speedup of A over B given their runtimes: t_B / t_A.
double compute_speedup(double t_a_s, double t_b_s);
/// Chart items per second per processor: n / (p * t).
double compute_efficiency(double chart_items, double processors, double seconds);

/// Chart item count for every prefix length 0..|w| (serial LATE; the count
/// is engine-independent).
std::vector<std::size_t> prefix_chart_items(const Grammar& g, const Sentence& w);

struct WeakScalingPrefix {
  std::size_t length;
  std::size_t chart_items;
};

/// Binary search for the prefix of w whose chart item count is closest to
/// target (ties -> shorter prefix). The count must be monotonically
/// non-decreasing in prefix length, which is asserted before searching;
/// throws BenchError on violation or when even the full sentence is
/// below target.
WeakScalingPrefix find_weak_scaling_prefix(const Grammar& g, const Sentence& w,
                                           std::size_t target);

struct SuiteSpec {
  std::string grammar_id;
  const Grammar* grammar = nullptr;
  std::vector<std::pair<std::string, Sentence>> sentences;  // (id, tokens)
  bool run_earley = true;
  bool run_late_serial = true;
  std::vector<unsigned> parallel_workers;  // one late-parallel cell each
  BenchConfig base;
};

struct BenchRow {
  BenchResult result;
  // 0 means "baseline missing"; written as an empty CSV field.
  double speedup_vs_earley = 0.0;
  double speedup_vs_late_serial = 0.0;
  double efficiency = 0.0;
  std::string error;  // non-empty: the cell failed and carries no numbers
};

/// One row per (engine, workers, sentence) cell. Cell failures are
/// recorded on the row and the suite continues.
std::vector<BenchRow> run_benchmark_suite(const SuiteSpec& spec);

/// Header: engine,workers,grammar_id,sentence_id,trials,total_s,mean_s,
/// chart_items,speedup_vs_earley,speedup_vs_late_serial,
/// efficiency_items_per_s_per_p. Floats are written round-trip exact
/// (%.17g); failed cells become `#`-comment lines.
void write_suite_csv(std::ostream& out, const std::vector<BenchRow>& rows);

struct SweepConfig {
  EngineKind engine = EngineKind::LateParallel;
  std::string grammar_id;
  std::string sentence_id;
  std::size_t rule_cap = kDefaultReplicationCap;
  BenchConfig base;
};

struct SweepRow {
  std::uint32_t replicas = 1;
  BenchResult result;
  double items_per_s = 0.0;
  std::string error;
};

/// Fixed engine, worker count, and sentence; replication factor m varies.
/// The sentence is given against the seed grammar and re-tokenized per
/// replica (replication preserves terminal names).
std::vector<SweepRow> run_ambiguity_sweep(const Grammar& seed_grammar,
                                          const std::vector<std::uint32_t>& replicas,
                                          const Sentence& w, const SweepConfig& cfg);

/// Header: m,engine,workers,grammar_id,sentence_id,trials,total_s,mean_s,
/// chart_items,items_per_s.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace late

#endif  // LATE_BENCH_HPP
