#include "late/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <set>

#include "late/earley.hpp"

namespace late {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_between(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string_view engine_name(EngineKind e) {
  switch (e) {
    case EngineKind::Earley:
      return "earley";
    case EngineKind::LateSerial:
      return "late-serial";
    case EngineKind::LateParallel:
      return "late-parallel";
  }
  return "?";
}

std::optional<EngineKind> engine_from_name(std::string_view name) {
  if (name == "earley") return EngineKind::Earley;
  if (name == "late" || name == "late-serial") return EngineKind::LateSerial;
  if (name == "late-parallel") return EngineKind::LateParallel;
  return std::nullopt;
}

int physical_cores() {
  static const int cached = [] {
    std::ifstream in("/proc/cpuinfo");
    if (!in) return 0;
    std::set<std::pair<int, int>> cores;
    int physical_id = 0;
    int cpu_cores = 0;
    for (std::string line; std::getline(in, line);) {
      auto colon = line.find(':');
      if (colon == std::string::npos) continue;
      std::string key = line.substr(0, colon);
      while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
      int value = std::atoi(line.c_str() + colon + 1);
      if (key == "physical id") {
        physical_id = value;
      } else if (key == "core id") {
        cores.insert({physical_id, value});
      } else if (key == "cpu cores" && cpu_cores == 0) {
        cpu_cores = value;
      }
    }
    if (!cores.empty()) return static_cast<int>(cores.size());
    return cpu_cores;  // single-socket fallback; 0 if nothing was found
  }();
  return cached;
}

unsigned effective_processors(unsigned workers) {
  int physical = physical_cores();
  if (physical <= 0) return workers;
  return std::min(workers, static_cast<unsigned>(physical));
}

BenchResult measure_runtime(EngineKind engine, const Grammar& g, const Sentence& w,
                            const BenchConfig& cfg) {
  BenchResult res;
  res.engine = engine_name(engine);
  res.workers = engine == EngineKind::LateParallel ? std::max(1u, cfg.workers) : 1;

  std::optional<EarleyParser> earley;
  std::optional<LateParser> serial;
  std::optional<ParallelLateParser> parallel;
  std::function<void()> prepare;
  std::function<void()> run;
  std::function<std::size_t()> items;

  switch (engine) {
    case EngineKind::Earley: {
      EarleyValidation v = validate_for_earley(g);
      if (!v.ok()) throw EngineRejection(v.message(g));
      earley.emplace(g);
      prepare = [&] { earley->prepare(w); };
      run = [&] { earley->run(); };
      items = [&] { return earley->chart().total_items(); };
      break;
    }
    case EngineKind::LateSerial: {
      serial.emplace(g, cfg.policy, cfg.seed);
      prepare = [&] { serial->prepare(w); };
      run = [&] { serial->run(); };
      items = [&] { return serial->chart().size(); };
      break;
    }
    case EngineKind::LateParallel: {
      parallel.emplace(g, ParallelConfig{res.workers, cfg.policy, cfg.seed});
      prepare = [&] { parallel->prepare(w); };
      run = [&] { parallel->run(); };
      items = [&] { return parallel->take_chart().size(); };
      break;
    }
  }

  // Warmup; the first run doubles as the verification run that records the
  // chart size. Long-running engines stop warming up once over budget.
  double warm = 0.0;
  for (int i = 0; i < std::max(1, cfg.warmup_runs); ++i) {
    Clock::time_point t0 = Clock::now();
    prepare();
    run();
    warm += seconds_between(t0, Clock::now());
    if (i == 0) res.chart_items = items();
    if (warm > cfg.warmup_budget_s) break;
  }

  int trials = 0;
  double total = 0.0;
  do {
    prepare();
    Clock::time_point t0 = Clock::now();
    run();
    total += seconds_between(t0, Clock::now());
    ++trials;
  } while (trials < cfg.max_trials && total <= cfg.min_total_s);

  res.trials = trials;
  res.total_s = total;
  res.mean_s = total / trials;
  return res;
}

double compute_speedup(double t_a_s, double t_b_s) {
  if (t_a_s <= 0.0 || t_b_s <= 0.0) throw std::invalid_argument("speedup needs positive times");
  return t_b_s / t_a_s;
}

double compute_efficiency(double chart_items, double processors, double seconds) {
  if (chart_items <= 0.0 || processors <= 0.0 || seconds <= 0.0) {
    throw std::invalid_argument("efficiency needs positive inputs");
  }
  return chart_items / (processors * seconds);
}

std::vector<std::size_t> prefix_chart_items(const Grammar& g, const Sentence& w) {
  std::vector<std::size_t> counts;
  counts.reserve(w.size() + 1);
  LateParser p(g);
  for (std::size_t len = 0; len <= w.size(); ++len) {
    Sentence prefix = w.prefix(len);
    p.prepare(prefix);
    p.run();
    counts.push_back(p.chart().size());
  }
  return counts;
}

WeakScalingPrefix find_weak_scaling_prefix(const Grammar& g, const Sentence& w,
                                           std::size_t target) {
  std::vector<std::size_t> counts = prefix_chart_items(g, w);
  for (std::size_t i = 0; i + 1 < counts.size(); ++i) {
    if (counts[i] > counts[i + 1]) {
      throw BenchError("chart item count is not monotone in prefix length (len " +
                       std::to_string(i) + " -> " + std::to_string(i + 1) + ")");
    }
  }
  if (target > counts.back()) {
    throw BenchError("target " + std::to_string(target) + " unreachable: full sentence yields " +
                     std::to_string(counts.back()) + " items");
  }
  // First prefix at or above target; counts are monotone, so this and its
  // predecessor are the two candidates.
  std::size_t above =
      std::lower_bound(counts.begin(), counts.end(), target) - counts.begin();
  std::size_t best = above;
  if (above > 0) {
    std::size_t below = above - 1;
    if (target - counts[below] <= counts[above] - target) {
      // Distance tie goes to the shorter prefix; land on the start of the
      // plateau sharing the winning count.
      best = std::lower_bound(counts.begin(), counts.end(), counts[below]) - counts.begin();
    }
  }
  return {best, counts[best]};
}

std::vector<BenchRow> run_benchmark_suite(const SuiteSpec& spec) {
  std::vector<BenchRow> rows;
  for (const auto& [sentence_id, w] : spec.sentences) {
    std::vector<BenchRow> group;
    auto cell = [&](EngineKind e, unsigned workers) {
      BenchRow row;
      BenchConfig c = spec.base;
      c.workers = workers;
      try {
        row.result = measure_runtime(e, *spec.grammar, w, c);
      } catch (const std::exception& ex) {
        row.error = ex.what();
        row.result.engine = engine_name(e);
        row.result.workers = e == EngineKind::LateParallel ? workers : 1;
      }
      row.result.grammar_id = spec.grammar_id;
      row.result.sentence_id = sentence_id;
      group.push_back(std::move(row));
    };

    if (spec.run_earley) cell(EngineKind::Earley, 1);
    if (spec.run_late_serial) cell(EngineKind::LateSerial, 1);
    for (unsigned p : spec.parallel_workers) cell(EngineKind::LateParallel, p);

    double t_earley = 0.0;
    double t_late = 0.0;
    for (const BenchRow& row : group) {
      if (!row.error.empty()) continue;
      if (row.result.engine == "earley") t_earley = row.result.mean_s;
      if (row.result.engine == "late-serial") t_late = row.result.mean_s;
    }
    for (BenchRow& row : group) {
      if (row.error.empty() && row.result.mean_s > 0.0) {
        if (t_earley > 0.0) row.speedup_vs_earley = compute_speedup(row.result.mean_s, t_earley);
        if (t_late > 0.0) {
          row.speedup_vs_late_serial = compute_speedup(row.result.mean_s, t_late);
        }
        row.efficiency = compute_efficiency(static_cast<double>(row.result.chart_items),
                                            effective_processors(row.result.workers),
                                            row.result.mean_s);
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_suite_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "engine,workers,grammar_id,sentence_id,trials,total_s,mean_s,chart_items,"
         "speedup_vs_earley,speedup_vs_late_serial,efficiency_items_per_s_per_p\n";
  for (const BenchRow& row : rows) {
    const BenchResult& r = row.result;
    if (!row.error.empty()) {
      out << "# " << r.engine << " workers=" << r.workers << " " << r.grammar_id << "/"
          << r.sentence_id << " failed: " << row.error << "\n";
      continue;
    }
    out << r.engine << ',' << r.workers << ',' << r.grammar_id << ',' << r.sentence_id << ','
        << r.trials << ',' << g17(r.total_s) << ',' << g17(r.mean_s) << ',' << r.chart_items
        << ',' << (row.speedup_vs_earley > 0.0 ? g17(row.speedup_vs_earley) : "") << ','
        << (row.speedup_vs_late_serial > 0.0 ? g17(row.speedup_vs_late_serial) : "") << ','
        << (row.efficiency > 0.0 ? g17(row.efficiency) : "") << '\n';
  }
}

std::vector<SweepRow> run_ambiguity_sweep(const Grammar& seed_grammar,
                                          const std::vector<std::uint32_t>& replicas,
                                          const Sentence& w, const SweepConfig& cfg) {
  std::vector<SweepRow> rows;
  std::string sentence_text = w.to_text(seed_grammar);
  for (std::uint32_t m : replicas) {
    SweepRow row;
    row.replicas = m;
    try {
      Grammar gm = replicate_nonterminals(seed_grammar, m, cfg.rule_cap);
      Sentence wm = tokenize(sentence_text, gm);
      row.result = measure_runtime(cfg.engine, gm, wm, cfg.base);
      row.result.grammar_id = cfg.grammar_id + ":m" + std::to_string(m);
      row.result.sentence_id = cfg.sentence_id;
      if (row.result.mean_s > 0.0) {
        row.items_per_s = static_cast<double>(row.result.chart_items) / row.result.mean_s;
      }
    } catch (const std::exception& ex) {
      row.error = ex.what();
      row.result.engine = engine_name(cfg.engine);
      row.result.workers = cfg.base.workers;
      row.result.grammar_id = cfg.grammar_id + ":m" + std::to_string(m);
      row.result.sentence_id = cfg.sentence_id;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "m,engine,workers,grammar_id,sentence_id,trials,total_s,mean_s,chart_items,"
         "items_per_s\n";
  for (const SweepRow& row : rows) {
    const BenchResult& r = row.result;
    if (!row.error.empty()) {
      out << "# m=" << row.replicas << " " << r.engine << " failed: " << row.error << "\n";
      continue;
    }
    out << row.replicas << ',' << r.engine << ',' << r.workers << ',' << r.grammar_id << ','
        << r.sentence_id << ',' << r.trials << ',' << g17(r.total_s) << ',' << g17(r.mean_s)
        << ',' << r.chart_items << ',' << (row.items_per_s > 0.0 ? g17(row.items_per_s) : "")
        << '\n';
  }
}

}  // namespace late
