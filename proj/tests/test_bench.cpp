#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "late/bench.hpp"
#include "test_util.hpp"

using namespace late;
using late::test::load_fixture;

namespace {

// Minimal CSV reader for the suite format; fields never contain commas.
std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
      std::size_t comma = line.find(',', pos);
      if (comma == std::string::npos) {
        fields.push_back(line.substr(pos));
        break;
      }
      fields.push_back(line.substr(pos, comma - pos));
      pos = comma + 1;
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

TEST_CASE("speedup and efficiency formulas") {
  CHECK(compute_speedup(1.0, 1.0) == 1.0);
  CHECK(compute_speedup(0.5, 1.0) == 2.0);
  CHECK_THROWS_AS(compute_speedup(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(compute_speedup(1.0, -1.0), std::invalid_argument);

  CHECK(compute_efficiency(1000, 10, 0.1) == doctest::Approx(1000.0));
  CHECK(compute_efficiency(500, 1, 2.0) == doctest::Approx(250.0));
  CHECK(compute_efficiency(1000, 8, 0.1) == doctest::Approx(compute_efficiency(1000, 4, 0.1) / 2));
  CHECK_THROWS_AS(compute_efficiency(0, 1, 1), std::invalid_argument);
}

TEST_CASE("engine names round-trip") {
  CHECK(engine_from_name("earley") == EngineKind::Earley);
  CHECK(engine_from_name("late") == EngineKind::LateSerial);
  CHECK(engine_from_name("late-serial") == EngineKind::LateSerial);
  CHECK(engine_from_name("late-parallel") == EngineKind::LateParallel);
  CHECK(!engine_from_name("cyk").has_value());
  CHECK(engine_name(EngineKind::LateSerial) == "late-serial");
}

TEST_CASE("physical cores and effective processors") {
  int cores = physical_cores();
  CHECK(cores >= 0);
  if (cores > 0) {
    CHECK(effective_processors(1) == 1);
    CHECK(effective_processors(1000) == static_cast<unsigned>(cores));
  } else {
    CHECK(effective_processors(3) == 3);
  }
}

TEST_CASE("measure_runtime obeys the trial rule") {
  Grammar g = load_fixture("arith.grammar");
  Sentence w = tokenize("5 + 6 * 3", g);
  for (EngineKind e : {EngineKind::Earley, EngineKind::LateSerial, EngineKind::LateParallel}) {
    BenchConfig cfg;
    cfg.workers = 2;
    BenchResult r = measure_runtime(e, g, w, cfg);
    CHECK((r.trials >= 100 || r.total_s >= 1.0));
    CHECK(r.mean_s == r.total_s / r.trials);
    CHECK(r.chart_items > 0);
  }
}

TEST_CASE("chart_items is deterministic and engine-independent") {
  Grammar g = load_fixture("arith.grammar");
  Sentence w = tokenize("1 * 2 + 3", g);
  BenchConfig cfg;
  BenchResult a = measure_runtime(EngineKind::LateSerial, g, w, cfg);
  BenchResult b = measure_runtime(EngineKind::LateSerial, g, w, cfg);
  CHECK(a.chart_items == b.chart_items);
  cfg.workers = 1;
  BenchResult c = measure_runtime(EngineKind::LateParallel, g, w, cfg);
  CHECK(c.chart_items == a.chart_items);
  BenchResult d = measure_runtime(EngineKind::Earley, g, w, cfg);
  CHECK(d.chart_items == a.chart_items);
}

TEST_CASE("measure_runtime propagates engine rejection") {
  Grammar g = Grammar::parse("START -> N N\nN -> EPSILON");
  CHECK_THROWS_AS(measure_runtime(EngineKind::Earley, g, {}, {}), EngineRejection);
}

TEST_CASE("weak-scaling prefix search") {
  Grammar g = load_fixture("arith.grammar");
  Sentence w = tokenize("1 * 2 + 3 * 4 + 5 + 6 * 7", g);
  std::vector<std::size_t> counts = prefix_chart_items(g, w);
  REQUIRE(counts.size() == w.size() + 1);

  SUBCASE("counts are monotone") {
    for (std::size_t i = 0; i + 1 < counts.size(); ++i) CHECK(counts[i] <= counts[i + 1]);
  }
  SUBCASE("full-count target returns the full sentence count") {
    WeakScalingPrefix p = find_weak_scaling_prefix(g, w, counts.back());
    CHECK(p.chart_items == counts.back());
  }
  SUBCASE("empty-prefix target returns the empty prefix") {
    WeakScalingPrefix p = find_weak_scaling_prefix(g, w, counts.front());
    CHECK(p.length == 0);
    CHECK(p.chart_items == counts.front());
  }
  SUBCASE("every target matches the exhaustive-scan optimum") {
    auto closest = [&](std::size_t target) {
      std::size_t best = 0;
      auto dist = [&](std::size_t len) {
        return counts[len] > target ? counts[len] - target : target - counts[len];
      };
      for (std::size_t len = 1; len < counts.size(); ++len) {
        if (dist(len) < dist(best)) best = len;
      }
      return counts[best];
    };
    for (std::size_t target : {counts.front(), counts.back() / 2, counts.back() - 1,
                               counts[3] + 1, counts[5]}) {
      WeakScalingPrefix p = find_weak_scaling_prefix(g, w, target);
      CHECK(p.chart_items == closest(target));
    }
  }
  SUBCASE("unreachable target throws") {
    CHECK_THROWS_AS(find_weak_scaling_prefix(g, w, counts.back() + 1), BenchError);
  }
}

TEST_CASE("benchmark suite: cell layout and consistency") {
  Grammar g = load_fixture("arith.grammar");
  SuiteSpec spec;
  spec.grammar = &g;
  spec.grammar_id = "arith";
  spec.sentences.emplace_back("s1", tokenize("5 + 6 * 3", g));
  spec.parallel_workers = {1, 2, 4};
  std::vector<BenchRow> rows = run_benchmark_suite(spec);
  REQUIRE(rows.size() == 5);  // earley, late-serial, late-parallel x {1,2,4}
  CHECK(rows[0].result.engine == "earley");
  CHECK(rows[1].result.engine == "late-serial");
  CHECK(rows[2].result.workers == 1);
  CHECK(rows[4].result.workers == 4);
  for (const BenchRow& row : rows) {
    CHECK(row.error.empty());
    CHECK(row.result.chart_items == rows[0].result.chart_items);
    CHECK((row.result.trials >= 100 || row.result.total_s >= 1.0));
  }
  CHECK(rows[0].speedup_vs_earley == 1.0);
  CHECK(rows[1].speedup_vs_late_serial == 1.0);

  SUBCASE("csv columns recompute exactly") {
    std::ostringstream csv;
    write_suite_csv(csv, rows);
    std::vector<std::vector<std::string>> parsed = parse_csv(csv.str());
    REQUIRE(parsed.size() == 6);
    CHECK(parsed[0] == std::vector<std::string>{
                           "engine", "workers", "grammar_id", "sentence_id", "trials", "total_s",
                           "mean_s", "chart_items", "speedup_vs_earley", "speedup_vs_late_serial",
                           "efficiency_items_per_s_per_p"});
    double earley_mean = std::strtod(parsed[1][6].c_str(), nullptr);
    double late_mean = std::strtod(parsed[2][6].c_str(), nullptr);
    for (std::size_t i = 1; i < parsed.size(); ++i) {
      const std::vector<std::string>& f = parsed[i];
      REQUIRE(f.size() == 11);
      int trials = std::atoi(f[4].c_str());
      double total = std::strtod(f[5].c_str(), nullptr);
      double mean = std::strtod(f[6].c_str(), nullptr);
      double items = std::strtod(f[7].c_str(), nullptr);
      CHECK((trials >= 100 || total >= 1.0));
      CHECK(mean == total / trials);  // exact: same doubles, round-trip format
      CHECK(std::strtod(f[8].c_str(), nullptr) == earley_mean / mean);
      CHECK(std::strtod(f[9].c_str(), nullptr) == late_mean / mean);
      unsigned workers = static_cast<unsigned>(std::atoi(f[1].c_str()));
      CHECK(std::strtod(f[10].c_str(), nullptr) ==
            items / (effective_processors(workers) * mean));
    }
  }
}

TEST_CASE("benchmark suite records failures and continues") {
  Grammar g = Grammar::parse("START -> N N | a\nN -> EPSILON");
  SuiteSpec spec;
  spec.grammar = &g;
  spec.grammar_id = "eps";
  spec.sentences.emplace_back("s1", tokenize("a", g));
  spec.parallel_workers = {2};
  std::vector<BenchRow> rows = run_benchmark_suite(spec);
  REQUIRE(rows.size() == 3);
  CHECK(!rows[0].error.empty());  // earley refuses the epsilon grammar
  CHECK(rows[1].error.empty());
  CHECK(rows[2].error.empty());
  CHECK(rows[1].speedup_vs_earley == 0.0);  // baseline missing
  CHECK(rows[1].speedup_vs_late_serial == 1.0);
  std::ostringstream csv;
  write_suite_csv(csv, rows);
  CHECK(csv.str().find("# earley") != std::string::npos);
}

TEST_CASE("ambiguity sweep") {
  Grammar seed = load_fixture("arith.grammar");
  Sentence w = tokenize("5 + 6 * 3", seed);
  SweepConfig cfg;
  cfg.engine = EngineKind::LateSerial;
  cfg.grammar_id = "arith";
  cfg.sentence_id = "s1";
  std::vector<SweepRow> rows = run_ambiguity_sweep(seed, {1, 2, 4}, w, cfg);
  REQUIRE(rows.size() == 3);
  for (const SweepRow& row : rows) CHECK(row.error.empty());
  // m=1 reproduces the unreplicated baseline's chart size
  BenchResult base = measure_runtime(EngineKind::LateSerial, seed, w, cfg.base);
  CHECK(rows[0].result.chart_items == base.chart_items);
  CHECK(rows[0].result.chart_items < rows[1].result.chart_items);
  CHECK(rows[1].result.chart_items < rows[2].result.chart_items);

  std::ostringstream csv;
  write_sweep_csv(csv, rows);
  std::vector<std::vector<std::string>> parsed = parse_csv(csv.str());
  REQUIRE(parsed.size() == 4);
  CHECK(parsed[0][0] == "m");
  CHECK(parsed[1][0] == "1");
  CHECK(parsed[3][0] == "4");
  // items_per_s recomputes from the row
  for (std::size_t i = 1; i < parsed.size(); ++i) {
    double mean = std::strtod(parsed[i][7].c_str(), nullptr);
    double items = std::strtod(parsed[i][8].c_str(), nullptr);
    CHECK(std::strtod(parsed[i][9].c_str(), nullptr) == items / mean);
  }
}

TEST_CASE("sweep records replication-cap failures") {
  Grammar seed = load_fixture("arith.grammar");
  Sentence w = tokenize("5", seed);
  SweepConfig cfg;
  cfg.engine = EngineKind::LateSerial;
  cfg.rule_cap = 100;
  std::vector<SweepRow> rows = run_ambiguity_sweep(seed, {1, 50}, w, cfg);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].error.empty());
  CHECK(!rows[1].error.empty());
}
