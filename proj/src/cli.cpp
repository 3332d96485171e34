#include "late/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "late/bench.hpp"
#include "late/canonical.hpp"
#include "late/earley.hpp"
#include "late/grammar.hpp"
#include "late/late.hpp"
#include "late/oracle.hpp"
#include "late/parallel.hpp"

namespace late::cli {
namespace {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// One sentence per line; a lone trailing newline does not add a sentence,
// empty lines elsewhere are empty sentences.
std::vector<std::string> read_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) {
      lines.push_back(text.substr(pos));
      break;
    }
    std::string line = text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    pos = eol + 1;
  }
  if (!lines.empty() && lines.back().empty() && text.size() > 0 && text.back() == '\n') {
    lines.pop_back();
  }
  if (lines.size() == 1 && lines[0].empty() && text.empty()) lines.clear();
  return lines;
}

Grammar load_grammar(const std::string& path) { return Grammar::parse(read_file(path)); }

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

QueuePolicy policy_from(const std::string& name) {
  if (name == "fifo") return QueuePolicy::Fifo;
  if (name == "lifo") return QueuePolicy::Lifo;
  if (name == "random") return QueuePolicy::Random;
  throw std::runtime_error("unknown queue policy '" + name + "'");
}

unsigned env_workers_override(unsigned workers, std::ostream& err) {
  if (const char* env = std::getenv("LATE_WORKERS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) {
      if (static_cast<unsigned>(v) != workers) {
        err << "note: LATE_WORKERS=" << v << " overrides workers\n";
      }
      return static_cast<unsigned>(v);
    }
  }
  return workers;
}

// Inline sentence wins over a sentence file; recognize/chart use the
// file's first line.
std::string pick_sentence_text(const std::string& inline_text, const std::string& file,
                               bool inline_given, std::ostream& err) {
  if (inline_given && !file.empty()) {
    err << "warning: both -s and -S given; using the inline sentence\n";
  }
  if (inline_given) return inline_text;
  if (!file.empty()) {
    std::vector<std::string> lines = read_lines(read_file(file));
    return lines.empty() ? std::string() : lines[0];
  }
  throw std::runtime_error("no sentence given (use -s or -S)");
}

CanonicalChart run_engine(EngineKind engine, const Grammar& g, const Sentence& w,
                          unsigned workers, QueuePolicy policy, std::uint64_t seed) {
  switch (engine) {
    case EngineKind::Earley:
      return canonicalize_earley(earley_parse(g, w));
    case EngineKind::LateSerial:
      return canonicalize_late(late_parse(g, w, policy, seed));
    case EngineKind::LateParallel:
      return canonicalize_late(late_parse_parallel(g, w, {workers, policy, seed}));
  }
  throw std::logic_error("bad engine");
}

bool chart_has_finished_start(const CanonicalChart& c, const Grammar& g, const Sentence& w) {
  for (const CanonicalItem& it : c.items) {
    const Rule& r = g.rules()[it.rule];
    if (r.lhs == g.start() && it.dot == r.rhs.size() && it.origin == 0 && it.k == w.size()) {
      return true;
    }
  }
  return false;
}

void write_output(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty()) {
    out << content;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << content;
}

struct VerifyStats {
  int passed = 0;
  int failed = 0;
};

void print_diff(std::ostream& err, const Grammar& g, const ChartDiff& d, const std::string& a,
                const std::string& b) {
  auto show = [&](const std::vector<CanonicalItem>& items, const std::string& side) {
    std::size_t shown = 0;
    for (const CanonicalItem& it : items) {
      if (++shown > 8) {
        err << "    ... (" << items.size() - 8 << " more only in " << side << ")\n";
        break;
      }
      err << "    only in " << side << ": " << it.k << "\t"
          << dotted_rule_text(g, it.rule, it.dot) << "\t" << it.origin << "\n";
    }
  };
  show(d.only_a, a);
  show(d.only_b, b);
}

void verify_fixture(const std::string& grammar_path, std::ostream& out, std::ostream& err,
                    const std::vector<unsigned>& workers, int reps, std::size_t oracle_cap,
                    VerifyStats& stats) {
  std::string name = stem_of(grammar_path);
  Grammar g = load_grammar(grammar_path);
  fs::path sentences_path = fs::path(grammar_path).replace_extension(".sentences");
  if (!fs::exists(sentences_path)) {
    err << "note: no sentences file for " << name << ", skipping\n";
    return;
  }
  std::vector<std::string> lines = read_lines(read_file(sentences_path.string()));
  bool epsilon_free = !g.has_epsilon_rules();

  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string id = name + ":" + std::to_string(i + 1);
    bool ok = true;
    try {
      Sentence w = tokenize(lines[i], g);
      CanonicalChart reference = canonicalize_late(late_parse(g, w));

      if (epsilon_free) {
        CanonicalChart earley = canonicalize_earley(earley_parse(g, w));
        ChartDiff d = compare_charts(earley, reference);
        if (!d.equal()) {
          ok = false;
          err << "FAIL " << id << ": earley chart differs from late\n";
          print_diff(err, g, d, "earley", "late");
        }
      }
      for (unsigned p : workers) {
        ParallelLateParser pool(g, {p, QueuePolicy::Fifo, 0});
        for (int rep = 0; rep < reps; ++rep) {
          CanonicalChart got = canonicalize_late(pool.parse(w));
          ChartDiff d = compare_charts(got, reference);
          if (!d.equal()) {
            ok = false;
            err << "FAIL " << id << ": late-parallel(workers=" << p << ", rep=" << rep
                << ") differs from late\n";
            print_diff(err, g, d, "late-parallel", "late");
          }
        }
      }
      if (w.size() <= oracle_cap) {
        bool want = brute_force_recognize(g, w, {oracle_cap});
        bool got = chart_has_finished_start(reference, g, w);
        if (want != got) {
          ok = false;
          err << "FAIL " << id << ": oracle says " << (want ? "true" : "false")
              << ", late says " << (got ? "true" : "false") << "\n";
        }
      }
    } catch (const std::exception& ex) {
      ok = false;
      err << "FAIL " << id << ": " << ex.what() << "\n";
    }
    if (ok) {
      out << "PASS " << id << "\n";
      ++stats.passed;
    } else {
      out << "FAIL " << id << "\n";
      ++stats.failed;
    }
  }
}

std::string version_line() { return "late 1.0.0"; }

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Context-free recognition: classic Earley, the order-independent"
               " late engine, and a parallel late engine, with verification and"
               " benchmarking tools."};
  app.set_version_flag("--version", version_line());
  app.require_subcommand(1);
  int exit_code = 0;

  // recognize ----------------------------------------------------------------
  auto* rec = app.add_subcommand("recognize", "Print true/false for a sentence");
  std::string rec_grammar, rec_sentence, rec_sentence_file, rec_engine = "late",
              rec_policy = "fifo";
  unsigned rec_workers = 0;
  std::uint64_t rec_seed = 0;
  rec->add_option("-g,--grammar", rec_grammar, "grammar file")->required();
  auto* rec_s = rec->add_option("-s,--sentence", rec_sentence, "inline sentence");
  rec->add_option("-S,--sentence-file", rec_sentence_file, "sentence file (first line)");
  rec->add_option("-e,--engine", rec_engine, "earley | late | late-parallel");
  rec->add_option("-w,--workers", rec_workers, "worker count (late-parallel)");
  rec->add_option("--queue-policy", rec_policy, "fifo | lifo | random");
  rec->add_option("--seed", rec_seed, "seed for the random queue policy");
  rec->callback([&] {
    Grammar g = load_grammar(rec_grammar);
    Sentence w = tokenize(pick_sentence_text(rec_sentence, rec_sentence_file,
                                             rec_s->count() > 0, err),
                          g);
    auto engine = engine_from_name(rec_engine);
    if (!engine) throw std::runtime_error("unknown engine '" + rec_engine + "'");
    unsigned workers = env_workers_override(
        rec_workers ? rec_workers : std::max(2, physical_cores()), err);
    CanonicalChart c = run_engine(*engine, g, w, workers, policy_from(rec_policy), rec_seed);
    bool recognized = chart_has_finished_start(c, g, w);
    out << (recognized ? "true" : "false") << "\n";
    exit_code = recognized ? 0 : 1;
  });

  // chart ------------------------------------------------------------------
  auto* cht = app.add_subcommand("chart", "Print the canonical chart dump");
  std::string cht_grammar, cht_sentence, cht_sentence_file, cht_engine = "late",
              cht_policy = "fifo", cht_out;
  unsigned cht_workers = 0;
  std::uint64_t cht_seed = 0;
  cht->add_option("-g,--grammar", cht_grammar, "grammar file")->required();
  auto* cht_s = cht->add_option("-s,--sentence", cht_sentence, "inline sentence");
  cht->add_option("-S,--sentence-file", cht_sentence_file, "sentence file (first line)");
  cht->add_option("-e,--engine", cht_engine, "earley | late | late-parallel");
  cht->add_option("-w,--workers", cht_workers, "worker count (late-parallel)");
  cht->add_option("--queue-policy", cht_policy, "fifo | lifo | random");
  cht->add_option("--seed", cht_seed, "seed for the random queue policy");
  cht->add_option("-o,--output", cht_out, "output file (default stdout)");
  cht->callback([&] {
    Grammar g = load_grammar(cht_grammar);
    Sentence w = tokenize(pick_sentence_text(cht_sentence, cht_sentence_file,
                                             cht_s->count() > 0, err),
                          g);
    auto engine = engine_from_name(cht_engine);
    if (!engine) throw std::runtime_error("unknown engine '" + cht_engine + "'");
    unsigned workers = env_workers_override(
        cht_workers ? cht_workers : std::max(2, physical_cores()), err);
    CanonicalChart c = run_engine(*engine, g, w, workers, policy_from(cht_policy), cht_seed);
    write_output(cht_out, dump(c, g), out);
  });

  // verify -----------------------------------------------------------------
  auto* ver = app.add_subcommand("verify", "Cross-engine chart equality over fixtures");
  std::string ver_dir;
  std::vector<unsigned> ver_workers{2, 4};
  int ver_reps = 2;
  std::size_t ver_oracle_cap = 10;
  ver->add_option("-d,--fixtures", ver_dir, "directory of .grammar/.sentences pairs")
      ->required();
  ver->add_option("-w,--workers", ver_workers, "parallel worker counts to test");
  ver->add_option("--reps", ver_reps, "repetitions per worker count");
  ver->add_option("--oracle-cap", ver_oracle_cap, "max sentence length for the oracle check");
  ver->callback([&] {
    std::vector<std::string> grammars;
    for (const fs::directory_entry& e : fs::directory_iterator(ver_dir)) {
      if (e.path().extension() == ".grammar") grammars.push_back(e.path().string());
    }
    std::sort(grammars.begin(), grammars.end());
    if (grammars.empty()) throw std::runtime_error("no .grammar files in " + ver_dir);
    unsigned env = env_workers_override(0, err);
    if (env) ver_workers = {env};
    VerifyStats stats;
    for (const std::string& path : grammars) {
      verify_fixture(path, out, err, ver_workers, ver_reps, ver_oracle_cap, stats);
    }
    out << stats.passed << " passed, " << stats.failed << " failed\n";
    exit_code = stats.failed == 0 ? 0 : 1;
  });

  // bench ------------------------------------------------------------------
  auto* ben = app.add_subcommand("bench", "Benchmark suite CSV");
  std::string ben_grammar, ben_sentence, ben_sentence_file, ben_policy = "fifo", ben_out;
  std::vector<std::string> ben_engines{"earley", "late", "late-parallel"};
  std::vector<unsigned> ben_workers{1, 2, 4};
  std::uint64_t ben_seed = 0;
  ben->add_option("-g,--grammar", ben_grammar, "grammar file")->required();
  auto* ben_s = ben->add_option("-s,--sentence", ben_sentence, "inline sentence");
  ben->add_option("-S,--sentence-file", ben_sentence_file, "sentence file (one per line)");
  ben->add_option("-e,--engines", ben_engines, "engines to run")->delimiter(',');
  ben->add_option("-w,--workers", ben_workers, "late-parallel worker counts")->delimiter(',');
  ben->add_option("--queue-policy", ben_policy, "fifo | lifo | random");
  ben->add_option("--seed", ben_seed, "seed for the random queue policy");
  ben->add_option("-o,--output", ben_out, "output CSV file (default stdout)");
  ben->callback([&] {
    Grammar g = load_grammar(ben_grammar);
    SuiteSpec spec;
    spec.grammar = &g;
    spec.grammar_id = stem_of(ben_grammar);
    if (ben_s->count() > 0) {
      if (!ben_sentence_file.empty()) {
        err << "warning: both -s and -S given; using the inline sentence\n";
      }
      spec.sentences.emplace_back("inline", tokenize(ben_sentence, g));
    } else if (!ben_sentence_file.empty()) {
      std::vector<std::string> lines = read_lines(read_file(ben_sentence_file));
      std::string stem = stem_of(ben_sentence_file);
      for (std::size_t i = 0; i < lines.size(); ++i) {
        spec.sentences.emplace_back(stem + ":" + std::to_string(i + 1),
                                    tokenize(lines[i], g));
      }
    } else {
      throw std::runtime_error("no sentence given (use -s or -S)");
    }
    spec.run_earley = false;
    spec.run_late_serial = false;
    for (const std::string& e : ben_engines) {
      auto engine = engine_from_name(e);
      if (!engine) throw std::runtime_error("unknown engine '" + e + "'");
      if (*engine == EngineKind::Earley) spec.run_earley = true;
      if (*engine == EngineKind::LateSerial) spec.run_late_serial = true;
      if (*engine == EngineKind::LateParallel) spec.parallel_workers = ben_workers;
    }
    spec.base.policy = policy_from(ben_policy);
    spec.base.seed = ben_seed;
    std::ostringstream csv;
    write_suite_csv(csv, run_benchmark_suite(spec));
    write_output(ben_out, csv.str(), out);
  });

  // sweep ------------------------------------------------------------------
  auto* swp = app.add_subcommand("sweep", "Ambiguity sweep CSV over replication factors");
  std::string swp_grammar, swp_sentence, swp_sentence_file, swp_engine = "late-parallel",
              swp_policy = "fifo", swp_out;
  std::vector<std::uint32_t> swp_replicas{1, 2, 4};
  unsigned swp_workers = 0;
  std::uint64_t swp_seed = 0;
  std::size_t swp_cap = kDefaultReplicationCap;
  swp->add_option("-g,--grammar", swp_grammar, "seed grammar file")->required();
  auto* swp_s = swp->add_option("-s,--sentence", swp_sentence, "inline sentence");
  swp->add_option("-S,--sentence-file", swp_sentence_file, "sentence file (first line)");
  swp->add_option("-m,--replicas", swp_replicas, "replication factors")->delimiter(',');
  swp->add_option("-e,--engine", swp_engine, "earley | late | late-parallel");
  swp->add_option("-w,--workers", swp_workers, "worker count (late-parallel)");
  swp->add_option("--queue-policy", swp_policy, "fifo | lifo | random");
  swp->add_option("--seed", swp_seed, "seed for the random queue policy");
  swp->add_option("--cap", swp_cap, "replication rule cap");
  swp->add_option("-o,--output", swp_out, "output CSV file (default stdout)");
  swp->callback([&] {
    Grammar g = load_grammar(swp_grammar);
    std::string text = pick_sentence_text(swp_sentence, swp_sentence_file,
                                          swp_s->count() > 0, err);
    Sentence w = tokenize(text, g);
    auto engine = engine_from_name(swp_engine);
    if (!engine) throw std::runtime_error("unknown engine '" + swp_engine + "'");
    SweepConfig cfg;
    cfg.engine = *engine;
    cfg.grammar_id = stem_of(swp_grammar);
    cfg.sentence_id = swp_s->count() > 0 ? "inline" : stem_of(swp_sentence_file) + ":1";
    cfg.rule_cap = swp_cap;
    cfg.base.workers = env_workers_override(
        swp_workers ? swp_workers : std::max(2, physical_cores()), err);
    cfg.base.policy = policy_from(swp_policy);
    cfg.base.seed = swp_seed;
    std::ostringstream csv;
    write_sweep_csv(csv, run_ambiguity_sweep(g, swp_replicas, w, cfg));
    write_output(swp_out, csv.str(), out);
  });

  // gen --------------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "Grammar transforms");
  gen->require_subcommand(1);
  auto* rep = gen->add_subcommand("replicate", "Replicate non-START nonterminals m times");
  std::string rep_grammar, rep_out;
  std::uint32_t rep_m = 2;
  std::size_t rep_cap = kDefaultReplicationCap;
  rep->add_option("-g,--grammar", rep_grammar, "grammar file")->required();
  rep->add_option("-m,--replicas", rep_m, "replication factor")->required();
  rep->add_option("--cap", rep_cap, "rule cap");
  rep->add_option("-o,--output", rep_out, "output file (default stdout)");
  rep->callback([&] {
    Grammar g = load_grammar(rep_grammar);
    write_output(rep_out, replicate_nonterminals(g, rep_m, rep_cap).to_text(), out);
  });
  auto* wrp = gen->add_subcommand("wrap", "Wildcard-wrap the grammar");
  std::string wrp_grammar, wrp_out;
  wrp->add_option("-g,--grammar", wrp_grammar, "grammar file")->required();
  wrp->add_option("-o,--output", wrp_out, "output file (default stdout)");
  wrp->callback([&] {
    Grammar g = load_grammar(wrp_grammar);
    write_output(wrp_out, wrap_wildcard(g).to_text(), out);
  });

  // weak-input ---------------------------------------------------------------
  auto* wk = app.add_subcommand("weak-input",
                                "Write the sentence prefix whose chart size is closest to "
                                "--target");
  std::string wk_grammar, wk_sentence, wk_sentence_file, wk_out;
  std::size_t wk_target = 0;
  wk->add_option("-g,--grammar", wk_grammar, "grammar file")->required();
  auto* wk_s = wk->add_option("-s,--sentence", wk_sentence, "inline sentence");
  wk->add_option("-S,--sentence-file", wk_sentence_file, "sentence file (first line)");
  wk->add_option("--target", wk_target, "target chart item count")->required();
  wk->add_option("-o,--output", wk_out, "output sentence file (default stdout)");
  wk->callback([&] {
    Grammar g = load_grammar(wk_grammar);
    Sentence w = tokenize(pick_sentence_text(wk_sentence, wk_sentence_file,
                                             wk_s->count() > 0, err),
                          g);
    WeakScalingPrefix p = find_weak_scaling_prefix(g, w, wk_target);
    std::size_t residual = p.chart_items > wk_target ? p.chart_items - wk_target
                                                     : wk_target - p.chart_items;
    err << "prefix_length=" << p.length << " chart_items=" << p.chart_items
        << " target=" << wk_target << " residual=" << residual << "\n";
    write_output(wk_out, w.prefix(p.length).to_text(g) + "\n", out);
  });

  std::vector<const char*> argv;
  argv.push_back("late");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      // --help or --version
      CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands()[0];
      if (dynamic_cast<const CLI::CallForVersion*>(&e) != nullptr) {
        out << version_line() << "\n";
      } else {
        out << sub->help();
      }
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const EngineRejection& e) {
    err << "engine rejection: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return exit_code;
}

}  // namespace late::cli
