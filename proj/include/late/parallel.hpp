#ifndef LATE_PARALLEL_HPP
#define LATE_PARALLEL_HPP

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <exception>
#include <memory>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

#include "late/late.hpp"

namespace late {

struct ParallelConfig {
  unsigned workers = 1;
  QueuePolicy policy = QueuePolicy::Fifo;
  std::uint64_t seed = 0;
};

/// Sharded hash set of packed 64-bit keys. insert() is linearizable
/// insert-and-report-membership: exactly one caller per key sees true.
class ConcurrentSet {
 public:
  explicit ConcurrentSet(std::size_t shards = 256);

  bool insert(std::uint64_t key);
  bool contains(std::uint64_t key) const;

  // Quiescent-only helpers.
  std::size_t size() const;
  template <typename F>
  void for_each(F&& f) const {
    for (std::size_t i = 0; i < shard_count_; ++i) {
      std::lock_guard lk(shards_[i].m);
      for (std::uint64_t v : shards_[i].set) f(v);
    }
  }
  void clear();

 private:
  struct Shard {
    mutable std::mutex m;
    std::unordered_set<std::uint64_t, U64Hash> set;
  };
  std::size_t index(std::uint64_t key) const { return U64Hash{}(key) & (shard_count_ - 1); }

  std::size_t shard_count_;
  std::unique_ptr<Shard[]> shards_;
};

/// Requests map with atomic register-and-was-it-first. Buckets keep
/// insertion order for traversal and a key set for set semantics.
class ConcurrentRequests {
 public:
  explicit ConcurrentRequests(std::size_t shards = 128);

  /// Adds item to the bucket unless already present. Returns true iff the
  /// bucket was empty immediately before, observed atomically with the
  /// insertion: exactly one caller per key ever sees true.
  bool add(std::uint64_t key, const LateItem& item);
  void snapshot(std::uint64_t key, std::vector<LateItem>& out) const;
  std::vector<LateItem> snapshot(std::uint64_t key) const;
  void clear();

 private:
  struct Bucket {
    std::vector<LateItem> items;
    std::unordered_set<std::uint64_t, U64Hash> seen;
  };
  struct Shard {
    mutable std::mutex m;
    std::unordered_map<std::uint64_t, Bucket, U64Hash> map;
  };
  std::size_t index(std::uint64_t key) const { return U64Hash{}(key) & (shard_count_ - 1); }

  std::size_t shard_count_;
  std::unique_ptr<Shard[]> shards_;
};

class ConcurrentReplies {
 public:
  explicit ConcurrentReplies(std::size_t shards = 128);

  void add(std::uint64_t key, std::uint32_t pos);
  void snapshot(std::uint64_t key, std::vector<std::uint32_t>& out) const;
  std::vector<std::uint32_t> snapshot(std::uint64_t key) const;
  void clear();

 private:
  struct Shard {
    mutable std::mutex m;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>, U64Hash> map;
  };
  std::size_t index(std::uint64_t key) const { return U64Hash{}(key) & (shard_count_ - 1); }

  std::size_t shard_count_;
  std::unique_ptr<Shard[]> shards_;
};

/// Thread-safe counterparts of ParseTables, keyed exactly the same way.
struct ConcurrentTables {
  ConcurrentRequests requests;
  ConcurrentReplies replies;
  ConcurrentSet completed;

  void clear() {
    requests.clear();
    replies.clear();
    completed.clear();
  }
};

/// Registers item under (n, k) in the requests map; true iff this call
/// made the bucket non-empty.
bool atomic_request_register(ConcurrentTables& t, SymbolId n, std::uint32_t k,
                             const LateItem& item);

/// Claims (s, i, k) in the completed set; true for exactly one claimant.
bool atomic_complete_claim(ConcurrentTables& t, SymbolId s, std::uint32_t i, std::uint32_t k);

/// Parallel LATE: workers pull items off one shared queue and update the
/// chart and tables atomically. The final item set is identical to the
/// serial engine's for every worker count and queue policy. A persistent
/// worker pool is kept across parses; the timed region of run() covers
/// seeding through quiescence.
///
/// Termination: a counter tracks items that are enqueued or mid-dispatch;
/// the parse is over when it reaches zero, which cannot happen while any
/// worker might still produce work.
class ParallelLateParser {
 public:
  ParallelLateParser(const Grammar& g, const ParallelConfig& cfg);
  ~ParallelLateParser();

  ParallelLateParser(const ParallelLateParser&) = delete;
  ParallelLateParser& operator=(const ParallelLateParser&) = delete;

  void prepare(const Sentence& w);
  void run();
  GlobalChart take_chart() const;

  GlobalChart parse(const Sentence& w);

  std::size_t dispatch_count() const { return dispatched_; }
  unsigned workers() const { return cfg_.workers; }

 private:
  // Work travels in batch vectors so a queue operation under the lock is
  // one move instead of per-item churn.
  static constexpr std::size_t kChunk = 256;

  void worker_loop();
  void dispatch(const LateItem& it, std::vector<LateItem>& children);
  void try_insert(const LateItem& it, std::vector<LateItem>& children);
  std::vector<LateItem> pop_batch();                            // m_ held
  void push_chunked(const std::vector<LateItem>& items);        // m_ held

  const Grammar& g_;
  ParallelConfig cfg_;
  const Sentence* w_ = nullptr;

  ConcurrentSet chart_;
  ConcurrentTables tables_;

  std::mutex m_;
  std::condition_variable cv_;
  std::deque<std::vector<LateItem>> queue_;
  std::size_t outstanding_ = 0;  // enqueued or mid-dispatch
  std::uint64_t round_ = 0;
  unsigned parked_ = 0;
  bool shutdown_ = false;
  std::exception_ptr error_;
  std::size_t dispatched_ = 0;
  std::mt19937_64 rng_;
  std::vector<std::thread> threads_;
};

GlobalChart late_parse_parallel(const Grammar& g, const Sentence& w, const ParallelConfig& cfg);

}  // namespace late

#endif  // LATE_PARALLEL_HPP
