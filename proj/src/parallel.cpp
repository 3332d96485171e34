#include "late/parallel.hpp"

#include <algorithm>
#include <bit>

namespace late {

ConcurrentSet::ConcurrentSet(std::size_t shards)
    : shard_count_(std::bit_ceil(shards)), shards_(std::make_unique<Shard[]>(shard_count_)) {}

bool ConcurrentSet::insert(std::uint64_t key) {
  Shard& s = shards_[index(key)];
  std::lock_guard lk(s.m);
  return s.set.insert(key).second;
}

bool ConcurrentSet::contains(std::uint64_t key) const {
  const Shard& s = shards_[index(key)];
  std::lock_guard lk(s.m);
  return s.set.contains(key);
}

std::size_t ConcurrentSet::size() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < shard_count_; ++i) {
    std::lock_guard lk(shards_[i].m);
    n += shards_[i].set.size();
  }
  return n;
}

void ConcurrentSet::clear() {
  for (std::size_t i = 0; i < shard_count_; ++i) {
    std::lock_guard lk(shards_[i].m);
    shards_[i].set.clear();
  }
}

ConcurrentRequests::ConcurrentRequests(std::size_t shards)
    : shard_count_(std::bit_ceil(shards)), shards_(std::make_unique<Shard[]>(shard_count_)) {}

bool ConcurrentRequests::add(std::uint64_t key, const LateItem& item) {
  Shard& s = shards_[index(key)];
  std::lock_guard lk(s.m);
  Bucket& b = s.map[key];
  bool was_empty = b.items.empty();
  if (b.seen.insert(pack(item)).second) b.items.push_back(item);
  return was_empty;
}

void ConcurrentRequests::snapshot(std::uint64_t key, std::vector<LateItem>& out) const {
  out.clear();
  const Shard& s = shards_[index(key)];
  std::lock_guard lk(s.m);
  if (auto it = s.map.find(key); it != s.map.end()) {
    out.assign(it->second.items.begin(), it->second.items.end());
  }
}

std::vector<LateItem> ConcurrentRequests::snapshot(std::uint64_t key) const {
  std::vector<LateItem> out;
  snapshot(key, out);
  return out;
}

void ConcurrentRequests::clear() {
  for (std::size_t i = 0; i < shard_count_; ++i) {
    std::lock_guard lk(shards_[i].m);
    shards_[i].map.clear();
  }
}

ConcurrentReplies::ConcurrentReplies(std::size_t shards)
    : shard_count_(std::bit_ceil(shards)), shards_(std::make_unique<Shard[]>(shard_count_)) {}

void ConcurrentReplies::add(std::uint64_t key, std::uint32_t pos) {
  Shard& s = shards_[index(key)];
  std::lock_guard lk(s.m);
  s.map[key].push_back(pos);
}

void ConcurrentReplies::snapshot(std::uint64_t key, std::vector<std::uint32_t>& out) const {
  out.clear();
  const Shard& s = shards_[index(key)];
  std::lock_guard lk(s.m);
  if (auto it = s.map.find(key); it != s.map.end()) {
    out.assign(it->second.begin(), it->second.end());
  }
}

std::vector<std::uint32_t> ConcurrentReplies::snapshot(std::uint64_t key) const {
  std::vector<std::uint32_t> out;
  snapshot(key, out);
  return out;
}

void ConcurrentReplies::clear() {
  for (std::size_t i = 0; i < shard_count_; ++i) {
    std::lock_guard lk(shards_[i].m);
    shards_[i].map.clear();
  }
}

bool atomic_request_register(ConcurrentTables& t, SymbolId n, std::uint32_t k,
                             const LateItem& item) {
  return t.requests.add(ParseTables::key(n, k), item);
}

bool atomic_complete_claim(ConcurrentTables& t, SymbolId s, std::uint32_t i, std::uint32_t k) {
  return t.completed.insert(ParseTables::triple(s, i, k));
}

ParallelLateParser::ParallelLateParser(const Grammar& g, const ParallelConfig& cfg)
    : g_(g), cfg_(cfg) {
  cfg_.workers = std::max(1u, cfg_.workers);
  rng_.seed(cfg_.seed);
  threads_.reserve(cfg_.workers);
  for (unsigned i = 0; i < cfg_.workers; ++i) {
    threads_.emplace_back([this] { worker_loop(); });
  }
}

ParallelLateParser::~ParallelLateParser() {
  {
    std::lock_guard lk(m_);
    shutdown_ = true;
  }
  cv_.notify_all();
  for (std::thread& t : threads_) t.join();
}

void ParallelLateParser::prepare(const Sentence& w) {
  if (w.size() > kMaxSentenceLen) throw EngineRejection("sentence too long");
  std::unique_lock lk(m_);
  cv_.wait(lk, [&] { return parked_ == threads_.size(); });
  w_ = &w;
  chart_.clear();
  tables_.clear();
  queue_.clear();
  outstanding_ = 0;
  dispatched_ = 0;
  error_ = nullptr;
  rng_.seed(cfg_.seed);
}

void ParallelLateParser::run() {
  std::unique_lock lk(m_);
  std::vector<LateItem> seeds;
  for (std::uint32_t r : g_.rules_for(g_.start())) {
    LateItem seed{r, 0, 0, 0};
    if (chart_.insert(pack(seed))) seeds.push_back(seed);
  }
  push_chunked(seeds);
  ++round_;
  cv_.notify_all();
  cv_.wait(lk, [&] { return outstanding_ == 0 && queue_.empty(); });
  if (error_) {
    std::exception_ptr e = error_;
    error_ = nullptr;
    std::rethrow_exception(e);
  }
}

GlobalChart ParallelLateParser::take_chart() const {
  std::vector<LateItem> items;
  items.reserve(chart_.size());
  chart_.for_each([&](std::uint64_t key) { items.push_back(unpack_late(key)); });
  return GlobalChart(std::move(items));
}

GlobalChart ParallelLateParser::parse(const Sentence& w) {
  prepare(w);
  run();
  return take_chart();
}

std::vector<LateItem> ParallelLateParser::pop_batch() {
  std::vector<LateItem> out;
  switch (cfg_.policy) {
    case QueuePolicy::Fifo:
      out = std::move(queue_.front());
      queue_.pop_front();
      break;
    case QueuePolicy::Lifo:
      out = std::move(queue_.back());
      queue_.pop_back();
      break;
    case QueuePolicy::Random: {
      std::size_t idx = rng_() % queue_.size();
      std::swap(queue_[idx], queue_.back());
      out = std::move(queue_.back());
      queue_.pop_back();
      break;
    }
  }
  return out;
}

void ParallelLateParser::push_chunked(const std::vector<LateItem>& items) {
  for (std::size_t at = 0; at < items.size(); at += kChunk) {
    std::size_t len = std::min(kChunk, items.size() - at);
    queue_.emplace_back(items.begin() + at, items.begin() + at + len);
  }
  outstanding_ += items.size();
}

void ParallelLateParser::worker_loop() {
  std::uint64_t my_round = 0;
  std::vector<LateItem> batch;
  std::vector<LateItem> children;
  std::unique_lock lk(m_);
  ++parked_;
  cv_.notify_all();
  for (;;) {
    cv_.wait(lk, [&] { return shutdown_ || round_ != my_round; });
    if (shutdown_) return;
    my_round = round_;
    --parked_;
    for (;;) {
      cv_.wait(lk, [&] { return shutdown_ || !queue_.empty() || outstanding_ == 0; });
      if (shutdown_) return;
      if (queue_.empty()) break;  // outstanding_ == 0: round is quiescent
      batch = pop_batch();
      lk.unlock();
      children.clear();
      std::exception_ptr err;
      try {
        for (const LateItem& it : batch) dispatch(it, children);
      } catch (...) {
        err = std::current_exception();
      }
      lk.lock();
      if (err && !error_) error_ = err;
      bool was_empty = queue_.empty();
      if (!error_) {
        push_chunked(children);
        dispatched_ += batch.size();
      } else {
        // Abort the round: drop produced children and drain the queue.
        for (const std::vector<LateItem>& b : queue_) outstanding_ -= b.size();
        queue_.clear();
      }
      outstanding_ -= batch.size();
      // Sleepers exist only when the queue was empty; waking on every
      // merge stalls the fast path.
      if (outstanding_ == 0 || (was_empty && !queue_.empty())) cv_.notify_all();
    }
    ++parked_;
    cv_.notify_all();
  }
}

void ParallelLateParser::try_insert(const LateItem& it, std::vector<LateItem>& children) {
  // Insert-and-report-membership is atomic, so every discovered item is
  // enqueued exactly once even under races.
  if (chart_.insert(pack(it))) children.push_back(it);
}

void ParallelLateParser::dispatch(const LateItem& it, std::vector<LateItem>& children) {
  thread_local std::vector<LateItem> reqs_scratch;
  thread_local std::vector<std::uint32_t> replies_scratch;
  const Rule& r = g_.rules()[it.rule];
  if (it.dot == r.rhs.size()) {
    SymbolId produced = r.lhs;
    if (atomic_complete_claim(tables_, produced, it.origin, it.current)) {
      std::uint64_t key = ParseTables::key(produced, it.origin);
      // The reply must land before the requests are traversed; a requester
      // missing from the snapshot then sees it when it reads the replies.
      tables_.replies.add(key, it.current);
      tables_.requests.snapshot(key, reqs_scratch);
      for (const LateItem& req : reqs_scratch) {
        try_insert({req.rule, req.dot + 1, req.origin, it.current}, children);
      }
    }
    return;
  }
  SymbolId next = r.rhs[it.dot];
  if (g_.is_nonterminal(next)) {
    // The mirror image: register the request before reading the replies.
    bool first = atomic_request_register(tables_, next, it.current, it);
    if (first) {
      for (std::uint32_t ri : g_.rules_for(next)) {
        try_insert({ri, 0, it.current, it.current}, children);
      }
    }
    tables_.replies.snapshot(ParseTables::key(next, it.current), replies_scratch);
    for (std::uint32_t j : replies_scratch) {
      try_insert({it.rule, it.dot + 1, it.origin, j}, children);
    }
  } else if (next == kEpsilon) {
    try_insert({it.rule, it.dot + 1, it.origin, it.current}, children);
  } else if (it.current < w_->size() && w_->tokens[it.current] == next) {
    try_insert({it.rule, it.dot + 1, it.origin, it.current + 1}, children);
  }
}

GlobalChart late_parse_parallel(const Grammar& g, const Sentence& w, const ParallelConfig& cfg) {
  ParallelLateParser p(g, cfg);
  return p.parse(w);
}

}  // namespace late
