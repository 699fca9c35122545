#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <vector>

#include "gredo/expr.hpp"
#include "gredo/schema.hpp"

namespace gredo {

/// Point-in-time copy of a collection's access counters.
struct AccessSnapshot {
  std::uint64_t scans = 0;
  std::uint64_t scanned = 0;      // live records visited by scans
  std::uint64_t tid_fetches = 0;  // tid-based fetches

  std::uint64_t record_reads() const noexcept { return scanned + tid_fetches; }
  AccessSnapshot& operator+=(const AccessSnapshot& o) {
    scans += o.scans;
    scanned += o.scanned;
    tid_fetches += o.tid_fetches;
    return *this;
  }
  AccessSnapshot operator-(const AccessSnapshot& o) const {
    return {scans - o.scans, scanned - o.scanned, tid_fetches - o.tid_fetches};
  }
};

inline constexpr std::size_t kDefaultRowBufferCapacity = 4096;

/// Bounded staging area between storage and operators; holds only records
/// that passed the access method's predicate.
class RowBuffer {
 public:
  explicit RowBuffer(std::size_t capacity = kDefaultRowBufferCapacity) : capacity_(capacity ? capacity : 1) {
    items_.reserve(capacity_);
  }

  std::size_t capacity() const noexcept { return capacity_; }
  bool full() const noexcept { return items_.size() >= capacity_; }
  bool exhausted() const noexcept { return pos_ >= items_.size(); }
  void push(const Record* r) { items_.push_back(r); }
  const Record* pop() { return items_[pos_++]; }
  void clear() {
    items_.clear();
    pos_ = 0;
  }

 private:
  std::size_t capacity_;
  std::vector<const Record*> items_;
  std::size_t pos_ = 0;
};

class Collection;

/// Scan-based record access method. Holds a read claim on the collection for
/// its lifetime and yields live records satisfying the predicate in tid order.
class RecordCursor {
 public:
  RecordCursor(const Collection& coll, std::optional<Predicate> pred, std::size_t buffer_capacity);

  /// nullptr once exhausted.
  const Record* next();

 private:
  void refill();

  const Collection* coll_;
  std::shared_lock<std::shared_mutex> claim_;
  std::optional<Predicate> pred_;
  RowBuffer buffer_;
  Tid pos_ = 0;
};

/// Tid-indexed record store for one collection. Deleted tids are tombstoned and
/// never reused, so fetch by tid stays O(1) and mapper entries stay valid.
class Collection {
 public:
  explicit Collection(Schema schema);
  Collection(const Collection&) = delete;
  Collection& operator=(const Collection&) = delete;

  const Schema& schema() const noexcept { return schema_; }

  RecordCursor scan(std::optional<Predicate> pred = std::nullopt,
                    std::size_t buffer_capacity = kDefaultRowBufferCapacity) const;
  /// Materializing convenience wrapper around scan().
  std::vector<const Record*> scan_all(const std::optional<Predicate>& pred = std::nullopt) const;

  /// Throws NotFoundError for unallocated or tombstoned tids.
  const Record& fetch(Tid tid) const;
  bool is_live(Tid tid) const;

  /// Tids are assigned monotonically. The whole batch is validated first.
  std::vector<Tid> insert(std::vector<std::vector<Value>> rows);
  void update(Tid tid, std::vector<Value> values);
  void erase(Tid tid);

  std::size_t live_count() const;
  Tid next_tid() const;
  /// Bumped by every mutation.
  std::uint64_t version() const noexcept { return version_.load(); }

  AccessSnapshot counters() const;
  void reset_counters();
  void set_counters(const AccessSnapshot& s) const;

  std::shared_lock<std::shared_mutex> read_claim() const { return std::shared_lock(mu_); }

  /// Appends every subsequent mutation to `path`.
  void attach_log(const std::filesystem::path& path);
  /// Rebuilds state from a log written by attach_log.
  void replay_log(const std::filesystem::path& path);

 private:
  friend class RecordCursor;

  const Record* slot(Tid tid) const {
    return tid < rows_.size() && rows_[tid] ? &*rows_[tid] : nullptr;
  }
  void log_line(const std::string& line);

  Schema schema_;
  std::deque<std::optional<Record>> rows_;
  std::size_t live_ = 0;
  std::atomic<std::uint64_t> version_{0};
  mutable std::shared_mutex mu_;
  mutable std::atomic<std::uint64_t> scans_{0};
  mutable std::atomic<std::uint64_t> scanned_{0};
  mutable std::atomic<std::uint64_t> fetches_{0};
  std::unique_ptr<std::ofstream> log_;
};

/// Restores a collection's access counters on scope exit, so maintenance work
/// (statistics, audits, topology rebuilds) is not charged to queries.
class UncountedScope {
 public:
  explicit UncountedScope(const Collection& c) : coll_(c), saved_(c.counters()) {}
  ~UncountedScope() { coll_.set_counters(saved_); }
  UncountedScope(const UncountedScope&) = delete;
  UncountedScope& operator=(const UncountedScope&) = delete;

 private:
  const Collection& coll_;
  AccessSnapshot saved_;
};

/// Owns every collection of a database, keyed by oid.
class RecordStore {
 public:
  Collection& create(const Schema& schema);
  Collection& get(Oid oid);
  const Collection& get(Oid oid) const;
  bool contains(Oid oid) const { return collections_.count(oid) != 0; }

  AccessSnapshot counters() const;
  void reset_counters();
  void set_counters(const AccessSnapshot& s) const;
  const std::map<Oid, std::unique_ptr<Collection>>& all() const noexcept { return collections_; }

 private:
  std::map<Oid, std::unique_ptr<Collection>> collections_;
};

}  // namespace gredo
