#include "gredo/record_store.hpp"

#include "gredo/error.hpp"
#include "gredo/json_io.hpp"

namespace gredo {

RecordCursor::RecordCursor(const Collection& coll, std::optional<Predicate> pred, std::size_t buffer_capacity)
    : coll_(&coll), claim_(coll.mu_), pred_(std::move(pred)), buffer_(buffer_capacity) {
  coll.scans_.fetch_add(1, std::memory_order_relaxed);
}

void RecordCursor::refill() {
  buffer_.clear();
  std::uint64_t visited = 0;
  while (pos_ < coll_->rows_.size() && !buffer_.full()) {
    const auto& row = coll_->rows_[pos_++];
    if (!row) continue;
    ++visited;
    if (!pred_ || (*pred_)(*row)) buffer_.push(&*row);
  }
  coll_->scanned_.fetch_add(visited, std::memory_order_relaxed);
}

const Record* RecordCursor::next() {
  while (buffer_.exhausted()) {
    if (pos_ >= coll_->rows_.size()) return nullptr;
    refill();
  }
  return buffer_.pop();
}

Collection::Collection(Schema schema) : schema_(std::move(schema)) {}

RecordCursor Collection::scan(std::optional<Predicate> pred, std::size_t buffer_capacity) const {
  if (pred && pred->arity() != 1) throw ContractError("scan requires a unary predicate");
  return RecordCursor(*this, std::move(pred), buffer_capacity);
}

std::vector<const Record*> Collection::scan_all(const std::optional<Predicate>& pred) const {
  std::vector<const Record*> out;
  auto cursor = scan(pred);
  while (const Record* r = cursor.next()) out.push_back(r);
  return out;
}

const Record& Collection::fetch(Tid tid) const {
  std::shared_lock lock(mu_);
  fetches_.fetch_add(1, std::memory_order_relaxed);
  const Record* r = slot(tid);
  if (r == nullptr) {
    throw NotFoundError("tid " + std::to_string(tid) + " not found in '" + schema_.name + "'");
  }
  return *r;
}

bool Collection::is_live(Tid tid) const {
  std::shared_lock lock(mu_);
  return slot(tid) != nullptr;
}

namespace {

std::string values_json(const std::vector<Value>& values) {
  Json a = Json::array();
  for (const auto& v : values) a.push_back(to_json(v));
  return a.dump();
}

}  // namespace

std::vector<Tid> Collection::insert(std::vector<std::vector<Value>> rows) {
  std::vector<std::vector<Value>> conformed;
  conformed.reserve(rows.size());
  for (auto& r : rows) conformed.push_back(conform_to_schema(std::move(r), schema_));
  std::unique_lock lock(mu_);
  std::vector<Tid> tids;
  tids.reserve(conformed.size());
  for (auto& values : conformed) {
    Tid tid = rows_.size();
    if (log_) log_line(R"({"op":"i","tid":)" + std::to_string(tid) + R"(,"v":)" + values_json(values) + "}");
    rows_.push_back(Record{tid, std::move(values)});
    ++live_;
    tids.push_back(tid);
  }
  if (!tids.empty()) version_.fetch_add(1);
  if (log_) log_->flush();
  return tids;
}

void Collection::update(Tid tid, std::vector<Value> values) {
  auto conformed = conform_to_schema(std::move(values), schema_);
  std::unique_lock lock(mu_);
  if (slot(tid) == nullptr) throw NotFoundError("tid " + std::to_string(tid) + " not found in '" + schema_.name + "'");
  if (log_) {
    log_line(R"({"op":"u","tid":)" + std::to_string(tid) + R"(,"v":)" + values_json(conformed) + "}");
    log_->flush();
  }
  rows_[tid]->values = std::move(conformed);
  version_.fetch_add(1);
}

void Collection::erase(Tid tid) {
  std::unique_lock lock(mu_);
  if (slot(tid) == nullptr) throw NotFoundError("tid " + std::to_string(tid) + " not found in '" + schema_.name + "'");
  if (log_) {
    log_line(R"({"op":"d","tid":)" + std::to_string(tid) + "}");
    log_->flush();
  }
  rows_[tid].reset();
  --live_;
  version_.fetch_add(1);
}

std::size_t Collection::live_count() const {
  std::shared_lock lock(mu_);
  return live_;
}

Tid Collection::next_tid() const {
  std::shared_lock lock(mu_);
  return rows_.size();
}

AccessSnapshot Collection::counters() const {
  return {scans_.load(), scanned_.load(), fetches_.load()};
}

void Collection::reset_counters() {
  scans_ = 0;
  scanned_ = 0;
  fetches_ = 0;
}

void Collection::set_counters(const AccessSnapshot& s) const {
  scans_ = s.scans;
  scanned_ = s.scanned;
  fetches_ = s.tid_fetches;
}

void Collection::log_line(const std::string& line) { *log_ << line << '\n'; }

void Collection::attach_log(const std::filesystem::path& path) {
  log_ = std::make_unique<std::ofstream>(path, std::ios::app);
  if (!*log_) throw IoError("cannot open log " + path.string());
}

void Collection::replay_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return;
  std::unique_lock lock(mu_);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      Json j = Json::parse(line);
      std::string op = j.at("op").get<std::string>();
      Tid tid = j.at("tid").get<Tid>();
      if (op == "i") {
        std::vector<Value> values;
        for (const auto& v : j.at("v")) values.push_back(from_json(v));
        while (rows_.size() < tid) rows_.emplace_back();
        rows_.push_back(Record{tid, conform_to_schema(std::move(values), schema_)});
        ++live_;
      } else if (op == "u") {
        std::vector<Value> values;
        for (const auto& v : j.at("v")) values.push_back(from_json(v));
        if (tid < rows_.size() && rows_[tid]) rows_[tid]->values = conform_to_schema(std::move(values), schema_);
      } else if (op == "d") {
        if (tid < rows_.size() && rows_[tid]) {
          rows_[tid].reset();
          --live_;
        }
      }
    } catch (const nlohmann::json::exception& e) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": corrupt log entry");
    }
  }
  version_.fetch_add(1);
}

Collection& RecordStore::create(const Schema& schema) {
  auto [it, inserted] = collections_.emplace(schema.oid, std::make_unique<Collection>(schema));
  if (!inserted) throw SchemaError("collection oid " + std::to_string(schema.oid) + " already exists");
  return *it->second;
}

Collection& RecordStore::get(Oid oid) {
  auto it = collections_.find(oid);
  if (it == collections_.end()) throw SchemaError("unknown collection oid " + std::to_string(oid));
  return *it->second;
}

const Collection& RecordStore::get(Oid oid) const {
  auto it = collections_.find(oid);
  if (it == collections_.end()) throw SchemaError("unknown collection oid " + std::to_string(oid));
  return *it->second;
}

AccessSnapshot RecordStore::counters() const {
  AccessSnapshot s;
  for (const auto& [oid, c] : collections_) s += c->counters();
  return s;
}

void RecordStore::reset_counters() {
  for (auto& [oid, c] : collections_) c->reset_counters();
}

}  // namespace gredo
