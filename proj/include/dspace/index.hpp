#pragma once

// The synchronized index: one ascending (c, value) column per canonical
// dimension URL, a record table keyed by c, value-sorted side indexes, text
// postings and an intern table for text payloads. Columns are joined by a
// galloping leapfrog merge that only touches the columns it is given.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dspace/dv.hpp"
#include "dspace/error.hpp"
#include "dspace/expr.hpp"
#include "dspace/registry.hpp"
#include "dspace/schema.hpp"
#include "dspace/text.hpp"

namespace dspace {

struct ColumnRecord {
  std::uint64_t c = 0;
  double value = 0.0;
  friend bool operator==(const ColumnRecord&, const ColumnRecord&) = default;
};
static_assert(sizeof(ColumnRecord) == 16);

/// Reserved per-space system columns: DV owner, DV-level date, and the word
/// postings of DV keycomments.
inline constexpr std::string_view kOwnerPath = "@owner";
inline constexpr std::string_view kDatePath = "@date";
inline constexpr std::string_view kKeycommentPath = "@keycomment";

struct Column {
  std::string url;
  LeafKind kind = LeafKind::float_max;
  std::vector<ColumnRecord> records;   // ascending c
  std::vector<ColumnRecord> by_value;  // ascending (value, c); empty when not built
  bool sorted_index = false;
};

struct RecordEntry {
  std::uint64_t c = 0;
  std::optional<std::string> vl;
  std::optional<std::string> resource;
  std::vector<std::string> dsis;
  std::optional<std::string> keycomment;
  std::optional<std::int64_t> owner;
  std::optional<bool> offered;
  std::optional<bool> wanted;
  std::uint64_t group = 0;  // position of the DV group in store order
  friend bool operator==(const RecordEntry&, const RecordEntry&) = default;
};

struct BuildReport {
  std::uint64_t groups = 0;
  std::uint64_t accepted = 0;
  std::uint64_t rejected = 0;
  std::uint64_t records = 0;
  std::vector<std::string> errors;  // first few rejection messages
};

struct IndexOptions {
  bool sorted_index = true;  // value-sorted side index on numeric columns
  bool postings = true;      // word postings on text columns
  int depth_limit = kDefaultDepthLimit;
  std::size_t max_reported_errors = 100;
};

class IndexBuilder;

/// Immutable search structure. Per-column read counters are the only
/// mutable state; they are instrumentation, updated with relaxed atomics.
class IndexSnapshot {
 public:
  IndexSnapshot() = default;
  IndexSnapshot(const IndexSnapshot&) = delete;
  IndexSnapshot& operator=(const IndexSnapshot&) = delete;
  IndexSnapshot(IndexSnapshot&&) = default;
  IndexSnapshot& operator=(IndexSnapshot&&) = default;

  [[nodiscard]] std::span<const Column> columns() const noexcept { return columns_; }

  [[nodiscard]] std::optional<std::size_t> column_index(std::string_view url) const {
    auto it = column_ids_.find(std::string(url));
    if (it == column_ids_.end()) return std::nullopt;
    return it->second;
  }

  [[nodiscard]] const Column* column(std::string_view url) const {
    auto i = column_index(url);
    return i ? &columns_[*i] : nullptr;
  }

  [[nodiscard]] std::span<const RecordEntry> records() const noexcept { return records_; }

  [[nodiscard]] const RecordEntry* record(std::uint64_t c) const {
    auto it = std::lower_bound(records_.begin(), records_.end(), c,
                               [](const RecordEntry& r, std::uint64_t v) { return r.c < v; });
    return it != records_.end() && it->c == c ? &*it : nullptr;
  }

  /// Ascending c list of a word in a text column; empty when absent.
  [[nodiscard]] std::span<const std::uint64_t> postings(std::string_view column, std::string_view word) const {
    auto it = postings_.find(std::string(column));
    if (it == postings_.end()) return {};
    auto w = it->second.find(std::string(word));
    if (w == it->second.end()) return {};
    return w->second;
  }

  [[nodiscard]] bool has_postings(std::string_view column) const { return postings_.contains(std::string(column)); }

  [[nodiscard]] std::optional<std::uint64_t> intern_id(std::string_view s) const {
    auto it = intern_ids_.find(std::string(s));
    if (it == intern_ids_.end()) return std::nullopt;
    return it->second;
  }

  [[nodiscard]] const std::string& interned(std::uint64_t id) const {
    if (id >= interns_.size()) fail(Errc::not_found, "no interned text with id " + std::to_string(id));
    return interns_[id];
  }

  [[nodiscard]] std::size_t intern_count() const noexcept { return interns_.size(); }

  [[nodiscard]] const FlatSchema* schema(std::string_view dsi) const {
    auto it = schemas_.find(std::string(dsi));
    return it == schemas_.end() ? nullptr : &it->second;
  }

  [[nodiscard]] const std::map<std::string, FlatSchema>& schemas() const noexcept { return schemas_; }
  [[nodiscard]] const std::vector<DomainSpaceDef>& definitions() const noexcept { return definitions_; }
  [[nodiscard]] const SameAsMapping& same_as() const noexcept { return same_as_; }
  [[nodiscard]] const BuildReport& report() const noexcept { return report_; }
  [[nodiscard]] const IndexOptions& options() const noexcept { return options_; }

  /// Records carrying a DV of `dsi`.
  [[nodiscard]] std::uint64_t resource_count(std::string_view dsi) const {
    auto it = dsi_counts_.find(std::string(dsi));
    return it == dsi_counts_.end() ? 0 : it->second;
  }

  [[nodiscard]] std::uint64_t reads(std::size_t column) const {
    return reads_ ? reads_[column].load(std::memory_order_relaxed) : 0;
  }
  void add_reads(std::size_t column, std::uint64_t n) const {
    if (reads_ && n) reads_[column].fetch_add(n, std::memory_order_relaxed);
  }
  void reset_reads() const {
    for (std::size_t i = 0; i < columns_.size(); ++i) reads_[i].store(0, std::memory_order_relaxed);
  }
  [[nodiscard]] std::size_t columns_read() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < columns_.size(); ++i) n += reads(i) > 0 ? 1 : 0;
    return n;
  }

 private:
  friend class IndexBuilder;
  friend IndexSnapshot read_snapshot(std::istream&);
  friend void write_snapshot(const IndexSnapshot&, std::ostream&);

  void finalize() {
    column_ids_.clear();
    for (std::size_t i = 0; i < columns_.size(); ++i) column_ids_.emplace(columns_[i].url, i);
    intern_ids_.clear();
    for (std::size_t i = 0; i < interns_.size(); ++i) intern_ids_.emplace(interns_[i], i);
    dsi_counts_.clear();
    for (const auto& r : records_) {
      for (const auto& d : r.dsis) ++dsi_counts_[d];
    }
    reads_ = std::make_unique<std::atomic<std::uint64_t>[]>(columns_.size());
  }

  std::vector<Column> columns_;  // ordered by URL
  std::unordered_map<std::string, std::size_t> column_ids_;
  std::vector<RecordEntry> records_;
  std::map<std::string, std::map<std::string, std::vector<std::uint64_t>>> postings_;
  std::vector<std::string> interns_;
  std::unordered_map<std::string, std::uint64_t> intern_ids_;
  std::map<std::string, FlatSchema> schemas_;
  std::vector<DomainSpaceDef> definitions_;
  SameAsMapping same_as_;
  BuildReport report_;
  IndexOptions options_;
  std::map<std::string, std::uint64_t> dsi_counts_;
  std::unique_ptr<std::atomic<std::uint64_t>[]> reads_;
};

// ---------------------------------------------------------------------------
// building

/// Appends DV groups one record counter value at a time. A group's column
/// records become visible only on commit; an aborted group consumes no c.
class IndexBuilder {
 public:
  explicit IndexBuilder(IndexOptions options = {}) { snap_.options_ = options; }

  std::size_t column_id(const std::string& url, LeafKind kind) {
    auto it = ids_.find(url);
    if (it != ids_.end()) return it->second;
    const auto id = cols_.size();
    cols_.push_back(Column{url, kind, {}, {}, false});
    ids_.emplace(url, id);
    return id;
  }

  std::uint64_t begin(RecordEntry meta = {}) {
    pending_meta_ = std::move(meta);
    pending_meta_.c = next_c_;
    pending_.clear();
    pending_words_.clear();
    in_group_ = true;
    return next_c_;
  }

  [[nodiscard]] std::uint64_t next_c() const noexcept { return next_c_; }

  /// Adds one value for the open group; a second value for the same column
  /// is ignored.
  void add(std::size_t column, double value) {
    if (!in_group_) fail(Errc::invalid_argument, "add outside of a group");
    if (!std::isfinite(value)) fail(Errc::invalid_argument, "non-finite value for " + cols_[column].url);
    for (const auto& p : pending_) {
      if (p.first == column) return;
    }
    pending_.emplace_back(column, value);
  }

  /// Interns a text value as the column value and indexes its words.
  void add_text(std::size_t column, std::string_view value) {
    const auto before = pending_.size();
    add(column, static_cast<double>(intern(value)));
    if (pending_.size() != before && snap_.options_.postings) add_words(cols_[column].url, value);
  }

  void add_words(const std::string& column, std::string_view value) {
    for (auto& w : text::tokenize(value)) pending_words_.emplace_back(column, std::move(w));
  }

  std::uint64_t intern(std::string_view s) {
    auto it = intern_ids_.find(std::string(s));
    if (it != intern_ids_.end()) return it->second;
    const auto id = snap_.interns_.size();
    snap_.interns_.emplace_back(s);
    intern_ids_.emplace(std::string(s), id);
    return id;
  }

  std::uint64_t commit() {
    if (!in_group_) fail(Errc::invalid_argument, "commit outside of a group");
    const auto c = next_c_++;
    for (const auto& [col, v] : pending_) cols_[col].records.push_back(ColumnRecord{c, v});
    for (auto& [col, word] : pending_words_) {
      auto& list = snap_.postings_[col][word];
      if (list.empty() || list.back() != c) list.push_back(c);
    }
    snap_.records_.push_back(std::move(pending_meta_));
    snap_.report_.records += pending_.size();
    ++snap_.report_.accepted;
    in_group_ = false;
    return c;
  }

  void abort(const std::string& reason) {
    in_group_ = false;
    ++snap_.report_.rejected;
    if (snap_.report_.errors.size() < snap_.options_.max_reported_errors) snap_.report_.errors.push_back(reason);
  }

  void set_schemas(std::map<std::string, FlatSchema> schemas, std::vector<DomainSpaceDef> defs, SameAsMapping m) {
    snap_.schemas_ = std::move(schemas);
    snap_.definitions_ = std::move(defs);
    snap_.same_as_ = std::move(m);
  }

  IndexSnapshot finish() {
    if (in_group_) fail(Errc::invalid_argument, "finish with an open group");
    std::vector<std::size_t> order(cols_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return cols_[a].url < cols_[b].url; });
    for (auto i : order) {
      auto& col = cols_[i];
      if (snap_.options_.sorted_index && comparison_for(col.kind) == Comparison::numeric) {
        col.by_value = col.records;
        std::sort(col.by_value.begin(), col.by_value.end(), [](const ColumnRecord& a, const ColumnRecord& b) {
          return a.value < b.value || (a.value == b.value && a.c < b.c);
        });
        col.sorted_index = true;
      }
      snap_.columns_.push_back(std::move(col));
    }
    snap_.report_.groups = snap_.report_.accepted + snap_.report_.rejected;
    snap_.finalize();
    return std::move(snap_);
  }

 private:
  IndexSnapshot snap_;
  std::vector<Column> cols_;
  std::unordered_map<std::string, std::size_t> ids_;
  std::unordered_map<std::string, std::uint64_t> intern_ids_;
  std::uint64_t next_c_ = 0;
  bool in_group_ = false;
  RecordEntry pending_meta_;
  std::vector<std::pair<std::size_t, double>> pending_;
  std::vector<std::pair<std::string, std::string>> pending_words_;
};

inline std::string system_column(std::string_view dsi, std::string_view path) { return dimension_url(dsi, path); }

namespace detail {

inline std::string keycomment_summary(const Keycomment& kc) {
  std::string out;
  for (const auto& k : kc.keywords) {
    if (!out.empty()) out += ' ';
    out += k.text;
  }
  if (!kc.comment.empty()) {
    if (!out.empty()) out += ' ';
    out += kc.comment;
  }
  return out;
}

inline std::string keycomment_words(const Keycomment& kc) { return keycomment_summary(kc); }

inline void check_leaf_range(const FlatLeaf& leaf, double v) {
  const auto& l = leaf.content;
  if ((l.min && v < *l.min) || (l.max && v > *l.max)) {
    fail(Errc::out_of_range, leaf.path + " value " + text::format_double(v) + " outside its declared range");
  }
}

// Sibling DIs of a computed leaf live under the same parent path.
inline std::optional<double> computed_value(const FlatLeaf& leaf, const DomainVector& dv) {
  const auto slash = leaf.path.rfind('/');
  const std::string parent = slash == std::string::npos ? "" : leaf.path.substr(0, slash + 1);
  const auto expr = Expression::parse(*leaf.computed);
  return expr.evaluate([&](const std::string& id) -> std::optional<double> {
    const auto* inst = dv.find(parent + id);
    if (!inst) return std::nullopt;
    if (const auto* v = std::get_if<double>(&inst->value)) return *v;
    return std::nullopt;
  });
}

}  // namespace detail

/// Flattens every definition in the registry; spaces that fail to flatten
/// are left out (their DVs are rejected at build).
inline std::map<std::string, FlatSchema> flatten_all(const Registry& registry, int depth_limit,
                                                     std::vector<std::string>* errors = nullptr) {
  std::map<std::string, FlatSchema> out;
  for (const auto& def : registry.all()) {
    try {
      out.emplace(def->dsi, flatten(*def, registry, depth_limit));
    } catch (const Error& e) {
      if (errors) errors->push_back(def->dsi + ": " + e.what());
    }
  }
  return out;
}

/// One pass over the DV groups in store order; each accepted group gets the
/// next c. Values are routed through the sameAs affine into their canonical
/// column; text is interned and tokenized into postings. Groups with an
/// unknown DSI or out-of-range values are rejected and reported.
inline IndexSnapshot build_index(std::span<const DVGroup> groups, const Registry& registry, IndexOptions options = {}) {
  IndexBuilder b(options);
  const auto mapping = resolve_same_as(registry);
  std::vector<std::string> flatten_errors;
  auto schemas = flatten_all(registry, options.depth_limit, &flatten_errors);
  std::vector<DomainSpaceDef> defs;
  for (const auto& d : registry.all()) defs.push_back(*d);

  struct Pending {
    std::size_t column;
    double value;
    std::optional<std::string> text;
  };
  std::vector<Pending> pending;

  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& group = groups[g];
    pending.clear();
    RecordEntry meta;
    meta.group = g;
    std::set<std::string> dsis;
    try {
      if (group.members.empty()) fail(Errc::invalid_argument, "empty DV group");
      for (const auto& dv : group.members) {
        auto it = schemas.find(dv.dsi);
        if (it == schemas.end()) fail(Errc::unknown_dsi, "unknown DSI '" + dv.dsi + "'");
        const auto& schema = it->second;
        dsis.insert(dv.dsi);
        if (!meta.vl && dv.vl) meta.vl = dv.vl;
        if (!meta.keycomment && dv.keycomment) meta.keycomment = detail::keycomment_summary(*dv.keycomment);
        if (!meta.owner && dv.owner) meta.owner = dv.owner;
        if (!meta.offered && dv.offered) meta.offered = dv.offered;
        if (!meta.wanted && dv.wanted) meta.wanted = dv.wanted;

        for (const auto& inst : dv.dims) {
          if (std::holds_alternative<DvRef>(inst.value)) continue;
          const auto li = schema.index_of(inst.path);
          if (!li) fail(Errc::unknown_dimension, "no dimension '" + inst.path + "' in " + dv.dsi);
          const auto& leaf = schema.leaves[*li];
          const auto route = mapping.route(leaf.column);
          if (const auto* s = std::get_if<std::string>(&inst.value)) {
            if (leaf.content.kind != LeafKind::text) fail(Errc::kind_mismatch, inst.path + " expects a scalar");
            pending.push_back(Pending{b.column_id(route.column, LeafKind::text), 0.0, *s});
          } else {
            const double v = std::get<double>(inst.value);
            if (leaf.content.kind == LeafKind::text) fail(Errc::kind_mismatch, inst.path + " expects text");
            detail::check_leaf_range(leaf, v);
            pending.push_back(Pending{b.column_id(route.column, leaf.content.kind), route.to_canonical(v), {}});
          }
        }
        for (const auto& leaf : schema.leaves) {
          if (!leaf.computed) continue;
          if (auto v = detail::computed_value(leaf, dv)) {
            const auto route = mapping.route(leaf.column);
            pending.push_back(Pending{b.column_id(route.column, LeafKind::float_max), route.to_canonical(*v), {}});
          }
        }
        if (dv.owner) {
          pending.push_back(Pending{b.column_id(system_column(dv.dsi, kOwnerPath), LeafKind::integer),
                                    static_cast<double>(*dv.owner), {}});
        }
        if (dv.date) {
          pending.push_back(Pending{b.column_id(system_column(dv.dsi, kDatePath), LeafKind::date), *dv.date, {}});
        }
      }
    } catch (const Error& e) {
      b.abort("group " + std::to_string(g) + ": " + e.what());
      continue;
    }
    meta.resource = group.resource();
    meta.dsis.assign(dsis.begin(), dsis.end());
    b.begin(std::move(meta));
    for (const auto& p : pending) {
      if (p.text) b.add_text(p.column, *p.text);
      else b.add(p.column, p.value);
    }
    if (options.postings) {
      for (const auto& dv : group.members) {
        if (dv.keycomment) b.add_words(system_column(dv.dsi, kKeycommentPath), detail::keycomment_words(*dv.keycomment));
      }
    }
    b.commit();
  }
  b.set_schemas(std::move(schemas), std::move(defs), mapping);
  auto snap = b.finish();
  return snap;
}

// ---------------------------------------------------------------------------
// scanning

/// Forward cursor over one column with galloping advancement. Reads are
/// tallied locally and flushed into the snapshot counter on destruction.
class ColumnCursor {
 public:
  ColumnCursor(const IndexSnapshot& snap, std::size_t column)
      : snap_(&snap), column_(column), data_(snap.columns()[column].records) {}
  ColumnCursor(const ColumnCursor&) = delete;
  ColumnCursor& operator=(const ColumnCursor&) = delete;
  ColumnCursor(ColumnCursor&& o) noexcept
      : snap_(o.snap_), column_(o.column_), data_(o.data_), pos_(o.pos_), reads_(std::exchange(o.reads_, 0)) {}
  ~ColumnCursor() { flush(); }

  /// Position of the first record with c >= target, or size() if none.
  std::size_t seek(std::uint64_t target) {
    const std::size_t n = data_.size();
    if (pos_ >= n) return pos_;
    ++reads_;
    if (data_[pos_].c >= target) return pos_;
    std::size_t lo = pos_, step = 1, hi = pos_ + 1;
    while (hi < n) {
      ++reads_;
      if (data_[hi].c >= target) break;
      lo = hi;
      step *= 2;
      hi = pos_ + step;
    }
    hi = std::min(hi, n);
    // data_[lo].c < target; data_[hi].c >= target or hi == n
    while (hi - lo > 1) {
      const auto mid = lo + (hi - lo) / 2;
      ++reads_;
      if (data_[mid].c < target) lo = mid;
      else hi = mid;
    }
    pos_ = hi;
    return pos_;
  }

  /// Value at c if the column defines it (monotone c only).
  std::optional<double> probe(std::uint64_t c) {
    const auto p = seek(c);
    if (p < data_.size() && data_[p].c == c) return data_[p].value;
    return std::nullopt;
  }

  [[nodiscard]] const ColumnRecord& at(std::size_t p) const { return data_[p]; }
  [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
  [[nodiscard]] std::size_t column() const noexcept { return column_; }

  void flush() {
    if (snap_) snap_->add_reads(column_, std::exchange(reads_, 0));
  }

 private:
  const IndexSnapshot* snap_;
  std::size_t column_;
  std::span<const ColumnRecord> data_;
  std::size_t pos_ = 0;
  std::uint64_t reads_ = 0;
};

/// A searched column with optional inclusive bounds in canonical units.
struct ScanTerm {
  std::string column;
  std::optional<double> min;
  std::optional<double> max;
};

namespace detail {

struct ListCursor {
  std::span<const std::uint64_t> data;
  std::size_t pos = 0;

  std::size_t seek(std::uint64_t target) {
    if (pos >= data.size() || data[pos] >= target) return pos;
    std::size_t lo = pos, step = 1, hi = pos + 1;
    while (hi < data.size() && data[hi] < target) {
      lo = hi;
      step *= 2;
      hi = pos + step;
    }
    hi = std::min(hi, data.size());
    pos = static_cast<std::size_t>(std::lower_bound(data.begin() + static_cast<std::ptrdiff_t>(lo) + 1,
                                                    data.begin() + static_cast<std::ptrdiff_t>(hi), target) -
                                   data.begin());
    return pos;
  }
};

}  // namespace detail

/// Leapfrog join over the given columns and ascending c lists. Calls
/// `emit(c, values)` for every c present in all columns (within bounds) and
/// in all lists, in strictly increasing c; `values[i]` belongs to terms[i].
/// Columns not named in `terms` are never touched.
template <class Emit>
void scan(const IndexSnapshot& snap, std::span<const ScanTerm> terms, std::span<const std::span<const std::uint64_t>> lists,
          Emit&& emit) {
  if (terms.empty() && lists.empty()) fail(Errc::invalid_argument, "scan needs at least one column or list");
  std::vector<ColumnCursor> cols;
  cols.reserve(terms.size());
  for (const auto& t : terms) {
    auto id = snap.column_index(t.column);
    if (!id) fail(Errc::unknown_column, "unknown column '" + t.column + "'");
    cols.emplace_back(snap, *id);
  }
  std::vector<detail::ListCursor> ls;
  for (auto l : lists) ls.push_back(detail::ListCursor{l, 0});

  const std::size_t m = cols.size() + ls.size();
  std::vector<double> values(cols.size());
  std::uint64_t target = 0;
  std::size_t agreed = 0;
  std::size_t i = 0;
  for (;;) {
    std::uint64_t found = 0;
    if (i < cols.size()) {
      auto& cur = cols[i];
      const auto p = cur.seek(target);
      if (p >= cur.size()) return;
      const auto& rec = cur.at(p);
      const auto& t = terms[i];
      if ((t.min && rec.value < *t.min) || (t.max && rec.value > *t.max)) {
        target = rec.c + 1;
        agreed = 0;
        i = (i + 1) % m;
        continue;
      }
      found = rec.c;
      values[i] = rec.value;
    } else {
      auto& cur = ls[i - cols.size()];
      const auto p = cur.seek(target);
      if (p >= cur.data.size()) return;
      found = cur.data[p];
    }
    if (found > target) {
      target = found;
      agreed = 1;
    } else {
      ++agreed;
    }
    if (agreed == m) {
      emit(target, std::span<const double>(values));
      target += 1;
      agreed = 0;
    }
    i = (i + 1) % m;
  }
}

/// Collected form of `scan`, for tests and small queries.
inline std::vector<std::pair<std::uint64_t, std::vector<double>>> scan_all(
    const IndexSnapshot& snap, std::span<const ScanTerm> terms,
    std::span<const std::span<const std::uint64_t>> lists = {}) {
  std::vector<std::pair<std::uint64_t, std::vector<double>>> out;
  scan(snap, terms, lists, [&](std::uint64_t c, std::span<const double> v) {
    out.emplace_back(c, std::vector<double>(v.begin(), v.end()));
  });
  return out;
}

namespace detail {

inline const Column& sorted_column(const IndexSnapshot& snap, std::string_view url, std::size_t& id) {
  auto i = snap.column_index(url);
  if (!i) fail(Errc::unknown_column, "unknown column '" + std::string(url) + "'");
  const auto& col = snap.columns()[*i];
  if (!col.sorted_index) fail(Errc::no_side_index, "column '" + std::string(url) + "' has no sorted-value index");
  id = *i;
  return col;
}

inline std::pair<std::size_t, std::size_t> value_range(const Column& col, std::optional<double> min,
                                                       std::optional<double> max) {
  const auto& v = col.by_value;
  auto lo = min ? std::lower_bound(v.begin(), v.end(), *min, [](const ColumnRecord& r, double x) { return r.value < x; })
                : v.begin();
  auto hi = max ? std::upper_bound(v.begin(), v.end(), *max, [](double x, const ColumnRecord& r) { return x < r.value; })
                : v.end();
  if (hi < lo) hi = lo;
  return {static_cast<std::size_t>(lo - v.begin()), static_cast<std::size_t>(hi - v.begin())};
}

}  // namespace detail

/// Number of records of a column within [min, max], from the side index.
inline std::size_t range_count(const IndexSnapshot& snap, std::string_view column, std::optional<double> min,
                               std::optional<double> max) {
  std::size_t id = 0;
  const auto& col = detail::sorted_column(snap, column, id);
  const auto [lo, hi] = detail::value_range(col, min, max);
  snap.add_reads(id, 2);
  return hi - lo;
}

/// Ascending c of every record with min <= value <= max, via the sorted-value
/// side index. Throws Errc::no_side_index when it was not built.
inline std::vector<std::uint64_t> range_prefilter(const IndexSnapshot& snap, std::string_view column,
                                                  std::optional<double> min, std::optional<double> max) {
  std::size_t id = 0;
  const auto& col = detail::sorted_column(snap, column, id);
  if (min && max && *min > *max) return {};
  const auto [lo, hi] = detail::value_range(col, min, max);
  std::vector<std::uint64_t> out;
  out.reserve(hi - lo);
  for (auto k = lo; k < hi; ++k) out.push_back(col.by_value[k].c);
  std::sort(out.begin(), out.end());
  snap.add_reads(id, hi - lo + 2);
  return out;
}

enum class TextQuery { word, tux_prefix };

/// Word lookup in a text column's postings, or tux prefix as a contiguous
/// code range over a tux column.
inline std::vector<std::uint64_t> text_lookup(const IndexSnapshot& snap, std::string_view column, std::string_view query,
                                              TextQuery mode) {
  if (mode == TextQuery::word) {
    if (!snap.has_postings(column) && !snap.column(column)) {
      fail(Errc::unknown_column, "unknown text column '" + std::string(column) + "'");
    }
    const auto words = text::tokenize(text::nfc(query));
    if (words.size() != 1) fail(Errc::invalid_argument, "word query must be a single word: '" + std::string(query) + "'");
    auto p = snap.postings(column, words.front());
    return {p.begin(), p.end()};
  }
  if (!snap.column(column)) fail(Errc::unknown_column, "unknown tux column '" + std::string(column) + "'");
  const auto [lo, hi] = tux_prefix_range(query);
  ScanTerm t{std::string(column), static_cast<double>(lo), static_cast<double>(hi)};
  std::vector<std::uint64_t> out;
  scan(snap, std::span<const ScanTerm>(&t, 1), {}, [&](std::uint64_t c, std::span<const double>) { out.push_back(c); });
  return out;
}

// ---------------------------------------------------------------------------
// top-k

template <class Payload>
struct RankedHit {
  double d = 0.0;
  std::uint64_t c = 0;
  Payload payload{};
};

/// Keeps the k smallest (d, c) pairs; ties on d resolve to smaller c.
template <class Payload = std::monostate>
class TopK {
 public:
  explicit TopK(std::size_t k) : k_(k) {}

  void push(double d, std::uint64_t c, Payload payload = {}) {
    if (k_ == 0) return;
    if (heap_.size() < k_) {
      heap_.push_back(RankedHit<Payload>{d, c, std::move(payload)});
      std::push_heap(heap_.begin(), heap_.end(), less);
    } else if (less(RankedHit<Payload>{d, c, {}}, heap_.front())) {
      std::pop_heap(heap_.begin(), heap_.end(), less);
      heap_.back() = RankedHit<Payload>{d, c, std::move(payload)};
      std::push_heap(heap_.begin(), heap_.end(), less);
    }
  }

  /// Ascending (d, c).
  std::vector<RankedHit<Payload>> take() {
    std::sort_heap(heap_.begin(), heap_.end(), less);
    return std::move(heap_);
  }

  [[nodiscard]] std::size_t size() const noexcept { return heap_.size(); }

 private:
  static bool less(const RankedHit<Payload>& a, const RankedHit<Payload>& b) {
    return a.d < b.d || (a.d == b.d && a.c < b.c);
  }

  std::size_t k_;
  std::vector<RankedHit<Payload>> heap_;
};

}  // namespace dspace
