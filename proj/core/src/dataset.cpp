#include "excl/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "excl/stats.hpp"

namespace excl {

std::string set_key(const AlterationSet& members) {
  std::string key;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (i) key += ',';
    key += std::to_string(members[i]);
  }
  return key;
}

AlterationSet set_union_of(const AlterationSet& a, const AlterationSet& b) {
  AlterationSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool is_subset(const AlterationSet& a, const AlterationSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

int BitRow::popcount() const {
  int c = 0;
  for (std::uint64_t w : words_) c += std::popcount(w);
  return c;
}

int BitRow::popcount_range(int begin, int end) const {
  if (begin >= end) return 0;
  const int wb = begin >> 6, we = (end - 1) >> 6;
  if (wb == we) {
    std::uint64_t mask = (~std::uint64_t{0} << (begin & 63)) &
                         (~std::uint64_t{0} >> (63 - ((end - 1) & 63)));
    return std::popcount(words_[wb] & mask);
  }
  int c = std::popcount(words_[wb] & (~std::uint64_t{0} << (begin & 63)));
  for (int w = wb + 1; w < we; ++w) c += std::popcount(words_[w]);
  c += std::popcount(words_[we] & (~std::uint64_t{0} >> (63 - ((end - 1) & 63))));
  return c;
}

std::uint64_t BitRow::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint64_t w : words_) h = mix64(h ^ w);
  return h;
}

RowInfo parse_row_label(const std::string& label) {
  RowInfo info;
  info.label = label;
  info.gene = label;
  info.kind = AlterationKind::SNV;
  if (label.size() > 3 && label.back() == ')') {
    const std::string suffix = label.substr(label.size() - 3);
    if (suffix == "(A)") {
      info.kind = AlterationKind::AMP;
      info.gene = label.substr(0, label.size() - 3);
    } else if (suffix == "(D)") {
      info.kind = AlterationKind::DEL;
      info.gene = label.substr(0, label.size() - 3);
    }
  }
  return info;
}

AlterationMatrix::AlterationMatrix(std::vector<RowInfo> rows,
                                   std::vector<std::string> sample_ids,
                                   std::vector<std::string> group_of,
                                   std::vector<BitRow> bits)
    : rows_(std::move(rows)), n_(static_cast<int>(sample_ids.size())) {
  if (group_of.size() != sample_ids.size())
    throw DataError("group assignment size mismatch");
  for (const auto& b : bits)
    if (b.size() != n_) throw DataError("bit row length mismatch");

  // Permute columns so each group is contiguous; groups ordered by label,
  // original column order preserved within a group.
  std::map<std::string, std::vector<int>> by_group;
  for (int j = 0; j < n_; ++j) by_group[group_of[j]].push_back(j);

  std::vector<int> perm;  // perm[new] = old
  perm.reserve(n_);
  for (const auto& [label, cols] : by_group) {
    GroupSpan span;
    span.label = label;
    span.begin = static_cast<int>(perm.size());
    perm.insert(perm.end(), cols.begin(), cols.end());
    span.end = static_cast<int>(perm.size());
    groups_.push_back(std::move(span));
  }

  sample_ids_.resize(n_);
  for (int j = 0; j < n_; ++j) sample_ids_[j] = sample_ids[perm[j]];

  bits_.reserve(bits.size());
  for (const auto& src : bits) {
    BitRow dst(n_);
    for (int j = 0; j < n_; ++j)
      if (src.test(perm[j])) dst.set(j);
    bits_.push_back(std::move(dst));
  }

  row_cov_.resize(bits_.size());
  row_cov_group_.resize(bits_.size());
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    row_cov_[i] = bits_[i].popcount();
    row_cov_group_[i].resize(groups_.size());
    for (std::size_t g = 0; g < groups_.size(); ++g)
      row_cov_group_[i][g] = bits_[i].popcount_range(groups_[g].begin, groups_[g].end);
  }
}

int AlterationMatrix::group_index(std::string_view label) const {
  for (std::size_t g = 0; g < groups_.size(); ++g)
    if (groups_[g].label == label) return static_cast<int>(g);
  throw DataError("unknown group label: " + std::string(label));
}

BitRow AlterationMatrix::union_of(const AlterationSet& members) const {
  BitRow u(n_);
  for (int i : members) {
    if (i < 0 || i >= row_count()) throw DataError("row index out of range");
    u.or_with(bits_[i]);
  }
  return u;
}

int AlterationMatrix::coverage(const AlterationSet& members,
                               std::optional<std::string_view> group) const {
  BitRow u = union_of(members);
  if (!group) return u.popcount();
  int g = group_index(*group);
  return u.popcount_range(groups_[g].begin, groups_[g].end);
}

int AlterationMatrix::overlap(const AlterationSet& members) const {
  int sum = 0;
  for (int i : members) sum += row_cov_[i];
  return sum - coverage(members);
}

namespace {
AlterationMatrix select_rows(const AlterationMatrix& src, const std::vector<int>& keep,
                             std::vector<RowInfo> rows) {
  std::vector<BitRow> bits;
  bits.reserve(keep.size());
  for (int i : keep) bits.push_back(src.row_bits(i));
  std::vector<std::string> group_of(src.sample_count());
  for (const auto& span : src.groups())
    for (int j = span.begin; j < span.end; ++j) group_of[j] = span.label;
  return AlterationMatrix(std::move(rows), src.sample_ids(), std::move(group_of),
                          std::move(bits));
}
}  // namespace

AlterationMatrix AlterationMatrix::merge_identical_rows() const {
  std::unordered_map<std::uint64_t, std::vector<int>> buckets;
  std::vector<int> keep;
  std::vector<RowInfo> rows;
  std::vector<int> rep_of(row_count(), -1);  // row -> index into keep
  for (int i = 0; i < row_count(); ++i) {
    auto& bucket = buckets[bits_[i].hash()];
    int found = -1;
    for (int r : bucket)
      if (bits_[r] == bits_[i]) {
        found = r;
        break;
      }
    if (found < 0) {
      bucket.push_back(i);
      rep_of[i] = static_cast<int>(keep.size());
      keep.push_back(i);
      RowInfo info = rows_[i];
      if (info.merged_from.empty()) info.merged_from.push_back(info.label);
      rows.push_back(std::move(info));
    } else {
      auto& info = rows[rep_of[found]];
      if (rows_[i].merged_from.empty())
        info.merged_from.push_back(rows_[i].label);
      else
        info.merged_from.insert(info.merged_from.end(), rows_[i].merged_from.begin(),
                                rows_[i].merged_from.end());
    }
  }
  return select_rows(*this, keep, std::move(rows));
}

AlterationMatrix AlterationMatrix::filter_rare() const {
  std::vector<int> keep(row_count());
  for (int i = 0; i < row_count(); ++i) keep[i] = i;
  for (;;) {
    const int m = static_cast<int>(keep.size());
    if (m <= 1) break;
    const double threshold = std::log2(static_cast<double>(m - 1));
    std::vector<int> next;
    for (int i : keep)
      if (static_cast<double>(row_cov_[i]) > threshold) next.push_back(i);
    if (next.size() == keep.size()) break;
    keep = std::move(next);
  }
  std::vector<RowInfo> rows;
  rows.reserve(keep.size());
  for (int i : keep) rows.push_back(rows_[i]);
  return select_rows(*this, keep, std::move(rows));
}

namespace {
std::vector<std::string> split_tsv(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  if (!fields.empty() && !fields.back().empty() && fields.back().back() == '\r')
    fields.back().pop_back();
  return fields;
}
}  // namespace

AlterationMatrix load_matrix(const std::string& matrix_path,
                             const std::string& groups_path) {
  std::ifstream gf(groups_path);
  if (!gf) throw DataError("cannot open groups file: " + groups_path);
  std::string line;
  if (!std::getline(gf, line)) throw DataError("groups file is empty");
  {
    auto header = split_tsv(line);
    if (header.size() < 2 || header[0] != "sample" || header[1] != "group")
      throw DataError("groups file header must be: sample<TAB>group");
  }
  std::unordered_map<std::string, std::string> group_of_sample;
  while (std::getline(gf, line)) {
    if (line.empty()) continue;
    auto fields = split_tsv(line);
    if (fields.size() < 2) throw DataError("groups file line with fewer than 2 columns");
    group_of_sample[fields[0]] = fields[1];
  }

  std::ifstream mf(matrix_path);
  if (!mf) throw DataError("cannot open matrix file: " + matrix_path);
  if (!std::getline(mf, line)) throw DataError("matrix file is empty");
  auto header = split_tsv(line);
  if (header.empty() || header[0] != "alteration")
    throw DataError("matrix header must start with 'alteration'");
  std::vector<std::string> sample_ids(header.begin() + 1, header.end());
  const int n = static_cast<int>(sample_ids.size());
  if (n == 0) throw DataError("matrix has no sample columns");

  std::vector<std::string> group_of(n);
  for (int j = 0; j < n; ++j) {
    auto it = group_of_sample.find(sample_ids[j]);
    if (it == group_of_sample.end())
      throw DataError("sample " + sample_ids[j] + " missing from groups file");
    group_of[j] = it->second;
  }

  std::vector<RowInfo> rows;
  std::vector<BitRow> bits;
  std::unordered_set<std::string> seen_labels;
  while (std::getline(mf, line)) {
    if (line.empty()) continue;
    auto fields = split_tsv(line);
    if (static_cast<int>(fields.size()) != n + 1)
      throw DataError("matrix row '" + fields[0] + "' has " +
                      std::to_string(fields.size() - 1) + " cells, expected " +
                      std::to_string(n));
    if (!seen_labels.insert(fields[0]).second)
      throw DataError("duplicate row label: " + fields[0]);
    BitRow row(n);
    for (int j = 0; j < n; ++j) {
      const std::string& cell = fields[j + 1];
      if (cell == "1")
        row.set(j);
      else if (cell != "0" && cell != "NA")
        throw DataError("malformed cell value '" + cell + "' in row " + fields[0]);
    }
    rows.push_back(parse_row_label(fields[0]));
    bits.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("matrix has no rows");

  return AlterationMatrix(std::move(rows), std::move(sample_ids), std::move(group_of),
                          std::move(bits));
}

}  // namespace excl
