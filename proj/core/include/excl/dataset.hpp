#ifndef EXCL_DATASET_HPP
#define EXCL_DATASET_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace excl {

// Malformed or inconsistent input data. The CLI maps this to exit code 2.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class AlterationKind { SNV, AMP, DEL };

// Sorted, duplicate-free row indices identifying an alteration set.
using AlterationSet = std::vector<int>;

// Canonical key: member indices joined by ','. Used for deduplication,
// deterministic tie-breaking and seeding of per-set randomisation.
std::string set_key(const AlterationSet& members);

AlterationSet set_union_of(const AlterationSet& a, const AlterationSet& b);
bool is_subset(const AlterationSet& a, const AlterationSet& b);

// Packed bit vector over sample columns; popcounts drive all coverage queries.
class BitRow {
 public:
  explicit BitRow(int n = 0) : n_(n), words_((n + 63) / 64, 0) {}

  int size() const { return n_; }
  void set(int j) { words_[j >> 6] |= std::uint64_t{1} << (j & 63); }
  void reset(int j) { words_[j >> 6] &= ~(std::uint64_t{1} << (j & 63)); }
  bool test(int j) const { return (words_[j >> 6] >> (j & 63)) & 1; }
  void or_with(const BitRow& o) {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] |= o.words_[w];
  }
  int popcount() const;
  // popcount over the half-open column range [begin, end)
  int popcount_range(int begin, int end) const;

  bool operator==(const BitRow&) const = default;
  std::uint64_t hash() const;

 private:
  int n_;
  std::vector<std::uint64_t> words_;
};

struct RowInfo {
  std::string label;  // e.g. "KRAS", "TP53(A)", "TP53(D)"
  std::string gene;   // label with the (A)/(D) suffix stripped
  AlterationKind kind = AlterationKind::SNV;
  std::vector<std::string> merged_from;  // original labels, when rows were merged
};

// Contiguous column range holding one group's samples.
struct GroupSpan {
  std::string label;
  int begin = 0;
  int end = 0;
  int size() const { return end - begin; }
};

// Immutable binary alteration-by-sample matrix. Columns are permuted once at
// construction so that each group occupies a contiguous range; per-group
// coverage is then a masked popcount.
class AlterationMatrix {
 public:
  // bits[i] indexed by original column order; group_of aligned with sample_ids.
  AlterationMatrix(std::vector<RowInfo> rows, std::vector<std::string> sample_ids,
                   std::vector<std::string> group_of, std::vector<BitRow> bits);

  int row_count() const { return static_cast<int>(rows_.size()); }
  int sample_count() const { return n_; }
  const RowInfo& row(int i) const { return rows_[i]; }
  const std::vector<std::string>& sample_ids() const { return sample_ids_; }
  const std::vector<GroupSpan>& groups() const { return groups_; }
  int group_index(std::string_view label) const;  // throws DataError if unknown

  const BitRow& row_bits(int i) const { return bits_[i]; }
  int row_coverage(int i) const { return row_cov_[i]; }
  int row_coverage(int i, int g) const { return row_cov_group_[i][g]; }

  BitRow union_of(const AlterationSet& members) const;
  int coverage_in_group(const BitRow& bits, int g) const {
    return bits.popcount_range(groups_[g].begin, groups_[g].end);
  }

  // Number of samples (optionally restricted to one group) carrying at least
  // one member alteration.
  int coverage(const AlterationSet& members,
               std::optional<std::string_view> group = std::nullopt) const;
  // Sum of member coverages minus the union coverage; 0 iff perfectly exclusive.
  int overlap(const AlterationSet& members) const;

  AlterationMatrix merge_identical_rows() const;
  // Iterates removal of rows with coverage <= log2(rows_remaining - 1) to a
  // fixpoint.
  AlterationMatrix filter_rare() const;

 private:
  std::vector<RowInfo> rows_;
  std::vector<std::string> sample_ids_;  // permuted order
  std::vector<GroupSpan> groups_;
  std::vector<BitRow> bits_;  // permuted columns
  int n_ = 0;
  std::vector<int> row_cov_;
  std::vector<std::vector<int>> row_cov_group_;
};

// Parses the matrix TSV (header "alteration" + sample ids, cells 0/1/NA) and
// the groups TSV (header "sample", "group"). NA cells load as 0.
AlterationMatrix load_matrix(const std::string& matrix_path,
                             const std::string& groups_path);

// Splits "GENE(A)" / "GENE(D)" / "GENE" into gene and kind.
RowInfo parse_row_label(const std::string& label);

}  // namespace excl

#endif
