#pragma once

#include <cstdint>
#include <vector>

namespace qdarwin {

/// One factor of a tensor-product space. The index is the subsystem's
/// identity; within a space the set of indices is {0, ..., M-1}.
struct SubsystemLabel {
  int index = 0;
  int dimension = 2;
  bool operator==(const SubsystemLabel&) const = default;
};

/// Ordered tensor product of labeled subsystems. The ordering fixes the
/// Kronecker layout: position 0 is the most significant digit of a basis
/// index.
class TensorSpace {
 public:
  TensorSpace() = default;
  explicit TensorSpace(std::vector<SubsystemLabel> subsystems);

  static TensorSpace qubits(int count);
  static TensorSpace single(int label, int dimension);

  int subsystem_count() const { return static_cast<int>(subsystems_.size()); }
  std::int64_t total_dimension() const { return total_; }
  const std::vector<SubsystemLabel>& subsystems() const { return subsystems_; }

  bool has_label(int label) const;
  int position_of(int label) const;  // throws SpaceMismatchError if absent
  int dimension_of(int label) const;
  std::int64_t stride_at(int position) const { return strides_[position]; }

  /// Space of the given labels only, kept in position order and relabeled
  /// 0..K-1.
  TensorSpace keep_only(const std::vector<int>& labels) const;

  std::vector<int> digits_of(std::int64_t index) const;
  std::int64_t index_of(const std::vector<int>& digits) const;

  bool operator==(const TensorSpace&) const = default;

 private:
  std::vector<SubsystemLabel> subsystems_;
  std::vector<std::int64_t> strides_;
  std::int64_t total_ = 1;
};

/// Concatenation of two spaces (left factors first). Throws
/// LabelCollisionError on overlapping labels and InvariantViolation if the
/// union of labels is not contiguous from 0.
TensorSpace merge(const TensorSpace& left, const TensorSpace& right);

/// Subset of environment subsystems, by label. In a joint system-environment
/// space the system carries label 0 and the environment labels 1..N; a
/// fragment never contains label 0.
struct FragmentSpec {
  std::vector<int> members;  // kept sorted ascending

  static FragmentSpec of(std::vector<int> members);
  bool contains(int label) const;
  int size() const { return static_cast<int>(members.size()); }
  bool operator==(const FragmentSpec&) const = default;
};

/// Precomputed full-index offsets for a subset of tensor positions: for the
/// combined index a over the subset's dimensions (in the given position
/// order), offset(a) is its contribution to the full-space index.
class SubsetIndexer {
 public:
  SubsetIndexer(const TensorSpace& space, std::vector<int> positions);

  std::int64_t combined_dimension() const {
    return static_cast<std::int64_t>(offsets_.size());
  }
  std::int64_t offset(std::int64_t subset_index) const {
    return offsets_[subset_index];
  }
  const std::vector<int>& positions() const { return positions_; }

 private:
  std::vector<int> positions_;
  std::vector<std::int64_t> offsets_;
};

}  // namespace qdarwin
