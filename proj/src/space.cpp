#include "qdarwin/space.hpp"

#include <algorithm>
#include <string>

#include "qdarwin/errors.hpp"

namespace qdarwin {

TensorSpace::TensorSpace(std::vector<SubsystemLabel> subsystems)
    : subsystems_(std::move(subsystems)) {
  const int count = static_cast<int>(subsystems_.size());
  if (count == 0) throw InvariantViolation("TensorSpace needs at least one subsystem");

  // Factor spaces may carry any distinct labels; assembled product spaces
  // are relabeled contiguously from 0 (enforced by tensor_product and the
  // model-space builders).
  for (std::size_t a = 0; a < subsystems_.size(); ++a) {
    if (subsystems_[a].dimension < 2)
      throw InvariantViolation("subsystem dimension must be >= 2");
    if (subsystems_[a].index < 0)
      throw InvariantViolation("subsystem indices must be non-negative");
    for (std::size_t b = a + 1; b < subsystems_.size(); ++b)
      if (subsystems_[a].index == subsystems_[b].index)
        throw InvariantViolation("subsystem indices must be unique");
  }

  strides_.assign(count, 1);
  for (int pos = count - 2; pos >= 0; --pos)
    strides_[pos] = strides_[pos + 1] * subsystems_[pos + 1].dimension;
  total_ = strides_[0] * subsystems_[0].dimension;
}

TensorSpace TensorSpace::qubits(int count) {
  std::vector<SubsystemLabel> subs(count);
  for (int k = 0; k < count; ++k) subs[k] = {k, 2};
  return TensorSpace(std::move(subs));
}

TensorSpace TensorSpace::single(int label, int dimension) {
  return TensorSpace({SubsystemLabel{label, dimension}});
}

bool TensorSpace::has_label(int label) const {
  return std::any_of(subsystems_.begin(), subsystems_.end(),
                     [label](const SubsystemLabel& s) { return s.index == label; });
}

int TensorSpace::position_of(int label) const {
  for (int pos = 0; pos < subsystem_count(); ++pos)
    if (subsystems_[pos].index == label) return pos;
  throw SpaceMismatchError("no subsystem with label " + std::to_string(label));
}

int TensorSpace::dimension_of(int label) const {
  return subsystems_[position_of(label)].dimension;
}

TensorSpace TensorSpace::keep_only(const std::vector<int>& labels) const {
  std::vector<int> positions;
  positions.reserve(labels.size());
  for (int label : labels) positions.push_back(position_of(label));
  std::sort(positions.begin(), positions.end());

  std::vector<SubsystemLabel> subs;
  subs.reserve(positions.size());
  int next = 0;
  for (int pos : positions) subs.push_back({next++, subsystems_[pos].dimension});
  return TensorSpace(std::move(subs));
}

std::vector<int> TensorSpace::digits_of(std::int64_t index) const {
  std::vector<int> digits(subsystem_count());
  for (int pos = 0; pos < subsystem_count(); ++pos) {
    digits[pos] = static_cast<int>(index / strides_[pos]);
    index %= strides_[pos];
  }
  return digits;
}

std::int64_t TensorSpace::index_of(const std::vector<int>& digits) const {
  std::int64_t index = 0;
  for (int pos = 0; pos < subsystem_count(); ++pos)
    index += digits[pos] * strides_[pos];
  return index;
}

TensorSpace merge(const TensorSpace& left, const TensorSpace& right) {
  for (const auto& sub : right.subsystems())
    if (left.has_label(sub.index))
      throw LabelCollisionError("subsystem label " + std::to_string(sub.index) +
                                " present in both factors");
  std::vector<SubsystemLabel> subs = left.subsystems();
  subs.insert(subs.end(), right.subsystems().begin(), right.subsystems().end());
  return TensorSpace(std::move(subs));
}

FragmentSpec FragmentSpec::of(std::vector<int> members) {
  std::sort(members.begin(), members.end());
  if (std::adjacent_find(members.begin(), members.end()) != members.end())
    throw InvariantViolation("fragment members must be distinct");
  for (int label : members)
    if (label <= 0)
      throw InvariantViolation(
          "fragment members must be environment labels (>= 1)");
  return FragmentSpec{std::move(members)};
}

bool FragmentSpec::contains(int label) const {
  return std::binary_search(members.begin(), members.end(), label);
}

SubsetIndexer::SubsetIndexer(const TensorSpace& space, std::vector<int> positions)
    : positions_(std::move(positions)) {
  std::int64_t combined = 1;
  for (int pos : positions_) combined *= space.subsystems()[pos].dimension;

  offsets_.assign(combined, 0);
  for (std::int64_t idx = 0; idx < combined; ++idx) {
    std::int64_t rest = idx;
    std::int64_t offset = 0;
    for (int k = static_cast<int>(positions_.size()) - 1; k >= 0; --k) {
      const int dim = space.subsystems()[positions_[k]].dimension;
      offset += (rest % dim) * space.stride_at(positions_[k]);
      rest /= dim;
    }
    offsets_[idx] = offset;
  }
}

}  // namespace qdarwin
