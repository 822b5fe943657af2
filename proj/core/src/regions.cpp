#include "qmrpm/regions.hpp"

#include <algorithm>
#include <bit>
#include <set>
#include <unordered_set>

#include "qmrpm/errors.hpp"

namespace qmrpm {

SampleSpace::SampleSpace(std::vector<std::string> labels) {
  if (labels.empty()) throw ValidationError("sample space needs at least one atom");
  if (labels.size() > kMaxAtoms) {
    throw ValidationError("sample space limited to " + std::to_string(kMaxAtoms) + " atoms");
  }
  std::unordered_set<std::string> seen;
  for (const auto& l : labels) {
    if (l.empty()) throw ValidationError("empty atom label");
    if (!seen.insert(l).second) throw ValidationError("duplicate atom label '" + l + "'");
  }
  impl_ = std::make_shared<const Impl>(Impl{std::move(labels)});
}

std::size_t SampleSpace::index_of(std::string_view label) const {
  const auto& ls = impl_->labels;
  const auto it = std::find(ls.begin(), ls.end(), label);
  if (it == ls.end()) throw ValidationError("unknown atom label '" + std::string(label) + "'");
  return static_cast<std::size_t>(it - ls.begin());
}

SampleSpace build_space(std::vector<std::string> atom_labels) {
  return SampleSpace(std::move(atom_labels));
}

namespace {

std::uint64_t full_mask(std::size_t n) { return n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1; }

}  // namespace

RegionSet::RegionSet(SampleSpace space, std::uint64_t bits) : space_(std::move(space)), bits_(bits) {
  if ((bits_ & ~full_mask(space_.size())) != 0) {
    throw ValidationError("region bits outside the sample space");
  }
}

RegionSet RegionSet::full(const SampleSpace& space) { return RegionSet(space, full_mask(space.size())); }

RegionSet RegionSet::from_labels(const SampleSpace& space, std::span<const std::string> labels) {
  std::uint64_t bits = 0;
  for (const auto& l : labels) bits |= std::uint64_t{1} << space.index_of(l);
  return RegionSet(space, bits);
}

RegionSet RegionSet::from_atoms(const SampleSpace& space, std::span<const std::size_t> atoms) {
  std::uint64_t bits = 0;
  for (auto a : atoms) {
    if (a >= space.size()) throw ValidationError("atom index out of range");
    bits |= std::uint64_t{1} << a;
  }
  return RegionSet(space, bits);
}

std::size_t RegionSet::count() const noexcept { return static_cast<std::size_t>(std::popcount(bits_)); }

void RegionSet::require_same_space(const RegionSet& other) const {
  if (!(space_ == other.space_)) throw ValidationError("regions belong to different sample spaces");
}

bool RegionSet::subset_of(const RegionSet& other) const {
  require_same_space(other);
  return (bits_ & ~other.bits_) == 0;
}

RegionSet RegionSet::complement() const { return RegionSet(space_, ~bits_ & full_mask(space_.size())); }

RegionSet RegionSet::operator|(const RegionSet& other) const {
  require_same_space(other);
  return RegionSet(space_, bits_ | other.bits_);
}

RegionSet RegionSet::operator&(const RegionSet& other) const {
  require_same_space(other);
  return RegionSet(space_, bits_ & other.bits_);
}

RegionSet RegionSet::minus(const RegionSet& other) const {
  require_same_space(other);
  return RegionSet(space_, bits_ & ~other.bits_);
}

std::vector<std::size_t> RegionSet::atoms() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < space_.size(); ++i) {
    if (contains(i)) out.push_back(i);
  }
  return out;
}

std::vector<std::string> RegionSet::labels() const {
  std::vector<std::string> out;
  for (auto a : atoms()) out.push_back(space_.label(a));
  return out;
}

std::string RegionSet::to_string() const {
  std::string s = "{";
  bool first = true;
  for (auto a : atoms()) {
    if (!first) s += ",";
    first = false;
    s += space_.label(a);
  }
  return s + "}";
}

std::strong_ordering operator<=>(const RegionSet& a, const RegionSet& b) {
  if (auto c = a.count() <=> b.count(); c != 0) return c;
  // Lower atoms first: compare bit-reversed patterns so {1} < {2} for singletons.
  const auto rev = [](std::uint64_t x) {
    std::uint64_t r = 0;
    for (int i = 0; i < 64; ++i) r |= ((x >> i) & 1U) << (63 - i);
    return r;
  };
  return rev(b.bits()) <=> rev(a.bits());
}

IndexingCollection::IndexingCollection(SampleSpace space, std::vector<RegionSet> members,
                                       RegionSet minimal)
    : space_(std::move(space)), members_(std::move(members)), minimal_(std::move(minimal)) {}

bool IndexingCollection::contains(const RegionSet& region) const {
  return std::binary_search(members_.begin(), members_.end(), region);
}

IndexingCollection build_indexing_collection(const SampleSpace& space,
                                             std::vector<RegionSet> members) {
  for (const auto& m : members) {
    if (!(m.space() == space)) throw ValidationError("collection member over a different space");
  }
  members.push_back(RegionSet::empty(space));
  members.push_back(RegionSet::full(space));
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());

  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      const RegionSet meet = members[i] & members[j];
      if (!members[i].is_empty() && !members[j].is_empty() && meet.is_empty()) {
        throw ValidationError("nonempty members " + members[i].to_string() + " and " +
                              members[j].to_string() + " are disjoint");
      }
      if (!std::binary_search(members.begin(), members.end(), meet)) {
        throw ValidationError("collection not closed under intersection: " +
                              members[i].to_string() + " and " + members[j].to_string() +
                              " meet in " + meet.to_string());
      }
    }
  }

  RegionSet minimal = RegionSet::full(space);
  for (const auto& m : members) {
    if (!m.is_empty()) minimal = minimal & m;
  }
  if (minimal.is_empty()) {
    throw InternalConsistencyError("valid collection with empty minimal set");
  }
  return IndexingCollection(space, std::move(members), std::move(minimal));
}

std::vector<RegionSet> union_closure(const IndexingCollection& collection) {
  std::set<RegionSet> closed(collection.members().begin(), collection.members().end());
  bool grew = true;
  while (grew) {
    grew = false;
    const std::vector<RegionSet> snapshot(closed.begin(), closed.end());
    for (std::size_t i = 0; i < snapshot.size(); ++i) {
      for (std::size_t j = i + 1; j < snapshot.size(); ++j) {
        if (closed.insert(snapshot[i] | snapshot[j]).second) grew = true;
      }
    }
  }
  return {closed.begin(), closed.end()};
}

ChainPartition partition_chain(std::span<const RegionSet> chain) {
  if (chain.empty()) throw ValidationError("empty chain");
  ChainPartition out;
  out.chain.assign(chain.begin(), chain.end());
  for (std::size_t j = 1; j < chain.size(); ++j) {
    if (!chain[j - 1].subset_of(chain[j])) {
      throw ValidationError("chain is not increasing at position " + std::to_string(j) + ": " +
                            chain[j - 1].to_string() + " not within " + chain[j].to_string());
    }
  }
  out.cells.push_back(chain.front());
  for (std::size_t j = 1; j < chain.size(); ++j) out.cells.push_back(chain[j].minus(chain[j - 1]));
  out.cells.push_back(chain.back().complement());
  for (const auto& c : out.cells) out.empty_cell.push_back(c.is_empty());
  return out;
}

std::vector<std::vector<RegionSet>> nested_chains(std::span<const RegionSet> regions,
                                                  std::size_t length, bool strict) {
  std::vector<std::vector<RegionSet>> out;
  if (length == 0) return out;
  std::vector<RegionSet> current;
  auto extend = [&](auto&& self) -> void {
    if (current.size() == length) {
      out.push_back(current);
      return;
    }
    for (const auto& r : regions) {
      if (!current.empty()) {
        if (!current.back().subset_of(r)) continue;
        if (strict && current.back() == r) continue;
      }
      current.push_back(r);
      self(self);
      current.pop_back();
    }
  };
  extend(extend);
  return out;
}

}  // namespace qmrpm
