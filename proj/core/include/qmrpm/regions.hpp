#pragma once

// Finite sample spaces, region sets as bit-vectors over atoms, indexing collections
// and the chain-difference partitions every other module consumes.
//
// The sigma-field is the full power set of atoms. Of the four structural properties
// required of an indexing collection, the approximation property is vacuous on a finite
// space and is not represented here.

#include <compare>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qmrpm {

/// Ordered, immutable list of distinct atom labels. Copies share storage.
class SampleSpace {
 public:
  static constexpr std::size_t kMaxAtoms = 64;

  /// Throws ValidationError on an empty list, an empty label, a duplicate label, or more
  /// than kMaxAtoms atoms.
  explicit SampleSpace(std::vector<std::string> labels);

  std::size_t size() const noexcept { return impl_->labels.size(); }
  const std::vector<std::string>& labels() const noexcept { return impl_->labels; }
  const std::string& label(std::size_t atom) const { return impl_->labels.at(atom); }

  /// Throws ValidationError for an unknown label.
  std::size_t index_of(std::string_view label) const;

  /// Same atoms in the same order.
  friend bool operator==(const SampleSpace& a, const SampleSpace& b) {
    return a.impl_ == b.impl_ || a.impl_->labels == b.impl_->labels;
  }

 private:
  struct Impl {
    std::vector<std::string> labels;
  };
  std::shared_ptr<const Impl> impl_;
};

SampleSpace build_space(std::vector<std::string> atom_labels);

/// A subset of a SampleSpace's atoms. Set algebra is bitwise; mixing spaces is a
/// ValidationError.
class RegionSet {
 public:
  RegionSet(SampleSpace space, std::uint64_t bits);

  static RegionSet empty(const SampleSpace& space) { return RegionSet(space, 0); }
  static RegionSet full(const SampleSpace& space);
  static RegionSet from_labels(const SampleSpace& space, std::span<const std::string> labels);
  static RegionSet from_atoms(const SampleSpace& space, std::span<const std::size_t> atoms);

  const SampleSpace& space() const noexcept { return space_; }
  std::uint64_t bits() const noexcept { return bits_; }

  bool contains(std::size_t atom) const noexcept { return atom < 64 && ((bits_ >> atom) & 1U); }
  bool is_empty() const noexcept { return bits_ == 0; }
  std::size_t count() const noexcept;
  bool subset_of(const RegionSet& other) const;

  RegionSet complement() const;
  RegionSet operator|(const RegionSet& other) const;
  RegionSet operator&(const RegionSet& other) const;
  /// Set difference this \ other.
  RegionSet minus(const RegionSet& other) const;

  std::vector<std::size_t> atoms() const;
  std::vector<std::string> labels() const;
  /// "{1,2}", "{}" for the empty set.
  std::string to_string() const;

  friend bool operator==(const RegionSet& a, const RegionSet& b) {
    return a.bits_ == b.bits_ && a.space_ == b.space_;
  }
  /// Canonical order: by cardinality, then by bit pattern.
  friend std::strong_ordering operator<=>(const RegionSet& a, const RegionSet& b);

 private:
  void require_same_space(const RegionSet& other) const;

  SampleSpace space_;
  std::uint64_t bits_;
};

/// A finite indexing collection: contains the empty set and the full space, is closed
/// under intersection, and any two nonempty members meet.
class IndexingCollection {
 public:
  const SampleSpace& space() const noexcept { return space_; }
  /// Deduplicated, in canonical RegionSet order.
  const std::vector<RegionSet>& members() const noexcept { return members_; }
  /// Intersection of all nonempty members; nonempty for every valid collection.
  const RegionSet& minimal_set() const noexcept { return minimal_; }
  bool contains(const RegionSet& region) const;

 private:
  friend IndexingCollection build_indexing_collection(const SampleSpace&, std::vector<RegionSet>);
  IndexingCollection(SampleSpace space, std::vector<RegionSet> members, RegionSet minimal);

  SampleSpace space_;
  std::vector<RegionSet> members_;
  RegionSet minimal_;
};

/// Adds the empty set and the full space when absent, then validates pairwise
/// intersection closure and the nonempty-intersection property. Errors name the
/// offending pair.
IndexingCollection build_indexing_collection(const SampleSpace& space,
                                             std::vector<RegionSet> members);

/// Closure of the members under finite unions (the regions kernels are indexed by),
/// in canonical order.
std::vector<RegionSet> union_closure(const IndexingCollection& collection);

/// C_1 = B_1, C_j = B_j \ B_{j-1}, C_{k+1} = complement of B_k.
struct ChainPartition {
  std::vector<RegionSet> chain;
  std::vector<RegionSet> cells;
  std::vector<bool> empty_cell;
};

/// Throws ValidationError for an empty or non-monotone chain. Repeated sets are allowed
/// and produce flagged empty cells.
ChainPartition partition_chain(std::span<const RegionSet> chain);

/// All weakly increasing sequences of the given length drawn from `regions`.
std::vector<std::vector<RegionSet>> nested_chains(std::span<const RegionSet> regions,
                                                  std::size_t length, bool strict);

}  // namespace qmrpm
