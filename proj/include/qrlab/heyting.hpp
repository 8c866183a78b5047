#pragma once

#include <boost/dynamic_bitset.hpp>

#include <memory>
#include <vector>

#include "qrlab/qr_number.hpp"
#include "qrlab/state_space.hpp"

namespace qrlab {

/// Finite partial order given by its (reflexive, transitively closed) relation.
class Poset {
 public:
  /// leq[i][j] means i <= j. Reflexivity is added and the relation is closed
  /// transitively; a cycle between distinct elements is a ValidationError.
  explicit Poset(std::vector<std::vector<bool>> leq);

  static Poset chain(std::size_t n);
  static Poset antichain(std::size_t n);

  std::size_t size() const { return leq_.size(); }
  bool leq(std::size_t i, std::size_t j) const { return leq_[i][j]; }
  bool less(std::size_t i, std::size_t j) const { return i != j && leq_[i][j]; }
  const std::vector<std::vector<bool>>& relation() const { return leq_; }

  bool operator==(const Poset& o) const { return leq_ == o.leq_; }

 private:
  std::vector<std::vector<bool>> leq_;
};

/// Balls ordered by the sound containment test. Mutually contained balls
/// (same ball up to the containment margin) are merged; the first is kept.
class BasisPoset {
 public:
  explicit BasisPoset(std::vector<Ball> balls);

  const std::vector<Ball>& balls() const { return balls_; }
  const std::shared_ptr<const Poset>& poset() const { return poset_; }
  std::size_t size() const { return balls_.size(); }
  Eigen::Index dim() const { return balls_.front().dim(); }
  /// For each input ball, its index after duplicate merging.
  const std::vector<std::size_t>& input_index() const { return input_index_; }

 private:
  std::vector<Ball> balls_;
  std::vector<std::size_t> input_index_;
  std::shared_ptr<const Poset> poset_;
};

/// A downset of a poset: an open of its Alexandrov frame.
class TruthValue {
 public:
  using Bits = boost::dynamic_bitset<>;

  /// Throws ValidationError unless `members` is downward closed.
  TruthValue(std::shared_ptr<const Poset> poset, Bits members);

  static TruthValue full(std::shared_ptr<const Poset> poset);
  static TruthValue empty(std::shared_ptr<const Poset> poset);
  /// Smallest downset containing the given elements.
  static TruthValue down_closure(std::shared_ptr<const Poset> poset, const std::vector<std::size_t>& elements);
  /// Down-set of a single element.
  static TruthValue principal(std::shared_ptr<const Poset> poset, std::size_t x);

  const std::shared_ptr<const Poset>& poset() const { return poset_; }
  const Bits& members() const { return bits_; }
  bool contains(std::size_t x) const { return bits_.test(x); }
  bool subset_of(const TruthValue& o) const;
  std::vector<std::size_t> indices() const;

  bool operator==(const TruthValue& o) const;

 private:
  std::shared_ptr<const Poset> poset_;
  Bits bits_;
};

bool is_downset(const Poset& p, const TruthValue::Bits& bits);

TruthValue meet(const TruthValue& u, const TruthValue& v);
TruthValue join(const TruthValue& u, const TruthValue& v);
/// {x : down(x) ∩ U ⊆ V}, the largest W with meet(W, U) ⊆ V.
TruthValue implies(const TruthValue& u, const TruthValue& v);
TruthValue neg(const TruthValue& u);

/// Every downset of p (2^n for an antichain; intended for small posets).
std::vector<TruthValue> all_downsets(const std::shared_ptr<const Poset>& p);

/// All posets on n elements up to isomorphism (n <= 6).
std::vector<Poset> enumerate_posets(std::size_t n);

/// The downset of minimal elements U: neg(U) is empty, so join(U, neg U) is
/// not full and neg(neg U) is full whenever some element is not minimal.
/// Returns nullopt when every element is minimal (Boolean frame).
std::optional<TruthValue> excluded_middle_witness(const std::shared_ptr<const Poset>& p);

/// Downset of basis balls b inside a's extent on which the range of a lies in
/// `interval` (sampled certification), closed downward.
TruthValue locate_proposition(const QrNumber& a, const Interval& interval, const BasisPoset& basis,
                              const SampleBudget& budget);

}  // namespace qrlab
