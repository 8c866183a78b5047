#include "qrlab/heyting.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "qrlab/error.hpp"

namespace qrlab {

namespace {

void require_same(const TruthValue& u, const TruthValue& v, const char* what) {
  if (u.poset() == v.poset()) return;
  if (*u.poset() == *v.poset()) return;
  throw ValidationError(std::string(what) + ": truth values belong to different posets");
}

TruthValue::Bits down_bits(const Poset& p, std::size_t x) {
  TruthValue::Bits out(p.size());
  for (std::size_t y = 0; y < p.size(); ++y)
    if (p.leq(y, x)) out.set(y);
  return out;
}

// Canonical form: lexicographically smallest relation matrix over all relabelings.
std::vector<bool> canonical(const std::vector<std::vector<bool>>& leq) {
  const std::size_t n = leq.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<bool> best;
  do {
    std::vector<bool> flat;
    flat.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) flat.push_back(leq[perm[i]][perm[j]]);
    if (best.empty() || flat < best) best = std::move(flat);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

// ---- Poset ----

Poset::Poset(std::vector<std::vector<bool>> leq) : leq_(std::move(leq)) {
  const std::size_t n = leq_.size();
  for (const auto& row : leq_)
    if (row.size() != n) throw ValidationError("Poset: relation matrix must be square");
  for (std::size_t i = 0; i < n; ++i) leq_[i][i] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (leq_[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (leq_[k][j]) leq_[i][j] = true;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (leq_[i][j] && leq_[j][i])
        throw ValidationError("Poset: relation is not antisymmetric (elements " + std::to_string(i) + " and " +
                              std::to_string(j) + ")");
}

Poset Poset::chain(std::size_t n) {
  std::vector<std::vector<bool>> leq(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) leq[i][j] = true;
  return Poset(std::move(leq));
}

Poset Poset::antichain(std::size_t n) { return Poset(std::vector<std::vector<bool>>(n, std::vector<bool>(n, false))); }

// ---- BasisPoset ----

BasisPoset::BasisPoset(std::vector<Ball> balls) {
  if (balls.empty()) throw ValidationError("BasisPoset: needs at least one ball");
  const Eigen::Index dim = balls.front().dim();
  for (const auto& b : balls)
    if (b.dim() != dim) throw ValidationError("BasisPoset: balls of different dimensions");

  for (auto& b : balls) {
    std::size_t found = balls_.size();
    for (std::size_t k = 0; k < balls_.size(); ++k)
      if (ball_contains(balls_[k], b) && ball_contains(b, balls_[k])) {
        found = k;
        break;
      }
    input_index_.push_back(found);
    if (found == balls_.size()) balls_.push_back(std::move(b));
  }
  const std::size_t n = balls_.size();
  std::vector<std::vector<bool>> leq(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) leq[i][j] = (i == j) || ball_contains(balls_[j], balls_[i]);
  poset_ = std::make_shared<const Poset>(std::move(leq));
}

// ---- TruthValue ----

bool is_downset(const Poset& p, const TruthValue::Bits& bits) {
  if (bits.size() != p.size()) return false;
  for (std::size_t x = 0; x < p.size(); ++x)
    if (bits.test(x))
      for (std::size_t y = 0; y < p.size(); ++y)
        if (p.leq(y, x) && !bits.test(y)) return false;
  return true;
}

TruthValue::TruthValue(std::shared_ptr<const Poset> poset, Bits members)
    : poset_(std::move(poset)), bits_(std::move(members)) {
  if (!poset_) throw ValidationError("TruthValue: null poset");
  if (!is_downset(*poset_, bits_)) throw ValidationError("TruthValue: set is not downward closed");
}

TruthValue TruthValue::full(std::shared_ptr<const Poset> poset) {
  Bits bits(poset->size());
  bits.set();
  return TruthValue(std::move(poset), std::move(bits));
}

TruthValue TruthValue::empty(std::shared_ptr<const Poset> poset) {
  Bits bits(poset->size());
  return TruthValue(std::move(poset), std::move(bits));
}

TruthValue TruthValue::down_closure(std::shared_ptr<const Poset> poset, const std::vector<std::size_t>& elements) {
  Bits bits(poset->size());
  for (std::size_t x : elements) {
    if (x >= poset->size()) throw ValidationError("TruthValue: element index out of range");
    bits |= down_bits(*poset, x);
  }
  return TruthValue(std::move(poset), std::move(bits));
}

TruthValue TruthValue::principal(std::shared_ptr<const Poset> poset, std::size_t x) {
  return down_closure(std::move(poset), {x});
}

bool TruthValue::subset_of(const TruthValue& o) const {
  require_same(*this, o, "subset_of");
  return bits_.is_subset_of(o.bits_);
}

std::vector<std::size_t> TruthValue::indices() const {
  std::vector<std::size_t> out;
  for (auto i = bits_.find_first(); i != Bits::npos; i = bits_.find_next(i)) out.push_back(i);
  return out;
}

bool TruthValue::operator==(const TruthValue& o) const {
  require_same(*this, o, "operator==");
  return bits_ == o.bits_;
}

TruthValue meet(const TruthValue& u, const TruthValue& v) {
  require_same(u, v, "meet");
  return TruthValue(u.poset(), u.members() & v.members());
}

TruthValue join(const TruthValue& u, const TruthValue& v) {
  require_same(u, v, "join");
  return TruthValue(u.poset(), u.members() | v.members());
}

TruthValue implies(const TruthValue& u, const TruthValue& v) {
  require_same(u, v, "implies");
  const auto& p = *u.poset();
  TruthValue::Bits out(p.size());
  for (std::size_t x = 0; x < p.size(); ++x)
    if ((down_bits(p, x) & u.members()).is_subset_of(v.members())) out.set(x);
  return TruthValue(u.poset(), std::move(out));
}

TruthValue neg(const TruthValue& u) { return implies(u, TruthValue::empty(u.poset())); }

std::vector<TruthValue> all_downsets(const std::shared_ptr<const Poset>& p) {
  const std::size_t n = p->size();
  if (n > 24) throw ValidationError("all_downsets: poset too large to enumerate");
  // Antichains generate downsets one-to-one; grow them in index order.
  std::vector<TruthValue> out;
  std::vector<std::size_t> antichain;
  auto recurse = [&](auto&& self, std::size_t start) -> void {
    out.push_back(TruthValue::down_closure(p, antichain));
    for (std::size_t x = start; x < n; ++x) {
      const bool comparable = std::any_of(antichain.begin(), antichain.end(),
                                          [&](std::size_t y) { return p->leq(x, y) || p->leq(y, x); });
      if (comparable) continue;
      antichain.push_back(x);
      self(self, x + 1);
      antichain.pop_back();
    }
  };
  recurse(recurse, 0);
  return out;
}

std::vector<Poset> enumerate_posets(std::size_t n) {
  if (n > 6) throw ValidationError("enumerate_posets: n must be <= 6");
  // Every finite poset has a linear extension, so it suffices to consider
  // strict orders contained in i < j.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);

  std::set<std::vector<bool>> seen;
  std::vector<Poset> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << pairs.size()); ++mask) {
    std::vector<std::vector<bool>> leq(n, std::vector<bool>(n, false));
    for (std::size_t k = 0; k < pairs.size(); ++k)
      if (mask >> k & 1U) leq[pairs[k].first][pairs[k].second] = true;
    bool transitive = true;
    for (std::size_t i = 0; i < n && transitive; ++i)
      for (std::size_t j = 0; j < n && transitive; ++j)
        if (leq[i][j])
          for (std::size_t k = 0; k < n; ++k)
            if (leq[j][k] && !leq[i][k]) {
              transitive = false;
              break;
            }
    if (!transitive) continue;
    for (std::size_t i = 0; i < n; ++i) leq[i][i] = true;
    if (seen.insert(canonical(leq)).second) out.emplace_back(std::move(leq));
  }
  return out;
}

std::optional<TruthValue> excluded_middle_witness(const std::shared_ptr<const Poset>& p) {
  std::vector<std::size_t> minimal;
  bool all_minimal = true;
  for (std::size_t x = 0; x < p->size(); ++x) {
    bool is_min = true;
    for (std::size_t y = 0; y < p->size(); ++y)
      if (p->less(y, x)) is_min = false;
    if (is_min) minimal.push_back(x);
    else all_minimal = false;
  }
  if (all_minimal) return std::nullopt;
  return TruthValue::down_closure(p, minimal);
}

TruthValue locate_proposition(const QrNumber& a, const Interval& interval, const BasisPoset& basis,
                              const SampleBudget& budget) {
  if (basis.dim() != a.dim()) throw ValidationError("locate_proposition: basis and section dimensions differ");
  std::vector<std::size_t> holds;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const Condition ball({basis.balls()[k]}, a.dim());
    if (!condition_contains(a.extent(), ball)) continue;
    const auto range = eval_range(qr_restrict(a, ball), budget);
    if (interval.contains(range.interval())) holds.push_back(k);
  }
  return TruthValue::down_closure(basis.poset(), holds);
}

}  // namespace qrlab
