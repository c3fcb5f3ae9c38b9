#include "christoffel/multi_index.hpp"

#include <numeric>
#include <stdexcept>

#include "christoffel/errors.hpp"

namespace christoffel {

int MultiIndex::degree() const {
  return std::accumulate(exponents.begin(), exponents.end(), 0);
}

MultiIndex operator+(const MultiIndex& a, const MultiIndex& b) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatch("MultiIndex sum: dimensions differ");
  }
  std::vector<int> e(a.exponents);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] += b.exponents[i];
  return MultiIndex(std::move(e));
}

std::size_t simplex_cardinality(int dim, int degree) {
  std::size_t c = 1;
  for (int i = 1; i <= dim; ++i) {
    c = c * static_cast<std::size_t>(degree + i) / static_cast<std::size_t>(i);
  }
  return c;
}

namespace {

// Compositions of `total` into `dim` parts, leading part largest first.
void emit_degree_block(int dim, int total, std::vector<int>& work, int pos,
                       std::vector<MultiIndex>& out) {
  if (pos == dim - 1) {
    work[static_cast<std::size_t>(pos)] = total;
    out.emplace_back(work);
    return;
  }
  for (int head = total; head >= 0; --head) {
    work[static_cast<std::size_t>(pos)] = head;
    emit_degree_block(dim, total - head, work, pos + 1, out);
  }
}

}  // namespace

IndexSet::IndexSet(int dim, int degree) : dim_(dim), degree_(degree) {}

IndexSet IndexSet::enumerate(int dim, int degree) {
  if (dim < 1) throw std::invalid_argument("IndexSet: dim must be >= 1");
  if (degree < 0) throw std::invalid_argument("IndexSet: degree must be >= 0");

  IndexSet set(dim, degree);
  set.entries_.reserve(simplex_cardinality(dim, degree));
  std::vector<int> work(static_cast<std::size_t>(dim), 0);
  for (int t = 0; t <= degree; ++t) {
    emit_degree_block(dim, t, work, 0, set.entries_);
  }

  for (std::size_t k = 0; k < set.entries_.size(); ++k) {
    set.positions_.emplace(set.entries_[k].exponents, k);
  }

  set.parent_.assign(set.entries_.size(), 0);
  set.axis_.assign(set.entries_.size(), -1);
  for (std::size_t k = 1; k < set.entries_.size(); ++k) {
    std::vector<int> e = set.entries_[k].exponents;
    for (int i = 0; i < dim; ++i) {
      if (e[static_cast<std::size_t>(i)] > 0) {
        e[static_cast<std::size_t>(i)] -= 1;
        set.parent_[k] = set.positions_.at(e);
        set.axis_[k] = i;
        break;
      }
    }
  }
  return set;
}

std::size_t IndexSet::position(const MultiIndex& alpha) const {
  auto it = positions_.find(alpha.exponents);
  if (it == positions_.end()) {
    throw std::out_of_range("IndexSet::position: index not in set");
  }
  return it->second;
}

bool IndexSet::contains(const MultiIndex& alpha) const {
  return positions_.find(alpha.exponents) != positions_.end();
}

Eigen::VectorXd monomial_vector(const IndexSet& set, const Eigen::VectorXd& x) {
  if (x.size() != set.dim()) {
    throw DimensionMismatch("monomial_vector: point dimension does not match index set");
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(set.size()));
  v[0] = 1.0;
  for (std::size_t k = 1; k < set.size(); ++k) {
    v[static_cast<Eigen::Index>(k)] =
        v[static_cast<Eigen::Index>(set.parent_[k])] * x[set.axis_[k]];
  }
  return v;
}

}  // namespace christoffel
