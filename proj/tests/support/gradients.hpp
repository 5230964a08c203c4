#pragma once

// Reference objectives and central finite differences for the trainers.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "dmsem/trainers.hpp"
#include "support/oracles.hpp"

namespace test_support {

using dmsem::EmbeddingTable;
using dmsem::RowMatrix;
using dmsem::SenseTable;
using dmsem::Vector;
using dmsem::WordId;

inline double ref_log_sigmoid(double x) { return -std::log1p(std::exp(-x)); }

inline double sgns_objective(const EmbeddingTable& t, WordId target, WordId context, const std::vector<WordId>& negs) {
  double j = ref_log_sigmoid(t.target.row(target).dot(t.context.row(context)));
  for (WordId k : negs) j += ref_log_sigmoid(-t.target.row(target).dot(t.context.row(k)));
  return j;
}

/// Multi-sense objective with the sense column fixed to `col`.
inline double sense_objective(const SenseTable& t, WordId target, const std::vector<WordId>& ctx, const std::vector<WordId>& negs,
                       Eigen::Index col) {
  Vector c = Vector::Zero(t.dim());
  for (WordId w : ctx) c += t.context.row(w).transpose();
  const Vector b = t.senses[static_cast<std::size_t>(target)].col(col);
  double j = ref_log_sigmoid(b.dot(c));
  for (WordId k : negs) j += ref_log_sigmoid(-b.dot(t.context.row(k).transpose()));
  return j;
}

inline double rel_err(const Vector& a, const Vector& b) {
  const double scale = std::max({a.norm(), b.norm(), 1e-12});
  return (a - b).norm() / scale;
}

template <class Table, class Objective>
Vector fd_rows(Table& t, RowMatrix Table::*member, WordId row, Objective&& objective) {
  const double h = 1e-5;
  Vector g(t.dim());
  for (Eigen::Index k = 0; k < t.dim(); ++k) {
    double& x = (t.*member)(row, k);
    const double keep = x;
    x = keep + h;
    const double up = objective();
    x = keep - h;
    const double down = objective();
    x = keep;
    g[k] = (up - down) / (2 * h);
  }
  return g;
}

inline EmbeddingTable random_embeddings(std::mt19937_64& rng, Eigen::Index v, Eigen::Index d) {
  EmbeddingTable t;
  t.target = 0.5 * oracle::random_gaussian(v, d, rng);
  t.context = 0.5 * oracle::random_gaussian(v, d, rng);
  return t;
}

inline SenseTable random_senses(std::mt19937_64& rng, Eigen::Index v, Eigen::Index d, Eigen::Index m) {
  SenseTable t;
  for (Eigen::Index w = 0; w < v; ++w) t.senses.push_back(0.5 * oracle::random_gaussian(d, m, rng));
  t.context = 0.3 * oracle::random_gaussian(v, d, rng);
  return t;
}

/// Central differences of `objective` with respect to one sense column.
template <class Objective>
Vector fd_sense_column(SenseTable& t, WordId word, Eigen::Index col, Objective&& objective) {
  const double h = 1e-5;
  auto& b = t.senses[static_cast<std::size_t>(word)];
  Vector g(b.rows());
  for (Eigen::Index k = 0; k < b.rows(); ++k) {
    double& x = b(k, col);
    const double keep = x;
    x = keep + h;
    const double up = objective();
    x = keep - h;
    const double down = objective();
    x = keep;
    g[k] = (up - down) / (2 * h);
  }
  return g;
}

}  // namespace test_support
