#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include "dmsem/trainers.hpp"
#include "support/gradients.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"
#include "support/temp_dir.hpp"

using namespace dmsem;
using namespace test_support;

namespace {

Eigen::Index ref_select_cosine(const Matrix& b, const Vector& c) {
  Eigen::Index best = 0;
  double best_cos = -2;
  for (Eigen::Index i = 0; i < b.cols(); ++i) {
    const double cs = b.col(i).dot(c) / (b.col(i).norm() * c.norm());
    if (cs > best_cos) best_cos = cs, best = i;
  }
  return best;
}

Matrix cols(std::initializer_list<std::pair<double, double>> columns) {
  Matrix m(2, static_cast<Eigen::Index>(columns.size()));
  Eigen::Index j = 0;
  for (auto [x, y] : columns) m(0, j) = x, m(1, j++) = y;
  return m;
}

Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST(Sigmoid, StableAtExtremes) {
  EXPECT_NEAR(sigmoid(1.0), 0.7310585786300049, 1e-15);
  EXPECT_EQ(sigmoid(-800.0), 0.0);
  EXPECT_EQ(sigmoid(800.0), 1.0);
  EXPECT_NEAR(log_sigmoid(-800.0), -800.0, 1e-9);
  EXPECT_NEAR(log_sigmoid(2.0), ref_log_sigmoid(2.0), 1e-15);
}

TEST(SgnsStep, ZeroFixedPoint) {
  EmbeddingTable t{RowMatrix::Zero(4, 3), RowMatrix::Zero(4, 3)};
  const std::vector<WordId> negs{2, 3};
  sgns_step(t, 0, 1, negs, 0.5);
  EXPECT_TRUE(t.target.isZero(0.0));
  EXPECT_TRUE(t.context.isZero(0.0));
}

TEST(SgnsStep, ScalarExample) {
  EmbeddingTable t{RowMatrix::Ones(1, 1), RowMatrix::Ones(1, 1)};
  sgns_step(t, 0, 0, {}, 0.1);
  EXPECT_NEAR(t.target(0, 0), 1.0 + 0.1 * (1.0 - 1.0 / (1.0 + std::exp(-1.0))), 1e-15);
  EXPECT_NEAR(t.target(0, 0), 1.02689, 1e-5);
}

TEST(SgnsGradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    EmbeddingTable t = random_embeddings(rng, 10, 8);
    const WordId target = 0, context = 1;
    const std::vector<WordId> negs{2, 3, 4, 5, 6};
    const SgnsGradient g = sgns_gradient(t, target, context, negs);
    auto j = [&] { return sgns_objective(t, target, context, negs); };
    EXPECT_NEAR(g.objective, j(), 1e-12);
    EXPECT_LE(rel_err(g.target, fd_rows(t, &EmbeddingTable::target, target, j)), 1e-6);
    EXPECT_LE(rel_err(g.context, fd_rows(t, &EmbeddingTable::context, context, j)), 1e-6);
    for (std::size_t k = 0; k < negs.size(); ++k)
      EXPECT_LE(rel_err(g.negatives[k], fd_rows(t, &EmbeddingTable::context, negs[k], j)), 1e-6);
  }
}

TEST(SgnsStep, AscendsObjectiveForSmallRate) {
  std::mt19937_64 rng(7);
  EmbeddingTable t = random_embeddings(rng, 6, 8);
  const std::vector<WordId> negs{2, 3};
  const double before = sgns_objective(t, 0, 1, negs);
  EXPECT_NEAR(sgns_step(t, 0, 1, negs, 1e-3), before, 1e-15);
  EXPECT_GT(sgns_objective(t, 0, 1, negs), before);
}

TEST(SelectSense, Examples) {
  const Matrix b = cols({{1, 0}, {0, 1}, {0.3, 0.7}});
  EXPECT_EQ(select_sense(b, b.col(2), SenseMetric::cosine), 2);
  EXPECT_EQ(select_sense(b, b.col(2), SenseMetric::euclidean), 2);
  EXPECT_EQ(select_sense(cols({{1, 0}, {0, 1}}), v2(0.9, 0.1), SenseMetric::cosine), 0);

  const Matrix disagree = cols({{2, 0}, {0.6, 0.8}});
  EXPECT_EQ(select_sense(disagree, v2(1, 0), SenseMetric::cosine), 0);
  EXPECT_EQ(select_sense(disagree, v2(1, 0), SenseMetric::euclidean), 1);
  EXPECT_NEAR((disagree.col(1) - v2(1, 0)).norm(), 0.894, 1e-3);
}

TEST(SelectSense, TiesAndZeroContext) {
  EXPECT_EQ(select_sense(cols({{1, 0}, {1, 0}}), v2(1, 0), SenseMetric::cosine), 0);
  EXPECT_EQ(select_sense(cols({{0, 1}, {1, 0}}), v2(1, 1), SenseMetric::euclidean), 0);
  // zero context: cosine falls back to Euclidean, picking the shortest column
  EXPECT_EQ(select_sense(cols({{3, 0}, {0.1, 0}, {1, 1}}), v2(0, 0), SenseMetric::cosine), 1);
}

TEST(MsWord2dmGradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(202);
  for (int trial = 0; trial < 100; ++trial) {
    SenseTable t = random_senses(rng, 12, 8, 5);
    const WordId target = 0;
    const std::vector<WordId> ctx{1, 2, 3, 4}, negs{5, 6, 7, 8, 9};
    const SenseGradient g = ms_word2dm_gradient(t, target, ctx, negs, SenseMetric::cosine);

    Vector c = Vector::Zero(8);
    for (WordId w : ctx) c += t.context.row(w).transpose();
    const Eigen::Index col = ref_select_cosine(t.senses[0], c);
    ASSERT_EQ(g.column, col);

    auto j = [&] { return sense_objective(t, target, ctx, negs, col); };
    EXPECT_NEAR(g.objective, j(), 1e-12);

    const double h = 1e-5;
    Vector fd(8);
    for (Eigen::Index k = 0; k < 8; ++k) {
      double& x = t.senses[0](k, col);
      const double keep = x;
      x = keep + h;
      const double up = j();
      x = keep - h;
      const double down = j();
      x = keep;
      fd[k] = (up - down) / (2 * h);
    }
    EXPECT_LE(rel_err(g.senses.col(col), fd), 1e-6);
    for (Eigen::Index other = 0; other < 5; ++other) {
      if (other == col) continue;
      EXPECT_TRUE(g.senses.col(other).isZero(0.0));
    }
    for (WordId w : ctx) EXPECT_LE(rel_err(g.per_context, fd_rows(t, &SenseTable::context, w, j)), 1e-6);
    for (std::size_t k = 0; k < negs.size(); ++k)
      EXPECT_LE(rel_err(g.negatives[k], fd_rows(t, &SenseTable::context, negs[k], j)), 1e-6);
  }
}

TEST(Word2dmGradient, MatchesFiniteDifferencesOverAllColumns) {
  std::mt19937_64 rng(303);
  for (int trial = 0; trial < 30; ++trial) {
    SenseTable t = random_senses(rng, 10, 6, 3);
    const std::vector<WordId> ctx{1, 2}, negs{3, 4, 5};
    const SenseGradient g = word2dm_gradient(t, 0, ctx, negs);
    EXPECT_EQ(g.column, -1);
    auto j = [&] {
      double s = 0.0;
      for (Eigen::Index col = 0; col < 3; ++col) s += sense_objective(t, 0, ctx, negs, col);
      return s;
    };
    EXPECT_NEAR(g.objective, j(), 1e-12);
    const double h = 1e-5;
    for (Eigen::Index col = 0; col < 3; ++col) {
      Vector fd(6);
      for (Eigen::Index k = 0; k < 6; ++k) {
        double& x = t.senses[0](k, col);
        const double keep = x;
        x = keep + h;
        const double up = j();
        x = keep - h;
        const double down = j();
        x = keep;
        fd[k] = (up - down) / (2 * h);
      }
      EXPECT_LE(rel_err(g.senses.col(col), fd), 1e-6);
    }
    EXPECT_LE(rel_err(g.per_context, fd_rows(t, &SenseTable::context, 1, j)), 1e-6);
  }
}

TEST(MsWord2dmStep, OnlySelectedColumnChanges) {
  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 200; ++trial) {
    SenseTable t = random_senses(rng, 10, 8, 5);
    const std::vector<WordId> ctx{1, 2, 3}, negs{4, 5, 6};
    const Matrix before = t.senses[0];
    const auto metric = trial % 2 ? SenseMetric::cosine : SenseMetric::euclidean;
    const Eigen::Index col = ms_word2dm_gradient(t, 0, ctx, negs, metric).column;
    ms_word2dm_step(t, 0, ctx, negs, 0.05, metric);
    for (Eigen::Index j = 0; j < 5; ++j) {
      const bool same = std::memcmp(before.col(j).data(), t.senses[0].col(j).data(), 8 * sizeof(double)) == 0;
      EXPECT_EQ(same, j != col) << "column " << j;
    }
  }
}

TEST(MsWord2dmStep, ZeroTablesDoNotMoveAndEmptyContextIsSkipped) {
  SenseTable t;
  t.senses.assign(4, Matrix::Zero(3, 2));
  t.context = RowMatrix::Zero(4, 3);
  const std::vector<WordId> ctx{1}, negs{2, 3};
  ms_word2dm_step(t, 0, ctx, negs, 0.5, SenseMetric::cosine);
  for (const auto& b : t.senses) EXPECT_TRUE(b.isZero(0.0));
  EXPECT_TRUE(t.context.isZero(0.0));

  std::mt19937_64 rng(1);
  SenseTable r = random_senses(rng, 4, 3, 2);
  const SenseTable copy = r;
  EXPECT_EQ(ms_word2dm_step(r, 0, {}, negs, 0.5, SenseMetric::cosine), 0.0);
  EXPECT_EQ(r.senses[0], copy.senses[0]);
  EXPECT_EQ(r.context, copy.context);
}

TEST(Init, SenseColumnsAreDistinctAndInRange) {
  const SenseTable t = init_senses(50, 10, 5, 9);
  for (const auto& b : t.senses) {
    EXPECT_LE(b.cwiseAbs().maxCoeff(), 0.5 / 10);
    for (Eigen::Index i = 0; i < b.cols(); ++i)
      for (Eigen::Index j = i + 1; j < b.cols(); ++j) EXPECT_NE(b.col(i), b.col(j));
  }
  EXPECT_TRUE(t.context.isZero(0.0));
}

TEST(TrainConfig, Validation) {
  TrainConfig c;
  EXPECT_NO_THROW(c.validate());
  c.lr_end = c.lr_start * 1e-5;
  EXPECT_THROW(c.validate(), UsageError);
  c = {};
  c.senses = 0;
  EXPECT_THROW(c.validate(), UsageError);
}

namespace {

struct Fixture {
  Vocabulary vocab;
  std::vector<std::vector<WordId>> ids;
};

Fixture encode_corpus(const test_support::Sentences& s) {
  Fixture f{build_vocab(s, 1), {}};
  f.ids = encode(s, f.vocab);
  return f;
}

double cos_rows(const RowMatrix& m, WordId a, WordId b) {
  return m.row(a).dot(m.row(b)) / (m.row(a).norm() * m.row(b).norm());
}

}  // namespace

TEST(Train, SgnsSeparatesCliques) {
  const Fixture f = encode_corpus(test_support::clique_corpus(1, 2000));
  TrainConfig cfg;
  cfg.variant = Variant::sgns;
  cfg.dim = 10;
  cfg.epochs = 5;
  cfg.subsample = 1.0;
  cfg.negatives = 2;
  TrainStats stats;
  const auto t = std::get<EmbeddingTable>(train(f.ids, f.vocab, cfg, nullptr, &stats));
  const auto a = f.vocab.id("a"), b = f.vocab.id("b"), x = f.vocab.id("x");
  EXPECT_GT(cos_rows(t.target, a, b), cos_rows(t.target, a, x));
  EXPECT_EQ(stats.epoch_objective.size(), 5u);
}

TEST(Train, MsWord2dmSeparatesCliques) {
  const Fixture f = encode_corpus(test_support::clique_corpus(2, 2000));
  TrainConfig cfg;
  cfg.dim = 10;
  cfg.senses = 3;
  cfg.subsample = 1.0;
  cfg.negatives = 2;
  const auto t = std::get<SenseTable>(train(f.ids, f.vocab, cfg));
  const DensityStore s = density_store(t, f.vocab);
  EXPECT_GT(similarity(s.at("a"), s.at("b")), similarity(s.at("a"), s.at("x")));
}

TEST(Train, DeterministicAndReportsProgress) {
  const Fixture f = encode_corpus(test_support::planted_corpus(3, 5000));
  for (Variant v : {Variant::sgns, Variant::word2dm, Variant::ms_word2dm}) {
    TrainConfig cfg;
    cfg.variant = v;
    cfg.dim = 8;
    cfg.epochs = 1;
    cfg.subsample = 1e-3;
    std::ostringstream p1, p2;
    const TrainedModel a = train(f.ids, f.vocab, cfg, &p1);
    const TrainedModel b = train(f.ids, f.vocab, cfg, &p2);
    EXPECT_EQ(p1.str(), p2.str());
    EXPECT_EQ(p1.str().rfind("1\t", 0), 0u);
    if (v == Variant::sgns) {
      EXPECT_EQ(std::get<EmbeddingTable>(a).target, std::get<EmbeddingTable>(b).target);
      EXPECT_EQ(std::get<EmbeddingTable>(a).context, std::get<EmbeddingTable>(b).context);
    } else {
      EXPECT_EQ(std::get<SenseTable>(a).senses, std::get<SenseTable>(b).senses);
      EXPECT_EQ(std::get<SenseTable>(a).context, std::get<SenseTable>(b).context);
    }
  }
}

TEST(Train, PlantedWordGetsTwoSenses) {
  const Fixture f = encode_corpus(test_support::planted_corpus(4, 100000));
  TrainConfig cfg;
  cfg.dim = 20;
  cfg.senses = 5;
  cfg.subsample = 1.0;
  const auto t = std::get<SenseTable>(train(f.ids, f.vocab, cfg));
  const EigenSystem es = eigendecompose(finalize_density(t, f.vocab, "bank"));
  EXPECT_GE((es.eigenvalues.array() > 0.1).count(), 2);
}

TEST(Train, Errors) {
  const Fixture f = encode_corpus({{"a", "b"}});
  TrainConfig cfg;
  cfg.dim = 4;
  EXPECT_THROW(train({{}, {}}, f.vocab, cfg), DataError);
  EXPECT_THROW(train(f.ids, Vocabulary{}, cfg), DataError);
  cfg.epochs = 0;
  EXPECT_THROW(train(f.ids, f.vocab, cfg), UsageError);
}

TEST(Train, ThreadedModeRunsAndStaysFinite) {
  const Fixture f = encode_corpus(test_support::planted_corpus(5, 20000));
  TrainConfig cfg;
  cfg.dim = 8;
  cfg.epochs = 1;
  cfg.threads = 3;
  cfg.subsample = 1.0;
  const auto t = std::get<SenseTable>(train(f.ids, f.vocab, cfg));
  for (const auto& b : t.senses) EXPECT_TRUE(b.allFinite());
}

TEST(FinalizeDensity, ErrorsAndPsd) {
  const Vocabulary v({{"a", 2}, {"b", 1}});
  SenseTable t;
  t.senses = {Matrix::Zero(3, 2), Matrix::Ones(3, 2)};
  t.context = RowMatrix::Zero(2, 3);
  EXPECT_THROW(finalize_density(t, v, "a"), NumericError);
  EXPECT_THROW(finalize_density(t, v, "zz"), OovError);
  std::mt19937_64 rng(6);
  for (int i = 0; i < 50; ++i) {
    t.senses[1] = oracle::random_gaussian(3, 2, rng);
    const DensityMatrix a = finalize_density(t, v, "b");
    EXPECT_GE(oracle::jacobi(a.data()).values.back(), -1e-10);
    const Matrix bbt = t.senses[1] * t.senses[1].transpose();
    EXPECT_LE((a.data() - bbt / bbt.trace()).norm(), 1e-14);
  }
}

TEST(VectorsText, RoundTripAndHeaderless) {
  RowMatrix m(2, 3);
  m << 0.1, -2, 3.5e-7, 4, 5, 6;
  const WordVectors v({"x", "y"}, m);
  const std::string text = vectors_to_text(v);
  EXPECT_EQ(text.substr(0, 4), "2 3\n");
  const WordVectors back = vectors_from_text(text);
  EXPECT_EQ(*back.find("x"), Vector(m.row(0).transpose()));
  const WordVectors glove = vectors_from_text("x 1 2\ny 3 4\n");
  EXPECT_EQ(glove.dim(), 2);
  EXPECT_EQ(glove.size(), 2u);
  EXPECT_THROW(vectors_from_text("x 1 2\ny 3\n"), DataError);
}

TEST(SenseStore, B1RoundTrip) {
  test_support::TempDir dir;
  std::mt19937_64 rng(8);
  const Vocabulary v({{"a", 3}, {"b", 2}, {"c", 1}});
  SenseTable t = random_senses(rng, 3, 4, 2);
  write_b1(dir.path() / "senses.json", t, v);
  const LoadedSenseTable back = read_b1(dir.path() / "senses.json");
  EXPECT_EQ(back.words, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(back.table.senses, t.senses);
  EXPECT_EQ(back.table.context, t.context);
}
