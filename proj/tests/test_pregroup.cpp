#include <gtest/gtest.h>

#include "dmsem/pregroup.hpp"
#include "support/oracles.hpp"
#include "support/pregroup_codes.hpp"

using namespace dmsem;
using test_support::as_types;

TEST(PregroupType, ParseAndPrint) {
  const PregroupType t = PregroupType::parse("n^r s n^l");
  ASSERT_EQ(t.factors().size(), 3u);
  EXPECT_EQ(t.factors()[0].adjoint, Adjoint::right);
  EXPECT_EQ(t.factors()[2].adjoint, Adjoint::left);
  EXPECT_EQ(t.str(), "n^r s n^l");
  EXPECT_THROW(PregroupType::parse(""), DataError);
  EXPECT_THROW(PregroupType::parse("n^x"), DataError);
  EXPECT_THROW(PregroupType::parse("^l"), DataError);
}

TEST(PregroupReduce, TransitiveSentence) {
  const auto n = PregroupType::parse("n");
  const Reduction r = pregroup_reduce({n, PregroupType::parse("n^r s n^l"), n});
  EXPECT_TRUE(r.grammatical);
  EXPECT_EQ(r.residual_str(), "s");
}

TEST(PregroupReduce, Examples) {
  EXPECT_TRUE(pregroup_reduce({PregroupType::parse("s")}).grammatical);
  const Reduction nn = pregroup_reduce({PregroupType::parse("n"), PregroupType::parse("n")});
  EXPECT_FALSE(nn.grammatical);
  EXPECT_EQ(nn.residual_str(), "n n");
  const Reduction empty = pregroup_reduce({PregroupType::parse("n^l"), PregroupType::parse("n")});
  EXPECT_FALSE(empty.grammatical);
  EXPECT_EQ(empty.residual_str(), "1");
  // adjective-noun object: n (n^r s n^l) (n n^l) n
  EXPECT_TRUE(pregroup_reduce({PregroupType::parse("n"), PregroupType::parse("n^r s n^l"), PregroupType::parse("n n^l"),
                               PregroupType::parse("n")})
                  .grammatical);
  EXPECT_THROW(pregroup_reduce(std::span<const PregroupType>{}), DataError);
}

TEST(PregroupReduce, OrderDependenceIsResolvedByExistence) {
  // n^l n n^r reduces to n^r or n^l depending on which pair cancels first
  const auto forms = oracle::normal_forms({0, 1, 2});
  EXPECT_EQ(forms.size(), 2u);
  // with s on the right only one order leaves s: n^l n n^r s -> n^l s or n^r s; neither is s
  EXPECT_FALSE(pregroup_reduce({PregroupType::parse("n^l n n^r s")}).grammatical);
  // n n^r n s^... : n n^r (n^l)? keep a grammatical case needing a specific order
  EXPECT_TRUE(pregroup_reduce({PregroupType::parse("n n^r s")}).grammatical);
}

TEST(PregroupReduce, AgreesWithExhaustiveSearchUpToLengthEight) {
  std::size_t checked = 0, ambiguous = 0;
  std::vector<oracle::Code> x;
  const oracle::Code s_code = 4;  // base s, no adjoint
  for (std::size_t len = 1; len <= 8; ++len) {
    x.assign(len, 0);
    while (true) {
      const auto forms = oracle::normal_forms(x);
      const bool reaches_s = forms.count({s_code}) != 0;
      const Reduction r = pregroup_reduce(as_types(x));
      ASSERT_EQ(r.grammatical, reaches_s) << "length " << len << " case " << checked;
      if (!r.grammatical) {
        std::vector<oracle::Code> residual;
        for (const auto& t : r.residual) residual.push_back(test_support::encode(t));
        ASSERT_TRUE(forms.count(residual)) << "residual is not a reachable normal form";
      }
      if (forms.size() > 1) ++ambiguous;
      ++checked;
      std::size_t i = 0;
      while (i < len && ++x[i] == 6) x[i++] = 0;
      if (i == len) break;
    }
  }
  EXPECT_EQ(checked, 6u + 36 + 216 + 1296 + 7776 + 46656 + 279936 + 1679616);
  EXPECT_GT(ambiguous, 0u);
}

TEST(PregroupLexicon, DefaultsAndTsv) {
  const PregroupLexicon lex;
  EXPECT_EQ(lex.at("verb_svo").str(), "n^r s n^l");
  EXPECT_EQ(lex.at("adj").str(), "n n^l");
  const PregroupLexicon custom = PregroupLexicon::from_tsv("# comment\nadj\tn^r n\nverb_sv\tn^r s\n");
  EXPECT_EQ(custom.at("adj").str(), "n^r n");
  EXPECT_THROW(PregroupLexicon::from_tsv("adj n\n"), DataError);
  EXPECT_THROW(lex.at("adverb"), DataError);
}
