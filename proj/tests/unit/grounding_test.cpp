// Copyright 2026 The storyeval Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "storyeval/error.hpp"
#include "storyeval/grounding.hpp"

namespace storyeval {
namespace {

Matrix rows(std::vector<std::vector<float>> r)
{
  Matrix m(r.size(), r.front().size());
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = 0; j < r[i].size(); ++j)
      m(i, j) = r[i][j];
  return m;
}

TermEmbeddings terms_of(std::vector<std::string> names, Matrix m, std::vector<std::size_t> idx = {})
{
  TermEmbeddings t;
  t.terms = std::move(names);
  t.matrix = std::move(m);
  t.sentence_index = std::move(idx);
  return t;
}

TEST(Cosine, HandValues)
{
  const std::vector<float> e1{1, 0}, e2{0, 1}, d{1, 1};
  EXPECT_DOUBLE_EQ(cosine(e1, e1), 1.0);
  EXPECT_DOUBLE_EQ(cosine(e1, e2), 0.0);
  EXPECT_NEAR(cosine(d, e1), 0.70710678, 1e-8);
}

TEST(Cosine, ZeroNormAndMismatchAreErrors)
{
  const std::vector<float> z{0, 0}, e1{1, 0}, e3{1, 0, 0};
  EXPECT_THROW(cosine(z, e1), Error);
  EXPECT_THROW(cosine(e1, e3), Error);
}

TEST(TermAffinity, ExactMatchOrthogonalAndMax)
{
  const std::vector<RegionEmbeddings> regions{{"i", rows({{1, 0}, {0, 1}}), "e"}};
  const auto cfg = GroundingConfig::rovist_vg();
  EXPECT_DOUBLE_EQ(term_affinity(std::vector<float>{0, 3}, regions, cfg), 1.0);
  EXPECT_NEAR(term_affinity(std::vector<float>{1, 1}, regions, cfg), 0.70710678, 1e-8);
  const std::vector<RegionEmbeddings> one{{"i", rows({{1, 0}}), "e"}};
  EXPECT_DOUBLE_EQ(term_affinity(std::vector<float>{0, 1}, one, cfg), 0.0);
  EXPECT_DOUBLE_EQ(term_affinity(std::vector<float>{-1, 0}, one, cfg), 0.0);
  EXPECT_THROW(term_affinity(std::vector<float>{1, 0}, std::vector<RegionEmbeddings>{}, cfg), Error);
}

TEST(TermAffinity, RescaleHalfPlus)
{
  GroundingConfig cfg;
  cfg.negative_handling = NegativeHandling::RescaleHalfPlus;
  const std::vector<RegionEmbeddings> one{{"i", rows({{1, 0}}), "e"}};
  EXPECT_DOUBLE_EQ(term_affinity(std::vector<float>{-1, 0}, one, cfg), 0.0);
  EXPECT_DOUBLE_EQ(term_affinity(std::vector<float>{0, 1}, one, cfg), 0.5);
}

TEST(StoryGrounding, MeanOfAffinities)
{
  const std::vector<RegionEmbeddings> regions{{"i", rows({{1, 0}}), "e"}};
  const auto t = terms_of({"a", "b"}, rows({{1, 0}, {0, 1}}));
  const auto g = story_grounding(t.terms, t, regions, GroundingConfig::rovist_vg());
  EXPECT_DOUBLE_EQ(g.G, 0.5);
  EXPECT_FALSE(g.degenerate);
  ASSERT_EQ(g.per_term.size(), 2u);
  EXPECT_TRUE(g.per_term[1].kept);
}

TEST(StoryGrounding, GroovistDropsWeakTerms)
{
  const std::vector<RegionEmbeddings> regions{{"i", rows({{1, 0}}), "e"}};
  const auto t = terms_of({"a", "b"}, rows({{1, 0}, {0, 1}}));
  const auto g = story_grounding(t.terms, t, regions, GroundingConfig::groovist(0.3));
  EXPECT_DOUBLE_EQ(g.G, 1.0);
  EXPECT_FALSE(g.per_term[1].kept);
}

TEST(StoryGrounding, ConstantAffinityEitherVariant)
{
  const std::vector<RegionEmbeddings> regions{{"i", rows({{1, 0}}), "e"}};
  const auto t = terms_of({"a", "b", "c"}, rows({{1, 1}, {2, 2}, {3, 3}}));
  const double a = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(story_grounding(t.terms, t, regions, GroundingConfig::rovist_vg()).G, a, 1e-12);
  EXPECT_NEAR(story_grounding(t.terms, t, regions, GroundingConfig::groovist(0.3)).G, a, 1e-12);
}

TEST(StoryGrounding, ZeroNounsIsDegenerateZero)
{
  const std::vector<RegionEmbeddings> regions{{"i", rows({{1, 0}}), "e"}};
  const TermEmbeddings none;
  const auto g = story_grounding({}, none, regions, GroundingConfig::rovist_vg());
  EXPECT_EQ(g.G, 0.0);
  EXPECT_TRUE(g.degenerate);
}

TEST(StoryGrounding, NothingSurvivesFilterIsDegenerate)
{
  const std::vector<RegionEmbeddings> regions{{"i", rows({{1, 0}}), "e"}};
  const auto t = terms_of({"a"}, rows({{0, 1}}));
  const auto g = story_grounding(t.terms, t, regions, GroundingConfig::groovist(0.3));
  EXPECT_EQ(g.G, 0.0);
  EXPECT_TRUE(g.degenerate);
}

TEST(StoryGrounding, ErrorsNameTheRow)
{
  const std::vector<RegionEmbeddings> regions{{"img-9", rows({{1, 0}, {0, 0}}), "e"}};
  const auto t = terms_of({"a"}, rows({{1, 0}}));
  try {
    story_grounding(t.terms, t, regions, GroundingConfig::rovist_vg());
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("img-9"), std::string::npos);
  }
  const std::vector<RegionEmbeddings> ok{{"i", rows({{1, 0}}), "e"}};
  const auto bad = terms_of({"a", "zeroterm"}, rows({{1, 0}, {0, 0}}));
  try {
    story_grounding(bad.terms, bad, ok, GroundingConfig::rovist_vg());
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("zeroterm"), std::string::npos);
  }
  const auto nan = terms_of({"a"}, rows({{NAN, 0}}));
  EXPECT_THROW(story_grounding(nan.terms, nan, ok, GroundingConfig::rovist_vg()), Error);
}

TEST(StoryGrounding, NounCountMustMatchRows)
{
  const std::vector<RegionEmbeddings> regions{{"i", rows({{1, 0}}), "e"}};
  const auto t = terms_of({"a"}, rows({{1, 0}}));
  const std::vector<std::string> two{"a", "b"};
  EXPECT_THROW(story_grounding(two, t, regions, GroundingConfig::rovist_vg()), Error);
  EXPECT_THROW(story_grounding(t.terms, t, {}, GroundingConfig::rovist_vg()), Error);
}

TEST(StoryGrounding, AlignedPoolingUsesSentenceImage)
{
  const std::vector<RegionEmbeddings> regions{{"i0", rows({{1, 0}}), "e"}, {"i1", rows({{0, 1}}), "e"}};
  GroundingConfig cfg;
  cfg.pooling = RegionPooling::MaxOverAlignedImage;
  const auto t = terms_of({"a", "b"}, rows({{1, 0}, {1, 0}}), {0, 1});
  EXPECT_DOUBLE_EQ(story_grounding(t.terms, t, regions, cfg).G, 0.5);
  EXPECT_DOUBLE_EQ(story_grounding(t.terms, t, regions, GroundingConfig::rovist_vg()).G, 1.0);
}

TEST(GroundingConfig, ThresholdIffGroovist)
{
  GroundingConfig c = GroundingConfig::rovist_vg();
  EXPECT_NO_THROW(c.validate());
  c.filter_threshold = 0.2;
  EXPECT_THROW(c.validate(), Error);
  GroundingConfig g = GroundingConfig::groovist(0.3);
  EXPECT_NO_THROW(g.validate());
  g.filter_threshold.reset();
  EXPECT_THROW(g.validate(), Error);
  EXPECT_THROW(GroundingConfig::groovist(1.5).validate(), Error);
}

class RandomBundles : public ::testing::Test
{
protected:
  std::mt19937_64 rng{17};
  std::normal_distribution<float> gauss;

  Matrix random_matrix(std::size_t r, std::size_t d)
  {
    Matrix m(r, d);
    for (std::size_t i = 0; i < r; ++i)
      for (auto& x : m.row(i))
        x = gauss(rng);
    return m;
  }
};

TEST_F(RandomBundles, MatchesOracle)
{
  for (int b = 0; b < 100; ++b) {
    const std::size_t d = 2 + rng() % 8;
    std::vector<RegionEmbeddings> regions;
    std::vector<std::vector<std::vector<double>>> imgs;
    for (std::size_t i = 0; i < 1 + rng() % 4; ++i) {
      regions.push_back({"i", random_matrix(1 + rng() % 5, d), "e"});
      imgs.emplace_back();
      for (std::size_t r = 0; r < regions.back().matrix.rows(); ++r) {
        const auto row = regions.back().matrix.row(r);
        imgs.back().emplace_back(row.begin(), row.end());
      }
    }
    auto t = terms_of({}, random_matrix(1 + rng() % 6, d));
    std::vector<std::vector<double>> trows;
    for (std::size_t r = 0; r < t.matrix.rows(); ++r) {
      t.terms.push_back("t");
      trows.emplace_back(t.matrix.row(r).begin(), t.matrix.row(r).end());
    }
    EXPECT_NEAR(story_grounding(t.terms, t, regions, GroundingConfig::rovist_vg()).G, oracle::grounding(trows, imgs),
                1e-9);
    const auto g = story_grounding(t.terms, t, regions, GroundingConfig::groovist(0.4));
    for (const auto& pt : g.per_term)
      if (pt.kept)
        EXPECT_GE(pt.affinity, 0.4);
    EXPECT_NEAR(g.G, oracle::grounding(trows, imgs, 0.4), 1e-9);
  }
}

TEST_F(RandomBundles, RaisingOneAffinityNeverLowersG)
{
  for (int b = 0; b < 100; ++b) {
    const std::size_t d = 3;
    const std::vector<RegionEmbeddings> regions{{"i", random_matrix(4, d), "e"}};
    auto t = terms_of({"a", "b", "c"}, random_matrix(3, d));
    const auto before = story_grounding(t.terms, t, regions, GroundingConfig::rovist_vg());
    // Point term 0 straight at region 0: its affinity becomes 1.
    std::copy_n(regions[0].matrix.row(0).begin(), d, t.matrix.row(0).begin());
    const auto after = story_grounding(t.terms, t, regions, GroundingConfig::rovist_vg());
    EXPECT_GE(after.G + 1e-12, before.G);
  }
}

} // namespace
} // namespace storyeval
