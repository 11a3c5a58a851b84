// Copyright 2026 The storyeval Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <filesystem>
#include <random>
#include <unistd.h>

#include "storyeval/aggregate.hpp"
#include "storyeval/corpus.hpp"
#include "storyeval/grounding.hpp"
#include "storyeval/redundancy.hpp"
#include "storyeval/tensor.hpp"
#include "storyeval/textproc.hpp"

namespace {

using namespace storyeval;

Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937& rng)
{
  std::normal_distribution<float> n(0.0f, 1.0f);
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (auto& x : m.row(i))
      x = n(rng);
  return m;
}

const StorySequence& sample_story()
{
  static const StorySequence s{"bench", {}, {"We went to the lake for the weekend with our friends.",
                                            "The boat was ready at the dock early in the morning.",
                                            "Everyone jumped into the cold water and swam to the island.",
                                            "We had a great time at the lake and a great time on the boat.",
                                            "At the end of the day we watched the sunset from the pier."},
                               Author::human()};
  return s;
}

void BM_Distance(benchmark::State& state)
{
  const ScoreTriple h{"s", Author::human(), 0.9, 0.7, 0.95};
  const ScoreTriple m{"s", Author::model("m"), 0.8, 0.75, 0.9};
  for (auto _ : state)
    benchmark::DoNotOptimize(distance(h, m));
}
BENCHMARK(BM_Distance);

void BM_Tokenize(benchmark::State& state)
{
  const auto& s = sample_story();
  for (auto _ : state)
    for (const auto& sent : s.sentences)
      benchmark::DoNotOptimize(tokenize(sent));
}
BENCHMARK(BM_Tokenize);

void BM_StoryNonredundancy(benchmark::State& state)
{
  const auto& s = sample_story();
  const RedundancyConfig cfg;
  for (auto _ : state)
    benchmark::DoNotOptimize(story_nonredundancy(s, cfg));
}
BENCHMARK(BM_StoryNonredundancy);

// Five images with 36 regions each, as a detector would produce.
void BM_StoryGrounding(benchmark::State& state)
{
  const auto dims = static_cast<std::size_t>(state.range(0));
  const std::size_t n_terms = 20;
  std::mt19937 rng(5);
  std::vector<RegionEmbeddings> regions;
  for (int i = 0; i < 5; ++i)
    regions.push_back({"img" + std::to_string(i), random_matrix(36, dims, rng), "bench"});
  TermEmbeddings terms{{}, random_matrix(n_terms, dims, rng), "bench", {}};
  for (std::size_t t = 0; t < n_terms; ++t) {
    terms.terms.push_back("t" + std::to_string(t));
    terms.sentence_index.push_back(t % 5);
  }
  const auto cfg = state.range(1) ? GroundingConfig::groovist(0.05) : GroundingConfig{};
  for (auto _ : state)
    benchmark::DoNotOptimize(story_grounding(terms.terms, terms, regions, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n_terms * 5 * 36));
}
BENCHMARK(BM_StoryGrounding)->Args({512, 0})->Args({512, 1})->Args({2048, 0});

void BM_ReadTensor(benchmark::State& state)
{
  std::mt19937 rng(6);
  const auto m = random_matrix(36, 2048, rng);
  const auto path = std::filesystem::temp_directory_path() /
                    ("storyeval-bench-" + std::to_string(::getpid()) + ".f32");
  const auto sha = write_tensor(path, m);
  for (auto _ : state)
    benchmark::DoNotOptimize(read_tensor(path, 36, 2048, state.range(0) ? sha : std::string{}));
  std::filesystem::remove(path);
  state.SetBytesProcessed(state.iterations() * static_cast<long>(36 * 2048 * 4));
}
BENCHMARK(BM_ReadTensor)->Arg(0)->Arg(1);

} // namespace

BENCHMARK_MAIN();
