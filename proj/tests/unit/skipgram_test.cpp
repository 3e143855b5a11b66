#include <gtest/gtest.h>

#include "mrcnn/errors.hpp"
#include "mrcnn/rng.hpp"
#include "mrcnn/skipgram.hpp"

using mrcnn::TokenId;

namespace {

// Token 2 ("a") always appears next to 3 ("b"); 4 ("z") lives in separate
// documents with its own companions 5..9.
std::vector<std::vector<TokenId>> cooccurrence_corpus() {
  mrcnn::Rng rng(3);
  std::vector<std::vector<TokenId>> corpus;
  for (int d = 0; d < 300; ++d) {
    std::vector<TokenId> doc;
    const bool ab = d % 2 == 0;
    for (int i = 0; i < 12; ++i) {
      if (ab) {
        doc.push_back(i % 3 == 0 ? 2 : i % 3 == 1 ? 3 : static_cast<TokenId>(10 + rng.below(5)));
      } else {
        doc.push_back(i % 3 == 0 ? 4 : static_cast<TokenId>(5 + rng.below(5)));
      }
    }
    corpus.push_back(doc);
  }
  return corpus;
}

}  // namespace

TEST(SkipGram, CooccurringTokensEndUpCloser) {
  mrcnn::SkipGramConfig c;
  c.dim = 16;
  c.window = 2;
  c.epochs = 5;
  const auto v = mrcnn::pretrain_skipgram(cooccurrence_corpus(), 15, c);
  EXPECT_GT(mrcnn::cosine_similarity(v.row(2), v.row(3)),
            mrcnn::cosine_similarity(v.row(2), v.row(4)));
}

TEST(SkipGram, DeterministicAndZeroEpochsKeepsInit) {
  mrcnn::SkipGramConfig c;
  c.dim = 8;
  c.epochs = 2;
  const auto corpus = cooccurrence_corpus();
  EXPECT_EQ(mrcnn::pretrain_skipgram(corpus, 15, c), mrcnn::pretrain_skipgram(corpus, 15, c));
  c.epochs = 0;
  const auto init = mrcnn::pretrain_skipgram(corpus, 15, c);
  for (std::size_t r = 2; r < init.rows(); ++r)
    for (double x : init.row(r)) EXPECT_LE(std::abs(x), 0.5 / 8);
}

TEST(SkipGram, WindowCoveringEverySequenceIsAnError) {
  mrcnn::SkipGramConfig c;
  c.window = 5;
  const std::vector<std::vector<int>> short_docs{{2, 3, 4}};
  EXPECT_THROW(mrcnn::pretrain_skipgram(short_docs, 5, c), mrcnn::DataError);
  EXPECT_THROW(mrcnn::pretrain_skipgram(std::vector<std::vector<int>>{}, 5, c), mrcnn::DataError);
}
