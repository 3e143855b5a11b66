#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "mrcnn/embeddings.hpp"
#include "mrcnn/errors.hpp"
#include "mrcnn/vocabulary.hpp"

namespace fs = std::filesystem;
using mrcnn::Vocabulary;

namespace {

fs::path temp_file(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "mrcnn_embeddings_test";
  fs::create_directories(dir);
  return dir / name;
}

void write(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

const Vocabulary vocab({"alpha", "beta", "gamma"}, {"L"});

}  // namespace

TEST(Embeddings, FullCoverageLeavesOnlyUnkRandom) {
  const fs::path p = temp_file("full.txt");
  write(p, "3 2\nalpha 1 2\nbeta 3 4\ngamma 5 6\n");
  const auto e = mrcnn::load_text_embeddings(p, vocab, 2, 1);
  EXPECT_EQ(e.covered, 3u);
  EXPECT_EQ(e.total, 3u);
  EXPECT_EQ(e.coverage_report(), "3/3 (100.0%)");
  EXPECT_EQ(e.rows(0, 0), 0.0);
  EXPECT_EQ(e.rows(0, 1), 0.0);
  EXPECT_EQ(e.rows(2, 0), 1.0);
  EXPECT_EQ(e.rows(4, 1), 6.0);
  for (double v : e.rows.row(Vocabulary::kUnk)) EXPECT_LE(std::abs(v), 0.1);
}

TEST(Embeddings, ShortVectorNamesTheLine) {
  const fs::path p = temp_file("short.txt");
  write(p, "5 3\nalpha 1 2 3\nbeta 1 2\n");
  try {
    mrcnn::load_text_embeddings(p, vocab, 3, 1);
    FAIL() << "expected DataError";
  } catch (const mrcnn::DataError& e) {
    EXPECT_NE(std::string(e.what()).find(":3"), std::string::npos) << e.what();
  }
}

TEST(Embeddings, BadFloatAndHeaderMismatch) {
  const fs::path p = temp_file("bad.txt");
  write(p, "1 2\nalpha 1 x\n");
  EXPECT_THROW(mrcnn::load_text_embeddings(p, vocab, 2, 1), mrcnn::DataError);
  write(p, "1 3\nalpha 1 2 3\n");
  EXPECT_THROW(mrcnn::load_text_embeddings(p, vocab, 2, 1), mrcnn::DataError);
}

TEST(Embeddings, NoOverlapGivesRandomRowsAndZeroPad) {
  const fs::path p = temp_file("none.txt");
  write(p, "1 2\nzeta 1 2\n");
  const auto e = mrcnn::load_text_embeddings(p, vocab, 2, 7);
  EXPECT_EQ(e.covered, 0u);
  for (double v : e.rows.row(Vocabulary::kPad)) EXPECT_EQ(v, 0.0);
  for (std::size_t r = 1; r < e.rows.rows(); ++r)
    for (double v : e.rows.row(r)) EXPECT_LE(std::abs(v), mrcnn::kMissingInitRange);
}

TEST(Embeddings, WriteLoadRoundTrip) {
  const auto r = mrcnn::random_embeddings(vocab.size(), 4, 3);
  const fs::path p = temp_file("round.txt");
  mrcnn::write_text_embeddings(p, r.rows, vocab);
  const auto back = mrcnn::load_text_embeddings(p, vocab, 4, 99);
  for (std::size_t i = 2; i < vocab.size(); ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(back.rows(i, j), r.rows(i, j), 1e-6);
}

TEST(Embeddings, RandomInitIsSeeded) {
  EXPECT_EQ(mrcnn::random_embeddings(10, 3, 5).rows, mrcnn::random_embeddings(10, 3, 5).rows);
  EXPECT_NE(mrcnn::random_embeddings(10, 3, 5).rows, mrcnn::random_embeddings(10, 3, 6).rows);
}
