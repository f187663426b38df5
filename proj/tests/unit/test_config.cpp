#include <gtest/gtest.h>

#include "qspike/config.hpp"
#include "qspike/error.hpp"

using namespace qspike;

TEST(Config, SectionsAndComments) {
  const auto cfg = config::ConfigFile::parse(
      "# experiment\n"
      "seed = 3\n"
      "[train]\n"
      "epochs = 30   \n"
      "; batch\n"
      "batch_size=32\n"
      "[ model ]\n"
      "head = quantum\n");
  EXPECT_EQ(cfg.get("seed"), "3");
  EXPECT_EQ(cfg.get("train.epochs"), "30");
  EXPECT_EQ(cfg.get("train.batch_size"), "32");
  EXPECT_EQ(cfg.get("model.head"), "quantum");
  EXPECT_FALSE(cfg.get("model.qubits").has_value());
  EXPECT_EQ(cfg.entries().size(), 4u);
}

TEST(Config, LaterKeysOverrideEarlier) {
  const auto cfg = config::ConfigFile::parse("[a]\nx=1\nx=2\n");
  EXPECT_EQ(cfg.get("a.x"), "2");
}

TEST(Config, Malformed) {
  EXPECT_THROW(config::ConfigFile::parse("[train\n"), FormatError);
  EXPECT_THROW(config::ConfigFile::parse("just words\n"), FormatError);
  EXPECT_THROW(config::ConfigFile::parse("= 3\n"), FormatError);
  EXPECT_THROW(config::ConfigFile::load("/nonexistent/qspike.ini"), IoError);
}
