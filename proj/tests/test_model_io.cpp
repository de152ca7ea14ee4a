#include "seasonal_ruin/model_io.hpp"

#include "common.hpp"

#include <gtest/gtest.h>

using namespace seasonal_ruin;

TEST(ModelIo, ParsesExampleOne) {
  auto m = parse_model(
      R"({"kappa":2,"seasons":[{"type":"poisson","lambda":1.0,"shift":0},{"type":"poisson","lambda":2.0,"shift":0}]})");
  EXPECT_EQ(m.kappa, 2);
  ASSERT_EQ(m.periods(), 2);
  EXPECT_TRUE(m.seasons[0].is_poisson());
  EXPECT_DOUBLE_EQ(m.seasons[1].lambda(), 2.0);
}

TEST(ModelIo, ParsesExampleThree) {
  auto m = parse_model(
      R"({"kappa":3,"seasons":[{"type":"table","probs":[0.4096,0.4096,0.1536,0.0256,0.0016]},{"type":"table","probs":[0.04,0.32,0.64]}]})");
  EXPECT_EQ(m.kappa, 3);
  EXPECT_EQ(m.seasons[1].probs(), (std::vector<double>{0.04, 0.32, 0.64}));
}

TEST(ModelIo, Rejections) {
  EXPECT_THROW(parse_model(R"({"kappa":0,"seasons":[{"type":"table","probs":[1]}]})"), ValidationError);
  EXPECT_THROW(parse_model(R"({"kappa":1,"seasons":[]})"), ValidationError);
  EXPECT_THROW(parse_model(R"({"kappa":1,"seasons":[{"type":"table","probs":[0.5,0.6]}]})"), ValidationError);
  EXPECT_THROW(parse_model(R"({"kappa":1,"seasons":[{"type":"table","probs":[1.2,-0.2]}]})"), ValidationError);
  EXPECT_THROW(parse_model(R"({"kappa":1,"seasons":[{"type":"gamma"}]})"), ValidationError);
  EXPECT_THROW(parse_model(R"({"kappa":1,"seasons":[{"type":"table","probs":[1]}],"extra":1})"), ValidationError);
  EXPECT_THROW(parse_model(R"({"kappa":1,"seasons":[)"), ParseError);
  EXPECT_THROW(load_model("/nonexistent/model.json"), ParseError);
}

TEST(ModelIo, ErrorNamesField) {
  try {
    parse_model(R"({"kappa":1,"seasons":[{"type":"table","probs":[1]},{"type":"table","probs":[0.5,"x"]}]})");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("$.seasons[1].probs[1]"), std::string::npos) << e.what();
  }
}

TEST(ModelIo, RoundTrip) {
  for (const char* name : {"example1", "example2", "example3", "example4", "degenerate"}) {
    auto m = testing_support::fixture(name);
    auto again = parse_model(emit_model(m));
    EXPECT_EQ(again.kappa, m.kappa);
    ASSERT_EQ(again.periods(), m.periods());
    for (long k = 1; k <= m.periods(); ++k) {
      for (long i = 0; i < 12; ++i) EXPECT_DOUBLE_EQ(pmf(again.claim(k), i), pmf(m.claim(k), i));
    }
  }
}
