#include <gtest/gtest.h>

#include "criteria.hpp"
#include "fieldcalc/parser.hpp"
#include "gen.hpp"

namespace fc = fieldcalc;

TEST(TypePreservation, GeneratedExpressionsUnderGeneratedEnvironments) {
  auto o = fc::testing::check_type_preservation(500, 20241015);
  EXPECT_TRUE(o.pass) << o.detail;
  EXPECT_LT(o.seconds, 60.0);
}

TEST(TypePreservation, OtherSeeds) {
  for (std::uint64_t seed : {1, 2, 3}) {
    auto o = fc::testing::check_type_preservation(100, seed);
    EXPECT_TRUE(o.pass) << "seed " << seed << ": " << o.detail;
  }
}

TEST(TypePreservation, GeneratorHitsEveryTarget) {
  std::mt19937_64 rng(7);
  for (auto t : {fc::testing::GenType::Num, fc::testing::GenType::Bool,
                 fc::testing::GenType::FieldNum, fc::testing::GenType::FieldBool,
                 fc::testing::GenType::Thunk}) {
    auto g = fc::testing::gen_typed(rng, t);
    EXPECT_TRUE(g.expr);
    EXPECT_TRUE(g.type);
  }
}

TEST(TypePreservation, WellFormedTreeRejectsWrongShape) {
  auto e = fc::parse_expr("nbr{1}");
  fc::Program p{{}, e};
  auto leaf = fc::make_tree(fc::Value::local(fc::make_num(1)));
  std::string why;
  EXPECT_FALSE(fc::testing::well_formed_tree(p, e, leaf, &why));
  EXPECT_FALSE(why.empty());
}
