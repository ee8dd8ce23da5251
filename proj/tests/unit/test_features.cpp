#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "opentrend/features.hpp"
#include "support/test_support.hpp"

namespace opentrend {
namespace {

using testing::random_series;
using testing::series_from;

TEST(Nowcast, Examples) {
  const auto flat = nowcast({Date{2020, 1, 1}, 100, 100, 100, 100});
  EXPECT_EQ(flat.r_hi, 0.0);
  EXPECT_EQ(flat.r_lo, 0.0);
  EXPECT_EQ(flat.r_cl, 0.0);

  const double e = std::exp(1.0);
  const auto up = nowcast({Date{2020, 1, 1}, 100, 100 * e, 100, 100 * e});
  EXPECT_NEAR(up.r_hi, 1.0, 1e-12);
  EXPECT_NEAR(up.r_lo, 0.0, 1e-12);
  EXPECT_NEAR(up.r_cl, 1.0, 1e-12);

  const auto mixed = nowcast({Date{2020, 1, 1}, 100, 110, 95, 105});
  EXPECT_NEAR(mixed.r_hi, std::log(1.10), 1e-12);
  EXPECT_NEAR(mixed.r_lo, std::log(0.95), 1e-12);
  EXPECT_NEAR(mixed.r_cl, std::log(1.05), 1e-12);
}

TEST(Nowcast, OrderingAndScaleInvariance) {
  Rng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const auto s = random_series(rng, 20);
    const double c = 0.05 + 30.0 * rng.uniform();
    const auto z = testing::scaled(s, c);
    for (std::size_t t = 0; t < s.size(); ++t) {
      const auto a = nowcast(s[t]);
      const auto b = nowcast(z[t]);
      EXPECT_GE(a.r_hi, 0.0);
      EXPECT_LE(a.r_lo, 0.0);
      EXPECT_LE(a.r_lo, a.r_cl);
      EXPECT_LE(a.r_cl, a.r_hi);
      EXPECT_NEAR(a.r_hi, b.r_hi, 1e-12);
      EXPECT_NEAR(a.r_lo, b.r_lo, 1e-12);
      EXPECT_NEAR(a.r_cl, b.r_cl, 1e-12);
    }
  }
}

TEST(Assemble, RowCounts) {
  Rng rng(32);
  IndicatorParams p;
  EXPECT_EQ(assemble(random_series(rng, 20), p).size(), 1u);
  EXPECT_EQ(assemble(random_series(rng, 1256), p).size(), 1237u);
  EXPECT_THROW(assemble(random_series(rng, 19), p), DataError);
  p.bollinger_paper_literal = true;
  EXPECT_EQ(assemble(random_series(rng, 60), p).size(), 60u - 38u);
}

TEST(Assemble, ConstantSeries) {
  const auto s = series_from(std::vector<std::array<double, 4>>(30, {7, 7, 7, 7}));
  for (const auto& row : assemble(s, {})) {
    const auto v = row.values();
    for (std::size_t j = 0; j < 13; ++j) EXPECT_NEAR(v[j], 7.0, 1e-12) << j;
    for (std::size_t j = 13; j < 16; ++j) EXPECT_EQ(v[j], 0.0);
  }
}

TEST(Assemble, ColumnOrderAndAlignment) {
  const auto& cols = canonical_columns();
  const std::vector<std::string> expected{"open", "high", "low",  "close", "dc_u", "dc_l",
                                          "dc_m", "bb_u", "bb_l", "bb_m",  "kc_u", "kc_l",
                                          "kc_m", "r_hi", "r_lo", "r_cl"};
  ASSERT_EQ(cols.size(), expected.size());
  for (std::size_t j = 0; j < cols.size(); ++j) EXPECT_EQ(cols[j], expected[j]);

  Rng rng(33);
  const auto s = random_series(rng, 45);
  IndicatorParams p;
  const auto rows = assemble(s, p);
  const auto dc = donchian(s, p.window_n);
  const auto bb = bollinger(s, p);
  const auto kc = keltner(s, p);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::size_t t = r + 19;
    const auto v = rows[r].values();
    EXPECT_EQ(rows[r].date, s[t].date);
    EXPECT_EQ(v[0], s[t].open);
    EXPECT_EQ(v[3], s[t].close);
    EXPECT_EQ(v[4], dc[t]->upper);
    EXPECT_EQ(v[5], dc[t]->lower);
    EXPECT_EQ(v[6], dc[t]->middle);
    EXPECT_EQ(v[7], bb[t]->upper);
    EXPECT_EQ(v[9], bb[t]->middle);
    EXPECT_EQ(v[11], kc[t]->lower);
    EXPECT_EQ(v[15], std::log(s[t].close / s[t].open));
    for (double x : v) EXPECT_TRUE(std::isfinite(x));
  }
}

TEST(Assemble, NoLookahead) {
  Rng rng(34);
  const auto s = random_series(rng, 80);
  const auto full = assemble(s, {});
  for (std::size_t len = 20; len <= s.size(); len += 7) {
    const auto part = assemble(s.prefix(len), {});
    ASSERT_EQ(part.size(), len - 19);
    EXPECT_EQ(part.back().values(), full[len - 20].values()) << len;
  }
}

TEST(Assemble, ScaleBehaviour) {
  Rng rng(35);
  const auto s = random_series(rng, 50);
  const double c = 3.7;
  const auto a = assemble(s, {});
  const auto b = assemble(testing::scaled(s, c), {});
  for (std::size_t r = 0; r < a.size(); ++r) {
    const auto va = a[r].values();
    const auto vb = b[r].values();
    for (std::size_t j = 0; j < 13; ++j) EXPECT_TRUE(testing::close_rel(va[j] * c, vb[j], 1e-10));
    for (std::size_t j = 13; j < 16; ++j) EXPECT_NEAR(va[j], vb[j], 1e-12);
  }
}

TEST(FeatureSetMask, ParseNameColumns) {
  EXPECT_EQ(FeatureSetMask::parse("INT").columns().size(), 4u);
  EXPECT_EQ(FeatureSetMask::parse("ALL").columns().size(), 16u);
  EXPECT_EQ(FeatureSetMask::all().columns().size(), 16u);
  EXPECT_EQ(FeatureSetMask::parse("INT+HIST+NOW"), FeatureSetMask::all());
  EXPECT_EQ(FeatureSetMask::parse("int + now").name(), "INT+NOW");
  EXPECT_EQ(FeatureSetMask::parse("INT+BB").columns(), (std::vector<std::size_t>{0, 1, 2, 3, 7, 8, 9}));
  EXPECT_EQ(FeatureSetMask::parse("DC+KC").name(), "DC+KC");
  EXPECT_EQ(FeatureSetMask::parse(FeatureSetMask::parse("INT+DC+NOW").name()),
            FeatureSetMask::parse("INT+DC+NOW"));
  EXPECT_THROW(FeatureSetMask::parse("FOO"), std::invalid_argument);
  EXPECT_THROW(FeatureSetMask::parse(""), std::invalid_argument);

  const auto defaults = default_feature_sets();
  ASSERT_EQ(defaults.size(), 4u);
  EXPECT_EQ(defaults[0].name(), "INT");
  EXPECT_EQ(defaults[1].name(), "INT+HIST");
  EXPECT_EQ(defaults[2].name(), "INT+NOW");
  EXPECT_EQ(defaults[3].name(), "INT+HIST+NOW");
}

TEST(Select, ColumnsAndNames) {
  Rng rng(36);
  const auto rows = assemble(random_series(rng, 40), {});
  const auto m = select(rows, FeatureSetMask::parse("INT+NOW"));
  EXPECT_EQ(m.cols(), 7u);
  EXPECT_EQ(m.rows(), rows.size());
  EXPECT_EQ(m.columns(),
            (std::vector<std::string>{"open", "high", "low", "close", "r_hi", "r_lo", "r_cl"}));
  EXPECT_EQ(m.at(3, 6), rows[3].values()[15]);
  EXPECT_EQ(select(rows, FeatureSetMask::all()).cols(), 16u);
  EXPECT_THROW(select({}, FeatureSetMask::all()), std::invalid_argument);
  EXPECT_THROW(select(rows, FeatureSetMask{}), std::invalid_argument);
}

TEST(Select, DroppingAGenreRemovesExactlyItsColumns) {
  Rng rng(37);
  const auto rows = assemble(random_series(rng, 30), {});
  const auto all = select(rows, FeatureSetMask::all());
  const std::vector<std::pair<std::string, std::vector<std::string>>> cases = {
      {"HIST+NOW", {"open", "high", "low", "close"}},
      {"INT+NOW", {"dc_u", "dc_l", "dc_m", "bb_u", "bb_l", "bb_m", "kc_u", "kc_l", "kc_m"}},
      {"INT+HIST", {"r_hi", "r_lo", "r_cl"}},
      {"INT+BB+KC+NOW", {"dc_u", "dc_l", "dc_m"}},
      {"INT+DC+KC+NOW", {"bb_u", "bb_l", "bb_m"}},
      {"INT+DC+BB+NOW", {"kc_u", "kc_l", "kc_m"}},
  };
  for (const auto& [spec, dropped] : cases) {
    const auto part = select(rows, FeatureSetMask::parse(spec));
    std::vector<std::string> expected;
    for (const auto& name : all.columns()) {
      if (std::find(dropped.begin(), dropped.end(), name) == dropped.end()) expected.push_back(name);
    }
    EXPECT_EQ(part.columns(), expected) << spec;
    for (std::size_t k = 0; k < part.cols(); ++k) {
      const auto j = static_cast<std::size_t>(
          std::find(all.columns().begin(), all.columns().end(), part.columns()[k]) -
          all.columns().begin());
      for (std::size_t i = 0; i < part.rows(); ++i) EXPECT_EQ(part.at(i, k), all.at(i, j));
    }
  }
}

TEST(FeatureMatrix, SliceTakeAndCsv) {
  const auto m = testing::matrix_from({1, 2, 3, 4, 5, 6}, 2, {"a", "b"});
  const auto s = m.slice(1, 3);
  EXPECT_EQ(s.rows(), 2u);
  EXPECT_EQ(s.at(0, 0), 3);
  const std::vector<std::size_t> idx{2, 0};
  const auto t = m.take(idx);
  EXPECT_EQ(t.at(0, 1), 6);
  EXPECT_EQ(t.at(1, 0), 1);
  EXPECT_THROW(m.slice(2, 4), std::out_of_range);

  std::ostringstream out;
  const std::vector<std::vector<unsigned char>> labels{{1, 0}};
  const std::vector<std::string> names{"y_op"};
  write_feature_csv(out, m, labels, names);
  EXPECT_EQ(out.str(),
            "date,a,b,y_op\n2020-01-01,1,2,1\n2020-01-02,3,4,0\n2020-01-03,5,6,\n");
}

}  // namespace
}  // namespace opentrend
