#include <gtest/gtest.h>

#include "helpers.hpp"
#include "qmrpm/errors.hpp"
#include "qmrpm/json_io.hpp"

using namespace qmrpm;
using testing_support::q;
using Json = json::Json;

TEST(JsonIo, Rationals) {
  EXPECT_EQ(json::rational(q(2, 4)), Json("1/2"));
  EXPECT_EQ(json::rational(Json("3/6")), q(1, 2));
  EXPECT_EQ(json::rational(Json(2)), q(2));
  EXPECT_THROW(json::rational(Json(0.5)), ValidationError);
  EXPECT_THROW(json::rational(Json("x")), ValidationError);
}

TEST(JsonIo, ModelsRoundTrip) {
  const auto X = testing_support::numbered_space(3);
  for (const auto& m : {RpmModel::empirical_fixed(Measure(X, {q(1, 2), q(1, 4), q(1, 4)}), 2),
                        RpmModel::empirical_dirichlet(Measure::uniform(X, q(1)), 3),
                        RpmModel::dirichlet(Measure(X, {q(1), q(2), q(1, 2)}))}) {
    const RpmModel back = json::model(X, json::model(m));
    EXPECT_EQ(back.kind(), m.kind());
    EXPECT_EQ(back.measure().weights(), m.measure().weights());
    EXPECT_EQ(json::model(back), json::model(m));
  }
}

TEST(JsonIo, ModelErrors) {
  const auto X = testing_support::numbered_space(2);
  EXPECT_THROW(json::model(X, Json::parse(R"({"model": "gamma"})")), ValidationError);
  EXPECT_THROW(json::model(X, Json::parse(R"({"model": "empirical-fixed", "p0": {"1": "1/2", "2": "1/2"}})")),
               ValidationError);
  EXPECT_THROW(json::model(X, Json::parse(R"({"model": "dirichlet", "alpha": {"9": "1/1"}})")), ValidationError);
  EXPECT_THROW(json::model(X, Json::parse(R"({"model": "empirical-fixed", "p0": {"1": "1/2", "2": "1/2"}, "N": 0})")),
               ValidationError);
}

TEST(JsonIo, KernelsRoundTrip) {
  const std::vector<Kernel> kernels{
      Kernel::identity(),
      Kernel::grid({q(0), q(1, 2)}, {q(1, 2), q(1)}, {{q(1, 3), q(2, 3)}, {q(0), q(1)}}),
      Kernel::scaled_beta(q(1, 2), q(3)),
      Kernel::beta_chain({{q(1), q(2)}, {q(1, 2), q(1, 2)}}),
      Kernel::increment({{q(0), q(1, 4)}, {q(1, 2), q(3, 4)}}),
  };
  for (const auto& k : kernels) {
    const Json j = json::kernel(k);
    EXPECT_EQ(json::kernel(json::kernel(j)), j) << j.dump();
  }
}

TEST(JsonIo, GridKernelErrors) {
  EXPECT_THROW(json::kernel(Json::parse(R"({"variant": "grid", "source": ["0/1"], "target": ["1/1"], "rows": {}})")),
               ValidationError);
  EXPECT_THROW(json::kernel(Json::parse(
                   R"({"variant": "grid", "source": ["0/1"], "target": ["1/1"], "rows": {"0/1": ["1/2"]}})")),
               ValidationError);
  EXPECT_THROW(json::kernel(Json::parse(R"({"variant": "spline"})")), ValidationError);
  EXPECT_THROW(json::kernel(Json::parse(R"({"source": []})")), ValidationError);
}

TEST(JsonIo, IncrementLawsAndNeutralVectors) {
  const Json j = Json::parse(R"({"support": ["0/1", "1/2"], "probs": ["1/3", "2/3"]})");
  EXPECT_EQ(json::increment_law(json::increment_law(j)), j);
  EXPECT_THROW(json::increment_law(Json::parse(R"({"support": ["0/1"], "probs": ["1/3", "2/3"]})")), ValidationError);
  EXPECT_THROW(json::increment_law(Json::parse(R"({"support": ["0/1", "0/1"], "probs": ["1/3", "2/3"]})")),
               ValidationError);
  EXPECT_THROW(json::neutral_vector(Json::array()), ValidationError);
  const Json nv = Json::array({j, j});
  EXPECT_EQ(json::neutral_vector(json::neutral_vector(nv)), nv);
}

TEST(JsonIo, ChainSpecRoundTrip) {
  const Json j = Json::parse(R"({
    "grid": ["1/4", "1/2", "1/1"],
    "initial": {"1/4": "1/2", "1/2": "1/2"},
    "kernels": [{"1/4": {"1/2": "1/2", "1/1": "1/2"}, "1/2": {"1/1": "1/1"}}]
  })");
  const ChainSpec c = json::chain_spec(j);
  EXPECT_EQ(c.length(), 2U);
  EXPECT_EQ(json::chain_spec(c), j);
  Json off = j;
  off["kernels"][0]["1/2"] = Json::parse(R"({"3/4": "1/1"})");
  EXPECT_THROW(json::chain_spec(off), ValidationError);
}

TEST(JsonIo, FSystemRoundTrip) {
  const auto X = testing_support::numbered_space(2);
  const Json j = Json::parse(R"([{"pair": [[], ["1"]], "support": ["1/2"], "probs": ["1/1"]}])");
  EXPECT_EQ(json::f_system(json::f_system(X, j)), j);
  EXPECT_THROW(json::f_system(X, Json::parse(R"([{"pair": [["1"]], "support": ["1/2"], "probs": ["1/1"]}])")),
               ValidationError);
}

TEST(JsonIo, ReportShape) {
  CheckReport r;
  r.check = "ck";
  r.add_input("subject", "m");
  r.compare("w", q(1, 2), q(1, 3));
  const Json j = json::report(r);
  EXPECT_EQ(j["check"], "ck");
  EXPECT_EQ(j["pass"], false);
  EXPECT_EQ(j["max_discrepancy"], "1/6");
  EXPECT_EQ(j["witnesses"].size(), 1U);
  EXPECT_FALSE(j.contains("wall_time_ms"));
  EXPECT_TRUE(json::report(r, true).contains("wall_time_ms"));
}
