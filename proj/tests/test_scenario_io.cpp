#include <gtest/gtest.h>

#include <filesystem>

#include "oracle.hpp"
#include "peakmdp/scenario_gen.hpp"
#include "peakmdp/scenario_io.hpp"

using namespace peakmdp;

TEST(ScenarioIo, GridRoundTrip) {
  const auto sc = random_scenario({7, 4, 5, 1.0, 10.0, 0.95, 3});
  const std::string text = scenario_to_json(sc);
  const Scenario back = parse_scenario(text);
  EXPECT_EQ(*back.world().grid(), *sc.world().grid());
  EXPECT_EQ(back.gamma(), sc.gamma());
  EXPECT_EQ(back.rewards(), sc.rewards());
  EXPECT_EQ(scenario_to_json(back), text);
  EXPECT_EQ(text.back(), '\n');
}

TEST(ScenarioIo, GraphRoundTripWithUnavailable) {
  const Scenario sc(World(TransitionGraph(2, 2, {0, 1, 0, kUnavailable})), 0.5, {{0, 1.5}});
  const std::string text = scenario_to_json(sc);
  EXPECT_NE(text.find("-1"), std::string::npos);
  const Scenario back = parse_scenario(text);
  EXPECT_EQ(*back.world().graph(), *sc.world().graph());
  EXPECT_EQ(back.rewards(), sc.rewards());
}

TEST(ScenarioIo, ParsesDocumentedGridForm) {
  const auto sc = parse_scenario(
      R"({"grid": {"width": 5, "height": 5}, "gamma": 0.9,
          "rewards": [{"x": 2, "y": 3, "value": 1.0}]})");
  ASSERT_EQ(sc.rewards().size(), 1u);
  EXPECT_EQ(sc.rewards()[0].state, 17u);
  EXPECT_TRUE(validate_scenario(sc).empty());
}

TEST(ScenarioIo, ParsesRingGraph) {
  const auto sc = parse_scenario(
      R"({"graph": {"states": 4, "actions": 2, "next": [[1,3],[2,0],[3,1],[0,2]]},
          "gamma": 0.5, "rewards": [{"state": 2, "value": 3}]})");
  EXPECT_EQ(*sc.world().graph(), oracle::ring4());
}

TEST(ScenarioIo, MalformedJsonReportsLocation) {
  try {
    parse_scenario("{\"grid\": {\"width\": 5,\n  \"height\": }");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("malformed JSON"), std::string::npos);
    EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
  }
}

TEST(ScenarioIo, ShapeErrors) {
  EXPECT_THROW(parse_scenario("[]"), FormatError);
  EXPECT_THROW(parse_scenario(R"({"gamma": 0.9, "rewards": []})"), FormatError);
  EXPECT_THROW(parse_scenario(R"({"grid": {"width": 5}, "gamma": 0.9, "rewards": []})"), FormatError);
  EXPECT_THROW(parse_scenario(R"({"grid": {"width": 5, "height": 5}, "rewards": []})"), FormatError);
  EXPECT_THROW(parse_scenario(R"({"grid": {"width": -5, "height": 5}, "gamma": 0.9, "rewards": []})"),
               FormatError);
  EXPECT_THROW(parse_scenario(R"({"grid": {"width": 5, "height": 5}, "gamma": 0.9,
                                  "rewards": [{"x": 1, "value": 1}]})"),
               FormatError);
  EXPECT_THROW(parse_scenario(R"({"graph": {"states": 2, "actions": 1, "next": [[1]]},
                                  "gamma": 0.9, "rewards": []})"),
               FormatError);
  EXPECT_THROW(parse_scenario(R"({"graph": {"states": 2, "actions": 1, "next": [[1],[-2]]},
                                  "gamma": 0.9, "rewards": []})"),
               FormatError);
}

TEST(ScenarioIo, WorldLevelErrorsAreInvalidScenario) {
  EXPECT_THROW(parse_scenario(R"({"grid": {"width": 1, "height": 1}, "gamma": 0.9, "rewards": []})"),
               InvalidScenario);
  EXPECT_THROW(parse_scenario(R"({"grid": {"width": 3, "height": 3}, "gamma": 0.9,
                                  "rewards": [{"x": 3, "y": 0, "value": 1}]})"),
               InvalidScenario);
  EXPECT_THROW(parse_scenario(R"({"graph": {"states": 2, "actions": 1, "next": [[1],[5]]},
                                  "gamma": 0.9, "rewards": []})"),
               InvalidScenario);
}

TEST(ScenarioIo, SemanticErrorsLeftToValidation) {
  const auto sc = parse_scenario(R"({"grid": {"width": 3, "height": 3}, "gamma": 1.0,
                                      "rewards": [{"x": 0, "y": 0, "value": -1}]})");
  EXPECT_EQ(validate_scenario(sc).size(), 2u);
}

TEST(ScenarioIo, FileSaveAndLoad) {
  const auto path = std::filesystem::temp_directory_path() / "peakmdp_io_test.json";
  const auto sc = random_scenario({5, 5, 3, 1.0, 10.0, 0.9, 1});
  save_scenario(sc, path);
  EXPECT_EQ(load_scenario(path).rewards(), sc.rewards());
  std::filesystem::remove(path);
  EXPECT_THROW(load_scenario(path), FormatError);
}

TEST(GenSpecIo, RoundTripAndDefaults) {
  const GenSpec spec{12, 9, 4, 2.0, 5.0, 0.95, 77};
  const GenSpec back = parse_genspec(genspec_to_json(spec));
  EXPECT_EQ(back.width, 12u);
  EXPECT_EQ(back.height, 9u);
  EXPECT_EQ(back.reward_count, 4u);
  EXPECT_EQ(back.value_lo, 2.0);
  EXPECT_EQ(back.value_hi, 5.0);
  EXPECT_EQ(back.gamma, 0.95);
  EXPECT_EQ(back.seed, 77u);

  const GenSpec partial = parse_genspec(R"({"rewards": 3})");
  EXPECT_EQ(partial.reward_count, 3u);
  EXPECT_EQ(partial.width, GenSpec{}.width);
  EXPECT_THROW(parse_genspec(R"({"values": [1]})"), FormatError);
  EXPECT_THROW(parse_genspec(R"({"seed": -1})"), FormatError);
}
