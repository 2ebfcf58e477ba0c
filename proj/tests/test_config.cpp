#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "xvem/config.hpp"

using namespace xvem;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("xvem_test_" + name)).string();
}

void expect_invalid(const std::string& text, const std::string& field) {
  try {
    parse_config(text).validate();
    ADD_FAILURE() << "accepted: " << text;
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << e.what();
  }
}

}  // namespace

TEST(Config, DefaultsAreValid) {
  RunConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.material.E, 1e5);
  EXPECT_EQ(c.material.nu, 0.3);
}

TEST(Config, RoundTripThroughFile) {
  RunConfig c;
  c.experiment = Experiment::inclined;
  c.mesh.type = MeshKind::poly;
  c.mesh.n = 64;
  c.mesh.sizes = {64, 256};
  c.material.plane = PlaneAssumption::stress;
  c.enrichment = EnrichmentMode::topological;
  c.kernel.alpha = 0.01;
  c.kernel.scheme = StabilizationScheme::drecipe;
  c.inclined.beta = 0.5;
  c.inclined.mouth_y = 2.5;
  c.output.csv = "out.csv";
  const std::string path = temp_path("roundtrip.json");
  write_config(c, path);
  RunConfig d = read_config(path);
  std::filesystem::remove(path);
  EXPECT_EQ(config_to_json(c), config_to_json(d));
  EXPECT_EQ(config_hash(c), config_hash(d));
  EXPECT_EQ(d.mesh.type, MeshKind::poly);
  EXPECT_EQ(d.inclined.mouth_y.value(), 2.5);
  EXPECT_EQ(d.output.csv, "out.csv");
}

TEST(Config, HashIgnoresOutputsButTracksParameters) {
  RunConfig a, b;
  b.output.results = "elsewhere.json";
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
  b.kernel.alpha = 0.1;
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_EQ(fnv1a64(""), 14695981039346656037ull);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cull);
}

TEST(Config, PartialFileKeepsDefaults) {
  auto c = parse_config(R"({"experiment": "convergence", "mesh": {"sizes": [4, 8]}})");
  EXPECT_EQ(c.experiment, Experiment::convergence);
  EXPECT_EQ(c.mesh.sizes, (std::vector<int>{4, 8}));
  EXPECT_EQ(c.mesh.type, MeshKind::quad);
  EXPECT_EQ(c.radius, 0.5);
}

TEST(Config, ValidationNamesTheField) {
  expect_invalid(R"({"experiment": "fly"})", "experiment");
  expect_invalid(R"({"mesh": {"n": 0}})", "mesh.n");
  expect_invalid(R"({"mesh": {"type": "poly", "n": 63}})", "mesh.n");
  expect_invalid(R"({"material": {"nu": 0.5}})", "nu");
  expect_invalid(R"({"crack": {"points": [[0, 0]]}})", "crack.points");
  expect_invalid(R"({"crack": {"side": "right"}})", "crack.side");
  expect_invalid(R"({"stabilization": {"alpha": -1}})", "stabilization.alpha");
  expect_invalid(R"({"stabilization": {"scheme": "none"}})", "stabilization");
  expect_invalid(R"({"sif": {"radius": 0}})", "sif.radius");
  expect_invalid(R"({"enrichment": {"mode": "geom", "radius": 0}})", "enrichment.radius");
  expect_invalid(R"({"inclined": {"mouth_y": 5.9, "beta": 0.7}})", "inclined.mouth_y");
  expect_invalid(R"({"quadrature": {"edge_order": 0}})", "quadrature.edge_order");
  expect_invalid("{not json", "config");
  expect_invalid(R"({"mesh": {"n": "ten"}})", "config");
}

TEST(Config, RunPatchTestAndWriteReport) {
  RunConfig c;
  c.experiment = Experiment::extended_patch;
  c.mesh.n = 10;
  auto run = run_config(c);
  ASSERT_EQ(run.report.rows.size(), 1u);
  EXPECT_LE(run.report.rows[0].rel_error, 1e-8);
  EXPECT_EQ(run.report.hash, config_hash(c));
  OutputSpec out{temp_path("report.json"), temp_path("report.csv"), ""};
  write_report(run.report, "quad", c.kernel.alpha, out);
  std::ifstream jf(out.results);
  auto j = nlohmann::json::parse(jf);
  EXPECT_EQ(j["config_hash"], config_hash(c));
  EXPECT_EQ(j["rows"].size(), 1u);
  std::ifstream cf(out.csv);
  std::string header, row;
  std::getline(cf, header);
  std::getline(cf, row);
  EXPECT_EQ(header, csv_header());
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), 10);
  std::filesystem::remove(out.results);
  std::filesystem::remove(out.csv);
}

TEST(Config, RunIsDeterministic) {
  RunConfig c;
  c.mesh.type = MeshKind::poly;
  c.mesh.n = 64;
  auto a = run_config(c), b = run_config(c);
  EXPECT_EQ(a.report.rows[0].energy, b.report.rows[0].energy);
  EXPECT_EQ(a.report.rows[0].K_I, b.report.rows[0].K_I);
  EXPECT_GT(a.report.n_elements, 0);
}
