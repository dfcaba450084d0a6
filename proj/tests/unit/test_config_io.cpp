#include <cmath>
#include <cstring>
#include <sstream>

#include <gtest/gtest.h>

#include "kfar/config.hpp"
#include "kfar/rng.hpp"
#include "kfar/table_io.hpp"

using namespace kfar;

TEST(FormatNumber, RoundTripsExactly) {
  Rng rng(1);
  for (int i = 0; i < 2000; ++i) {
    const double x = rng.normal() * std::pow(10.0, rng.uniform(-30, 30));
    EXPECT_EQ(std::stod(format_number(x)), x);
  }
  EXPECT_EQ(format_number(0.5), "0.5");
}

TEST(Csv, WriteReadRoundTrip) {
  Table t{{"t", "name", "x"}, {}};
  Rng rng(2);
  std::vector<double> xs;
  for (int i = 0; i < 20; ++i) {
    xs.push_back(rng.normal() / 3.0);
    t.add_row({std::int64_t{i}, std::string("w0.1"), xs.back()});
  }
  std::stringstream buf;
  write_csv(buf, t);
  EXPECT_EQ(buf.str().substr(0, 9), "t,name,x\n");
  EXPECT_EQ(buf.str().find('\r'), std::string::npos);
  const Table back = read_csv(buf);
  EXPECT_EQ(back.columns, t.columns);
  ASSERT_EQ(back.rows.size(), 20u);
  for (int i = 0; i < 20; ++i) {
    EXPECT_EQ(back.number(i, "x"), xs[i]);
    EXPECT_EQ(back.number(i, "t"), i);
    EXPECT_EQ(std::get<std::string>(back.rows[i][1]), "w0.1");
  }
  EXPECT_THROW(back.column_index("nope"), InvalidArgument);
  EXPECT_THROW(t.add_row({1.0}), InvalidArgument);
}

TEST(Csv, RaggedRowNamesLine) {
  std::stringstream buf("a,b\n1,2\n3\n");
  try {
    read_csv(buf);
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(Config, ExperimentNames) {
  for (const char* name :
       {"compare", "noise-sweep", "depth-sweep", "counterexample", "regret", "ingest", "lr-study"}) {
    EXPECT_EQ(experiment_name(parse_experiment(name)), name);
  }
  EXPECT_THROW(parse_experiment("bogus"), ConfigError);
}

TEST(Config, Defaults) {
  const auto c = default_config(Experiment::compare);
  EXPECT_EQ(c.T, 500);
  EXPECT_EQ(c.runs, 100);
  EXPECT_EQ(c.depths, std::vector<int>{1});
  const auto n = default_config(Experiment::noise_sweep);
  EXPECT_EQ(n.T, 50);
  EXPECT_EQ(n.runs, 10);
  const auto d = default_config(Experiment::depth_sweep);
  EXPECT_EQ(d.T, 200);
  EXPECT_EQ(d.depths.size(), 13u);
  EXPECT_TRUE(default_config(Experiment::regret).clip_bound.has_value());
}

TEST(Config, ParsesOverlay) {
  const auto c = parse_config(R"(
name: small
T: 80
runs: 3
seed: 42
depths: [1, 2, 4]
clip_bound: auto
system:
  G: [[0.9, 0.0], [0.0, 0.4]]
  F: [1, 1]
  v: 0.25
  w: 0.3
regret:
  stream: square_wave
  square_period: 10
)",
                              Experiment::compare);
  EXPECT_EQ(c.name, "small");
  EXPECT_EQ(c.T, 80);
  EXPECT_EQ(c.runs, 3);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.depths, (std::vector<int>{1, 2, 4}));
  ASSERT_TRUE(c.clip_bound);
  EXPECT_TRUE(c.clip_bound->automatic);
  EXPECT_EQ(c.system.G(1, 1), 0.4);
  EXPECT_EQ(c.system.W, 0.3 * Matrix::Identity(2, 2));
  EXPECT_EQ(c.system.C0, Matrix::Identity(2, 2));
  EXPECT_EQ(c.system.m0, Vector::Zero(2));
  EXPECT_EQ(c.regret.stream, "square_wave");
  EXPECT_EQ(c.regret.square_period, 10);
  EXPECT_EQ(parse_config("clip_bound: 3.5", Experiment::compare).clip_bound->value, 3.5);
  EXPECT_EQ(parse_config("", Experiment::compare).T, 500);
}

TEST(Config, RejectsUnknownAndMistypedKeys) {
  EXPECT_THROW(parse_config("Tmax: 3", Experiment::compare), ConfigError);
  EXPECT_THROW(parse_config("T: many", Experiment::compare), ConfigError);
  EXPECT_THROW(parse_config("regret: {bogus: 1}", Experiment::compare), ConfigError);
  EXPECT_THROW(parse_config("system: {G: [[1]], F: [1], v: 1}", Experiment::compare), ConfigError);
  EXPECT_THROW(parse_config("system: {G: [[1, 2], [3]], F: [1, 1], v: 1, w: 1}", Experiment::compare),
               ConfigError);
  EXPECT_THROW(parse_config("system: {G: [[1]], F: [1], v: 1, W: [[-1]]}", Experiment::compare),
               ConfigError);
  EXPECT_THROW(parse_config("T: [", Experiment::compare), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.yaml", Experiment::compare), ConfigError);
}

TEST(Config, ResolveChecksInvariants) {
  auto c = default_config(Experiment::compare);
  c.runs = 0;
  EXPECT_THROW(resolve_config(c, Experiment::compare), ConfigError);
  c = default_config(Experiment::depth_sweep);
  c.T = 12;
  EXPECT_THROW(resolve_config(c, Experiment::depth_sweep), ConfigError);
  c.T = 14;
  EXPECT_NO_THROW(resolve_config(c, Experiment::depth_sweep));
  c = default_config(Experiment::noise_sweep);
  c.noise_sweep.w_grid.clear();
  EXPECT_THROW(resolve_config(c, Experiment::noise_sweep), ConfigError);
  c = default_config(Experiment::ingest);
  EXPECT_THROW(resolve_config(c, Experiment::ingest), ConfigError);
  c = default_config(Experiment::lr_study);
  c.lr_study.c_values = {1.0, 0.0};
  EXPECT_THROW(resolve_config(c, Experiment::lr_study), ConfigError);
}

TEST(Config, RegretNeedsClipBoundAndFillsFamily) {
  auto c = parse_config("clip_bound: null", Experiment::regret);
  EXPECT_THROW(resolve_config(c, Experiment::regret), ConfigError);
  c = resolve_config(default_config(Experiment::regret), Experiment::regret);
  ASSERT_EQ(c.regret.family.size(), 3u);
  EXPECT_NEAR(c.regret.family[1].G(0, 0), 0.8 * 0.999, 1e-15);
  EXPECT_NEAR(c.regret.family[2].G(1, 1), 1.2 * 0.5, 1e-15);
}

TEST(Config, ManifestRoundTrip) {
  auto c = parse_config(R"(
name: rt
T: 77
seed: 18446744073709551615
burn_in: 12
clip_bound: 2.5
series: {path: data.csv, column: close, differencing: 2}
depth_sweep:
  settings: [{tag: a, w: 0.2, v: 0.3}]
  remainder_t: 40
lr_study: {c_values: [0.5, 2], synthetic: trending, length: 150}
)",
                        Experiment::compare);
  c = resolve_config(c, Experiment::regret);
  const nlohmann::json j = to_json(c);
  const nlohmann::json manifest{{"experiment", "regret"}, {"config", j}};
  const auto back = parse_config(manifest.dump(), Experiment::compare);
  EXPECT_EQ(to_json(back), j);
  EXPECT_EQ(back.seed, 18446744073709551615ull);
  EXPECT_EQ(back.series->column, "close");
  EXPECT_EQ(back.regret.family.size(), 3u);
}

TEST(Config, ShippedConfigsResolve) {
  const std::pair<const char*, Experiment> files[]{
      {"compare.yaml", Experiment::compare},
      {"noise_sweep.yaml", Experiment::noise_sweep},
      {"depth_sweep.yaml", Experiment::depth_sweep},
      {"counterexample.yaml", Experiment::counterexample},
      {"regret.yaml", Experiment::regret},
      {"regret_square.yaml", Experiment::regret},
      {"lr_study.yaml", Experiment::lr_study},
      {"ingest.yaml", Experiment::ingest},
  };
  for (const auto& [file, e] : files) {
    const auto path = std::filesystem::path(KFAR_CONFIG_DIR) / file;
    EXPECT_NO_THROW(resolve_config(load_config(path, e), e)) << file;
  }
  const auto regret = load_config(std::filesystem::path(KFAR_CONFIG_DIR) / "regret.yaml", Experiment::regret);
  EXPECT_EQ(regret.regret.family.size(), 3u);
}
