#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "exotendon/errors.hpp"
#include "exotendon/studies.hpp"

using namespace exo;
namespace fs = std::filesystem;

namespace {

const PhalanxChain kChain{};

TorsionSpringSet calibrated() {
  TorsionSpringSet s = TorsionSpringSet::artificial_finger();
  s.scale = calibrate_spring_scale(kChain, s);
  return s;
}

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("exotendon_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double spread(const StudyTable& t, const char* fixed_col, double fixed, double theta) {
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t i = 0; i < t.num_rows(); ++i) {
    if (t.at(i, fixed_col) != fixed || t.at(i, "theta_deg") != theta) continue;
    lo = std::min(lo, t.at(i, "r_pip_mm"));
    hi = std::max(hi, t.at(i, "r_pip_mm"));
  }
  return hi - lo;
}

}  // namespace

TEST(Grids, Defaults) {
  const auto th = default_theta_grid();
  ASSERT_EQ(th.size(), 91u);
  EXPECT_EQ(th.front(), -90.0);
  EXPECT_EQ(th.back(), 0.0);
  EXPECT_EQ(default_x1_grid(), (std::vector<double>{11, 14, 17, 20}));
  EXPECT_EQ(default_x2_grid(), (std::vector<double>{13, 16, 19, 22}));
  EXPECT_EQ(stepped_grid(0.0, 1.0, 0.3), (std::vector<double>{0.0, 0.3, 0.6, 0.8999999999999999, 1.0}));
  EXPECT_THROW(stepped_grid(0.0, 1.0, 0.0), Error);
}

TEST(SweepA, DefaultShapeAndGridClosure) {
  const StudyTable t = sweep_design_a(default_x1_grid(), default_x2_grid(), default_theta_grid());
  EXPECT_EQ(t.num_rows(), 4u * 4u * 91u);
  const auto x1g = default_x1_grid();
  const auto x2g = default_x2_grid();
  const std::set<double> x1s(x1g.begin(), x1g.end());
  const std::set<double> x2s(x2g.begin(), x2g.end());
  const auto thg = default_theta_grid();
  const std::set<double> ths(thg.begin(), thg.end());
  for (std::size_t i = 0; i < t.num_rows(); ++i) {
    EXPECT_TRUE(x1s.count(t.at(i, "x1_mm")));
    EXPECT_TRUE(x2s.count(t.at(i, "x2_mm")));
    EXPECT_TRUE(ths.count(t.at(i, "theta_deg")));
    EXPECT_EQ(t.at(i, "incompatible"), 0.0);
  }
}

TEST(SweepA, FigureFourSlices) {
  const StudyTable t = sweep_design_a(default_x1_grid(), default_x2_grid(), default_theta_grid());
  // x2 = 19: r_PIP at full extension increases with x1.
  double prev = -INFINITY;
  for (double x1 : default_x1_grid()) {
    for (std::size_t i = 0; i < t.num_rows(); ++i) {
      if (t.at(i, "x1_mm") == x1 && t.at(i, "x2_mm") == 19.0 && t.at(i, "theta_deg") == 0.0) {
        EXPECT_GT(t.at(i, "r_pip_mm"), prev);
        prev = t.at(i, "r_pip_mm");
      }
    }
  }
  EXPECT_GT(spread(t, "x2_mm", 19.0, 0.0), spread(t, "x2_mm", 19.0, -90.0));
  EXPECT_GT(spread(t, "x1_mm", 17.0, -90.0), spread(t, "x1_mm", 17.0, 0.0));
}

TEST(SweepA, IncompatibleRowsFlagged) {
  const StudyTable t = sweep_design_a({2.0, 17.0}, {19.0}, {-45.0, 0.0});
  ASSERT_EQ(t.num_rows(), 4u);
  EXPECT_EQ(t.at(0, "incompatible"), 1.0);
  EXPECT_TRUE(std::isnan(t.at(0, "r_pip_mm")));
  EXPECT_EQ(t.at(2, "incompatible"), 0.0);
}

TEST(Compare, SchemaAndProperties) {
  const DesignComparison c = compare_designs(kChain, default_theta_grid());
  ASSERT_EQ(c.pip.num_cols(), 4u);
  EXPECT_EQ(c.pip.columns()[0].name, "theta_deg");
  EXPECT_EQ(c.pip.columns()[1].name, "r_base_mm");
  EXPECT_EQ(c.pip.columns()[2].name, "r_A_mm");
  EXPECT_EQ(c.pip.columns()[3].name, "r_B_mm");
  const std::size_t last = c.pip.num_rows() - 1;
  EXPECT_NEAR(c.pip.at(last, "r_base_mm"), 17.0, 1e-9);
  EXPECT_NEAR(c.pip.at(last, "r_B_mm"), 17.0, 1e-9);
  EXPECT_GT(c.pip.at(last, "r_A_mm"), c.pip.at(last, "r_B_mm"));
  for (std::size_t i = 0; i < c.a_arms.num_rows(); ++i) {
    EXPECT_GT(c.a_arms.at(i, "r_A_pip_mm"), c.a_arms.at(i, "r_A_mcp_mm"));
  }
}

TEST(Compare, SinglePointMatchesMomentArmTable) {
  const DesignComparison c = compare_designs(kChain, {-52.0});
  const StudyTable a = moment_arm_table(DesignSpec::design_a(17.0, 19.0), kChain, {-52.0});
  const StudyTable b = moment_arm_table(DesignSpec::design_b(17.0), kChain, {-52.0});
  const StudyTable base = moment_arm_table(DesignSpec::baseline(), kChain, {-52.0});
  EXPECT_EQ(c.pip.at(0, "r_A_mm"), a.at(0, "r_pip_mm"));
  EXPECT_EQ(c.pip.at(0, "r_B_mm"), b.at(0, "r_pip_mm"));
  EXPECT_EQ(c.pip.at(0, "r_base_mm"), base.at(0, "r_pip_mm"));
  EXPECT_EQ(c.a_arms.at(0, "r_A_mcp_mm"), a.at(0, "r_mcp_mm"));
}

TEST(Experiment, NoiselessEqualsForceCurve) {
  const auto s = calibrated();
  const auto tg = linspace(0.0, 100.0, 25);
  const std::vector<DesignSpec> ds{DesignSpec::baseline(), DesignSpec::design_a(17.0, 19.0)};
  for (std::size_t reps : {1u, 50u}) {
    const StudyTable e = artificial_finger_experiment(ds, tg, kChain, s, {reps, 0.0, 3});
    for (std::size_t d = 0; d < ds.size(); ++d) {
      const StudyTable f = force_angle_curve(ds[d], kChain, s, tg);
      for (std::size_t i = 0; i < tg.size(); ++i) {
        const std::size_t r = d * tg.size() + i;
        EXPECT_EQ(e.at(r, "design"), static_cast<double>(d));
        EXPECT_EQ(e.at(r, "force_mean_N"), f.at(i, "tension_N"));
        EXPECT_EQ(e.at(r, "theta_pip_deg"), f.at(i, "theta_pip_deg"));
        EXPECT_EQ(e.at(r, "theta_mcp_deg"), f.at(i, "theta_mcp_deg"));
        EXPECT_EQ(e.at(r, "se_force_N"), 0.0);
      }
    }
  }
}

TEST(Experiment, StandardErrorShrinksWithReps) {
  const double sigma = 2.0;
  const auto tg = linspace(10.0, 90.0, 30);
  const StudyTable e =
      artificial_finger_experiment({DesignSpec::design_b(17.0)}, tg, kChain, calibrated(), {50, sigma, 11});
  double sq = 0.0;
  for (double v : e.column("se_force_N")) {
    EXPECT_GT(v, 0.0);
    sq += v * v;
  }
  const double rms = std::sqrt(sq / static_cast<double>(e.num_rows()));
  EXPECT_LE(rms, 1.1 * sigma / std::sqrt(50.0));
  EXPECT_GE(rms, 0.8 * sigma / std::sqrt(50.0));
}

TEST(Experiment, SeedReproducible) {
  const auto tg = linspace(0.0, 60.0, 10);
  const std::vector<DesignSpec> ds{DesignSpec::baseline()};
  const StudyTable a = artificial_finger_experiment(ds, tg, kChain, calibrated(), {20, 1.5, 42});
  const StudyTable b = artificial_finger_experiment(ds, tg, kChain, calibrated(), {20, 1.5, 42});
  const StudyTable c = artificial_finger_experiment(ds, tg, kChain, calibrated(), {20, 1.5, 43});
  EXPECT_EQ(to_csv(a), to_csv(b));
  EXPECT_NE(to_csv(a), to_csv(c));
  EXPECT_THROW(artificial_finger_experiment(ds, tg, kChain, calibrated(), {0, 0.0, 0}), Error);
}

TEST(Csv, EmptyTableHasHeaderAndMetadataOnly) {
  StudyTable t({{"a", "mm"}, {"b", "N"}});
  t.set_meta("design", "B(h=17)");
  EXPECT_EQ(to_csv(t), "# design=B(h=17)\n# units=mm,N\na,b\n");
}

TEST(Csv, RoundTripAndDeterminism) {
  const fs::path dir = temp_dir("csv");
  const DesignComparison c = compare_designs(kChain, default_theta_grid());
  const std::size_t n1 = export_csv(c.pip, dir / "one.csv");
  const std::size_t n2 = export_csv(compare_designs(kChain, default_theta_grid()).pip, dir / "two.csv");
  EXPECT_EQ(n1, n2);
  EXPECT_EQ(slurp(dir / "one.csv"), slurp(dir / "two.csv"));
  EXPECT_EQ(slurp(dir / "one.csv").substr(0, 2), "# ");
  EXPECT_EQ(slurp(dir / "one.csv").find('\r'), std::string::npos);
  EXPECT_TRUE(slurp(dir / "one.csv").find("theta_deg,r_base_mm,r_A_mm,r_B_mm\n") != std::string::npos);

  const StudyTable back = import_csv(dir / "one.csv");
  EXPECT_EQ(back.columns(), c.pip.columns());
  EXPECT_EQ(back.metadata(), c.pip.metadata());
  ASSERT_EQ(back.num_rows(), c.pip.num_rows());
  for (std::size_t i = 0; i < back.num_rows(); ++i) {
    for (std::size_t j = 0; j < back.num_cols(); ++j) {
      const double a = c.pip.rows()[i][j];
      EXPECT_NEAR(back.rows()[i][j], a, 5e-12 * std::max(1.0, std::abs(a)));
    }
  }
  // A table already at 12 significant digits survives exactly.
  EXPECT_EQ(import_csv(dir / "one.csv"), parse_csv(to_csv(back)));
  EXPECT_FALSE(fs::exists(dir / "one.csv.tmp"));
}

TEST(Csv, Errors) {
  EXPECT_THROW(export_csv(StudyTable(std::vector<Column>{{"a", "mm"}}), "/nonexistent_dir_xyz/out.csv"), Error);
  try {
    parse_csv("# units=mm\na\n1\nx\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_EQ(e.line(), 4);
  }
  StudyTable t(std::vector<Column>{{"a", "mm"}});
  EXPECT_THROW(t.add_row({1.0, 2.0}), std::invalid_argument);
}
