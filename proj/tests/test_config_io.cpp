#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "supershift/config.hpp"
#include "supershift/io.hpp"

using namespace supershift;
using nlohmann::json;

TEST(Config, FullDocumentRoundTrips) {
  const json doc = json::parse(R"({
    "experiment": "supershift",
    "potential": {"kind": "harmonic", "lambda": {"sinusoid": {"a": 1, "b": 0.2, "omega": 3}}},
    "initial": {"kind": "plane", "k": [2, 0.5]},
    "grid": {"t": {"min": 0.1, "max": 0.4, "count": 4}, "x": {"min": -1, "max": 1, "count": 5}},
    "quadrature": {"tol": 1e-9, "angle": 0.6, "max_panels": 500},
    "kernel": {"t_max": 2, "pole_margin": 0.2},
    "supershift": {"kappa": 2, "n": [5, 10], "C": 4, "metric_radius": 1.5},
    "verify": {"limit_ts": [1e-2, 1e-3]},
    "output": {"dir": "results", "stem": "run1"}
  })");
  const auto c = parse_config(doc);
  EXPECT_EQ(c.kind, ExperimentKind::supershift);
  EXPECT_EQ(c.t_axis->points().size(), 4u);
  EXPECT_DOUBLE_EQ(c.x_axis->points()[2], 0.0);
  EXPECT_DOUBLE_EQ(c.tol, 1e-9);
  EXPECT_DOUBLE_EQ(c.kernel.sector_angle, 0.6);
  EXPECT_DOUBLE_EQ(c.kernel.t_max, 2.0);
  EXPECT_EQ(c.kappa, cplx(2.0, 0.0));
  EXPECT_EQ(c.ns, (std::vector<int>{5, 10}));
  EXPECT_EQ(c.out_dir, "results");
  const auto again = parse_config(c.to_json());
  EXPECT_EQ(again.to_json(), c.to_json());
  EXPECT_TRUE(std::holds_alternative<Harmonic>(parse_potential(c.potential)));
  EXPECT_EQ(parse_initial(c.initial).growth.kind, GrowthWitness::Kind::modulus);
}

TEST(Config, ErrorsNameTheField) {
  auto field_of = [](const json& j) -> std::string {
    try {
      parse_config(j);
    } catch (const config_error& e) {
      return e.field();
    }
    return "";
  };
  EXPECT_EQ(field_of(json::parse(R"({"initial": {"kind": "plane", "k": 1}})")), "potential");
  EXPECT_EQ(field_of(json::parse(R"({"potential": {"kind": "harmonic"}})")), "potential.lambda");
  EXPECT_EQ(field_of(json::parse(R"({"potential": {"kind": "poschl-teller", "l": 0}})")),
            "potential.l");
  EXPECT_EQ(field_of(json::parse(R"({"potential": {"kind": "magnetic"}})")), "potential.kind");
  EXPECT_EQ(field_of(json::parse(
                R"({"potential": {"kind": "free"}, "grid": {"t": {"min": 1, "max": 0, "count": 3}}})")),
            "grid.t");
  EXPECT_EQ(field_of(json::parse(R"({"potential": {"kind": "free"}, "quadrature": {"angle": 2}})")),
            "quadrature.angle");
  EXPECT_EQ(field_of(json::parse(
                R"({"potential": {"kind": "free"}, "initial": {"kind": "superosc", "k": 3}})")),
            "initial.n");
  EXPECT_THROW(parse_experiment("sweep"), config_error);
}

TEST(Config, Shorthands) {
  EXPECT_EQ(potential_shorthand("harmonic:omega=2")["lambda"]["constant"], 4.0);
  EXPECT_EQ(potential_shorthand("poschl-teller:l=2")["l"], 2);
  EXPECT_TRUE(potential_shorthand("electric:a=1,b=0.5,omega=2")["lambda"].contains("sinusoid"));
  EXPECT_THROW(potential_shorthand("harmonic"), config_error);
  EXPECT_EQ(initial_shorthand("superosc:n=20,k=3")["n"], 20);
  EXPECT_TRUE(initial_shorthand("plane:k=2,ki=0.5")["k"].is_array());
  const auto a = axis_shorthand("0.1:0.4:4", "--t");
  EXPECT_EQ(a.count, 4);
  EXPECT_THROW(axis_shorthand("0.1:0.4", "--t"), config_error);
  EXPECT_THROW(axis_shorthand("1:0:3", "--t"), config_error);
}

TEST(TimeProfile, ConstantSinusoidTable) {
  EXPECT_DOUBLE_EQ(TimeProfile::constant(2.0)(5.0), 2.0);
  EXPECT_NEAR(TimeProfile::sinusoid(1.0, 0.5, 2.0)(0.3), 1.0 + 0.5 * std::sin(0.6), 1e-15);
  const auto tab = TimeProfile::table({0.0, 1.0, 2.0, 3.0}, {0.0, 1.0, 4.0, 9.0});
  EXPECT_DOUBLE_EQ(tab(2.0), 4.0);
  EXPECT_NEAR(tab(1.5), 2.25, 0.1);
}

TEST(Io, NumberFormatIsExact) {
  EXPECT_EQ(io::fmt(0.1), "0.10000000000000001");
  EXPECT_EQ(io::fmt(2.0), "2");
  EXPECT_EQ(std::stod(io::fmt(kPi)), kPi);
  EXPECT_EQ(io::fmt(std::nan("")), "nan");
}

TEST(Io, WavefieldFilesAndManifest) {
  WaveField f;
  f.ts = {0.1, 0.2};
  f.xs = {-1.0, 0.0, 1.0};
  f.values.assign(6, cplx(1.0, -0.5));
  f.quad_errors.assign(6, 1e-12);
  f.potential = "free";
  f.initial = "plane:k=3";
  f.tol = 1e-10;
  const auto csv = io::wavefield_csv(f);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
  EXPECT_EQ(csv.find('\r'), std::string::npos);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,x,re_psi,im_psi,abs_psi,quad_err");
  const auto dat = io::wavefield_gnuplot(f);
  EXPECT_NE(dat.find("\n\n\n# t = 0.20000000000000001"), std::string::npos);

  const json cfg = {{"tol", 1e-10}};
  const auto m = io::manifest(f, cfg);
  EXPECT_EQ(m["config_digest"], io::digest(cfg.dump()));
  EXPECT_EQ(m["grid"]["x"].size(), 3u);
  EXPECT_EQ(io::digest("a"), "af63dc4c8601ec8c");

  const auto dir = std::filesystem::temp_directory_path() / "supershift_io_test";
  std::filesystem::remove_all(dir);
  io::write_atomic(dir / "sub" / "f.csv", csv);
  std::ifstream in(dir / "sub" / "f.csv");
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), csv);
  EXPECT_FALSE(std::filesystem::exists(dir / "sub" / "f.csv.tmp"));
  std::filesystem::remove_all(dir);
}

TEST(Io, SupershiftCsv) {
  SupershiftReport r;
  r.ns = {10, 20};
  r.distance = {2.0, 1.0};
  r.metric = {0.5, 0.25};
  r.split_discrepancy = {1e-9, std::nan("")};
  const auto csv = io::supershift_csv(r);
  EXPECT_NE(csv.find("10,2,0.5,4,1.0000000000000001e-09"), std::string::npos);
  EXPECT_NE(csv.find("20,1,0.25,4,nan"), std::string::npos);
}
