#include <gtest/gtest.h>

#include <cstdio>
#include <cstring>
#include <filesystem>

#include "../support/networks.hpp"
#include "tjflow/config.hpp"
#include "tjflow/errors.hpp"
#include "tjflow/network_io.hpp"
#include "tjflow/trajectory_io.hpp"

using namespace tjflow;

namespace {

const char* kDisk = R"(
# minimal disk
[domain]
type = circle
radius = 1

[network]
tensions = 1, 1, 1
)";

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("tjflow_test_" + name)).string();
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::IoError;
}

}  // namespace

TEST(ParseConfig, MinimalDiskGetsDefaults) {
  const RunConfig c = parse_config(kDisk);
  EXPECT_EQ(c.domain.type, "circle");
  EXPECT_EQ(c.domain.radius, 1.0);
  EXPECT_EQ(c.evolve.n, 200);
  EXPECT_EQ(c.evolve.newton_tol, 1e-10);
  EXPECT_EQ(c.evolve.newton_max, 20);
  EXPECT_EQ(c.evolve.det_m_floor, 0.5);
  EXPECT_EQ(c.perturbation.mode, "none");
  EXPECT_FALSE(c.gauge.has_value());
}

TEST(ParseConfig, TriangleInequality) {
  std::string text = kDisk;
  text.replace(text.find("1, 1, 1"), 7, "1, 1, 2.5");
  EXPECT_EQ(code_of([&] { parse_config(text); }), ErrorCode::ValidationError);
}

TEST(ParseConfig, UnknownKeyNamesKeyAndLine) {
  const std::string text = std::string(kDisk) + "foo = 1\n";
  try {
    parse_config(text);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find("foo"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("line 9"), std::string::npos);
  }
}

TEST(ParseConfig, DottedKeysAndPolynomial) {
  const RunConfig c = parse_config(
      "domain.type = polynomial\n"
      "domain.coefficients = 2 0 1; 0 2 2; 0 0 -1\n"
      "network.tensions = 1, 1.1, 1.2\n"
      "network.gauge = 0.25\n");
  ASSERT_EQ(c.domain.terms.size(), 3u);
  EXPECT_EQ(c.domain.terms[1].j, 2);
  EXPECT_EQ(c.domain.terms[2].c, -1.0);
  ASSERT_TRUE(c.gauge.has_value());
  EXPECT_EQ(*c.gauge, 0.25);
}

TEST(ParseConfig, Errors) {
  EXPECT_EQ(code_of([] { parse_config("[domain]\ntype = circle\nradius = abc\n[network]\ntensions = 1,1,1\n"); }),
            ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { parse_config("[domain]\ntype = square\n[network]\ntensions = 1,1,1\n"); }),
            ErrorCode::ValidationError);
  EXPECT_EQ(code_of([] { parse_config("[domain\n"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { parse_config("[domain]\ntype = circle\nradius = 1\n"); }), ErrorCode::ValidationError);
  EXPECT_EQ(code_of([&] { parse_config(std::string(kDisk) + "[grid]\nn = 4\n"); }), ErrorCode::ValidationError);
  EXPECT_EQ(code_of([&] { parse_config(std::string(kDisk) + "[network]\ntensions = 1,1,1\n"); }),
            ErrorCode::ParseError);
}

TEST(ParseConfig, OverrideValue) {
  const std::string a = override_config_value(kDisk, "domain.radius", "2.5");
  EXPECT_EQ(parse_config(a).domain.radius, 2.5);
  const std::string b = override_config_value(kDisk, "network.tensions[2]", "1.4");
  EXPECT_EQ(parse_config(b).tensions.gamma[2], 1.4);
  const std::string c = override_config_value(kDisk, "grid.n", "64");
  EXPECT_EQ(parse_config(c).evolve.n, 64);
  EXPECT_EQ(code_of([] { override_config_value(kDisk, "grid.bogus", "1"); }), ErrorCode::ValidationError);
}

TEST(ParseConfig, SeededRandomPerturbationIsDeterministic) {
  const RunConfig c = parse_config(std::string(kDisk) + "[perturbation]\nmode = random\namplitude = 0.01\n[output]\nseed = 9\n");
  const StationaryNetwork net = abstract_network(SurfaceTensions{}, {1, 1, 1}, {1, 1, 1});
  const Perturbation a = make_perturbation(c, net);
  const Perturbation b = make_perturbation(c, net);
  EXPECT_EQ(a.cosine, b.cosine);
  EXPECT_EQ(a.cosine[0].size(), 4u);
}

TEST(NetworkIo, RoundTrip) {
  const ImplicitDomain d = tjtest::unstable_domain();
  const StationaryNetwork net = tjtest::unstable_network(d);
  const StationaryNetwork back = parse_network(format_network(net));
  EXPECT_TRUE(is_network_text(format_network(net)));
  EXPECT_EQ(back.p_star, net.p_star);
  EXPECT_EQ(back.phi, net.phi);
  for (int i = 0; i < 3; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    EXPECT_EQ(back.length[ii], net.length[ii]);
    EXPECT_EQ(back.h[ii], net.h[ii]);
    EXPECT_EQ(back.endpoint[ii], net.endpoint[ii]);
    EXPECT_LT((back.tangent[ii] - net.tangent[ii]).norm(), 1e-15);
  }
}

TEST(TrajectoryIo, RoundTripIsBitwise) {
  std::vector<TrajectoryRow> rows(3);
  double v = 0.1;
  for (auto& r : rows) {
    for (double* f : {&r.t, &r.E, &r.kappa_l2_sq, &r.kappa_s_l2_sq, &r.kappa_ss_l2_sq, &r.px, &r.py, &r.mu1, &r.mu2,
                      &r.mu3, &r.res_junction, &r.res_flux, &r.res_outer, &r.res_perp}) {
      *f = std::sin(v) * std::pow(10.0, std::fmod(v * 37.0, 20.0) - 10.0);
      v += 0.7;
    }
  }
  const std::string path = temp_path("roundtrip.csv");
  write_trajectory(rows, path);
  const auto back = read_trajectory(path);
  ASSERT_EQ(back.size(), rows.size());
  EXPECT_EQ(std::memcmp(back.data(), rows.data(), rows.size() * sizeof(TrajectoryRow)), 0);
  std::filesystem::remove(path);
}

TEST(TrajectoryIo, EmptyTrajectory) {
  const std::string path = temp_path("empty.csv");
  write_trajectory({}, path);
  EXPECT_EQ(read_text_file(path), std::string(kTrajectoryHeader) + "\n");
  EXPECT_TRUE(read_trajectory(path).empty());
  std::filesystem::remove(path);
}

TEST(TrajectoryIo, MalformedRowReportsIndex) {
  std::string text = format_trajectory(std::vector<TrajectoryRow>(3));
  text += "1,2,3\n";
  try {
    parse_trajectory(text);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoError);
    EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos);
  }
  EXPECT_EQ(code_of([] { read_trajectory("/nonexistent/dir/x.csv"); }), ErrorCode::IoError);
}

TEST(Verify, DetectsEnergyIncrease) {
  std::vector<TrajectoryRow> rows(4);
  for (int k = 0; k < 4; ++k) {
    rows[static_cast<std::size_t>(k)].t = 0.1 * k;
    rows[static_cast<std::size_t>(k)].E = 3.0;
  }
  auto checks = verify_trajectory(rows);
  for (const auto& c : checks) EXPECT_TRUE(c.pass) << c.name;
  rows[2].E = 3.1;
  checks = verify_trajectory(rows);
  EXPECT_FALSE(checks[0].pass);
}
