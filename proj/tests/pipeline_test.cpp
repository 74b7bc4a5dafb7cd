#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <gtest/gtest.h>

#include "shipmob/pipeline.hpp"
#include "support.hpp"

using namespace shipmob;
using testing_support::TempDir;
namespace fs = std::filesystem;

namespace {

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

int cli(const std::string& args) {
  const std::string cmd = std::string("\"") + SHIPMOB_CLI + "\" " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

// Simulated three-port run written as feed, fleet and ports files.
struct SimFiles {
  TempDir dir{"pipe"};
  sim::Result result;

  SimFiles() {
    result = pipeline::run_simulate(testing_support::data_dir() / "scenarios" / "three_port.ini", 9, dir.path());
  }
  fs::path feed() const { return dir / "synthetic.nmea"; }
  fs::path fleet() const { return dir / "fleet.csv"; }
  fs::path ports() const { return dir / "ports.csv"; }
};

const SimFiles& sim_files() {
  static SimFiles s;
  return s;
}

pipeline::RunConfig config(const fs::path& out) {
  const auto& s = sim_files();
  pipeline::RunConfig cfg;
  cfg.inputs = {s.feed()};
  cfg.fleet = s.fleet();
  cfg.ports = s.ports();
  cfg.out_dir = out;
  return cfg;
}

}  // namespace

TEST(Cli, ExitCodes) {
  TempDir tmp("cli");
  const auto& s = sim_files();
  EXPECT_EQ(cli("--help > /dev/null"), 0);
  EXPECT_EQ(cli(""), 1);
  EXPECT_EQ(cli("frobnicate"), 1);
  EXPECT_EQ(cli("tracks " + q(s.feed()) + " -o " + q(tmp / "t")), 1);  // no fleet
  EXPECT_EQ(cli("density " + q(s.feed()) + " --fleet " + q(s.fleet()) + " -o " + q(tmp / "d")), 1);  // no bbox
  EXPECT_EQ(cli("decode " + q(tmp / "missing.nmea") + " -o " + q(tmp / "x")), 2);
  write(tmp / "bad_fleet.csv", "mmsi,imo\n1,2\n");
  EXPECT_EQ(cli("tracks " + q(s.feed()) + " --fleet " + q(tmp / "bad_fleet.csv") + " -o " + q(tmp / "t")), 3);
  EXPECT_EQ(cli("decode " + q(s.feed()) + " -o " + q(tmp / "ok")), 0);
  EXPECT_TRUE(fs::exists(tmp / "ok" / "fixes.csv"));
  EXPECT_TRUE(fs::exists(tmp / "ok" / "stats.json"));
}

TEST(Cli, ConfigFileAndFlagOverride) {
  TempDir tmp("cfg");
  const auto& s = sim_files();
  write(tmp / "run.ini", "[input]\nfleet = " + s.fleet().string() + "\nports = " + s.ports().string() +
                             "\nfiles = " + s.feed().string() +
                             "\n[thresholds]\nmin_dwell_hours = 1\n[output]\ndir = from_config\n");
  EXPECT_EQ(cli("ports --config " + q(tmp / "run.ini") + " -o " + q(tmp / "flag")), 0);
  EXPECT_TRUE(fs::exists(tmp / "flag" / "edges.csv"));
  EXPECT_FALSE(fs::exists(tmp / "from_config"));
  write(tmp / "bad.ini", "[thresholds]\nwobble = 3\n");
  EXPECT_EQ(cli("tracks --config " + q(tmp / "bad.ini")), 1);
}

TEST(Pipeline, EmptyInputGivesHeaderOnlyOutputs) {
  TempDir tmp("empty");
  write(tmp / "empty.nmea", "");
  pipeline::RunConfig cfg;
  cfg.inputs = {tmp / "empty.nmea"};
  cfg.out_dir = tmp / "out";
  const auto st = pipeline::run_decode(cfg);
  EXPECT_EQ(st.lines, 0u);
  EXPECT_EQ(read_file(tmp / "out" / "fixes.csv"), pipeline::fixes_csv_header());
  cfg.fleet = sim_files().fleet();
  const auto r = pipeline::run_indicators(cfg);
  EXPECT_TRUE(r.series.empty());
  EXPECT_EQ(read_file(tmp / "out" / "indicators.csv"),
            "group,granularity,date,cnm_nmi,n_active,n_idle,n_unknown,mean_speed\n");
}

TEST(Pipeline, CorruptLinesAreCountedAndReconciled) {
  TempDir tmp("corrupt");
  std::string feed = read_file(sim_files().feed()).substr(0, 200000);
  feed = feed.substr(0, feed.rfind('\n') + 1);
  feed += "garbage\n\n!AIVDM,1,1,,A,13u?etPv2;0n:dDPwUM1U1Cb069D,0*FF\n1583020800\t!AIVDM,2,2,7,A,0000,2*00\n";
  feed += "notanumber\t!AIVDM,1,1,,A,13u?etPv2;0n:dDPwUM1U1Cb069D,0*24\n";
  write(tmp / "mixed.nmea", feed);
  pipeline::RunConfig cfg;
  cfg.inputs = {tmp / "mixed.nmea"};
  cfg.out_dir = tmp / "out";
  const auto st = pipeline::run_decode(cfg);
  EXPECT_EQ(st.accounted(), st.lines);
  EXPECT_GE(st.error_total(), 3u);
  const auto stats = nlohmann::json::parse(read_file(tmp / "out" / "stats.json"));
  EXPECT_TRUE(stats["decode"]["reconciled"].get<bool>());
}

TEST(Pipeline, DecodedCsvGivesSameIndicators) {
  TempDir tmp("csv");
  auto cfg = config(tmp / "decoded");
  pipeline::run_decode(cfg);
  cfg.out_dir = tmp / "fused";
  pipeline::run_indicators(cfg);
  auto via_csv = config(tmp / "via_csv");
  via_csv.inputs = {tmp / "decoded" / "fixes.csv"};
  pipeline::run_indicators(via_csv);
  EXPECT_EQ(read_file(tmp / "fused" / "indicators.csv"), read_file(tmp / "via_csv" / "indicators.csv"));
}

TEST(Pipeline, RerunsAreByteIdentical) {
  TempDir tmp("rerun");
  for (const char* name : {"a", "b"}) {
    auto cfg = config(tmp / name);
    cfg.bbox = BoundingBox{49, 53, -1, 5};
    cfg.cell_size_deg = 0.25;
    pipeline::run_ports(cfg);
    pipeline::run_density(cfg);
    pipeline::run_indicators(cfg);
  }
  for (const char* f : {"visits.csv", "edges.csv", "pv.csv", "density.csv", "density.pgm", "indicators.csv",
                        "stats.json"})
    EXPECT_EQ(read_file(tmp / "a" / f), read_file(tmp / "b" / f)) << f;
}

TEST(Pipeline, PortsMatchSimulatedItinerary) {
  TempDir tmp("ports");
  const auto run = pipeline::run_ports(config(tmp / "out"));
  const auto expected = sim_files().result.detectable_itinerary(3600);
  ASSERT_EQ(run.visits.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_EQ(run.visits[i].port, expected[i].port);
    EXPECT_EQ(run.visits[i].arrival, expected[i].arrival);
    EXPECT_EQ(run.visits[i].departure, expected[i].departure);
  }
}

TEST(Pipeline, EgoAndDiff) {
  TempDir tmp("ego");
  auto cfg = config(tmp / "ports");
  pipeline::run_ports(cfg);
  const auto ego = pipeline::run_ego(tmp / "ports" / "edges.csv", "NLRTM", 0, false, tmp / "ego0");
  EXPECT_EQ(ego.hops.size(), 1u);
  EXPECT_EQ(read_file(tmp / "ego0" / "ego_edges.csv"), "src,dst,visits,mean_distance_nmi\n");
  EXPECT_THROW(pipeline::run_ego(tmp / "ports" / "edges.csv", "XXXXX", 1, false, tmp / "egox"), DataError);

  cfg.bbox = BoundingBox{49, 53, -1, 5};
  cfg.cell_size_deg = 0.5;
  cfg.out_dir = tmp / "d1";
  pipeline::run_density(cfg);
  cfg.cell_size_deg = 0.25;
  cfg.out_dir = tmp / "d2";
  pipeline::run_density(cfg);
  EXPECT_THROW(pipeline::run_diff_density(tmp / "d2", tmp / "d1", tmp / "diff"), GridMismatch);
  const auto d = pipeline::run_diff_density(tmp / "d2", tmp / "d2", tmp / "same");
  for (double v : d.values) EXPECT_EQ(v, 0.0);
}

TEST(Pipeline, DensityIntegralMatchesCnm) {
  TempDir tmp("dens");
  auto cfg = config(tmp / "out");
  cfg.bbox = BoundingBox{45, 56, -5, 10};
  cfg.cell_size_deg = 0.1;
  const auto r = pipeline::run_density(cfg);
  EXPECT_EQ(r.grid.spill_nmi, 0.0);
  EXPECT_NEAR(r.grid.integral_nmi() / r.cnm_nmi, 1.0, 1e-9);
}

TEST(Pipeline, ForecastFromHistoryFile) {
  TempDir tmp("fc");
  const auto points = pipeline::run_forecast(testing_support::test_data() / "monthly_cnm.csv", 2020, tmp.path());
  EXPECT_EQ(points.size(), 24u);
  const auto text = read_file(tmp / "forecast.csv");
  EXPECT_EQ(text.substr(0, text.find('\n')), "group,month,forecast,actual,delta_pct");
  EXPECT_EQ(cli("forecast " + q(testing_support::test_data() / "monthly_cnm.csv") + " --target-year 2020 -o " +
                q(tmp / "cli")),
            0);
  EXPECT_EQ(read_file(tmp / "cli" / "forecast.csv"), text);
}

TEST(Config, SampleFileParses) {
  const auto path = testing_support::data_dir() / "example.ini";
  const auto cfg = pipeline::load_config(path);
  ASSERT_TRUE(cfg.bbox);
  EXPECT_EQ(cfg.bbox->lon_min, -1.0);
  EXPECT_EQ(cfg.cell_size_deg, 0.1);
  EXPECT_EQ(cfg.from, parse_time("2020-03-01"));
  EXPECT_EQ(cfg.fleet->lexically_normal(), (testing_support::source_dir() / "sim" / "fleet.csv").lexically_normal());
  ASSERT_EQ(cfg.inputs.size(), 1u);
}
