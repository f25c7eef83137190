#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "renyi/initial_data.hpp"
#include "renyi/io.hpp"

using namespace renyi;

TEST(Io, FormatDoubleRoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) EXPECT_EQ(std::stod(format_double(x)), x);
  EXPECT_EQ(format_double(std::nan("")), "");
}

TEST(Io, SnapshotTableRoundTrip) {
  const Grid g = Grid::cartesian_symmetric(256, 8.0);
  const auto f = gaussian_mixture(g, 4);
  Series s{snapshot(f, 2.0, 1.0, true), snapshot(f, 2.0, 1.25), snapshot(f, 1.0, 1.5)};
  std::stringstream io;
  write_snapshots_csv(io, s);
  const Series back = read_snapshots_csv(io);
  ASSERT_EQ(back.size(), s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    EXPECT_EQ(back[k].t, s[k].t);
    EXPECT_EQ(back[k].mass, s[k].mass);
    EXPECT_EQ(back[k].H_p, s[k].H_p);
    EXPECT_EQ(back[k].N_p, s[k].N_p);
    EXPECT_EQ(back[k].F_p, s[k].F_p);
    EXPECT_EQ(back[k].I_p, s[k].I_p);
    EXPECT_EQ(back[k].upsilon, s[k].upsilon);
    EXPECT_EQ(back[k].D_p, s[k].D_p);
  }
  EXPECT_EQ(back[0].E_p, s[0].E_p);
  EXPECT_TRUE(std::isnan(back[2].E_p));
  EXPECT_FALSE(back[1].D_p.has_value());
  // writing the parsed table reproduces the bytes
  std::stringstream again, first;
  write_snapshots_csv(first, s);
  write_snapshots_csv(again, back);
  EXPECT_EQ(first.str(), again.str());
}

TEST(Io, SnapshotTableErrors) {
  std::stringstream empty;
  EXPECT_THROW(read_snapshots_csv(empty), FormatError);
  std::stringstream header("t,mass\n1,1\n");
  EXPECT_THROW(read_snapshots_csv(header), FormatError);
  std::stringstream short_row(std::string(kSnapshotHeader) + "\n1,1,1\n");
  EXPECT_THROW(read_snapshots_csv(short_row), FormatError);
  std::stringstream junk(std::string(kSnapshotHeader) + "\n1,1,1,1,1,1,1,,abc\n");
  EXPECT_THROW(read_snapshots_csv(junk), FormatError);
  std::stringstream crlf(std::string(kSnapshotHeader) + "\r\n1,1,2,3,4,5,6,,7\r\n");
  const auto s = read_snapshots_csv(crlf);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].upsilon, 7.0);
}

TEST(Io, ProfileRoundTripWithHeader) {
  for (const Grid& g : {Grid::cartesian_symmetric(100, 3.0), Grid::radial(3, 100, 4.0)}) {
    const auto f = gaussian_mixture(g, 8);
    std::stringstream io;
    write_profile(io, f, 2.5);
    const auto back = read_profile(io);
    EXPECT_TRUE(back.field.grid() == g);
    ASSERT_TRUE(back.t.has_value());
    EXPECT_EQ(*back.t, 2.5);
    for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(back.field[i], f[i]);
  }
}

TEST(Io, HeaderlessProfileInfersGrid) {
  std::stringstream line("x,u\n-1.5,0.1\n-0.5,0.3\n0.5,0.4\n1.5,0.2\n");
  const auto a = read_profile(line);
  EXPECT_FALSE(a.t.has_value());
  EXPECT_FALSE(a.field.grid().is_radial());
  EXPECT_DOUBLE_EQ(a.field.grid().spacing(), 1.0);
  EXPECT_DOUBLE_EQ(a.field.grid().coordinate(0), -1.5);
  std::stringstream ball("r,u\n0.25,4\n0.75,3\n1.25,2\n1.75,1\n");
  const auto b = read_profile(ball, 3);
  EXPECT_TRUE(b.field.grid().is_radial());
  EXPECT_EQ(b.field.grid().dimension(), 3);
  EXPECT_DOUBLE_EQ(b.field.grid().spacing(), 0.5);
  std::stringstream uneven("x,u\n0,1\n1,1\n3,1\n4,1\n");
  EXPECT_THROW(read_profile(uneven), FormatError);
  std::stringstream off_centre("r,u\n0.0,1\n0.5,1\n1.0,1\n1.5,1\n");
  EXPECT_THROW(read_profile(off_centre), FormatError);
}

TEST(Io, ProfileErrors) {
  std::stringstream empty;
  EXPECT_THROW(read_profile(empty), FormatError);
  std::stringstream columns("a,b\n1,2\n");
  EXPECT_THROW(read_profile(columns), FormatError);
  std::stringstream few("x,u\n0,1\n1,1\n");
  EXPECT_THROW(read_profile(few), FormatError);
  std::stringstream token("# geometry\nx,u\n0,1\n1,1\n2,1\n3,1\n");
  EXPECT_THROW(read_profile(token), FormatError);
  std::stringstream geometry("# geometry=torus spacing=1 origin=0\nx,u\n0,1\n1,1\n2,1\n3,1\n");
  EXPECT_THROW(read_profile(geometry), FormatError);
  std::stringstream negative("x,u\n0,1\n1,-1\n2,1\n3,1\n");
  EXPECT_THROW(read_profile(negative), DomainError);
}

TEST(Io, VerdictJson) {
  const std::vector<Verdict> vs{{"concavity", -1e-3, 1e-6, true, "ok"}, {"debruijn", 0.2, 1e-2, false, "bad"}};
  const auto j = verdicts_json(vs);
  EXPECT_FALSE(j["all_pass"].get<bool>());
  ASSERT_EQ(j["verdicts"].size(), 2u);
  EXPECT_EQ(j["verdicts"][1]["check"], "debruijn");
  EXPECT_EQ(j["verdicts"][0]["value"].get<double>(), -1e-3);
  const auto parsed = nlohmann::json::parse(j.dump());
  EXPECT_EQ(parsed, j);
  const std::string table = summary_table(vs);
  EXPECT_NE(table.find("PASS"), std::string::npos);
  EXPECT_NE(table.find("FAIL"), std::string::npos);
  EXPECT_TRUE(verdicts_json({})["all_pass"].get<bool>());
}

TEST(Io, Fnv1a) {
  // published test vectors of 64-bit FNV-1a
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cull);
  EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ull);
  EXPECT_EQ(hex64(0xabcull), "0000000000000abc");
}
