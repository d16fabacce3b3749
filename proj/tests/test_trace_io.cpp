#include <catch2/catch_amalgamated.hpp>
#include <filesystem>

#include "lipcover/trace_io.hpp"

using namespace lipcover;

namespace {

std::vector<IterationTrace> sample_trace() {
  IterationTrace a;
  a.iter = 1;
  a.query = {1.5, -2.25};
  a.j_at_query = 3.375;
  a.h_at_query = -0.125;
  a.feasible_flag = true;
  a.within_delta_flag = true;
  a.delta_global = kInf;
  a.surrogate_lb = -7.5;
  a.subsolver_nodes = 42;
  a.wall_ms = 3;

  IterationTrace b;
  b.iter = 2;
  b.query = {0.1, 0.2};
  b.relax_point = Point{0.3, 0.4};
  b.j_at_query = 1.0 / 3.0;
  b.h_at_query = 1e-300;
  b.feasible_flag = false;
  b.within_delta_flag = false;
  b.delta_global = 0.5;
  b.surrogate_lb = 0.25;
  b.subsolver_nodes = 7;
  b.wall_ms = 11;
  b.projection_clamped = true;
  return {a, b};
}

}  // namespace

TEST_CASE("trace CSV round-trips losslessly") {
  const auto trace = sample_trace();
  const auto parsed = trace_from_csv(trace_to_csv(trace));
  REQUIRE(parsed.size() == trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    REQUIRE(parsed[i].iter == trace[i].iter);
    REQUIRE(parsed[i].query == trace[i].query);
    REQUIRE(parsed[i].relax_point == trace[i].relax_point);
    REQUIRE(parsed[i].j_at_query == trace[i].j_at_query);
    REQUIRE(parsed[i].h_at_query == trace[i].h_at_query);
    REQUIRE(parsed[i].feasible_flag == trace[i].feasible_flag);
    REQUIRE(parsed[i].within_delta_flag == trace[i].within_delta_flag);
    REQUIRE(parsed[i].delta_global == trace[i].delta_global);
    REQUIRE(parsed[i].surrogate_lb == trace[i].surrogate_lb);
    REQUIRE(parsed[i].subsolver_nodes == trace[i].subsolver_nodes);
    REQUIRE(parsed[i].wall_ms == trace[i].wall_ms);
    REQUIRE(parsed[i].projection_clamped == trace[i].projection_clamped);
  }
}

TEST_CASE("trace CSV writes atomically and reads back from disk") {
  const auto dir = std::filesystem::temp_directory_path() / "lipcover_test_io";
  std::filesystem::create_directories(dir);
  const auto path = dir / "trace.csv";
  const auto trace = sample_trace();
  write_trace_csv(path, trace);
  REQUIRE_FALSE(std::filesystem::exists(path.string() + ".tmp"));
  const auto parsed = read_trace_csv(path);
  REQUIRE(parsed.size() == trace.size());
  REQUIRE(parsed[1].query == trace[1].query);
  std::filesystem::remove_all(dir);
}

TEST_CASE("csv quoting handles embedded commas and quotes") {
  REQUIRE(detail::csv_quote("plain") == "plain");
  REQUIRE(detail::csv_quote("a,b") == "\"a,b\"");
  REQUIRE(detail::csv_quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
  const auto fields = detail::csv_split("1,\"a,b\",\"say \"\"hi\"\"\"");
  REQUIRE(fields == std::vector<std::string>{"1", "a,b", "say \"hi\""});
}

TEST_CASE("header mismatch is rejected") {
  REQUIRE_THROWS(trace_from_csv("bogus,header\n1,2\n"));
}
