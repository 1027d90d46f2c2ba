#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <vector>

#include "jumps/topology.hpp"

using namespace jumps;

namespace {

// Test-only oracle: minimum hop count by exhaustive enumeration of all
// simple paths. Only usable on tiny graphs.
int brute_force_hops(const std::vector<std::vector<int>>& adjacency, int from, int to,
                     std::vector<char>& visited) {
  if (from == to) return 0;
  visited[from] = 1;
  int best = 1 << 20;
  for (const int next : adjacency[from]) {
    if (visited[next]) continue;
    const int sub = brute_force_hops(adjacency, next, to, visited);
    best = std::min(best, sub == (1 << 20) ? sub : sub + 1);
  }
  visited[from] = 0;
  return best;
}

std::vector<std::vector<int>> brute_force_adjacency(const std::vector<Vec2>& positions,
                                                    double radio_range) {
  std::vector<std::vector<int>> adjacency(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i)
    for (std::size_t j = i + 1; j < positions.size(); ++j)
      if (distance(positions[i], positions[j]) <= radio_range) {
        adjacency[i].push_back(static_cast<int>(j));
        adjacency[j].push_back(static_cast<int>(i));
      }
  return adjacency;
}

TopologyConfig small_config() {
  TopologyConfig config;
  config.field_radius = 250.0;
  config.radio_range = 50.0;
  config.neighbor_density = 10.0;
  config.landmark_count = 4;
  config.seed = 7;
  return config;
}

}  // namespace

TEST_CASE("population_for_density matches the published populations") {
  CHECK(population_for_density(10, 1000, 50) == 4400);
  CHECK(population_for_density(20, 1000, 50) == 8400);
  CHECK(population_for_density(30, 1000, 50) == 12400);
  CHECK(population_for_density(40, 1000, 50) == 16400);
  CHECK(population_for_density(50, 1000, 50) == 20400);
  CHECK(population_for_density(1, 100, 100) == 2);
}

TEST_CASE("population_for_density rejects non-positive domains") {
  CHECK_THROWS_AS(population_for_density(0, 1000, 50), std::domain_error);
  CHECK_THROWS_AS(population_for_density(-1, 1000, 50), std::domain_error);
  CHECK_THROWS_AS(population_for_density(10, 1000, 0), std::domain_error);
  CHECK_THROWS_AS(population_for_density(10, 40, 50), std::domain_error);
}

TEST_CASE("place_landmarks puts points on the border at equal angles") {
  SUBCASE("four landmarks sit on the axes") {
    const auto points = place_landmarks(4, 1000.0);
    REQUIRE(points.size() == 4);
    CHECK(points[0].x == doctest::Approx(1000.0));
    CHECK(points[0].y == doctest::Approx(0.0));
    CHECK(points[1].x == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(points[1].y == doctest::Approx(1000.0));
    CHECK(points[2].x == doctest::Approx(-1000.0));
    CHECK(points[3].y == doctest::Approx(-1000.0));
  }
  SUBCASE("three landmarks are 120 degrees apart") {
    const auto points = place_landmarks(3, 1000.0);
    for (std::size_t k = 0; k < 3; ++k) {
      const double angle_k = std::atan2(points[k].y, points[k].x);
      const double angle_next = std::atan2(points[(k + 1) % 3].y, points[(k + 1) % 3].x);
      double gap = angle_next - angle_k;
      while (gap < 0) gap += 2.0 * std::numbers::pi;
      CHECK(gap == doctest::Approx(2.0 * std::numbers::pi / 3).epsilon(1e-12));
    }
  }
  SUBCASE("eight landmarks lie exactly on the circle") {
    const auto points = place_landmarks(8, 777.5);
    for (const Vec2& p : points) CHECK(norm(p) == doctest::Approx(777.5).epsilon(1e-12));
  }
  SUBCASE("angle offset rotates the whole arrangement") {
    const auto points = place_landmarks(2, 10.0, std::numbers::pi / 2);
    CHECK(points[0].x == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(points[0].y == doctest::Approx(10.0));
  }
  CHECK_THROWS_AS(place_landmarks(0, 10.0), std::domain_error);
}

TEST_CASE("generate_topology draws the configured population and stays connected") {
  TopologyConfig config;
  config.field_radius = 1000.0;
  config.radio_range = 50.0;
  config.neighbor_density = 10.0;
  config.landmark_count = 3;
  config.seed = 11;
  const Topology topo = Topology::generate(config);
  CHECK(topo.node_count() == 4400 + 3);
  CHECK(topo.random_node_count() == 4400);
  CHECK(topo.landmark_ids() == std::vector<NodeId>{4400, 4401, 4402});
  // connectivity is part of the generator contract
  const auto hops = topo.bfs_hops(0);
  CHECK(std::all_of(hops.begin(), hops.end(), [](std::int32_t h) { return h >= 0; }));
  // every random node strictly inside, every landmark exactly on the border
  for (std::size_t i = 0; i < topo.random_node_count(); ++i)
    CHECK(norm(topo.position(static_cast<NodeId>(i))) < config.field_radius);
  for (const NodeId id : topo.landmark_ids())
    CHECK(norm(topo.position(id)) == doctest::Approx(config.field_radius).epsilon(1e-12));
}

TEST_CASE("a two-node draw yields the single edge") {
  TopologyConfig config;
  config.field_radius = 50.0;
  config.radio_range = 50.0;
  config.neighbor_density = 0.2;  // population rounds to 1
  config.landmark_count = 1;
  config.seed = 3;
  const Topology topo = Topology::generate(config);
  REQUIRE(topo.node_count() == 2);
  CHECK(topo.edge_count() == 1);
  CHECK(topo.bfs_hops(0)[1] == 1);
}

TEST_CASE("generation is deterministic given the seed") {
  const TopologyConfig config = small_config();
  const Topology a = Topology::generate(config);
  const Topology b = Topology::generate(config);
  REQUIRE(a.node_count() == b.node_count());
  for (NodeId i = 0; i < a.node_count(); ++i) {
    CHECK(a.position(i).x == b.position(i).x);
    CHECK(a.position(i).y == b.position(i).y);
    const auto na = a.neighbors(i);
    const auto nb = b.neighbors(i);
    REQUIRE(na.size() == nb.size());
    CHECK(std::equal(na.begin(), na.end(), nb.begin()));
  }
  CHECK(a.connectivity_redraws() == b.connectivity_redraws());
}

TEST_CASE("grid-bucket adjacency equals the exhaustive pairwise oracle") {
  for (const std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    TopologyConfig config = small_config();
    config.seed = seed;
    const Topology topo = Topology::generate(config);
    const auto oracle = brute_force_adjacency(topo.positions(), config.radio_range);
    for (NodeId i = 0; i < topo.node_count(); ++i) {
      const auto fast = topo.neighbors(i);
      REQUIRE(fast.size() == oracle[i].size());
      for (std::size_t k = 0; k < fast.size(); ++k)
        CHECK(static_cast<int>(fast[k]) == oracle[i][k]);
    }
  }
}

TEST_CASE("raw draws reproduce the density law within 10 percent") {
  // 2000 nodes at R=1000, r=50 predict a mean degree of M*(r/R)^2 = 5.
  const std::size_t m = 2000;
  const double field_radius = 1000.0;
  const double radio_range = 50.0;
  const double predicted = static_cast<double>(m) * (radio_range / field_radius) *
                           (radio_range / field_radius);
  double degree_sum = 0.0;
  std::size_t node_total = 0;
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const auto positions = sample_disc_positions(rng, m, field_radius);
    // exhaustive pairwise count, independent of the bucketed builder
    std::size_t edges = 0;
    for (std::size_t i = 0; i < positions.size(); ++i)
      for (std::size_t j = i + 1; j < positions.size(); ++j)
        if (squared_distance(positions[i], positions[j]) <= radio_range * radio_range) ++edges;
    degree_sum += 2.0 * static_cast<double>(edges);
    node_total += m;
  }
  const double mean_degree = degree_sum / static_cast<double>(node_total);
  CHECK(mean_degree > 0.9 * predicted);
  CHECK(mean_degree < 1.1 * predicted);
}

TEST_CASE("bfs_hops basics") {
  TopologyConfig config;
  config.field_radius = 1000.0;
  config.radio_range = 50.0;
  config.neighbor_density = 1.0;
  config.landmark_count = 1;

  SUBCASE("a chain of 0.9r gaps needs one hop per link") {
    // four nodes on a line: consecutive nodes adjacent, next-nearest not
    std::vector<Vec2> positions{{-200, 0}, {-155, 0}, {-110, 0}, {-65, 0}};
    std::vector<Vec2> chain_to_border;
    // join the last chain node to the landmark at (1000, 0) with relays
    const Vec2 last{-65, 0};
    const Vec2 border{1000, 0};
    const int relays = 24;
    for (int i = 1; i <= relays; ++i) {
      const double f = static_cast<double>(i) / (relays + 1);
      chain_to_border.push_back({last.x + (border.x - last.x) * f, last.y});
    }
    positions.insert(positions.end(), chain_to_border.begin(), chain_to_border.end());
    positions.push_back(border);
    std::vector<NodeId> landmark_ids{static_cast<NodeId>(positions.size() - 1)};
    const Topology topo = Topology::from_positions(config, positions, landmark_ids);

    const auto hops = topo.bfs_hops(0);
    CHECK(hops[0] == 0);
    CHECK(hops[1] == 1);
    CHECK(hops[3] == 3);

    // brute-force path enumeration agrees on the 4-node chain prefix
    const auto adjacency = brute_force_adjacency(topo.positions(), config.radio_range);
    std::vector<char> visited(positions.size(), 0);
    CHECK(brute_force_hops(adjacency, 0, 3, visited) == 3);
    CHECK(brute_force_hops(adjacency, 0, 1, visited) == 1);
  }
}

TEST_CASE("hop metric properties on a generated topology") {
  const Topology topo = Topology::generate(small_config());
  const double r = topo.config().radio_range;
  std::mt19937_64 rng(5);
  const auto pick = [&] { return static_cast<NodeId>(rng() % topo.node_count()); };

  std::vector<std::vector<std::int32_t>> from(8);
  std::vector<NodeId> sources;
  for (auto& hops : from) {
    const NodeId s = pick();
    sources.push_back(s);
    hops = topo.bfs_hops(s);
  }

  for (std::size_t a = 0; a < sources.size(); ++a) {
    // symmetry: hops(a -> b) == hops(b -> a)
    for (std::size_t b = 0; b < sources.size(); ++b)
      CHECK(from[a][sources[b]] == from[b][sources[a]]);
    for (int k = 0; k < 50; ++k) {
      const NodeId c = pick();
      // metric bound: each hop spans at most r
      CHECK(distance(topo.position(sources[a]), topo.position(c)) <=
            static_cast<double>(from[a][c]) * r + 1e-9);
      // triangle inequality through any intermediate source
      for (std::size_t b = 0; b < sources.size(); ++b)
        CHECK(from[a][c] <= from[a][sources[b]] + from[b][c]);
    }
  }
}

TEST_CASE("generation gives up when density cannot connect the disc") {
  TopologyConfig config;
  config.field_radius = 1000.0;
  config.radio_range = 50.0;
  config.neighbor_density = 0.5;  // 600 nodes, mean degree ~1.5: hopeless
  config.landmark_count = 3;
  config.seed = 1;
  config.max_connectivity_retries = 3;
  CHECK_THROWS_AS(Topology::generate(config), ConnectivityExhausted);
  try {
    Topology::generate(config);
  } catch (const ConnectivityExhausted& e) {
    CHECK(e.attempts() == 3);
  }
}

TEST_CASE("from_positions validates its invariants") {
  TopologyConfig config;
  config.field_radius = 100.0;
  config.radio_range = 50.0;
  config.neighbor_density = 1.0;
  config.landmark_count = 1;

  SUBCASE("landmark must sit on the border") {
    CHECK_THROWS_AS(
        Topology::from_positions(config, {{0, 0}, {80, 0}}, std::vector<NodeId>{1}),
        std::invalid_argument);
  }
  SUBCASE("interior node must be strictly inside") {
    CHECK_THROWS_AS(
        Topology::from_positions(config, {{100, 0}, {0, 100}}, std::vector<NodeId>{1}),
        std::invalid_argument);
  }
  SUBCASE("graph must be connected") {
    CHECK_THROWS_AS(
        Topology::from_positions(config, {{-60, 0}, {100, 0}}, std::vector<NodeId>{1}),
        std::invalid_argument);
  }
  SUBCASE("landmarks must be the trailing ids") {
    CHECK_THROWS_AS(
        Topology::from_positions(config, {{100, 0}, {60, 0}}, std::vector<NodeId>{0}),
        std::invalid_argument);
  }
  SUBCASE("a valid two-node topology builds") {
    const Topology topo =
        Topology::from_positions(config, {{60, 0}, {100, 0}}, std::vector<NodeId>{1});
    CHECK(topo.edge_count() == 1);
    CHECK(topo.landmark(0) == 1);
  }
}
