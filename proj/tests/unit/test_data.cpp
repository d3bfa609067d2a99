#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <random>
#include <set>
#include <sstream>

#include <Eigen/Dense>

#include "gcnet/data/csv.hpp"
#include "gcnet/data/dataset.hpp"
#include "gcnet/data/scaling.hpp"
#include "gcnet/data/split.hpp"

using namespace gcnet;
using namespace gcnet::data;

namespace {

TrajectoryDataset synthetic(Problem p, std::size_t trajectories, std::size_t samples, std::uint64_t seed = 1,
                            std::size_t aux_dim = 0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0), unit(0.0, 1.0);
  TrajectoryDataset ds = TrajectoryDataset::empty_for(p, samples, aux_dim);
  for (std::size_t t = 0; t < trajectories; ++t) {
    std::vector<double> times, states, controls, aux;
    const double tf = 1.0 + unit(rng);
    for (std::size_t k = 0; k < samples; ++k) {
      times.push_back(tf * static_cast<double>(k) / static_cast<double>(samples - 1));
      for (std::size_t i = 0; i < ds.state_dim; ++i) states.push_back(u(rng));
      if (p == Problem::Drone) {
        for (int i = 0; i < 4; ++i) controls.push_back(unit(rng));
      } else {
        if (p == Problem::Landing) controls.push_back(unit(rng));
        Eigen::Vector3d d(u(rng), u(rng), u(rng));
        d.normalize();
        controls.insert(controls.end(), d.data(), d.data() + 3);
      }
    }
    for (std::size_t i = 0; i < aux_dim; ++i) aux.push_back(u(rng));
    ds.append_trajectory(100 + t, times, states, controls, tf, aux);
  }
  return ds;
}

std::string bytes_of(const TrajectoryDataset& ds) {
  std::ostringstream out;
  write_dataset(out, ds);
  return out.str();
}

}  // namespace

TEST_SUITE("data") {

TEST_CASE("dataset round trip is exact") {
  for (Problem p : {Problem::Drone, Problem::Landing, Problem::Transfer}) {
    const TrajectoryDataset ds = synthetic(p, 5, 7, 3, p == Problem::Drone ? 0 : 8);
    CHECK_NOTHROW(ds.validate());
    CHECK(ds.record_count() == 35);
    CHECK(ds.state_dim == state_dim(p));
    CHECK(ds.control_dim == control_dim(p));
    std::istringstream in(bytes_of(ds));
    const TrajectoryDataset back = read_dataset(in, p);
    CHECK(back == ds);
    CHECK(bytes_of(back) == bytes_of(ds));
  }
  const auto path = std::filesystem::temp_directory_path() / "gcnet_unit_roundtrip.gcdt";
  const TrajectoryDataset ds = synthetic(Problem::Transfer, 3, 4);
  write_dataset(path, ds);
  CHECK(read_dataset(path) == ds);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_dataset(path), IoError);
}

TEST_CASE("corrupt containers raise distinct errors") {
  const std::string good = bytes_of(synthetic(Problem::Transfer, 4, 5));

  std::istringstream truncated(good.substr(0, good.size() - 5));
  CHECK_THROWS_AS(read_dataset(truncated), TruncatedError);

  std::string bad = good;
  bad[1] = 'X';
  std::istringstream bad_magic(bad);
  CHECK_THROWS_AS(read_dataset(bad_magic), BadHeaderError);

  bad = good;
  bad[4] = 9;  // version
  std::istringstream bad_version(bad);
  CHECK_THROWS_AS(read_dataset(bad_version), BadHeaderError);

  bad = good;
  bad[9] = 5;  // state_dim of a transfer dataset
  std::istringstream bad_dim(bad);
  CHECK_THROWS_AS(read_dataset(bad_dim), DimensionMismatchError);

  std::istringstream other(good);
  CHECK_THROWS_AS(read_dataset(other, Problem::Landing), ProblemMismatchError);

  std::istringstream empty("");
  CHECK_THROWS_AS(read_dataset(empty), IoError);
}

TEST_CASE("control constraints") {
  CHECK(control_violation(Problem::Drone, std::vector<double>{0.0, 1.0, 0.5, 0.2}).empty());
  CHECK_FALSE(control_violation(Problem::Drone, std::vector<double>{0.0, 1.2, 0.5, 0.2}).empty());
  CHECK_FALSE(control_violation(Problem::Transfer, std::vector<double>{1.0, 1.0, 0.0}).empty());
  CHECK_FALSE(control_violation(Problem::Landing, std::vector<double>{-0.1, 1.0, 0.0, 0.0}).empty());
  CHECK(control_violation(Problem::Landing, std::vector<double>{0.3, 0.0, 1.0, 0.0}).empty());
}

TEST_CASE("csv ingest") {
  const TrajectoryDataset ds = synthetic(Problem::Drone, 3, 4, 9);
  std::ostringstream out;
  write_csv(out, ds);
  const std::string text = out.str();
  CHECK(text.rfind("trajectory,time,s0,", 0) == 0);
  std::istringstream in(text);
  const TrajectoryDataset back = read_csv(in, Problem::Drone);
  CHECK(back.state_dim == 16);
  CHECK(back.control_dim == 4);
  CHECK(back.trajectory_count() == 3);
  CHECK(back == ds);

  SUBCASE("control outside the box names the row") {
    std::istringstream lines(text);
    std::string line, edited;
    int n = 0;
    while (std::getline(lines, line)) {
      ++n;
      if (n == 6) {
        // Replace the first control value (column 2 + 16).
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
        cells[18] = "1.5";
        line.clear();
        for (std::size_t i = 0; i < cells.size(); ++i) line += (i ? "," : "") + cells[i];
      }
      edited += line + "\n";
    }
    std::istringstream bad(edited);
    try {
      read_csv(bad, Problem::Drone);
      FAIL("expected a row error");
    } catch (const CsvRowError& e) {
      CHECK(e.line() == 6);
    }
  }
  SUBCASE("wrong column count") {
    std::istringstream bad("trajectory,time,s0,u0,tf\n0,0,1,1,1\n");
    CHECK_THROWS_AS(read_csv(bad, Problem::Drone), IoError);
  }
  SUBCASE("empty input") {
    std::istringstream empty("");
    CHECK_THROWS_AS(read_csv(empty, Problem::Drone), EmptyInputError);
    std::istringstream header_only(text.substr(0, text.find('\n') + 1));
    CHECK_THROWS_AS(read_csv(header_only, Problem::Drone), EmptyInputError);
  }
}

TEST_CASE("split at trajectory granularity") {
  const TrajectoryDataset ds = synthetic(Problem::Transfer, 10, 5);
  const Split s = split(ds, {0.8, 42});
  CHECK(s.train.trajectory_count() == 8);
  CHECK(s.validation.trajectory_count() == 2);
  CHECK(train_trajectory_count(10, 0.8) == 8);

  std::set<std::uint64_t> train_ids(s.train.trajectory_ids.begin(), s.train.trajectory_ids.end());
  std::set<std::uint64_t> val_ids(s.validation.trajectory_ids.begin(), s.validation.trajectory_ids.end());
  CHECK(train_ids.size() == 8);
  CHECK(val_ids.size() == 2);
  std::set<std::uint64_t> all = train_ids;
  all.insert(val_ids.begin(), val_ids.end());
  CHECK(all.size() == 10);

  const Split again = split(ds, {0.8, 42});
  CHECK(again.train == s.train);
  CHECK(again.validation == s.validation);

  bool differs = false;
  for (std::uint64_t seed = 1; seed < 20 && !differs; ++seed)
    differs = split(ds, {0.8, seed}).validation.trajectory_ids != s.validation.trajectory_ids;
  CHECK(differs);
}

TEST_CASE("min-max scaling") {
  TrajectoryDataset ds = TrajectoryDataset::empty_for(Problem::Transfer, 2);
  const std::vector<double> t{0.0, 1.0};
  const std::vector<double> c{1, 0, 0, 1, 0, 0};
  ds.append_trajectory(0, t, std::vector<double>{2, -1, 0, 0, 0, 5, 4, 1, 1, 1, 1, 6}, c, 1.0);
  const ScalingTransform sc = fit_scaler(ds);
  CHECK(sc.scale_component(0, 3.0) == 0.0);
  CHECK(sc.scale_component(0, 2.0) == -1.0);
  CHECK(sc.scale_component(0, 4.0) == 1.0);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(sc.scale_component(i, sc.min[i]) == -1.0);
    CHECK(sc.scale_component(i, sc.max[i]) == 1.0);
  }
  const std::vector<double> x{2.7, -0.3, 0.9, 0.1, 0.5, 5.5};
  const auto back = sc.invert(sc.apply(x));
  for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(back[i] - x[i]) < 1e-12);

  const TrajectoryDataset rnd = synthetic(Problem::Landing, 6, 9, 4);
  const ScalingTransform rs = fit_scaler(rnd);
  for (std::size_t r = 0; r < rnd.record_count(); ++r)
    for (double v : rs.apply(rnd.state(r))) {
      CHECK(v >= -1.0);
      CHECK(v <= 1.0);
    }

  TrajectoryDataset flat = TrajectoryDataset::empty_for(Problem::Transfer, 2);
  flat.append_trajectory(0, t, std::vector<double>{1, 2, 3, 4, 5, 6, 1, 2, 3, 4, 5, 7}, c, 1.0);
  try {
    fit_scaler(flat);
    FAIL("expected a constant-component error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find('0') != std::string::npos);
  }

  const auto path = std::filesystem::temp_directory_path() / "gcnet_unit_scaler.txt";
  save_scaler(path, rs);
  CHECK(load_scaler(path) == rs);
  std::filesystem::remove(path);
}

TEST_CASE("batch iteration") {
  const TrajectoryDataset ds = synthetic(Problem::Transfer, 2, 5);
  const ScalingTransform sc = fit_scaler(ds);
  BatchIterator it(ds, sc, 4, 7);
  CHECK(it.batch_count() == 3);
  std::vector<std::size_t> sizes;
  Batch b;
  while (it.next(b)) {
    sizes.push_back(b.inputs.rows);
    CHECK(b.targets.rows == b.inputs.rows);
    CHECK(b.inputs.cols == 6);
    CHECK(b.targets.cols == 3);
  }
  CHECK(sizes == std::vector<std::size_t>{4, 4, 2});

  BatchIterator a(ds, sc, 3, 1), c(ds, sc, 3, 2);
  CHECK(a.order() != c.order());
  auto oa = a.order(), oc = c.order();
  std::sort(oa.begin(), oa.end());
  std::sort(oc.begin(), oc.end());
  CHECK(oa == oc);
  for (std::size_t i = 0; i < oa.size(); ++i) CHECK(oa[i] == i);
  BatchIterator a2(ds, sc, 3, 1);
  CHECK(a2.order() == a.order());

  // Targets stay raw and inputs are scaled.
  BatchIterator one(ds, sc, 10, 3);
  REQUIRE(one.next(b));
  for (std::size_t r = 0; r < b.inputs.rows; ++r) {
    const std::size_t rec = one.order()[r];
    for (std::size_t j = 0; j < 3; ++j) CHECK(b.targets(r, j) == ds.control(rec)[j]);
    for (std::size_t j = 0; j < 6; ++j) CHECK(b.inputs(r, j) == sc.scale_component(j, ds.state(rec)[j]));
  }

  const Batch full = full_batch(ds, sc);
  CHECK(full.inputs.rows == ds.record_count());
}

}  // TEST_SUITE
