#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gridfft/parallel_dft.hpp"
#include "oracles.hpp"

using namespace gridfft;
using gridfft::testing::oracle_dft;
using gridfft::testing::oracle_dft_nd;
using gridfft::testing::random_tensor;
using gridfft::testing::random_vec;
using gridfft::testing::rel_l2;

namespace {

DftRun run_1d(AlgorithmKind kind, std::int64_t n, std::int64_t ranks, std::uint64_t seed) {
  const DftProblem problem{Shape{n}, {}, OutputMode::Natural};
  const Tensor input{Shape{n}, random_vec(n, seed)};
  return run_parallel_dft(problem, kind, Grid{Shape{ranks}}, input);
}

DftRun run_3d(AlgorithmKind kind, Shape dims, Shape grid, OutputMode mode, std::uint64_t seed) {
  const DftProblem problem{dims, {}, mode};
  const Tensor input = random_tensor(dims, seed);
  return run_parallel_dft(problem, kind, Grid{grid}, input);
}

int collectives(const DftRun& run) {
  const auto count = count_collectives(run.run.logs[0]);
  for (const auto& log : run.run.logs) REQUIRE(count_collectives(log) == count);
  return static_cast<int>(count);
}

}  // namespace

TEST_CASE("balanced_factor_pair") {
  CHECK(balanced_factor_pair(16, 2) == std::pair<std::int64_t, std::int64_t>{4, 4});
  CHECK(balanced_factor_pair(16, 4) == std::pair<std::int64_t, std::int64_t>{4, 4});
  CHECK(balanced_factor_pair(8, 2) == std::pair<std::int64_t, std::int64_t>{2, 4});
  CHECK(balanced_factor_pair(7, 1) == std::pair<std::int64_t, std::int64_t>{1, 7});
  CHECK_THROWS_AS(balanced_factor_pair(8, 4), Error);
}

TEST_CASE("sixstep runs in three exchanges and matches the oracle") {
  const auto run = run_1d(AlgorithmKind::Sixstep1d, 16, 2, 1);
  CHECK(collectives(run) == 3);
  CHECK(rel_l2(run.gathered.data(), oracle_dft(random_vec(16, 1))) < 1e-10);

  // stage labels as advertised
  std::vector<std::string> stages;
  for (const auto& e : run.run.logs[0]) stages.push_back(e.stage);
  CHECK(stages == std::vector<std::string>{"redistribute-in", "global-transpose",
                                           "redistribute-out"});

  SUBCASE("single rank stays local and equals ct_step") {
    const auto solo = run_1d(AlgorithmKind::Sixstep1d, 16, 1, 1);
    CHECK(collectives(solo) == 0);
    CHECK(rel_l2(solo.gathered.data(), ct_step(random_vec(16, 1), 4, 4)) < 1e-12);
  }

  SUBCASE("larger case, p = 4") {
    const auto big = run_1d(AlgorithmKind::Sixstep1d, 64, 4, 2);
    CHECK(collectives(big) == 3);
    CHECK(rel_l2(big.gathered.data(), oracle_dft(random_vec(64, 2))) < 1e-10);
  }
}

TEST_CASE("cyclic runs in one exchange and keeps its distribution") {
  const auto run = run_1d(AlgorithmKind::Cyclic1d, 64, 2, 3);
  CHECK(collectives(run) == 1);
  CHECK(rel_l2(run.gathered.data(), oracle_dft(random_vec(64, 3))) < 1e-10);
  CHECK(run.run.output.dist().str() == "[(0),()]");  // same as the input layout
  CHECK(run.run.output.global_shape() == Shape{8, 8});

  SUBCASE("the size-256 case on four ranks") {
    const auto big = run_1d(AlgorithmKind::Cyclic1d, 256, 4, 4);
    CHECK(collectives(big) == 1);
    CHECK(rel_l2(big.gathered.data(), oracle_dft(random_vec(256, 4))) < 1e-10);
  }

  SUBCASE("single rank needs no exchange") {
    const auto solo = run_1d(AlgorithmKind::Cyclic1d, 64, 1, 3);
    CHECK(collectives(solo) == 0);
  }

  SUBCASE("indivisible factors are rejected") {
    const DftProblem problem{Shape{12}, {std::pair<std::int64_t, std::int64_t>{3, 4}},
                             OutputMode::Natural};
    const Tensor input{Shape{12}, random_vec(12, 5)};
    CHECK_THROWS_AS((void)run_parallel_dft(problem, AlgorithmKind::Cyclic1d, Grid{Shape{2}}, input),
                    Error);
  }
}

TEST_CASE("slab decomposition") {
  const Tensor cube = random_tensor(Shape{8, 8, 8}, 6);
  const Tensor want = oracle_dft_nd(cube);

  const auto natural = run_3d(AlgorithmKind::SlabPencil, Shape{8, 8, 8}, Shape{2},
                              OutputMode::Natural, 6);
  CHECK(collectives(natural) == 2);
  CHECK(rel_l2(natural.gathered.data(), want.data()) < 1e-10);
  CHECK(natural.run.output.dist().str() == "[(),(),(0)]");

  const auto shuffled = run_3d(AlgorithmKind::SlabPencil, Shape{8, 8, 8}, Shape{2},
                               OutputMode::Shuffled, 6);
  CHECK(collectives(shuffled) == 1);
  CHECK(rel_l2(shuffled.gathered.data(), want.data()) < 1e-10);
  CHECK(shuffled.run.output.global_shape() == Shape{64, 8});
  CHECK(shuffled.run.output.dist().str() == "[(0),()]");

  SUBCASE("shuffled and natural gathers agree bitwise") {
    CHECK(shuffled.gathered == natural.gathered);
  }

  SUBCASE("non-cubic extents where p divides the plane but not n0") {
    const auto run = run_3d(AlgorithmKind::SlabPencil, Shape{4, 8, 16}, Shape{8},
                            OutputMode::Natural, 7);
    CHECK(collectives(run) == 2);
    const Tensor ref = oracle_dft_nd(random_tensor(Shape{4, 8, 16}, 7));
    CHECK(rel_l2(run.gathered.data(), ref.data()) < 1e-10);
  }

  SUBCASE("divisibility is enforced") {
    const DftProblem problem{Shape{8, 8, 8}, {}, OutputMode::Natural};
    CHECK_THROWS_AS((void)run_parallel_dft(problem, AlgorithmKind::SlabPencil, Grid{Shape{3}},
                                           random_tensor(Shape{8, 8, 8}, 1)),
                    Error);
  }
}

TEST_CASE("pencil decomposition") {
  const Tensor cube = random_tensor(Shape{8, 8, 8}, 8);
  const Tensor want = oracle_dft_nd(cube);

  const auto shuffled = run_3d(AlgorithmKind::PencilPencilPencil, Shape{8, 8, 8}, Shape{2, 2},
                               OutputMode::Shuffled, 8);
  CHECK(collectives(shuffled) == 3);
  CHECK(rel_l2(shuffled.gathered.data(), want.data()) < 1e-10);
  CHECK(shuffled.run.output.dist().str() == "[(),(1),(0)]");

  const auto natural = run_3d(AlgorithmKind::PencilPencilPencil, Shape{8, 8, 8}, Shape{2, 2},
                              OutputMode::Natural, 8);
  CHECK(collectives(natural) == 4);  // three rotations plus the labeled reorder
  CHECK(rel_l2(natural.gathered.data(), want.data()) < 1e-10);
  CHECK(natural.run.output.dist().str() == "[(),(0),(1)]");
  CHECK(natural.run.logs[0].back().stage == "reorder");
  CHECK(natural.run.logs[0].back().comm_size == 4);

  SUBCASE("shuffled and natural gathers agree bitwise") {
    CHECK(shuffled.gathered == natural.gathered);
  }

  SUBCASE("1x1 grid needs no communication") {
    const auto solo = run_3d(AlgorithmKind::PencilPencilPencil, Shape{4, 4, 4}, Shape{1, 1},
                             OutputMode::Natural, 9);
    CHECK(collectives(solo) == 0);
    const Tensor ref = oracle_dft_nd(random_tensor(Shape{4, 4, 4}, 9));
    CHECK(rel_l2(solo.gathered.data(), ref.data()) < 1e-12);
  }

  SUBCASE("flat grids skip the idle slice") {
    const auto run = run_3d(AlgorithmKind::PencilPencilPencil, Shape{8, 8, 8}, Shape{2, 1},
                            OutputMode::Natural, 10);
    CHECK(collectives(run) ==
          expected_collectives(AlgorithmKind::PencilPencilPencil, Grid{Shape{2, 1}},
                               OutputMode::Natural));
    const Tensor ref = oracle_dft_nd(random_tensor(Shape{8, 8, 8}, 10));
    CHECK(rel_l2(run.gathered.data(), ref.data()) < 1e-10);
  }

  SUBCASE("non-cubic case") {
    const auto run = run_3d(AlgorithmKind::PencilPencilPencil, Shape{4, 8, 8}, Shape{2, 2},
                            OutputMode::Natural, 11);
    const Tensor ref = oracle_dft_nd(random_tensor(Shape{4, 8, 8}, 11));
    CHECK(rel_l2(run.gathered.data(), ref.data()) < 1e-10);
  }
}

TEST_CASE("volumetric decomposition") {
  const Tensor cube = random_tensor(Shape{8, 8, 8}, 12);
  const Tensor want = oracle_dft_nd(cube);

  const auto run = run_3d(AlgorithmKind::Volumetric, Shape{8, 8, 8}, Shape{2, 2, 2},
                          OutputMode::Natural, 12);
  CHECK(collectives(run) == 3);
  CHECK(rel_l2(run.gathered.data(), want.data()) < 1e-10);

  SUBCASE("the cyclic layout survives every stage") {
    CHECK(run.run.stage_dists ==
          std::vector<std::string>{"[(0),(1),(2)]", "[(0),(1),(2)]", "[(0),(1),(2)]"});
    CHECK(run.run.output.dist().str() == "[(0),(1),(2)]");
  }

  SUBCASE("single-rank grid computes the separable transform locally") {
    const auto solo = run_3d(AlgorithmKind::Volumetric, Shape{4, 4, 4}, Shape{1, 1, 1},
                             OutputMode::Natural, 13);
    CHECK(collectives(solo) == 0);
    const Tensor ref = oracle_dft_nd(random_tensor(Shape{4, 4, 4}, 13));
    CHECK(rel_l2(solo.gathered.data(), ref.data()) < 1e-12);
  }

  SUBCASE("16^3 on eight ranks") {
    const auto big = run_3d(AlgorithmKind::Volumetric, Shape{16, 16, 16}, Shape{2, 2, 2},
                            OutputMode::Natural, 14);
    CHECK(collectives(big) == 3);
    const Tensor ref = oracle_dft_nd(random_tensor(Shape{16, 16, 16}, 14));
    CHECK(rel_l2(big.gathered.data(), ref.data()) < 1e-10);
  }

  SUBCASE("delta cube transforms to all ones") {
    Tensor delta{Shape{4, 4, 4}};
    delta.data()[0] = cplx{1, 0};
    const DftProblem problem{Shape{4, 4, 4}, {}, OutputMode::Natural};
    const auto out =
        run_parallel_dft(problem, AlgorithmKind::Volumetric, Grid{Shape{2, 2, 2}}, delta);
    for (const auto& v : out.gathered.data()) CHECK(std::abs(v - cplx{1, 0}) < 1e-12);
  }

  SUBCASE("explicit per-dimension factorizations are honored") {
    const DftProblem problem{
        Shape{8, 8, 8},
        {std::pair<std::int64_t, std::int64_t>{2, 4}, std::pair<std::int64_t, std::int64_t>{4, 2},
         std::nullopt},
        OutputMode::Natural};
    const Tensor input = random_tensor(Shape{8, 8, 8}, 15);
    const auto out =
        run_parallel_dft(problem, AlgorithmKind::Volumetric, Grid{Shape{2, 2, 2}}, input);
    CHECK(rel_l2(out.gathered.data(), oracle_dft_nd(input).data()) < 1e-10);
  }

  SUBCASE("grid order is enforced") {
    const DftProblem problem{Shape{8, 8, 8}, {}, OutputMode::Natural};
    try {
      (void)run_parallel_dft(problem, AlgorithmKind::Volumetric, Grid{Shape{8}},
                             random_tensor(Shape{8, 8, 8}, 1));
      FAIL("expected GridMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::GridMismatch);
    }
  }
}

TEST_CASE("the three 3D algorithms agree with each other") {
  const Shape dims{8, 8, 8};
  const auto slab = run_3d(AlgorithmKind::SlabPencil, dims, Shape{2}, OutputMode::Natural, 20);
  const auto pencil =
      run_3d(AlgorithmKind::PencilPencilPencil, dims, Shape{2, 2}, OutputMode::Natural, 20);
  const auto vol = run_3d(AlgorithmKind::Volumetric, dims, Shape{2, 2, 2}, OutputMode::Natural, 20);
  CHECK(rel_l2(pencil.gathered.data(), slab.gathered.data()) < 1e-12);
  CHECK(rel_l2(vol.gathered.data(), slab.gathered.data()) < 1e-12);
}

TEST_CASE("expected_collectives matches observed counts") {
  struct Case {
    AlgorithmKind kind;
    Shape dims;
    Shape grid;
    OutputMode mode;
  };
  const Case cases[] = {
      {AlgorithmKind::Sixstep1d, Shape{16}, Shape{2}, OutputMode::Natural},
      {AlgorithmKind::Cyclic1d, Shape{16}, Shape{2}, OutputMode::Natural},
      {AlgorithmKind::SlabPencil, Shape{8, 8, 8}, Shape{4}, OutputMode::Shuffled},
      {AlgorithmKind::PencilPencilPencil, Shape{8, 8, 8}, Shape{1, 2}, OutputMode::Shuffled},
      {AlgorithmKind::PencilPencilPencil, Shape{8, 8, 8}, Shape{4, 2}, OutputMode::Natural},
      {AlgorithmKind::Volumetric, Shape{8, 8, 8}, Shape{2, 1, 2}, OutputMode::Natural},
  };
  std::uint64_t seed = 40;
  for (const auto& c : cases) {
    CAPTURE(algorithm_name(c.kind));
    CAPTURE(c.grid.str());
    const DftProblem problem{c.dims, {}, c.mode};
    const auto out =
        run_parallel_dft(problem, c.kind, Grid{c.grid}, random_tensor(c.dims, seed++));
    const auto count = count_collectives(out.run.logs[0]);
    CHECK(static_cast<int>(count) == expected_collectives(c.kind, Grid{c.grid}, c.mode));
  }
}

TEST_CASE("feasibility screen agrees with execution") {
  const Shape dims{4, 8, 16};
  struct Case {
    AlgorithmKind kind;
    Shape grid;
  };
  const Case cases[] = {
      {AlgorithmKind::SlabPencil, Shape{2}},  {AlgorithmKind::SlabPencil, Shape{3}},
      {AlgorithmKind::SlabPencil, Shape{8}},  {AlgorithmKind::PencilPencilPencil, Shape{2, 2}},
      {AlgorithmKind::PencilPencilPencil, Shape{8, 2}},
      {AlgorithmKind::Volumetric, Shape{2, 2, 2}},
      {AlgorithmKind::Volumetric, Shape{4, 2, 2}},
  };
  std::uint64_t seed = 60;
  for (const auto& c : cases) {
    CAPTURE(algorithm_name(c.kind));
    CAPTURE(c.grid.str());
    const bool feasible = algorithm_feasible(c.kind, dims, c.grid);
    const DftProblem problem{dims, {}, OutputMode::Natural};
    bool ran = true;
    try {
      (void)run_parallel_dft(problem, c.kind, Grid{c.grid}, random_tensor(dims, seed++));
    } catch (const Error&) {
      ran = false;
    }
    CHECK(feasible == ran);
  }
}

TEST_CASE("serial scheduling reproduces the concurrent run bitwise") {
  const Shape dims{8, 8, 8};
  const Tensor input = random_tensor(dims, 70);
  const DftProblem problem{dims, {}, OutputMode::Natural};
  SpawnOptions serial;
  serial.mode = ScheduleMode::Serial;

  const auto a =
      run_parallel_dft(problem, AlgorithmKind::Volumetric, Grid{Shape{2, 2, 2}}, input);
  const auto b =
      run_parallel_dft(problem, AlgorithmKind::Volumetric, Grid{Shape{2, 2, 2}}, input, serial);
  CHECK(a.gathered == b.gathered);
  CHECK(a.run.logs == b.run.logs);
  CHECK(a.run.stage_dists == b.run.stage_dists);
}
