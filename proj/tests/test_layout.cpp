#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <vector>

#include "gridla/layout.hpp"

using namespace gridla;

namespace {

const LayoutKind kKinds[] = {LayoutKind::ColumnWrapped, LayoutKind::RowWrapped,
                             LayoutKind::Blocked, LayoutKind::Scattered};

}  // namespace

TEST_CASE("column wrapped placement") {
  const Layout lay(LayoutKind::ColumnWrapped, 2, 4, 6);
  // column j lives on processor j mod P
  CHECK(lay.place(0, 0).proc_row == 0);
  CHECK(lay.place(0, 0).proc_col == 0);
  CHECK(lay.place(3, 5).proc_row == 0);  // proc id 1 -> (0, 1)
  CHECK(lay.place(3, 5).proc_col == 1);
  CHECK(lay.place(2, 4).local_col == 1);  // second column held there
  CHECK(lay.place(2, 4).local_row == 2);
}

TEST_CASE("scattered placement") {
  const Layout lay(LayoutKind::Scattered, 2, 6, 6);
  CHECK(lay.place(3, 4).proc_row == 1);
  CHECK(lay.place(3, 4).proc_col == 0);
  CHECK(lay.place(3, 4).local_row == 1);
  CHECK(lay.place(3, 4).local_col == 2);
}

TEST_CASE("blocked pads to multiples of s") {
  const Layout lay(LayoutKind::Blocked, 4, 10, 6);
  CHECK(lay.padded_rows() == 12);
  CHECK(lay.padded_cols() == 8);
  CHECK(lay.place(0, 0).proc_row == 0);
  CHECK(lay.place(9, 5).proc_row == 3);
  CHECK(lay.place(9, 5).proc_col == 2);
}

TEST_CASE("place and global_of are inverse") {
  for (LayoutKind kind : kKinds) {
    for (int s : {1, 2, 3}) {
      const Layout lay(kind, s, 7, 5);
      for (int i = 0; i < 7; ++i) {
        for (int j = 0; j < 5; ++j) {
          const Placement p = lay.place(i, j);
          const auto [gi, gj] =
              lay.global_of(p.proc_row, p.proc_col, p.local_row, p.local_col);
          CHECK(gi == i);
          CHECK(gj == j);
        }
      }
    }
  }
}

TEST_CASE("distribute and collect round-trip") {
  const DenseMatrix a = generate(MatrixKind::RandomUniform, 9, 7, 21);
  for (LayoutKind kind : kKinds) {
    for (int s : {1, 2, 4}) {
      const Layout lay(kind, s, 9, 7);
      const std::vector<DenseMatrix> locals = lay.distribute(a);
      REQUIRE(int(locals.size()) == s * s);
      CHECK(lay.collect(locals) == a);
    }
  }
}

TEST_CASE("distribution covers each entry exactly once") {
  for (LayoutKind kind : kKinds) {
    const Layout lay(kind, 3, 8, 8);
    std::set<std::pair<int, int>> seen;
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 8; ++j) {
        const Placement p = lay.place(i, j);
        CHECK(p.proc_row >= 0);
        CHECK(p.proc_row < 3);
        CHECK(p.proc_col >= 0);
        CHECK(p.proc_col < 3);
        const auto [li, lj] = lay.local_extent(p.proc_row, p.proc_col);
        CHECK(p.local_row < li);
        CHECK(p.local_col < lj);
        seen.insert({i, j});
      }
    }
    CHECK(seen.size() == 64);
  }
}

TEST_CASE("wrap permutation small cases") {
  const Permutation p42 = pi_permutation(4, 2);
  CHECK(p42.map() == std::vector<int>({0, 2, 1, 3}));
  const Permutation p63 = pi_permutation(6, 3);
  CHECK(p63.map() == std::vector<int>({0, 3, 1, 4, 2, 5}));
}

TEST_CASE("wrap permutation is a bijection whenever s divides k") {
  for (int k = 2; k <= 24; ++k) {
    for (int s = 1; s <= k; ++s) {
      if (k % s != 0) continue;
      const Permutation p = pi_permutation(k, s);
      std::set<int> img(p.map().begin(), p.map().end());
      CHECK(int(img.size()) == k);
      CHECK(p[k - 1] == k - 1);
    }
  }
}

TEST_CASE("wrap permutation rejects bad arguments") {
  CHECK_THROWS_AS(pi_permutation(5, 2), std::invalid_argument);
  CHECK_THROWS_AS(pi_permutation(1, 1), std::invalid_argument);
}

TEST_CASE("scattered equals blocked after the wrap permutations") {
  // deterministic set of shapes, all with s | m and s | n
  struct Shape {
    int m, n, s;
  };
  std::vector<Shape> shapes;
  std::uint64_t state = 12345;
  auto next = [&state](int lo, int hi) {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return lo + int((state >> 33) % std::uint64_t(hi - lo + 1));
  };
  while (int(shapes.size()) < 20) {
    const int s = next(1, 4);
    shapes.push_back({s * next(2, 8), s * next(2, 8), s});
  }
  int id = 0;
  for (const Shape& sh : shapes) {
    const DenseMatrix a =
        generate(MatrixKind::RandomUniform, sh.m, sh.n, 100 + id++);
    CHECK(scattered_blocked_equivalent(a, sh.s));
  }
}

TEST_CASE("layout constructor validation") {
  CHECK_THROWS_AS(Layout(LayoutKind::Scattered, 0, 4, 4),
                  std::invalid_argument);
  CHECK_THROWS_AS(Layout(LayoutKind::Scattered, 2, 0, 4),
                  std::invalid_argument);
}
