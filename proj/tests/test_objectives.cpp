#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "subfw/matio.hpp"
#include "subfw/objectives.hpp"
#include "subfw/rng.hpp"

using namespace subfw;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

LeastSquaresObjective random_ls(int n, int d, Rng& rng) {
  std::vector<double> X(static_cast<std::size_t>(n) * d);
  for (double& v : X) v = rng.normal();
  std::vector<double> y(static_cast<std::size_t>(n));
  for (double& v : y) v = rng.normal();
  return LeastSquaresObjective::from_dense(n, d, std::move(X), std::move(y));
}

std::vector<double> central_difference_gradient(ObjectiveModel& obj,
                                                const std::vector<double>& x,
                                                double h = 1e-6) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::vector<double> plus = x, minus = x;
    plus[i] += h;
    minus[i] -= h;
    g[i] = (obj.value_at(plus) - obj.value_at(minus)) / (2.0 * h);
  }
  return g;
}

}  // namespace

TEST_CASE("gradient examples") {
  SUBCASE("identity quadratic") {
    QuadraticObjective obj(std::vector<double>(2, 0.0));
    obj.reset({1.0, 2.0});
    const std::vector<double> g = obj.full_gradient();
    CHECK(g[0] == doctest::Approx(1.0));
    CHECK(g[1] == doctest::Approx(2.0));
  }
  SUBCASE("least squares at zero") {
    LeastSquaresObjective obj = LeastSquaresObjective::from_dense(
        2, 2, {1.0, 0.0, 0.0, 1.0}, {1.0, 0.0});
    const std::vector<double> g = obj.full_gradient();
    CHECK(g[0] == doctest::Approx(-1.0));
    CHECK(g[1] == doctest::Approx(0.0));
  }
  SUBCASE("matches central differences on random instances") {
    Rng rng(3);
    LeastSquaresObjective obj = random_ls(5, 3, rng);
    std::vector<double> x = {0.3, -0.7, 1.1};
    obj.reset(x);
    const std::vector<double> g = obj.full_gradient();
    const std::vector<double> fd = central_difference_gradient(obj, x);
    for (int i = 0; i < 3; ++i)
      CHECK(g[static_cast<std::size_t>(i)] ==
            doctest::Approx(fd[static_cast<std::size_t>(i)]).epsilon(1e-6));
  }
}

TEST_CASE("gradient vs finite differences across objectives") {
  Rng rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    LeastSquaresObjective ls = random_ls(6, 4, rng);
    std::vector<double> x(4);
    for (double& v : x) v = rng.normal();
    ls.reset(x);
    const auto g = ls.full_gradient();
    const auto fd = central_difference_gradient(ls, x);
    for (std::size_t i = 0; i < x.size(); ++i)
      CHECK(g[i] == doctest::Approx(fd[i]).epsilon(1e-5));

    std::vector<double> center(4);
    for (double& v : center) v = rng.normal();
    QuadraticObjective q(center);
    q.reset(x);
    const auto qg = q.full_gradient();
    const auto qfd = central_difference_gradient(q, x);
    for (std::size_t i = 0; i < x.size(); ++i)
      CHECK(qg[i] == doctest::Approx(qfd[i]).epsilon(1e-5));
  }
}

TEST_CASE("partial gradient") {
  Rng rng(5);
  LeastSquaresObjective obj = random_ls(5, 3, rng);
  obj.reset({0.2, 0.4, -0.6});
  const std::vector<double> full = obj.full_gradient();

  SUBCASE("full mask equals the gradient") {
    const std::vector<double> part = obj.partial_gradient({0, 1, 2});
    for (int i = 0; i < 3; ++i)
      CHECK(part[static_cast<std::size_t>(i)] ==
            full[static_cast<std::size_t>(i)]);
  }
  SUBCASE("single coordinate") {
    const std::vector<double> part = obj.partial_gradient({2});
    CHECK(part.size() == 1);
    CHECK(part[0] == doctest::Approx(full[2]).epsilon(1e-12));
  }
  SUBCASE("empty request") {
    const std::vector<double> part = obj.partial_gradient({});
    CHECK(part.empty());
  }
  SUBCASE("out-of-range coordinate rejected") {
    CHECK_THROWS_AS(obj.partial_gradient({3}), ContractViolation);
  }
}

TEST_CASE("incremental residual maintenance") {
  SUBCASE("zero step leaves the residual unchanged") {
    Rng rng(7);
    LeastSquaresObjective obj = random_ls(4, 3, rng);
    const std::vector<double> before = obj.residual();
    obj.apply_step(Atom::unit(0, 1.0, "a"), 1.0, 0.0);
    for (std::size_t i = 0; i < before.size(); ++i)
      CHECK(obj.residual()[i] == doctest::Approx(before[i]));
  }
  SUBCASE("single fw step from zero") {
    LeastSquaresObjective obj = LeastSquaresObjective::from_dense(
        2, 2, {1.0, 2.0, 3.0, 4.0}, {1.0, 1.0});
    const Atom s = Atom::unit(1, 2.0, "s");  // 2 e_1
    obj.apply_step(s, 1.0 - 0.5, 0.5);
    // r = 0.5 X s - y + 0.5 (-y) ... = gamma X s - y at x0 = 0
    CHECK(obj.residual()[0] == doctest::Approx(0.5 * 2.0 * 3.0 - 1.0));
    CHECK(obj.residual()[1] == doctest::Approx(0.5 * 2.0 * 4.0 - 1.0));
  }
  SUBCASE("100 random steps match a recompute") {
    Rng rng(13);
    LeastSquaresObjective obj = random_ls(8, 5, rng);
    for (int step = 0; step < 100; ++step) {
      const int coord = static_cast<int>(rng.below(5));
      const Atom v = Atom::unit(coord, rng.normal(),
                                "a" + std::to_string(coord) +
                                    std::to_string(step));
      const double gamma = 0.5 * rng.uniform01();
      obj.apply_step(v, 1.0 - gamma, gamma);
    }
    const std::vector<double> fresh = obj.recompute_residual();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < fresh.size(); ++i) {
      num += (fresh[i] - obj.residual()[i]) * (fresh[i] - obj.residual()[i]);
      den += fresh[i] * fresh[i];
    }
    CHECK(std::sqrt(num) <= 1e-8 * std::max(1.0, std::sqrt(den)));
  }
}

TEST_CASE("exact line search") {
  SUBCASE("endpoint minimizer") {
    QuadraticObjective obj(std::vector<double>(2, 0.0));
    obj.reset({1.0, 0.0});
    CHECK(obj.line_search_dense({-1.0, 0.0}, 1.0) == doctest::Approx(1.0));
  }
  SUBCASE("interior analytic minimizer") {
    QuadraticObjective obj(std::vector<double>(2, 0.0));
    obj.reset({1.0, 0.0});
    CHECK(obj.line_search_dense({-2.0, 0.0}, 1.0) == doctest::Approx(0.5));
  }
  SUBCASE("flat direction returns zero") {
    LeastSquaresObjective obj = LeastSquaresObjective::from_dense(
        2, 2, {1.0, 0.0, 0.0, 0.0}, {0.0, 0.0});
    CHECK(obj.line_search_dense({0.0, 1.0}, 1.0) == doctest::Approx(0.0));
  }
  SUBCASE("matches the golden-section oracle") {
    Rng rng(29);
    for (int trial = 0; trial < 50; ++trial) {
      LeastSquaresObjective obj = random_ls(6, 4, rng);
      std::vector<double> x(4), dir(4);
      for (double& v : x) v = 0.3 * rng.normal();
      for (double& v : dir) v = rng.normal();
      obj.reset(x);
      const double gmax = 0.25 + rng.uniform01();
      const double got = obj.line_search_dense(dir, gmax);
      const double ref = golden_section_minimize(
          [&](double gamma) {
            std::vector<double> xt = x;
            for (std::size_t i = 0; i < xt.size(); ++i)
              xt[i] += gamma * dir[i];
            return obj.value_at(xt);
          },
          gmax);
      CHECK(got == doctest::Approx(ref).epsilon(1e-8));
    }
  }
  SUBCASE("optimality against random gammas") {
    Rng rng(31);
    LeastSquaresObjective obj = random_ls(6, 4, rng);
    std::vector<double> x = {0.1, -0.2, 0.3, 0.0};
    std::vector<double> dir = {1.0, 0.5, -1.0, 0.25};
    obj.reset(x);
    const double gmax = 2.0;
    const double star = obj.line_search_dense(dir, gmax);
    std::vector<double> xs = x;
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] += star * dir[i];
    const double fstar = obj.value_at(xs);
    for (int t = 0; t < 100; ++t) {
      const double gamma = gmax * rng.uniform01();
      std::vector<double> xt = x;
      for (std::size_t i = 0; i < xt.size(); ++i) xt[i] += gamma * dir[i];
      CHECK(fstar <= obj.value_at(xt) + 1e-10);
    }
  }
}

TEST_CASE("curvature upper bound") {
  SUBCASE("identity quadratic over the unit l1 ball") {
    QuadraticObjective obj(std::vector<double>(4, 0.0));
    CHECK(obj.curvature_upper_bound(2.0) == doctest::Approx(4.0));
  }
  SUBCASE("radius 40 ball") {
    QuadraticObjective obj(std::vector<double>(4, 0.0));
    CHECK(obj.curvature_upper_bound(80.0) == doctest::Approx(6400.0));
  }
  SUBCASE("least squares bound dominates random Rayleigh quotients") {
    Rng rng(41);
    std::vector<double> X(200 * 50);
    for (double& v : X) v = rng.normal();
    LeastSquaresObjective obj = LeastSquaresObjective::from_dense(
        200, 50, std::move(X), std::vector<double>(200, 0.0));
    const double lip = obj.lipschitz_bound();
    // ||X v||^2 / ||v||^2 <= bound for random probes v.
    const ColumnSource& cols = obj.columns();
    for (int t = 0; t < 1000; ++t) {
      std::vector<double> v(50);
      double vnorm2 = 0.0;
      for (double& vi : v) {
        vi = rng.normal();
        vnorm2 += vi * vi;
      }
      std::vector<double> xv(200, 0.0);
      for (int j = 0; j < 50; ++j) {
        const double* col = cols.column(j);
        for (int i = 0; i < 200; ++i)
          xv[static_cast<std::size_t>(i)] += v[static_cast<std::size_t>(j)] * col[i];
      }
      double xv2 = 0.0;
      for (double u : xv) xv2 += u * u;
      CHECK(xv2 / vnorm2 <= lip);
    }
  }
  SUBCASE("dominates the empirical curvature on random triples") {
    Rng rng(43);
    QuadraticObjective obj(std::vector<double>(6, 0.0));
    const double radius = 1.0;
    const double bound = obj.curvature_upper_bound(2.0 * radius);
    for (int t = 0; t < 10000; ++t) {
      // x, s in the l1 ball via random signed splits
      std::vector<double> x(6, 0.0), s(6, 0.0);
      x[rng.below(6)] = radius * (2.0 * rng.uniform01() - 1.0);
      s[rng.below(6)] = radius * (2.0 * rng.uniform01() - 1.0);
      const double gamma = std::max(1e-6, rng.uniform01());
      std::vector<double> y(6);
      for (int i = 0; i < 6; ++i)
        y[static_cast<std::size_t>(i)] =
            x[static_cast<std::size_t>(i)] +
            gamma * (s[static_cast<std::size_t>(i)] -
                     x[static_cast<std::size_t>(i)]);
      obj.reset(x);
      const std::vector<double> g = obj.full_gradient();
      double lin = 0.0;
      for (int i = 0; i < 6; ++i)
        lin += g[static_cast<std::size_t>(i)] *
               (y[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i)]);
      const double curv =
          2.0 / (gamma * gamma) * (obj.value_at(y) - obj.value_at(x) - lin);
      CHECK(curv <= bound + 1e-9);
    }
  }
}

TEST_CASE("matrix file format") {
  const std::string mat = temp_path("subfw_test_mat.fwmat");
  const std::string vec = temp_path("subfw_test_vec.fwvec");

  SUBCASE("round trip and header size") {
    write_matrix_file(mat, 2, 3, {1, 2, 3, 4, 5, 6});
    CHECK(std::filesystem::file_size(mat) == kMatHeaderBytes + 6 * 8);
    int rows = 0, cols = 0;
    const std::vector<double> back = read_matrix_file(mat, &rows, &cols);
    CHECK(rows == 2);
    CHECK(cols == 3);
    CHECK(back == std::vector<double>{1, 2, 3, 4, 5, 6});

    write_vector_file(vec, {7, 8});
    CHECK(std::filesystem::file_size(vec) == kVecHeaderBytes + 2 * 8);
    CHECK(read_vector_file(vec) == std::vector<double>{7, 8});
  }
  SUBCASE("corrupt magic") {
    std::ofstream bad(mat, std::ios::binary);
    bad << "NOTMAGIC" << std::string(64, '\0');
    bad.close();
    CHECK_THROWS_AS(read_matrix_header(mat), FileFormatError);
    try {
      read_matrix_header(mat);
    } catch (const FileFormatError& e) {
      CHECK(e.kind() == FileFormatError::Kind::BadMagic);
    }
  }
  SUBCASE("truncated payload") {
    write_matrix_file(mat, 2, 3, {1, 2, 3, 4, 5, 6});
    std::filesystem::resize_file(mat, kMatHeaderBytes + 5 * 8);
    try {
      read_matrix_header(mat);
      CHECK(false);
    } catch (const FileFormatError& e) {
      CHECK(e.kind() == FileFormatError::Kind::Truncated);
    }
  }
  SUBCASE("dimension mismatch") {
    write_matrix_file(mat, 2, 2, {1, 2, 3, 4});
    write_vector_file(vec, {1, 2, 3});
    try {
      read_chunked_matrix(mat, vec, 1);
      CHECK(false);
    } catch (const FileFormatError& e) {
      CHECK(e.kind() == FileFormatError::Kind::DimensionMismatch);
    }
  }
}

TEST_CASE("chunk-backed least squares") {
  Rng rng(53);
  const int n = 20, d = 13;
  std::vector<double> X(static_cast<std::size_t>(n) * d);
  for (double& v : X) v = rng.normal();
  std::vector<double> y(static_cast<std::size_t>(n));
  for (double& v : y) v = rng.normal();

  const std::string mat = temp_path("subfw_chunk.fwmat");
  const std::string vec = temp_path("subfw_chunk.fwvec");
  write_matrix_file(mat, n, d, X);
  write_vector_file(vec, y);

  LeastSquaresObjective mem =
      LeastSquaresObjective::from_dense(n, d, X, y);
  std::vector<double> x(static_cast<std::size_t>(d));
  for (double& v : x) v = 0.2 * rng.normal();
  mem.reset(x);
  const std::vector<double> gmem = mem.full_gradient();

  SUBCASE("single chunk equals the in-memory path bitwise") {
    LeastSquaresObjective chunked = read_chunked_matrix(mat, vec, d);
    chunked.reset(x);
    const std::vector<double> g = chunked.full_gradient();
    for (int j = 0; j < d; ++j)
      CHECK(g[static_cast<std::size_t>(j)] == gmem[static_cast<std::size_t>(j)]);
  }
  SUBCASE("one-column chunks match within 1e-12") {
    LeastSquaresObjective chunked = read_chunked_matrix(mat, vec, 1);
    chunked.reset(x);
    const std::vector<double> g = chunked.full_gradient();
    for (int j = 0; j < d; ++j)
      CHECK(g[static_cast<std::size_t>(j)] ==
            doctest::Approx(gmem[static_cast<std::size_t>(j)]).epsilon(1e-12));
  }
  SUBCASE("partial gradients stream only the needed chunks") {
    LeastSquaresObjective chunked = read_chunked_matrix(mat, vec, 4);
    chunked.reset(x);
    const std::vector<double> part = chunked.partial_gradient({1, 7, 12});
    CHECK(part[0] == doctest::Approx(gmem[1]).epsilon(1e-12));
    CHECK(part[1] == doctest::Approx(gmem[7]).epsilon(1e-12));
    CHECK(part[2] == doctest::Approx(gmem[12]).epsilon(1e-12));
  }
}
