#include <catch2/catch_amalgamated.hpp>

#include <unistd.h>

#include <filesystem>
#include <string>
#include <vector>

#include "typik/io.hpp"

using namespace typik;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("typik_io_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

}  // namespace

TEST_CASE("format_double round-trips", "[io]") {
  for (double v : {0.0, 1.0, -1.5, 0.1, 1e-300, 3.141592653589793,
                   123456789.123456789, -2.2250738585072014e-308}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("dataset CSV ingestion by shape", "[io]") {
  TempDir tmp;
  const std::string scalar = (tmp.path / "scalar.csv").string();
  write_text_file(scalar, "1.5\n-2.25\n# a comment\n3\n");
  const Dataset ds = read_dataset_csv(scalar, DataShape::scalar_sample, false);
  CHECK(ds.n == 3);
  CHECK(ds.values == std::vector<double>{1.5, -2.25, 3.0});

  const std::string paired = (tmp.path / "pairs.csv").string();
  write_text_file(paired, "x1,x2\n0,2\n1,3\n");
  const Dataset dp = read_dataset_csv(paired, DataShape::paired_sample, true);
  CHECK(dp.n == 2);
  CHECK(dp.pair(0) == std::pair<double, double>{0.0, 2.0});
  CHECK(dp.pair(1) == std::pair<double, double>{1.0, 3.0});

  const std::string vec = (tmp.path / "vec.csv").string();
  write_text_file(vec, "16.1\n0\n0\n0\n");
  const Dataset dv =
      read_dataset_csv(vec, DataShape::vector_observation, false);
  CHECK(dv.shape == DataShape::vector_observation);
  CHECK(dv.n == 4);
}

TEST_CASE("dataset CSV error paths", "[io]") {
  TempDir tmp;
  CHECK_THROWS_AS(
      read_dataset_csv((tmp.path / "missing.csv").string(),
                       DataShape::scalar_sample, false),
      IoError);

  const std::string bad = (tmp.path / "bad.csv").string();
  write_text_file(bad, "1.0\nnot_a_number\n");
  CHECK_THROWS_AS(read_dataset_csv(bad, DataShape::scalar_sample, false),
                  IoError);

  const std::string narrow = (tmp.path / "narrow.csv").string();
  write_text_file(narrow, "1.0\n2.0\n");
  CHECK_THROWS_AS(read_dataset_csv(narrow, DataShape::paired_sample, false),
                  IoError);

  const std::string empty = (tmp.path / "empty.csv").string();
  write_text_file(empty, "# only a comment\n");
  CHECK_THROWS_AS(read_dataset_csv(empty, DataShape::scalar_sample, false),
                  IoError);
}

TEST_CASE("contour grid serialization", "[io]") {
  TempDir tmp;
  ContourGrid cg;
  cg.model_id = ModelId::stein;
  for (double phi : {1.0, 2.0, 3.0}) cg.grid.push_back(stein_point(phi));
  cg.tau = {0.25, 1.0, 0.5};
  cg.estimator_index = 1;
  cg.mc_samples = 500;
  cg.lambda = 10.0;
  cg.master_seed = 42;
  cg.warnings = 1;

  const std::string path = (tmp.path / "contour.csv").string();
  write_contour(cg, path);

  const std::string csv = read_text_file(path);
  CHECK(csv.find("coord_1,tau\n") == 0);
  CHECK(csv.find("2,1\n") != std::string::npos);

  const auto j =
      nlohmann::ordered_json::parse(read_text_file((tmp.path / "contour.json").string()));
  CHECK(j["model_id"] == "stein");
  CHECK(j["lambda"].get<double>() == 10.0);
  CHECK(j["M"].get<std::size_t>() == 500);
  CHECK(j["master_seed"].get<std::uint64_t>() == 42);
  CHECK(j["warnings"].get<std::size_t>() == 1);
}

TEST_CASE("write failures raise IoError", "[io]") {
  CHECK_THROWS_AS(write_text_file("/nonexistent_dir_xyz/file.txt", "x"),
                  IoError);
}
