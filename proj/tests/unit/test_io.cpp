#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include <doctest.h>

#include "gddim/config.hpp"
#include "gddim/error.hpp"
#include "gddim/io.hpp"

namespace fs = std::filesystem;
using gddim::Checkpoint;
using gddim::Points;

namespace {

Checkpoint small_checkpoint(std::uint64_t seed) {
  Checkpoint c;
  c.family = gddim::FamilyKind::student_t(3.0);
  c.schedule = gddim::ScheduleKind::Cosine;
  c.T = 250;
  c.net = gddim::Approximator::initialized(gddim::Architecture{2, 4, {5, 3}}, seed);
  return c;
}

void put_u32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  b.push_back(v & 0xff);
  b.push_back((v >> 8) & 0xff);
  b.push_back((v >> 16) & 0xff);
  b.push_back((v >> 24) & 0xff);
}

std::string error_text(const std::vector<std::uint8_t>& bytes) {
  try {
    gddim::deserialize_checkpoint(bytes);
  } catch (const gddim::FormatError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("checkpoint bytes follow the documented layout") {
  const Checkpoint c = small_checkpoint(1);
  std::vector<std::uint8_t> expected{'G', 'D', 'D', 'M'};
  put_u32(expected, 1);
  const std::string tag = "student_t:3";
  put_u32(expected, static_cast<std::uint32_t>(tag.size()));
  expected.insert(expected.end(), tag.begin(), tag.end());
  put_u32(expected, 1);
  put_u32(expected, 250);
  put_u32(expected, 4);
  for (std::uint32_t v : {2u, 4u, 5u, 3u}) put_u32(expected, v);
  for (double p : c.net.parameters()) put_u32(expected, std::bit_cast<std::uint32_t>(static_cast<float>(p)));
  CHECK(gddim::serialize_checkpoint(c) == expected);
}

TEST_CASE("save, load, save is byte-identical") {
  const fs::path p1 = fs::temp_directory_path() / "gddim_io_a.gddm";
  const fs::path p2 = fs::temp_directory_path() / "gddim_io_b.gddm";
  const Checkpoint c = small_checkpoint(2);
  gddim::save_checkpoint(p1, c);
  const Checkpoint back = gddim::load_checkpoint(p1);
  gddim::save_checkpoint(p2, back);
  CHECK(gddim::read_file_bytes(p1) == gddim::read_file_bytes(p2));
  CHECK(back.family == c.family);
  CHECK(back.schedule == c.schedule);
  CHECK(back.T == c.T);
  CHECK(back.net.architecture() == c.net.architecture());
  for (std::size_t i = 0; i < c.net.parameter_count(); ++i) {
    CHECK(back.net.parameters()[i] == static_cast<double>(static_cast<float>(c.net.parameters()[i])));
  }
  fs::remove(p1);
  fs::remove(p2);
}

TEST_CASE("corrupt checkpoints are rejected with specific errors") {
  const auto good = gddim::serialize_checkpoint(small_checkpoint(3));

  SUBCASE("truncated") {
    auto bytes = good;
    bytes.resize(bytes.size() - 6);
    const std::string msg = error_text(bytes);
    CHECK(msg.find("expected " + std::to_string(good.size()) + " bytes") != std::string::npos);
    CHECK(msg.find("found " + std::to_string(bytes.size())) != std::string::npos);
  }
  SUBCASE("truncated header") {
    const std::vector<std::uint8_t> bytes(good.begin(), good.begin() + 10);
    CHECK(error_text(bytes).find("truncated") != std::string::npos);
  }
  SUBCASE("trailing bytes") {
    auto bytes = good;
    bytes.push_back(0);
    CHECK(error_text(bytes).find("length mismatch") != std::string::npos);
  }
  SUBCASE("foreign magic") {
    auto bytes = good;
    bytes[0] = 'P';
    CHECK(error_text(bytes).find("magic") != std::string::npos);
  }
  SUBCASE("future version") {
    auto bytes = good;
    bytes[4] = 2;
    CHECK(error_text(bytes).find("version 2") != std::string::npos);
  }
  SUBCASE("unknown family tag") {
    auto bytes = good;
    bytes[12] = 'X';
    CHECK_FALSE(error_text(bytes).empty());
  }
  CHECK_THROWS_AS(gddim::load_checkpoint("/nonexistent/ckpt.gddm"), gddim::FormatError);
}

TEST_CASE("points CSV round trips bit-exactly") {
  std::mt19937_64 eng(5);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  Points p(50, 3);
  for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = u(eng) * std::pow(10.0, static_cast<int>(i % 13) - 9);
  p(0, 0) = 1e-300;
  p(0, 1) = -0.0;
  p(0, 2) = 1.0 / 3.0;
  std::stringstream ss;
  gddim::write_points_csv(ss, p, {"family=gaussian", "seed=4"});
  const auto table = gddim::read_csv(ss);
  CHECK(table.columns == std::vector<std::string>{"x0", "x1", "x2"});
  CHECK(table.comments == std::vector<std::string>{"family=gaussian", "seed=4"});
  REQUIRE(table.values.rows() == 50);
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    CHECK(std::bit_cast<std::uint64_t>(table.values.data()[i]) == std::bit_cast<std::uint64_t>(p.data()[i]));
  }
}

TEST_CASE("CSV text format") {
  Points p(1, 2);
  p << 0.1, 2.0;
  std::stringstream ss;
  gddim::write_points_csv(ss, p, {"note"});
  CHECK(ss.str() == "# note\nx0,x1\n0.10000000000000001,2\n");
  CHECK(gddim::format_double(0.5) == "0.5");
}

TEST_CASE("malformed CSV") {
  std::stringstream bad_number("x0,x1\n1,abc\n");
  CHECK_THROWS_AS(gddim::read_csv(bad_number), gddim::FormatError);
  std::stringstream ragged("x0,x1\n1,2\n3\n");
  CHECK_THROWS_AS(gddim::read_csv(ragged), gddim::FormatError);
  std::stringstream empty("x0\n");
  CHECK_THROWS_AS(gddim::read_csv(empty), gddim::FormatError);
}

TEST_CASE("key-value config") {
  std::stringstream in(
      "# comment\n"
      "family = gg:1.5\n"
      "\n"
      "schedule=cosine\n"
      "iterations = 10\n"
      "hidden = 32, 16\n"
      "learning_rate = 5e-4\n"
      "stop_gradient = false\n"
      "iterations = 12\n");
  const auto kv = gddim::KeyValueConfig::parse(in);
  CHECK(kv.get_int("iterations", 0) == 12);
  CHECK_NOTHROW(kv.require_known(gddim::train_config_keys()));
  const auto cfg = gddim::make_train_config(kv);
  CHECK(cfg.family == gddim::FamilyKind::generalized_gaussian(1.5));
  CHECK(cfg.schedule == gddim::ScheduleKind::Cosine);
  CHECK(cfg.iterations == 12);
  CHECK(cfg.arch.hidden == std::vector<int>{32, 16});
  CHECK(cfg.learning_rate == 5e-4);
  CHECK_FALSE(cfg.stop_gradient);
  CHECK(cfg.batch_size == 256);

  std::stringstream unknown("colour = red\n");
  CHECK_THROWS_AS(gddim::KeyValueConfig::parse(unknown).require_known(gddim::train_config_keys()),
                  gddim::ConfigError);
  std::stringstream no_eq("family gaussian\n");
  CHECK_THROWS_AS(gddim::KeyValueConfig::parse(no_eq), gddim::ConfigError);
  std::stringstream bad_int("T = ten\n");
  CHECK_THROWS_AS(gddim::make_train_config(gddim::KeyValueConfig::parse(bad_int)), gddim::ConfigError);
  CHECK(gddim::parse_int_list("4,5 ,6") == std::vector<int>{4, 5, 6});
}
