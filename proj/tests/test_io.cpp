#include "doctest.h"

#include <filesystem>

#include "hypervekua/io.hpp"

using namespace hypervekua;

TEST_CASE("real formatting round trips") {
  for (double v : {0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0}) {
    CHECK(parse_real(format_real(v)) == v);
  }
  CHECK(parse_real("  2.5 ") == 2.5);
  CHECK_THROWS_AS(parse_real("abc"), FormatError);
  CHECK_THROWS_AS(parse_real("1.5x"), FormatError);
}

TEST_CASE("csv and json pairs") {
  const hnum z{0.1, -2.0 / 7.0};
  CHECK(parse_csv_pair(format_csv_pair(z)) == z);
  CHECK(parse_csv_pair(" 1 , -2 ") == hnum{1, -2});
  CHECK_THROWS_AS(parse_csv_pair("1"), FormatError);

  const nlohmann::json j = z;
  CHECK(j.is_array());
  CHECK(j.get<hnum>() == z);
  CHECK_THROWS_AS(nlohmann::json::parse("[1]").get<hnum>(), FormatError);
}

TEST_CASE("git blob hash") {
  // `printf 'hello\n' | git hash-object --stdin`
  CHECK(git_blob_hash("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
  CHECK(git_blob_hash("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
}

TEST_CASE("atomic write") {
  const auto dir = std::filesystem::temp_directory_path() / "hypervekua_test_io";
  std::filesystem::remove_all(dir);
  const auto path = dir / "nested" / "file.txt";
  write_file_atomic(path, "first");
  write_file_atomic(path, "second");
  CHECK(read_file(path) == "second");
  CHECK_FALSE(std::filesystem::exists(path.string() + ".tmp"));
  std::filesystem::remove_all(dir);
}
