#include <doctest.h>

#include "swing/reports.hpp"

#include <filesystem>
#include <fstream>

using namespace swing::reports;

TEST_CASE("append assigns dense ids and links") {
  MemoryStore s;
  CHECK(s.append(std::nullopt, std::nullopt, "Produce", {{"x", 1}}) == 0);
  CHECK(s.append(0, std::nullopt, "CmdStep", {}) == 1);
  CHECK(s.append(0, std::nullopt, "CmdStep", {}) == 2);
  CHECK(s.append(std::nullopt, 1, "MatchStart", {}) == 3);
  CHECK(s.next_of(0) == std::vector<ReportId>{1, 2});
  CHECK(s.children_of(1) == std::vector<ReportId>{3});
  CHECK(s.next_of(2).empty());
  CHECK(s.get(0).payload["x"] == 1);
  CHECK(s.get(3).parent == 1);
  CHECK_THROWS_AS(s.get(17), NotFound);
}

TEST_CASE("dangling references are rejected") {
  MemoryStore s;
  CHECK_THROWS_AS(s.append(99, std::nullopt, "CmdStep", {}), DanglingReference);
  CHECK_THROWS_AS(s.append(std::nullopt, 0, "CmdStep", {}), DanglingReference);
  CHECK(s.size() == 0);
  NullStore n;
  CHECK_THROWS_AS(n.append(5, std::nullopt, "CmdStep", {}), DanglingReference);
}

TEST_CASE("null store hands out ids only") {
  NullStore n;
  CHECK(n.append(std::nullopt, std::nullopt, "Produce", {}) == 0);
  CHECK(n.append(0, std::nullopt, "CmdStep", {}) == 1);
  CHECK_THROWS_AS(n.get(0), NotFound);
  CHECK_FALSE(n.retains());
  CHECK(n.since(0).empty());
}

TEST_CASE("ndjson file format round-trips") {
  auto dir = std::filesystem::temp_directory_path() / "swing_test_reports";
  std::filesystem::remove_all(dir);
  {
    NdjsonStore s(dir, "sess");
    s.append(std::nullopt, std::nullopt, "Produce", {{"b", 2}, {"a", 1}});
    s.append(0, std::nullopt, "CmdStep", {{"text", "skip"}});
    s.append(std::nullopt, 1, "MatchStart", nullptr);
  }
  std::ifstream in(dir / "sess.ndjson");
  std::string first;
  std::getline(in, first);
  CHECK(first == R"({"id":0,"previous":null,"parent":null,"kind":"Produce","payload":{"a":1,"b":2}})");
  auto loaded = load_ndjson(dir / "sess.ndjson");
  CHECK(loaded->size() == 3);
  CHECK(loaded->get(2).parent == 1);
  CHECK(loaded->get(1).payload["text"] == "skip");
  CHECK(loaded->next_of(0) == std::vector<ReportId>{1});
  std::filesystem::remove_all(dir);
}

TEST_CASE("previous and parent relations are acyclic by construction") {
  MemoryStore s;
  s.append(std::nullopt, std::nullopt, "Produce", {});
  for (int i = 1; i < 50; ++i)
    s.append(i - 1, i % 3 == 0 ? std::optional<ReportId>(i - 2) : std::nullopt, "CmdStep", {});
  for (ReportId i = 0; i < 50; ++i) {
    auto r = s.get(i);
    if (r.previous)
      CHECK(*r.previous < i);
    if (r.parent)
      CHECK(*r.parent < i);
  }
}
