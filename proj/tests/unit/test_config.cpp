#include "vinedep/config.hpp"
#include "vinedep/data_io.hpp"
#include "vinedep/error.hpp"

#include <doctest.h>

#include <filesystem>

using namespace vinedep;

TEST_CASE("defaults are marked as defaulted") {
  const PipelineConfig c;
  CHECK_NOTHROW(c.validate());
  for (const auto& key : config_keys()) CHECK(c.defaulted(key));
  CHECK(c.get("tau_tc") == "0.2");
  CHECK(c.get("m") == "auto");
  CHECK(c.get("seed") == "none");
  CHECK(c.get("t_rowsum") == "auto");
  CHECK(c.get("groups") == "all");
  CHECK(c.get("draw") == "0.25,0.15,0.3");
  CHECK(c.get("label") == "0.5,0.3,0.4");
  CHECK(c.get("max_level") == "3");
  CHECK(c.get("stop_threshold") == "0.1");
  CHECK(c.get("tau_weak") == "0.3");
  CHECK(c.needs_seed());
}

TEST_CASE("set records values and sources") {
  PipelineConfig c;
  c.set("tau", "0.35");
  CHECK(c.tau_tc == 0.35);
  CHECK(c.tau_cdg == 0.35);
  CHECK(c.tau_foci == 0.35);
  CHECK(c.source("tau_foci") == "user");
  CHECK(c.defaulted("tau_weak"));
  c.set("m", "4");
  c.set("seed", "17");
  c.set("groups", "1, 3");
  c.set(" method ", " vine ");
  CHECK(*c.m == 4);
  CHECK(*c.seed == 17);
  CHECK(c.groups == std::vector<std::size_t>{1, 3});
  CHECK(c.method == "vine");
  CHECK_FALSE(c.needs_seed());
  c.set("m", "auto");
  CHECK_FALSE(c.m.has_value());
  CHECK_THROWS_AS(c.set("tau_tc", "abc"), InvalidArgument);
  CHECK_THROWS_AS(c.set("nonsense", "1"), InvalidArgument);
  CHECK_THROWS_AS(c.set("draw", "0.1,0.2"), InvalidArgument);
  CHECK_THROWS_AS(c.set("preset", "mouse"), InvalidArgument);
}

TEST_CASE("validation") {
  auto bad = [](const char* key, const char* value) {
    PipelineConfig c;
    c.set(key, value);
    return c;
  };
  CHECK_THROWS_AS(bad("tau_cdg", "1").validate(), InvalidArgument);
  CHECK_THROWS_AS(bad("t_max", "-0.1").validate(), InvalidArgument);
  CHECK_THROWS_AS(bad("method", "pc").validate(), InvalidArgument);
  CHECK_THROWS_AS(bad("format", "xlsx").validate(), InvalidArgument);
  CHECK_THROWS_AS(bad("graph_format", "svg").validate(), InvalidArgument);
  CHECK_THROWS_AS(bad("max_level", "0").validate(), InvalidArgument);
  CHECK_THROWS_AS(bad("restarts", "0").validate(), InvalidArgument);
  CHECK_THROWS_AS(bad("m", "0").validate(), InvalidArgument);
  CHECK_THROWS_AS(bad("groups", "0,1").validate(), InvalidArgument);
  CHECK_THROWS_AS(bad("draw", "0.2,1.5,0.2").validate(), InvalidArgument);
  CHECK_NOTHROW(bad("t_rowsum", "2.5").validate());
}

TEST_CASE("presets") {
  const auto t = make_preset("table1");
  CHECK(t.tau_tc == 0.2);
  CHECK(t.max_level == 2);
  CHECK(t.vine.draw == std::array<double, 3>{0.2, 0.2, 0.2});
  CHECK(t.source("max_level") == "preset:table1");
  CHECK(t.get("preset") == "table1");

  const auto y = make_preset("yeast");
  CHECK(y.vine.draw == std::array<double, 3>{0.25, 0.15, 0.30});
  CHECK(y.vine.label == std::array<double, 3>{0.5, 0.3, 0.4});

  const auto p = make_preset("prostate");
  CHECK(p.vine.draw == std::array<double, 3>{0.30, 0.15, 0.30});
  CHECK(p.tau_cdg == 0.15);
  CHECK(p.stop_threshold == 0.1);
  CHECK(preset_names().size() == 3);
}

TEST_CASE("config text") {
  PipelineConfig c;
  apply_config_text(c, "# run\npreset = table1\n\ntau_cdg = 0.3  # stricter\nseed=5\n", "file");
  CHECK(c.tau_cdg == 0.3);
  CHECK(c.tau_tc == 0.2);
  CHECK(c.source("tau_cdg") == "file");
  CHECK(c.source("tau_tc") == "preset:table1");
  CHECK(*c.seed == 5);
  CHECK_THROWS_AS(apply_config_text(c, "tau_tc 0.3\n"), InvalidArgument);

  const auto text = format_config(c);
  CHECK(text.find("tau_cdg = 0.3\n") != std::string::npos);
  CHECK(text.rfind("preset = table1\n", 0) == 0);
  PipelineConfig again;
  apply_config_text(again, text);
  CHECK(format_config(again) == text);

  const auto path = std::filesystem::temp_directory_path() / "vinedep_config_test.conf";
  write_text(path, "method = cdg\n");
  CHECK(load_config(path).method == "cdg");
  std::filesystem::remove(path);
}
